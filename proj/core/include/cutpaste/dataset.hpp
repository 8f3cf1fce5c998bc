#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cutpaste/types.hpp"

namespace cutpaste {

struct ManifestEntry {
  std::string sample_id;
  std::filesystem::path image_path;
  std::filesystem::path mask_path;
  std::string aoi_id;
  std::string date;  // ISO-8601, carried through untouched
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

// CSV with header `sample_id,image_path,mask_path,aoi_id,date`. Relative
// paths resolve against the manifest's directory; referenced files must
// exist. Errors name the offending row.
DatasetManifest load_manifest(const std::filesystem::path& path);

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

// Loads the sample (image + mask) behind one manifest entry.
Sample load_sample(const ManifestEntry& entry);

// Non-ignore pixel counts per class over all masks.
std::vector<std::uint64_t> class_histogram(const DatasetManifest& manifest, const ClassMap& class_map,
                                           unsigned threads = 1);

std::string histogram_to_json(const std::vector<std::uint64_t>& counts, const ClassMap& class_map);

struct SplitResult {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> train_class_pixels;  // per class
  std::vector<std::uint64_t> val_class_pixels;    // per class
};

// Whole AOIs are assigned to one split or the other; every class with
// pixels anywhere must have pixels in both splits. Randomized rejection
// sampling, deterministic in `seed`; throws after max_attempts naming a
// violated class-coverage constraint.
SplitResult split_dataset(const DatasetManifest& manifest, const ClassMap& class_map,
                          double val_fraction, std::uint64_t seed,
                          std::uint32_t max_attempts = 10000);

std::string split_to_json(const SplitResult& split, const ClassMap& class_map);

}  // namespace cutpaste
