#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cutpaste/dataset.hpp"
#include "cutpaste/types.hpp"

namespace cutpaste {

// Imbalanced segmentation toy dataset: a background canvas, random
// rectangles/ellipses of the mid classes, and one small blob of the rare
// class (the highest id) per image. Per-pixel band values are the class
// mean plus Gaussian noise.
struct SyntheticConfig {
  int image_size = 64;
  int bands = 4;
  int class_count = 6;
  double rare_class_pixel_fraction = 0.01;
  std::vector<std::vector<float>> band_mean_per_class;  // empty -> default_band_means
  double band_noise_sigma = 18.0;
  int train_images = 40;
  int test_images = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

// Class means spaced 25 apart along the band diagonal with small per-band
// offsets; adjacent classes overlap under the default noise sigma, so the
// learned boundary depends on class priors.
std::vector<std::vector<float>> default_band_means(int class_count, int bands);

struct SyntheticDataset {
  std::filesystem::path root;
  std::filesystem::path train_manifest;
  std::filesystem::path test_manifest;
  std::filesystem::path class_map_path;
  ClassMap class_map;
};

// Writes data/<id>.image (raster), data/<id>.mask (semantic mask),
// train.csv, test.csv and classmap.json under out_dir. Byte-identical for
// identical configs.
SyntheticDataset gen_synthetic(const SyntheticConfig& config, const std::filesystem::path& out_dir);

}  // namespace cutpaste
