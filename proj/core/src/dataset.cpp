#include "cutpaste/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "cutpaste/formats.hpp"
#include "cutpaste/parallel.hpp"
#include "cutpaste/rng.hpp"

namespace cutpaste {

namespace {

constexpr const char* kHeader = "sample_id,image_path,mask_path,aoi_id,date";

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(field);
  return fields;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const std::string text = read_file_text(path);
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";

  std::istringstream lines(text);
  std::string line;
  if (!std::getline(lines, line)) {
    throw std::runtime_error(path.string() + ": empty manifest (missing header)");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw std::runtime_error(path.string() + ": bad header, expected '" + kHeader + "'");
  }

  DatasetManifest manifest;
  std::unordered_set<std::string> seen_ids;
  std::size_t row = 1;
  while (std::getline(lines, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_row(line);
    if (fields.size() != 5) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(row) + ": expected 5 fields, got " +
                               std::to_string(fields.size()));
    }
    ManifestEntry entry;
    entry.sample_id = fields[0];
    entry.image_path = resolve(base, fields[1]);
    entry.mask_path = resolve(base, fields[2]);
    entry.aoi_id = fields[3];
    entry.date = fields[4];
    if (entry.sample_id.empty()) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(row) + ": empty sample_id");
    }
    if (!seen_ids.insert(entry.sample_id).second) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(row) + ": duplicate sample_id '" +
                               entry.sample_id + "'");
    }
    if (!std::filesystem::exists(entry.image_path)) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(row) + ": missing image file " +
                               entry.image_path.string());
    }
    if (!std::filesystem::exists(entry.mask_path)) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(row) + ": missing mask file " +
                               entry.mask_path.string());
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ostringstream out;
  out << kHeader << "\n";
  for (const auto& e : manifest.entries) {
    out << e.sample_id << "," << e.image_path.string() << "," << e.mask_path.string() << ","
        << e.aoi_id << "," << e.date << "\n";
  }
  write_file_text(path, out.str());
}

Sample load_sample(const ManifestEntry& entry) {
  return Sample(read_raster(entry.image_path), read_semantic_mask(entry.mask_path), entry.sample_id,
                entry.aoi_id);
}

std::vector<std::uint64_t> class_histogram(const DatasetManifest& manifest, const ClassMap& class_map,
                                           unsigned threads) {
  const std::size_t c = class_map.class_count();
  std::vector<std::vector<std::uint64_t>> partial(manifest.size(), std::vector<std::uint64_t>(c, 0));
  parallel_for(manifest.size(), threads, [&](std::size_t i) {
    const SemanticMask mask = read_semantic_mask(manifest.entries[i].mask_path);
    mask.validate_against(c);
    for (std::uint8_t v : mask.values()) {
      if (v != kIgnoreClass) partial[i][v] += 1;
    }
  });
  std::vector<std::uint64_t> counts(c, 0);
  for (const auto& p : partial) {
    for (std::size_t k = 0; k < c; ++k) counts[k] += p[k];
  }
  return counts;
}

std::string histogram_to_json(const std::vector<std::uint64_t>& counts, const ClassMap& class_map) {
  nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
  std::uint64_t total = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    total += counts[c];
    per_class.push_back({{"class_id", c}, {"name", class_map.name(c)}, {"pixels", counts[c]}});
  }
  nlohmann::ordered_json doc{{"per_class", per_class}, {"total_pixels", total}};
  return doc.dump(2) + "\n";
}

SplitResult split_dataset(const DatasetManifest& manifest, const ClassMap& class_map,
                          double val_fraction, std::uint64_t seed, std::uint32_t max_attempts) {
  if (manifest.empty()) {
    throw std::invalid_argument("split_dataset: manifest is empty");
  }
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw std::invalid_argument("split_dataset: val_fraction must be in (0, 1)");
  }

  const std::size_t class_count = class_map.class_count();

  // Per-AOI sample lists and class pixel counts; AOIs kept in first-seen
  // order so the procedure is a pure function of (manifest, seed).
  std::vector<std::string> aoi_order;
  std::unordered_map<std::string, std::size_t> aoi_index;
  std::vector<std::vector<std::size_t>> aoi_samples;
  std::vector<std::vector<std::uint64_t>> aoi_pixels;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const std::string& aoi = manifest.entries[i].aoi_id;
    auto [it, inserted] = aoi_index.try_emplace(aoi, aoi_order.size());
    if (inserted) {
      aoi_order.push_back(aoi);
      aoi_samples.emplace_back();
      aoi_pixels.emplace_back(class_count, 0);
    }
    aoi_samples[it->second].push_back(i);
    const SemanticMask mask = read_semantic_mask(manifest.entries[i].mask_path);
    mask.validate_against(class_count);
    for (std::uint8_t v : mask.values()) {
      if (v != kIgnoreClass) aoi_pixels[it->second][v] += 1;
    }
  }

  const std::size_t aoi_count = aoi_order.size();
  if (aoi_count < 2) {
    throw std::runtime_error("split_dataset: need at least 2 AOIs to split, got " +
                             std::to_string(aoi_count));
  }

  std::vector<std::uint64_t> dataset_pixels(class_count, 0);
  for (const auto& p : aoi_pixels) {
    for (std::size_t c = 0; c < class_count; ++c) dataset_pixels[c] += p[c];
  }

  const double total_samples = static_cast<double>(manifest.size());

  Rng rng(seed, mix64(0x53504c4954ULL));  // dedicated split stream
  std::string last_failure;
  for (std::uint32_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<std::size_t> order(aoi_count);
    for (std::size_t i = 0; i < aoi_count; ++i) order[i] = i;
    rng.shuffle(order);

    // Validation split = the permutation prefix whose sample share lands
    // closest to val_fraction; both splits stay non-empty.
    std::size_t best_k = 1;
    double best_err = 2.0;
    std::size_t running = 0;
    for (std::size_t k = 1; k < aoi_count; ++k) {
      running += aoi_samples[order[k - 1]].size();
      const double err = std::abs(static_cast<double>(running) / total_samples - val_fraction);
      if (err < best_err) {
        best_err = err;
        best_k = k;
      }
    }

    std::vector<bool> in_val(aoi_count, false);
    for (std::size_t k = 0; k < best_k; ++k) in_val[order[k]] = true;

    std::vector<std::uint64_t> train_pixels(class_count, 0);
    std::vector<std::uint64_t> val_pixels(class_count, 0);
    for (std::size_t a = 0; a < aoi_count; ++a) {
      auto& target = in_val[a] ? val_pixels : train_pixels;
      for (std::size_t c = 0; c < class_count; ++c) target[c] += aoi_pixels[a][c];
    }

    bool ok = true;
    for (std::size_t c = 0; c < class_count && ok; ++c) {
      if (dataset_pixels[c] == 0) continue;
      if (train_pixels[c] == 0) {
        last_failure = "class " + std::to_string(c) + " (" + class_map.name(c) +
                       ") has no pixels in the train split";
        ok = false;
      } else if (val_pixels[c] == 0) {
        last_failure = "class " + std::to_string(c) + " (" + class_map.name(c) +
                       ") has no pixels in the validation split";
        ok = false;
      }
    }
    if (!ok) continue;

    SplitResult result;
    result.seed = seed;
    result.train_class_pixels = std::move(train_pixels);
    result.val_class_pixels = std::move(val_pixels);
    for (std::size_t i = 0; i < manifest.size(); ++i) {
      const std::size_t a = aoi_index.at(manifest.entries[i].aoi_id);
      (in_val[a] ? result.val_ids : result.train_ids).push_back(manifest.entries[i].sample_id);
    }
    return result;
  }

  throw std::runtime_error("split_dataset: no class-covering AOI assignment found in " +
                           std::to_string(max_attempts) + " attempts; last failure: " + last_failure);
}

std::string split_to_json(const SplitResult& split, const ClassMap& class_map) {
  nlohmann::ordered_json presence = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < class_map.class_count(); ++c) {
    presence.push_back({{"class_id", c},
                        {"name", class_map.name(c)},
                        {"train_pixels", split.train_class_pixels[c]},
                        {"val_pixels", split.val_class_pixels[c]}});
  }
  nlohmann::ordered_json doc{
      {"seed", split.seed},
      {"train_ids", split.train_ids},
      {"val_ids", split.val_ids},
      {"class_presence", presence},
  };
  return doc.dump(2) + "\n";
}

}  // namespace cutpaste
