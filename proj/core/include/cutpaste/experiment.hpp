#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cutpaste/metrics.hpp"
#include "cutpaste/synthetic.hpp"
#include "cutpaste/types.hpp"

namespace cutpaste {

// Baseline vs Cut-and-Paste comparison on the synthetic dataset. Variants
// share one generated dataset and per-seed training seeds; only the
// augmentation configuration differs between them.
struct ExperimentConfig {
  SyntheticConfig synthetic;
  std::vector<std::uint32_t> n_paste_values{50};
  bool pre_paste_augment = false;
  int num_seeds = 3;
  std::uint64_t base_seed = 1;  // run seeds are base_seed + seed index
  int epochs = 30;
  double learning_rate = 0.2;
  int batch_pixels = 256;
  int connectivity = 4;
  std::uint64_t min_pixels = 1;
  unsigned threads = 1;

  void validate() const;
};

struct RunResult {
  std::uint64_t seed = 0;
  double miou = 0.0;
  std::vector<std::optional<double>> per_class_iou;
};

struct VariantResult {
  std::string name;
  std::uint32_t n_paste = 0;
  bool pre_paste_augment = false;
  std::vector<RunResult> runs;
  double mean_miou = 0.0;
  double std_miou = 0.0;  // sample stddev over seeds
  std::vector<std::optional<double>> mean_per_class_iou;
  std::vector<std::optional<double>> std_per_class_iou;
};

struct ExperimentReport {
  std::string dataset_hash;  // FNV-1a 64 over the generated files
  ClassMap class_map;
  std::vector<VariantResult> variants;
};

ExperimentReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& work_dir);

std::string experiment_report_to_json(const ExperimentReport& report);
std::string experiment_report_to_table(const ExperimentReport& report);

// FNV-1a 64 over the contents of every regular file under `root`,
// visited in sorted relative-path order (path bytes mixed in as well).
std::uint64_t hash_directory(const std::filesystem::path& root);

}  // namespace cutpaste
