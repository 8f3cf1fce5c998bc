#include "cutpaste/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "cutpaste/classifier.hpp"
#include "cutpaste/extraction.hpp"
#include "cutpaste/formats.hpp"

namespace cutpaste {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const std::uint8_t* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::pair<std::optional<double>, std::optional<double>> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {std::nullopt, std::nullopt};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var)};
}

void finalize_variant(VariantResult& variant, std::size_t class_count) {
  std::vector<double> mious;
  for (const auto& run : variant.runs) mious.push_back(run.miou);
  const auto [m, s] = mean_std(mious);
  variant.mean_miou = m.value_or(0.0);
  variant.std_miou = s.value_or(0.0);

  variant.mean_per_class_iou.assign(class_count, std::nullopt);
  variant.std_per_class_iou.assign(class_count, std::nullopt);
  for (std::size_t c = 0; c < class_count; ++c) {
    std::vector<double> vals;
    for (const auto& run : variant.runs) {
      if (run.per_class_iou[c].has_value()) vals.push_back(*run.per_class_iou[c]);
    }
    const auto [cm, cs] = mean_std(vals);
    variant.mean_per_class_iou[c] = cm;
    variant.std_per_class_iou[c] = cs;
  }
}

nlohmann::ordered_json optional_array(const std::vector<std::optional<double>>& values) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& v : values) {
    if (v.has_value()) arr.push_back(*v);
    else arr.push_back(nullptr);
  }
  return arr;
}

}  // namespace

void ExperimentConfig::validate() const {
  synthetic.validate();
  if (num_seeds < 1) throw std::invalid_argument("ExperimentConfig: num_seeds must be >= 1");
  if (epochs < 0) throw std::invalid_argument("ExperimentConfig: epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("ExperimentConfig: learning_rate must be > 0");
  if (batch_pixels < 1) throw std::invalid_argument("ExperimentConfig: batch_pixels must be >= 1");
  if (connectivity != 4 && connectivity != 8) {
    throw std::invalid_argument("ExperimentConfig: connectivity must be 4 or 8");
  }
  for (std::uint32_t n : n_paste_values) {
    if (n == 0) throw std::invalid_argument("ExperimentConfig: n_paste_values must be > 0 (baseline is implicit)");
  }
}

std::uint64_t hash_directory(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::vector<std::string> rel;
  rel.reserve(files.size());
  for (const auto& p : files) rel.push_back(fs::relative(p, root).generic_string());
  std::sort(rel.begin(), rel.end());

  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& r : rel) {
    h = fnv1a(h, reinterpret_cast<const std::uint8_t*>(r.data()), r.size());
    const auto bytes = read_file_bytes(root / r);
    h = fnv1a(h, bytes.data(), bytes.size());
  }
  return h;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& work_dir) {
  config.validate();

  const SyntheticDataset ds = gen_synthetic(config.synthetic, work_dir / "dataset");

  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(hash_directory(ds.root)));

  const DatasetManifest train = load_manifest(ds.train_manifest);
  const DatasetManifest test = load_manifest(ds.test_manifest);

  // One bank, extracted from the training split only.
  InstanceBank bank(ds.class_map);
  for (const auto& entry : train.entries) {
    const Sample sample = load_sample(entry);
    sample.mask.validate_against(ds.class_map.class_count());
    for (auto& rec : extract_instances(sample, config.connectivity, config.min_pixels)) {
      bank.add(std::move(rec));
    }
  }

  ExperimentReport report;
  report.dataset_hash = hash_hex;
  report.class_map = ds.class_map;

  std::vector<VariantResult> variants;
  {
    VariantResult baseline;
    baseline.name = "baseline";
    baseline.n_paste = 0;
    baseline.pre_paste_augment = false;
    variants.push_back(baseline);
  }
  for (std::uint32_t n : config.n_paste_values) {
    VariantResult v;
    v.name = "cp_n" + std::to_string(n);
    v.n_paste = n;
    v.pre_paste_augment = config.pre_paste_augment;
    variants.push_back(v);
  }

  for (auto& variant : variants) {
    for (int i = 0; i < config.num_seeds; ++i) {
      TrainConfig tc;
      tc.epochs = config.epochs;
      tc.learning_rate = config.learning_rate;
      tc.batch_pixels = config.batch_pixels;
      tc.seed = config.base_seed + static_cast<std::uint64_t>(i);
      tc.augment.n_paste = variant.n_paste;
      tc.augment.pre_paste_augment = variant.pre_paste_augment;
      tc.augment.post_augment = true;  // standard flips/rotations for every variant
      tc.augment.global_seed = tc.seed;

      const PixelClassifier model =
          train_pixel_classifier(train, ds.class_map, variant.n_paste > 0 ? &bank : nullptr, tc);
      const EvalReport eval = evaluate_classifier(model, test, ds.class_map, config.threads);

      RunResult run;
      run.seed = tc.seed;
      run.miou = eval.miou;
      run.per_class_iou = eval.per_class_iou;
      variant.runs.push_back(std::move(run));
    }
    finalize_variant(variant, ds.class_map.class_count());
  }

  report.variants = std::move(variants);
  return report;
}

std::string experiment_report_to_json(const ExperimentReport& report) {
  nlohmann::ordered_json variants = nlohmann::ordered_json::array();
  for (const auto& v : report.variants) {
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const auto& run : v.runs) {
      runs.push_back({{"seed", run.seed},
                      {"miou", run.miou},
                      {"per_class_iou", optional_array(run.per_class_iou)}});
    }
    variants.push_back({{"name", v.name},
                        {"n_paste", v.n_paste},
                        {"pre_paste_augment", v.pre_paste_augment},
                        {"runs", runs},
                        {"mean_miou", v.mean_miou},
                        {"std_miou", v.std_miou},
                        {"mean_per_class_iou", optional_array(v.mean_per_class_iou)},
                        {"std_per_class_iou", optional_array(v.std_per_class_iou)}});
  }
  nlohmann::ordered_json doc{
      {"dataset_hash", report.dataset_hash},
      {"classes", report.class_map.names()},
      {"variants", variants},
  };
  return doc.dump(2) + "\n";
}

std::string experiment_report_to_table(const ExperimentReport& report) {
  const std::size_t class_count = report.class_map.class_count();

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"variant", "seed", "miou"};
  for (std::size_t c = 0; c < class_count; ++c) {
    header.push_back("iou:" + report.class_map.name(c));
  }
  rows.push_back(header);

  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  auto fmt_opt = [&](const std::optional<double>& v) { return v.has_value() ? fmt(*v) : std::string("-"); };

  for (const auto& v : report.variants) {
    for (const auto& run : v.runs) {
      std::vector<std::string> row{v.name, std::to_string(run.seed), fmt(run.miou)};
      for (std::size_t c = 0; c < class_count; ++c) row.push_back(fmt_opt(run.per_class_iou[c]));
      rows.push_back(std::move(row));
    }
    std::vector<std::string> mean_row{v.name, "mean", fmt(v.mean_miou)};
    std::vector<std::string> std_row{v.name, "stddev", fmt(v.std_miou)};
    for (std::size_t c = 0; c < class_count; ++c) {
      mean_row.push_back(fmt_opt(v.mean_per_class_iou[c]));
      std_row.push_back(fmt_opt(v.std_per_class_iou[c]));
    }
    rows.push_back(std::move(mean_row));
    rows.push_back(std::move(std_row));
  }

  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }

  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << std::string(widths[i] - row[i].size() + (i + 1 < row.size() ? 2 : 0), ' ');
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace cutpaste
