#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cutpaste/bank.hpp"
#include "cutpaste/classifier.hpp"
#include "cutpaste/dataset.hpp"
#include "cutpaste/experiment.hpp"
#include "cutpaste/extraction.hpp"
#include "cutpaste/formats.hpp"
#include "cutpaste/metrics.hpp"
#include "cutpaste/parallel.hpp"
#include "cutpaste/paste.hpp"
#include "cutpaste/rng.hpp"
#include "cutpaste/synthetic.hpp"

namespace fs = std::filesystem;
using namespace cutpaste;

namespace {

struct GlobalOpts {
  unsigned threads = 1;
  int verbosity = 0;
};

void note(const GlobalOpts& g, const std::string& msg) {
  if (g.verbosity > 0) std::cerr << msg << "\n";
}

void emit(const std::string& text, const std::string& out_file) {
  if (out_file.empty()) {
    std::cout << text;
  } else {
    write_file_text(out_file, text);
  }
}

// ---------------------------------------------------------------- extract

int cmd_extract(const GlobalOpts& g, const std::string& manifest_path, const std::string& classmap_path,
                const std::string& out_bank_dir, int connectivity, std::uint64_t min_pixels) {
  const ClassMap class_map = read_class_map(classmap_path);
  const DatasetManifest manifest = load_manifest(manifest_path);

  std::vector<std::vector<InstanceRecord>> per_sample(manifest.size());
  parallel_for(manifest.size(), g.threads, [&](std::size_t i) {
    const Sample sample = load_sample(manifest.entries[i]);
    sample.mask.validate_against(class_map.class_count());
    per_sample[i] = extract_instances(sample, connectivity, min_pixels);
  });

  // Ids are assigned in manifest order so the bank is independent of the
  // thread count.
  InstanceBank bank(class_map);
  for (auto& records : per_sample) {
    for (auto& rec : records) bank.add(std::move(rec));
  }

  const auto stats = save_bank(bank, out_bank_dir);
  note(g, "extracted " + std::to_string(bank.total_count()) + " instances from " +
              std::to_string(manifest.size()) + " samples into " + out_bank_dir);
  std::cout << bank_stats_to_json(stats, class_map);
  return 0;
}

// ---------------------------------------------------------------- augment

int cmd_augment(const GlobalOpts& g, const std::string& manifest_path, const std::string& bank_dir,
                const std::string& out_dir, std::uint32_t n_paste, bool pre_paste, bool post_augment,
                std::uint64_t seed, std::uint64_t epoch) {
  const DatasetManifest manifest = load_manifest(manifest_path);
  const InstanceBank bank = load_bank(bank_dir);
  if (n_paste > 0 && bank.total_count() == 0) {
    throw std::runtime_error("augment: bank at " + bank_dir + " is empty but --n-paste is " +
                             std::to_string(n_paste));
  }

  AugmentConfig config;
  config.n_paste = n_paste;
  config.pre_paste_augment = pre_paste;
  config.post_augment = post_augment;
  config.global_seed = seed;

  fs::create_directories(out_dir);

  parallel_for(manifest.size(), g.threads, [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    const Sample sample = load_sample(entry);
    const AugmentResult result = augment_sample(sample, bank, config, derive_rng(seed, epoch, i));

    write_raster(fs::path(out_dir) / (entry.sample_id + ".image"), result.sample.image);
    write_semantic_mask(fs::path(out_dir) / (entry.sample_id + ".mask"), result.sample.mask);

    nlohmann::ordered_json events = nlohmann::ordered_json::array();
    for (const PasteEvent& ev : result.events) {
      events.push_back({{"instance_id", ev.instance_id},
                        {"class_id", ev.class_id},
                        {"hflip", ev.transform.hflip},
                        {"vflip", ev.transform.vflip},
                        {"rot90", ev.transform.rot90},
                        {"top", ev.top},
                        {"left", ev.left}});
    }
    nlohmann::ordered_json doc{{"sample_id", entry.sample_id},
                               {"seed", seed},
                               {"epoch", epoch},
                               {"events", events}};
    if (result.post_applied) {
      doc["post_augment"] = {{"hflip", result.post_transform.hflip},
                             {"vflip", result.post_transform.vflip},
                             {"rot90", result.post_transform.rot90}};
    } else {
      doc["post_augment"] = nullptr;
    }
    write_file_text(fs::path(out_dir) / (entry.sample_id + ".events.json"), doc.dump(2) + "\n");
  });

  DatasetManifest out_manifest;
  for (const auto& entry : manifest.entries) {
    ManifestEntry e;
    e.sample_id = entry.sample_id;
    e.image_path = entry.sample_id + ".image";
    e.mask_path = entry.sample_id + ".mask";
    e.aoi_id = entry.aoi_id;
    e.date = entry.date;
    out_manifest.entries.push_back(std::move(e));
  }
  save_manifest(fs::path(out_dir) / "manifest.csv", out_manifest);
  note(g, "augmented " + std::to_string(manifest.size()) + " samples into " + out_dir);
  return 0;
}

// ------------------------------------------------------------------- eval

int cmd_eval(const GlobalOpts& g, const std::string& gt_manifest_path, const std::string& pred_dir,
             const std::string& classmap_path, const std::string& aggregation, const std::string& out_file) {
  const ClassMap class_map = read_class_map(classmap_path);
  const DatasetManifest manifest = load_manifest(gt_manifest_path);

  for (const auto& entry : manifest.entries) {
    if (!fs::exists(fs::path(pred_dir) / (entry.sample_id + ".mask"))) {
      throw std::runtime_error("eval: missing prediction for sample '" + entry.sample_id + "' (" +
                               (fs::path(pred_dir) / (entry.sample_id + ".mask")).string() + ")");
    }
  }

  std::vector<ConfusionMatrix> per_image(manifest.size(), ConfusionMatrix(class_map.class_count()));
  parallel_for(manifest.size(), g.threads, [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    const SemanticMask gt = read_semantic_mask(entry.mask_path);
    gt.validate_against(class_map.class_count());
    const SemanticMask pred = read_semantic_mask(fs::path(pred_dir) / (entry.sample_id + ".mask"));
    per_image[i].accumulate(gt, pred);
  });

  ConfusionMatrix global(class_map.class_count());
  for (const auto& m : per_image) global.merge(m);

  EvalReport report = make_eval_report(global);
  if (aggregation == "per-image") {
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& m : per_image) {
      if (m.total() == 0) continue;
      sum += miou(m);
      ++counted;
    }
    if (counted == 0) throw std::runtime_error("eval: no image has labeled pixels");
    report.miou = sum / static_cast<double>(counted);
  }

  std::string json = eval_report_to_json(report, class_map);
  // Splice the aggregation mode into the report head.
  nlohmann::ordered_json doc = nlohmann::ordered_json::parse(json);
  nlohmann::ordered_json wrapped;
  wrapped["aggregation"] = aggregation;
  for (auto& [key, value] : doc.items()) wrapped[key] = value;
  emit(wrapped.dump(2) + "\n", out_file);
  note(g, "evaluated " + std::to_string(manifest.size()) + " samples");
  return 0;
}

// ------------------------------------------------------------------ split

int cmd_split(const GlobalOpts& g, const std::string& manifest_path, const std::string& classmap_path,
              double val_fraction, std::uint64_t seed, std::uint32_t max_attempts,
              const std::string& out_file) {
  const ClassMap class_map = read_class_map(classmap_path);
  const DatasetManifest manifest = load_manifest(manifest_path);
  const SplitResult split = split_dataset(manifest, class_map, val_fraction, seed, max_attempts);
  emit(split_to_json(split, class_map), out_file);
  note(g, "split " + std::to_string(manifest.size()) + " samples: " +
              std::to_string(split.train_ids.size()) + " train / " + std::to_string(split.val_ids.size()) +
              " val");
  return 0;
}

// ------------------------------------------------------------------ stats

int cmd_stats(const GlobalOpts& g, const std::string& manifest_path, const std::string& classmap_path,
              const std::string& out_file) {
  const ClassMap class_map = read_class_map(classmap_path);
  const DatasetManifest manifest = load_manifest(manifest_path);
  const auto counts = class_histogram(manifest, class_map, g.threads);
  emit(histogram_to_json(counts, class_map), out_file);
  note(g, "computed histogram over " + std::to_string(manifest.size()) + " masks");
  return 0;
}

// ------------------------------------------------------------------- demo

int cmd_demo(const GlobalOpts& g, const std::string& out_dir, const ExperimentConfig& config) {
  fs::create_directories(out_dir);
  const ExperimentReport report = run_experiment(config, out_dir);
  const std::string json = experiment_report_to_json(report);
  const std::string table = experiment_report_to_table(report);
  write_file_text(fs::path(out_dir) / "report.json", json);
  write_file_text(fs::path(out_dir) / "report.txt", table);
  std::cout << table;
  note(g, "demo artifacts written to " + out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cut-and-Paste augmentation toolkit for multispectral semantic segmentation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--threads", g.threads, "Worker threads for per-sample stages")
      ->capture_default_str();
  app.add_flag_function("-v,--verbose", [&g](std::int64_t n) { g.verbosity = static_cast<int>(n); },
                        "Progress notes on stderr");

  // extract
  std::string manifest_path, classmap_path, bank_dir, out_dir, pred_dir, out_file;
  int connectivity = 4;
  std::uint64_t min_pixels = 1;
  auto* extract = app.add_subcommand("extract", "Extract per-class instances into a bank");
  extract->add_option("manifest", manifest_path, "Dataset manifest CSV")->required();
  extract->add_option("classmap", classmap_path, "Class map JSON")->required();
  extract->add_option("out_bank_dir", bank_dir, "Output bank directory")->required();
  extract->add_option("--connectivity", connectivity, "Pixel adjacency")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
  extract->add_option("--min-pixels", min_pixels, "Drop components smaller than this")
      ->capture_default_str();

  // augment
  std::uint32_t n_paste = 0;
  std::string pre_paste = "off", post_augment = "off";
  std::uint64_t seed = 0, epoch = 0;
  auto* augment = app.add_subcommand("augment", "Materialize augmented samples");
  augment->add_option("manifest", manifest_path, "Dataset manifest CSV")->required();
  augment->add_option("bank_dir", bank_dir, "Instance bank directory")->required();
  augment->add_option("out_dir", out_dir, "Output directory")->required();
  augment->add_option("--n-paste", n_paste, "Instances pasted per sample")->capture_default_str();
  augment->add_option("--pre-paste-augment", pre_paste, "Flip/rotate instances before pasting")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  augment->add_option("--post-augment", post_augment, "Whole-sample flips/rotations after pasting")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  augment->add_option("--seed", seed, "Global seed")->capture_default_str();
  augment->add_option("--epoch", epoch, "Epoch index mixed into per-sample streams")
      ->capture_default_str();

  // eval
  std::string aggregation = "global";
  auto* eval = app.add_subcommand("eval", "Score predictions with per-class IoU and mIoU");
  eval->add_option("gt_manifest", manifest_path, "Ground-truth manifest CSV")->required();
  eval->add_option("pred_dir", pred_dir, "Directory of <sample_id>.mask predictions")->required();
  eval->add_option("classmap", classmap_path, "Class map JSON")->required();
  eval->add_option("--aggregation", aggregation, "Confusion aggregation")
      ->check(CLI::IsMember({"global", "per-image"}))
      ->capture_default_str();
  eval->add_option("--out", out_file, "Write the report here instead of stdout");

  // split
  double val_fraction = 0.1;
  std::uint32_t max_attempts = 10000;
  auto* split = app.add_subcommand("split", "AOI-disjoint class-covering train/val split");
  split->add_option("manifest", manifest_path, "Dataset manifest CSV")->required();
  split->add_option("classmap", classmap_path, "Class map JSON")->required();
  split->add_option("--val-fraction", val_fraction, "Target validation sample fraction")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9))
      ->capture_default_str();
  split->add_option("--seed", seed, "Split seed")->capture_default_str();
  split->add_option("--max-attempts", max_attempts, "Rejection-sampling budget")->capture_default_str();
  split->add_option("--out", out_file, "Write the split JSON here instead of stdout");

  // stats
  auto* stats = app.add_subcommand("stats", "Per-class pixel histogram of a dataset");
  stats->add_option("manifest", manifest_path, "Dataset manifest CSV")->required();
  stats->add_option("classmap", classmap_path, "Class map JSON")->required();
  stats->add_option("--out", out_file, "Write the histogram JSON here instead of stdout");

  // demo
  ExperimentConfig demo_config;
  std::string demo_pre_paste = "off";
  auto* demo = app.add_subcommand("demo", "Baseline vs Cut-and-Paste comparison on synthetic data");
  demo->add_option("out_dir", out_dir, "Work/report directory")->required();
  demo->add_option("--n-paste", demo_config.n_paste_values, "Pasted-instance counts to compare")
      ->delimiter(',')
      ->capture_default_str();
  demo->add_option("--pre-paste-augment", demo_pre_paste, "Flip/rotate instances before pasting")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  demo->add_option("--seeds", demo_config.num_seeds, "Runs per variant")->capture_default_str();
  demo->add_option("--seed", demo_config.base_seed, "Base seed (run i uses seed + i)")
      ->capture_default_str();
  demo->add_option("--epochs", demo_config.epochs, "Training epochs")->capture_default_str();
  demo->add_option("--learning-rate", demo_config.learning_rate, "SGD step size")->capture_default_str();
  demo->add_option("--batch-pixels", demo_config.batch_pixels, "Pixels per minibatch")
      ->capture_default_str();
  demo->add_option("--image-size", demo_config.synthetic.image_size, "Synthetic image side")
      ->capture_default_str();
  demo->add_option("--bands", demo_config.synthetic.bands, "Synthetic band count")->capture_default_str();
  demo->add_option("--classes", demo_config.synthetic.class_count, "Synthetic class count")
      ->capture_default_str();
  demo->add_option("--rare-fraction", demo_config.synthetic.rare_class_pixel_fraction,
                   "Rare-class pixel share")
      ->capture_default_str();
  demo->add_option("--train-images", demo_config.synthetic.train_images, "Training images")
      ->capture_default_str();
  demo->add_option("--test-images", demo_config.synthetic.test_images, "Test images")
      ->capture_default_str();
  demo->add_option("--data-seed", demo_config.synthetic.seed, "Synthetic dataset seed")
      ->capture_default_str();
  demo->add_option("--min-pixels", demo_config.min_pixels, "Bank extraction size filter")
      ->capture_default_str();
  demo->add_option("--connectivity", demo_config.connectivity, "Bank extraction adjacency")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(extract)) {
      return cmd_extract(g, manifest_path, classmap_path, bank_dir, connectivity, min_pixels);
    }
    if (app.got_subcommand(augment)) {
      return cmd_augment(g, manifest_path, bank_dir, out_dir, n_paste, pre_paste == "on",
                         post_augment == "on", seed, epoch);
    }
    if (app.got_subcommand(eval)) {
      return cmd_eval(g, manifest_path, pred_dir, classmap_path, aggregation, out_file);
    }
    if (app.got_subcommand(split)) {
      return cmd_split(g, manifest_path, classmap_path, val_fraction, seed, max_attempts, out_file);
    }
    if (app.got_subcommand(stats)) {
      return cmd_stats(g, manifest_path, classmap_path, out_file);
    }
    if (app.got_subcommand(demo)) {
      demo_config.pre_paste_augment = demo_pre_paste == "on";
      demo_config.threads = g.threads;
      return cmd_demo(g, out_dir, demo_config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
