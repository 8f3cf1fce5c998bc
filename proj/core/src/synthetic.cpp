#include "cutpaste/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cutpaste/formats.hpp"
#include "cutpaste/rng.hpp"

namespace cutpaste {

namespace {

constexpr std::uint64_t kTagShapes = 0x53485045ULL;  // shape geometry draws
constexpr std::uint64_t kTagValues = 0x56414c53ULL;  // band value draws

void paint_rect(SemanticMask& mask, int top, int left, int h, int w, std::uint8_t cls) {
  const int r1 = std::min(mask.height(), top + h);
  const int c1 = std::min(mask.width(), left + w);
  for (int r = std::max(0, top); r < r1; ++r) {
    for (int c = std::max(0, left); c < c1; ++c) {
      mask.at(r, c) = cls;
    }
  }
}

void paint_ellipse(SemanticMask& mask, int top, int left, int h, int w, std::uint8_t cls) {
  const double cy = top + (h - 1) / 2.0;
  const double cx = left + (w - 1) / 2.0;
  const double ry = std::max(0.5, h / 2.0);
  const double rx = std::max(0.5, w / 2.0);
  const int r1 = std::min(mask.height(), top + h);
  const int c1 = std::min(mask.width(), left + w);
  for (int r = std::max(0, top); r < r1; ++r) {
    for (int c = std::max(0, left); c < c1; ++c) {
      const double dy = (r - cy) / ry;
      const double dx = (c - cx) / rx;
      if (dy * dy + dx * dx <= 1.0) mask.at(r, c) = cls;
    }
  }
}

SemanticMask gen_mask(const SyntheticConfig& cfg, Rng& rng) {
  const int size = cfg.image_size;
  SemanticMask mask = SemanticMask::filled(size, size, 0);
  if (cfg.class_count == 1) return mask;

  // Mid classes first, the rare class last so nothing overwrites it.
  if (cfg.class_count >= 3) {
    const int n_shapes = 3 + static_cast<int>(rng.bounded(5));
    for (int s = 0; s < n_shapes; ++s) {
      const std::uint8_t cls = 1 + static_cast<std::uint8_t>(rng.bounded(cfg.class_count - 2));
      const int lo = std::max(2, size / 8);
      const int hi = std::max(lo + 1, size / 3);
      const int h = lo + static_cast<int>(rng.bounded(hi - lo));
      const int w = lo + static_cast<int>(rng.bounded(hi - lo));
      const int top = static_cast<int>(rng.bounded(size - h + 1));
      const int left = static_cast<int>(rng.bounded(size - w + 1));
      if (rng.bounded(2) == 0) {
        paint_rect(mask, top, left, h, w, cls);
      } else {
        paint_ellipse(mask, top, left, h, w, cls);
      }
    }
  }

  const std::uint8_t rare = static_cast<std::uint8_t>(cfg.class_count - 1);
  const double target = cfg.rare_class_pixel_fraction * size * size;
  const double side = std::sqrt(target);
  auto jitter = [&]() { return 0.85 + 0.35 * rng.next_double(); };
  const int h = std::max(1, std::min(size, static_cast<int>(std::lround(side * jitter()))));
  const int w = std::max(1, std::min(size, static_cast<int>(std::lround(side * jitter()))));
  const int top = static_cast<int>(rng.bounded(size - h + 1));
  const int left = static_cast<int>(rng.bounded(size - w + 1));
  paint_rect(mask, top, left, h, w, rare);
  return mask;
}

Raster gen_image(const SyntheticConfig& cfg, const SemanticMask& mask,
                 const std::vector<std::vector<float>>& means, Rng& rng) {
  const int size = cfg.image_size;
  std::vector<float> data(static_cast<std::size_t>(cfg.bands) * size * size);
  std::size_t i = 0;
  for (int b = 0; b < cfg.bands; ++b) {
    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) {
        const std::uint8_t cls = mask.at(r, c);
        data[i++] = means[cls][b] + static_cast<float>(rng.gaussian(0.0, cfg.band_noise_sigma));
      }
    }
  }
  return Raster(size, size, cfg.bands, std::move(data), Dtype::F32);
}

}  // namespace

void SyntheticConfig::validate() const {
  if (image_size < 4) throw std::invalid_argument("SyntheticConfig: image_size must be >= 4");
  if (bands < 1) throw std::invalid_argument("SyntheticConfig: bands must be >= 1");
  if (class_count < 1 || class_count > 254) {
    throw std::invalid_argument("SyntheticConfig: class_count must be in [1, 254]");
  }
  if (!(rare_class_pixel_fraction > 0.0 && rare_class_pixel_fraction < 0.5)) {
    throw std::invalid_argument("SyntheticConfig: rare_class_pixel_fraction must be in (0, 0.5)");
  }
  if (rare_class_pixel_fraction * image_size * image_size < 1.0) {
    throw std::invalid_argument("SyntheticConfig: rare_class_pixel_fraction yields < 1 pixel");
  }
  if (train_images < 1 || test_images < 1) {
    throw std::invalid_argument("SyntheticConfig: need at least one image per split");
  }
  if (!band_mean_per_class.empty()) {
    if (band_mean_per_class.size() != static_cast<std::size_t>(class_count)) {
      throw std::invalid_argument("SyntheticConfig: band_mean_per_class must have class_count rows");
    }
    for (const auto& row : band_mean_per_class) {
      if (row.size() != static_cast<std::size_t>(bands)) {
        throw std::invalid_argument("SyntheticConfig: band_mean_per_class rows must have `bands` entries");
      }
      for (float v : row) {
        if (!std::isfinite(v)) throw std::invalid_argument("SyntheticConfig: class means must be finite");
      }
    }
  }
}

std::vector<std::vector<float>> default_band_means(int class_count, int bands) {
  std::vector<std::vector<float>> means(class_count, std::vector<float>(bands));
  for (int k = 0; k < class_count; ++k) {
    for (int b = 0; b < bands; ++b) {
      const int tweak = ((k + 1) * (b + 2)) % 5 - 2;
      means[k][b] = 60.0f + 25.0f * k + 6.0f * tweak;
    }
  }
  return means;
}

SyntheticDataset gen_synthetic(const SyntheticConfig& config, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  config.validate();

  const auto means = config.band_mean_per_class.empty()
                         ? default_band_means(config.class_count, config.bands)
                         : config.band_mean_per_class;

  fs::create_directories(out_dir / "data");

  SyntheticDataset ds;
  ds.root = out_dir;
  ds.class_map = ClassMap::numbered(config.class_count);
  ds.class_map_path = out_dir / "classmap.json";
  write_class_map(ds.class_map_path, ds.class_map);

  auto gen_split = [&](const char* split, int count, std::uint64_t split_tag) {
    DatasetManifest manifest;
    for (int i = 0; i < count; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "%s_%04d", split, i);

      Rng shape_rng(derive_rng_tagged(config.seed, kTagShapes + split_tag, 0, i));
      Rng value_rng(derive_rng_tagged(config.seed, kTagValues + split_tag, 0, i));
      const SemanticMask mask = gen_mask(config, shape_rng);
      const Raster image = gen_image(config, mask, means, value_rng);

      const fs::path image_path = out_dir / "data" / (std::string(name) + ".image");
      const fs::path mask_path = out_dir / "data" / (std::string(name) + ".mask");
      write_raster(image_path, image);
      write_semantic_mask(mask_path, mask);

      ManifestEntry entry;
      entry.sample_id = name;
      entry.image_path = fs::path("data") / (std::string(name) + ".image");
      entry.mask_path = fs::path("data") / (std::string(name) + ".mask");
      entry.aoi_id = std::string("aoi_") + name;
      entry.date = "2018-01-01";
      manifest.entries.push_back(std::move(entry));
    }
    return manifest;
  };

  const DatasetManifest train = gen_split("train", config.train_images, 0);
  const DatasetManifest test = gen_split("test", config.test_images, 1000);
  ds.train_manifest = out_dir / "train.csv";
  ds.test_manifest = out_dir / "test.csv";
  save_manifest(ds.train_manifest, train);
  save_manifest(ds.test_manifest, test);
  return ds;
}

}  // namespace cutpaste
