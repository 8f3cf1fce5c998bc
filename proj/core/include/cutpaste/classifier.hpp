#pragma once

#include <cstdint>
#include <vector>

#include "cutpaste/bank.hpp"
#include "cutpaste/dataset.hpp"
#include "cutpaste/metrics.hpp"
#include "cutpaste/paste.hpp"
#include "cutpaste/types.hpp"

namespace cutpaste {

// Multinomial logistic regression over per-pixel band values plus bias.
// Band values are rescaled by fixed constants inside the score so the
// bias and band weights sit on comparable SGD step sizes; the model stays
// an affine function of the raw band values.
struct PixelClassifier {
  static constexpr double kFeatureOffset = 128.0;
  static constexpr double kFeatureScale = 64.0;
  static double normalize(double band_value) { return (band_value - kFeatureOffset) / kFeatureScale; }

  int class_count = 0;
  int bands = 0;
  std::vector<double> weights;  // class_count x (bands + 1), bias last

  PixelClassifier() = default;
  PixelClassifier(int class_count, int bands);

  double weight(int class_id, int feature) const {
    return weights[static_cast<std::size_t>(class_id) * (bands + 1) + feature];
  }
  double& weight(int class_id, int feature) {
    return weights[static_cast<std::size_t>(class_id) * (bands + 1) + feature];
  }

  // Argmax class per pixel; ties resolve to the lowest class id.
  SemanticMask predict(const Raster& image) const;
};

// Pixel minibatch; features are raw band values (bias appended inside the
// loss), labels are class ids.
struct PixelBatch {
  int bands = 0;
  std::vector<double> features;  // pixel-major, `bands` entries each
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
};

double cross_entropy_loss(const PixelClassifier& model, const PixelBatch& batch);

// Returns the loss; grad has the weight layout and receives the mean
// cross-entropy gradient.
double cross_entropy_loss_grad(const PixelClassifier& model, const PixelBatch& batch,
                               std::vector<double>& grad);

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 0.2;
  int batch_pixels = 256;
  std::uint64_t seed = 0;
  AugmentConfig augment;  // n_paste = 0 disables pasting

  void validate() const;
};

// Plain SGD over per-sample pixel minibatches. When augmentation is on,
// each sample first passes through augment_sample with an rng derived
// from (seed, epoch, sample index). Deterministic in config.seed.
PixelClassifier train_pixel_classifier(const DatasetManifest& manifest, const ClassMap& class_map,
                                       const InstanceBank* bank, const TrainConfig& config);

EvalReport evaluate_classifier(const PixelClassifier& model, const DatasetManifest& manifest,
                               const ClassMap& class_map, unsigned threads = 1);

// Fraction of non-ignore pixels predicted correctly.
double pixel_accuracy(const PixelClassifier& model, const DatasetManifest& manifest);

}  // namespace cutpaste
