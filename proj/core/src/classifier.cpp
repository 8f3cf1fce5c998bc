#include "cutpaste/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cutpaste/parallel.hpp"
#include "cutpaste/rng.hpp"

namespace cutpaste {

namespace {

constexpr std::uint64_t kTagBatch = 0x42415443ULL;  // pixel batch draws

void softmax_scores(const PixelClassifier& model, const double* features, std::vector<double>& probs) {
  const int c = model.class_count;
  double max_score = -1e300;
  for (int k = 0; k < c; ++k) {
    double s = model.weight(k, model.bands);  // bias
    for (int b = 0; b < model.bands; ++b) {
      s += model.weight(k, b) * PixelClassifier::normalize(features[b]);
    }
    probs[k] = s;
    max_score = std::max(max_score, s);
  }
  double z = 0.0;
  for (int k = 0; k < c; ++k) {
    probs[k] = std::exp(probs[k] - max_score);
    z += probs[k];
  }
  for (int k = 0; k < c; ++k) probs[k] /= z;
}

}  // namespace

PixelClassifier::PixelClassifier(int class_count_, int bands_)
    : class_count(class_count_), bands(bands_),
      weights(static_cast<std::size_t>(class_count_) * (bands_ + 1), 0.0) {
  if (class_count_ < 1 || bands_ < 1) {
    throw std::invalid_argument("PixelClassifier: class_count and bands must be >= 1");
  }
}

SemanticMask PixelClassifier::predict(const Raster& image) const {
  if (image.bands() != bands) {
    throw std::runtime_error("PixelClassifier: model expects " + std::to_string(bands) +
                             " bands, image has " + std::to_string(image.bands()));
  }
  const int h = image.height();
  const int w = image.width();
  SemanticMask out = SemanticMask::filled(h, w, 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      int best = 0;
      double best_score = -1e300;
      for (int k = 0; k < class_count; ++k) {
        double s = weight(k, bands);
        for (int b = 0; b < bands; ++b) s += weight(k, b) * normalize(image.at(b, r, c));
        if (s > best_score) {
          best_score = s;
          best = k;
        }
      }
      out.at(r, c) = static_cast<std::uint8_t>(best);
    }
  }
  return out;
}

double cross_entropy_loss(const PixelClassifier& model, const PixelBatch& batch) {
  if (batch.size() == 0) throw std::invalid_argument("cross_entropy_loss: empty batch");
  std::vector<double> probs(model.class_count);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    softmax_scores(model, batch.features.data() + i * model.bands, probs);
    loss += -std::log(std::max(probs[batch.labels[i]], 1e-300));
  }
  return loss / static_cast<double>(batch.size());
}

double cross_entropy_loss_grad(const PixelClassifier& model, const PixelBatch& batch,
                               std::vector<double>& grad) {
  if (batch.size() == 0) throw std::invalid_argument("cross_entropy_loss_grad: empty batch");
  const int nf = model.bands + 1;
  grad.assign(model.weights.size(), 0.0);
  std::vector<double> probs(model.class_count);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double* f = batch.features.data() + i * model.bands;
    softmax_scores(model, f, probs);
    loss += -std::log(std::max(probs[batch.labels[i]], 1e-300));
    for (int k = 0; k < model.class_count; ++k) {
      const double delta = (probs[k] - (k == batch.labels[i] ? 1.0 : 0.0)) * inv_n;
      double* gk = grad.data() + static_cast<std::size_t>(k) * nf;
      for (int b = 0; b < model.bands; ++b) gk[b] += delta * PixelClassifier::normalize(f[b]);
      gk[model.bands] += delta;
    }
  }
  return loss * inv_n;
}

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (batch_pixels < 1) throw std::invalid_argument("TrainConfig: batch_pixels must be >= 1");
  augment.validate();
}

PixelClassifier train_pixel_classifier(const DatasetManifest& manifest, const ClassMap& class_map,
                                       const InstanceBank* bank, const TrainConfig& config) {
  config.validate();
  if (manifest.empty()) {
    throw std::invalid_argument("train_pixel_classifier: empty dataset");
  }
  if (config.augment.n_paste > 0 && bank == nullptr) {
    throw std::invalid_argument("train_pixel_classifier: pasting enabled but no bank supplied");
  }

  // Samples fit in memory at demo scale; load once.
  std::vector<Sample> samples;
  samples.reserve(manifest.size());
  for (const auto& entry : manifest.entries) {
    samples.push_back(load_sample(entry));
    samples.back().mask.validate_against(class_map.class_count());
  }
  const int bands = samples.front().image.bands();

  PixelClassifier model(static_cast<int>(class_map.class_count()), bands);
  std::vector<double> grad;
  PixelBatch batch;
  batch.bands = bands;

  const bool augment_on =
      config.augment.n_paste > 0 || config.augment.pre_paste_augment || config.augment.post_augment;
  const InstanceBank empty_bank(class_map);
  const InstanceBank& paste_bank = bank != nullptr ? *bank : empty_bank;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const Sample* current = &samples[s];
      AugmentResult augmented;
      if (augment_on) {
        augmented = augment_sample(samples[s], paste_bank, config.augment,
                                   derive_rng(config.seed, epoch, s));
        current = &augmented.sample;
      }

      // Uniform pixel draws, rejecting ignore pixels.
      Rng pix_rng(derive_rng_tagged(config.seed, kTagBatch, epoch, s));
      const auto& mask_values = current->mask.values();
      const std::uint32_t n_pixels = static_cast<std::uint32_t>(mask_values.size());
      batch.features.clear();
      batch.labels.clear();
      std::uint32_t attempts = 0;
      const std::uint32_t max_attempts = static_cast<std::uint32_t>(config.batch_pixels) * 10;
      while (batch.labels.size() < static_cast<std::size_t>(config.batch_pixels) &&
             attempts < max_attempts) {
        ++attempts;
        const std::uint32_t p = pix_rng.bounded(n_pixels);
        if (mask_values[p] == kIgnoreClass) continue;
        const int r = static_cast<int>(p) / current->mask.width();
        const int c = static_cast<int>(p) % current->mask.width();
        for (int b = 0; b < bands; ++b) {
          batch.features.push_back(current->image.at(b, r, c));
        }
        batch.labels.push_back(mask_values[p]);
      }
      if (batch.labels.empty()) continue;  // all-ignore sample

      cross_entropy_loss_grad(model, batch, grad);
      for (std::size_t i = 0; i < model.weights.size(); ++i) {
        model.weights[i] -= config.learning_rate * grad[i];
      }
    }
  }
  return model;
}

EvalReport evaluate_classifier(const PixelClassifier& model, const DatasetManifest& manifest,
                               const ClassMap& class_map, unsigned threads) {
  if (manifest.empty()) throw std::invalid_argument("evaluate_classifier: empty dataset");
  std::vector<ConfusionMatrix> partial(manifest.size(), ConfusionMatrix(class_map.class_count()));
  parallel_for(manifest.size(), threads, [&](std::size_t i) {
    const Sample sample = load_sample(manifest.entries[i]);
    sample.mask.validate_against(class_map.class_count());
    const SemanticMask pred = model.predict(sample.image);
    partial[i].accumulate(sample.mask, pred);
  });
  ConfusionMatrix matrix(class_map.class_count());
  for (const auto& p : partial) matrix.merge(p);
  return make_eval_report(matrix);
}

double pixel_accuracy(const PixelClassifier& model, const DatasetManifest& manifest) {
  std::uint64_t correct = 0;
  std::uint64_t total = 0;
  for (const auto& entry : manifest.entries) {
    const Sample sample = load_sample(entry);
    const SemanticMask pred = model.predict(sample.image);
    for (std::size_t i = 0; i < sample.mask.values().size(); ++i) {
      if (sample.mask.values()[i] == kIgnoreClass) continue;
      ++total;
      if (sample.mask.values()[i] == pred.values()[i]) ++correct;
    }
  }
  if (total == 0) throw std::runtime_error("pixel_accuracy: no labeled pixels");
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace cutpaste
