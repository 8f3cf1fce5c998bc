#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cutpaste/bank.hpp"
#include "cutpaste/rng.hpp"
#include "cutpaste/types.hpp"

namespace cutpaste {

struct AugmentConfig {
  std::uint32_t n_paste = 0;
  bool pre_paste_augment = false;
  bool post_augment = false;
  double flip_probability = 0.5;  // pre-pasting flips
  std::uint64_t global_seed = 0;

  void validate() const;
};

// hflip, then vflip, then rot90 counterclockwise quarter turns.
struct Transform2D {
  bool hflip = false;
  bool vflip = false;
  int rot90 = 0;  // 0..3

  bool is_identity() const { return !hflip && !vflip && rot90 == 0; }
  bool operator==(const Transform2D&) const = default;
};

struct PasteEvent {
  std::string instance_id;
  std::uint8_t class_id = 0;
  Transform2D transform;
  int top = 0;
  int left = 0;

  bool operator==(const PasteEvent&) const = default;
};

struct AugmentResult {
  Sample sample;
  std::vector<PasteEvent> events;
  bool post_applied = false;
  Transform2D post_transform;
};

Raster hflip(const Raster& r);
Raster vflip(const Raster& r);
Raster rot90_ccw(const Raster& r, int quarter_turns = 1);
SemanticMask hflip(const SemanticMask& m);
SemanticMask vflip(const SemanticMask& m);
SemanticMask rot90_ccw(const SemanticMask& m, int quarter_turns = 1);
BinaryMask hflip(const BinaryMask& m);
BinaryMask vflip(const BinaryMask& m);
BinaryMask rot90_ccw(const BinaryMask& m, int quarter_turns = 1);

// Patch and mask transformed identically; pixel_count preserved.
InstanceRecord apply_transform(const InstanceRecord& instance, const Transform2D& t);

// Consumes: hflip bernoulli, vflip bernoulli, rot90 uniform {0..3}.
Transform2D draw_transform(Rng& rng, double flip_probability);

// Uniform over classes with instances, then uniform within the class.
const InstanceRecord& sample_instance(const InstanceBank& bank, Rng& rng);

// Identity when disabled; otherwise flips with flip_probability each and a
// uniform quarter-turn rotation.
InstanceRecord pre_paste_transform(const InstanceRecord& instance, Rng& rng, bool enabled,
                                   double flip_probability = 0.5);

// Center-crop an instance that exceeds the target in some dimension. The
// result may lose bbox tightness (it is transient paste input, never
// banked) and can even end up with an empty mask.
InstanceRecord center_crop_to_fit(const InstanceRecord& instance, int max_height, int max_width);

// Hard mask-gated paste: true mask pixels take the patch value and the
// class id, everything else is untouched. Later pastes overwrite earlier
// ones where masks intersect.
void paste_in_place(Sample& sample, const InstanceRecord& instance, int top, int left);
Sample paste(const Sample& sample, const InstanceRecord& instance, int top, int left);

// n_paste rounds of sample -> transform -> place -> paste, then optional
// whole-sample flips/rot90. Draw order per round: class, instance,
// [hflip, vflip, rot90], top, left. Deterministic in rng.
AugmentResult augment_sample(const Sample& sample, const InstanceBank& bank,
                             const AugmentConfig& config, RngState rng_state);

// Re-applies an event log against the bank; reproduces the
// pre-post-augmentation sample of the run that logged it.
Sample replay_events(const Sample& sample, const InstanceBank& bank,
                     const std::vector<PasteEvent>& events);

}  // namespace cutpaste
