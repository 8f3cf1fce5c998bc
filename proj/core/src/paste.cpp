#include "cutpaste/paste.hpp"

#include <stdexcept>

namespace cutpaste {

namespace {

// Geometry shared by all three pixel containers. `bands` is 1 for masks.
template <typename T>
std::vector<T> hflip_data(const std::vector<T>& in, int h, int w, int bands) {
  std::vector<T> out(in.size());
  for (int b = 0; b < bands; ++b) {
    const std::size_t base = static_cast<std::size_t>(b) * h * w;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        out[base + static_cast<std::size_t>(r) * w + c] =
            in[base + static_cast<std::size_t>(r) * w + (w - 1 - c)];
      }
    }
  }
  return out;
}

template <typename T>
std::vector<T> vflip_data(const std::vector<T>& in, int h, int w, int bands) {
  std::vector<T> out(in.size());
  for (int b = 0; b < bands; ++b) {
    const std::size_t base = static_cast<std::size_t>(b) * h * w;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        out[base + static_cast<std::size_t>(r) * w + c] =
            in[base + static_cast<std::size_t>(h - 1 - r) * w + c];
      }
    }
  }
  return out;
}

// One counterclockwise quarter turn: out(r, c) = in(c, w-1-r); the output
// is w x h.
template <typename T>
std::vector<T> rot90_data(const std::vector<T>& in, int h, int w, int bands) {
  std::vector<T> out(in.size());
  const int oh = w;
  const int ow = h;
  for (int b = 0; b < bands; ++b) {
    const std::size_t ibase = static_cast<std::size_t>(b) * h * w;
    const std::size_t obase = static_cast<std::size_t>(b) * oh * ow;
    for (int r = 0; r < oh; ++r) {
      for (int c = 0; c < ow; ++c) {
        out[obase + static_cast<std::size_t>(r) * ow + c] =
            in[ibase + static_cast<std::size_t>(c) * w + (w - 1 - r)];
      }
    }
  }
  return out;
}

int norm_quarter_turns(int q) {
  const int k = q % 4;
  return k < 0 ? k + 4 : k;
}

}  // namespace

void AugmentConfig::validate() const {
  if (flip_probability < 0.0 || flip_probability > 1.0) {
    throw std::invalid_argument("AugmentConfig: flip_probability must be in [0,1]");
  }
}

Raster hflip(const Raster& r) {
  return Raster(r.height(), r.width(), r.bands(),
                hflip_data(r.samples(), r.height(), r.width(), r.bands()), r.dtype());
}

Raster vflip(const Raster& r) {
  return Raster(r.height(), r.width(), r.bands(),
                vflip_data(r.samples(), r.height(), r.width(), r.bands()), r.dtype());
}

Raster rot90_ccw(const Raster& r, int quarter_turns) {
  Raster out = r;
  for (int k = 0; k < norm_quarter_turns(quarter_turns); ++k) {
    out = Raster(out.width(), out.height(), out.bands(),
                 rot90_data(out.samples(), out.height(), out.width(), out.bands()), out.dtype());
  }
  return out;
}

SemanticMask hflip(const SemanticMask& m) {
  return SemanticMask(m.height(), m.width(), hflip_data(m.values(), m.height(), m.width(), 1));
}

SemanticMask vflip(const SemanticMask& m) {
  return SemanticMask(m.height(), m.width(), vflip_data(m.values(), m.height(), m.width(), 1));
}

SemanticMask rot90_ccw(const SemanticMask& m, int quarter_turns) {
  SemanticMask out = m;
  for (int k = 0; k < norm_quarter_turns(quarter_turns); ++k) {
    out = SemanticMask(out.width(), out.height(), rot90_data(out.values(), out.height(), out.width(), 1));
  }
  return out;
}

BinaryMask hflip(const BinaryMask& m) {
  return BinaryMask(m.height(), m.width(), hflip_data(m.values(), m.height(), m.width(), 1));
}

BinaryMask vflip(const BinaryMask& m) {
  return BinaryMask(m.height(), m.width(), vflip_data(m.values(), m.height(), m.width(), 1));
}

BinaryMask rot90_ccw(const BinaryMask& m, int quarter_turns) {
  BinaryMask out = m;
  for (int k = 0; k < norm_quarter_turns(quarter_turns); ++k) {
    out = BinaryMask(out.width(), out.height(), rot90_data(out.values(), out.height(), out.width(), 1));
  }
  return out;
}

InstanceRecord apply_transform(const InstanceRecord& instance, const Transform2D& t) {
  InstanceRecord out = instance;
  if (t.hflip) {
    out.patch = hflip(out.patch);
    out.mask = hflip(out.mask);
  }
  if (t.vflip) {
    out.patch = vflip(out.patch);
    out.mask = vflip(out.mask);
  }
  if (t.rot90 != 0) {
    out.patch = rot90_ccw(out.patch, t.rot90);
    out.mask = rot90_ccw(out.mask, t.rot90);
  }
  return out;
}

Transform2D draw_transform(Rng& rng, double flip_probability) {
  Transform2D t;
  t.hflip = rng.bernoulli(flip_probability);
  t.vflip = rng.bernoulli(flip_probability);
  t.rot90 = static_cast<int>(rng.bounded(4));
  return t;
}

const InstanceRecord& sample_instance(const InstanceBank& bank, Rng& rng) {
  const std::vector<std::uint8_t> classes = bank.nonempty_classes();
  if (classes.empty()) {
    throw std::runtime_error("sample_instance: bank is empty");
  }
  const std::uint8_t cls = classes[rng.bounded(static_cast<std::uint32_t>(classes.size()))];
  const auto& list = bank.instances_of(cls);
  return list[rng.bounded(static_cast<std::uint32_t>(list.size()))];
}

InstanceRecord pre_paste_transform(const InstanceRecord& instance, Rng& rng, bool enabled,
                                   double flip_probability) {
  if (!enabled) return instance;
  return apply_transform(instance, draw_transform(rng, flip_probability));
}

InstanceRecord center_crop_to_fit(const InstanceRecord& instance, int max_height, int max_width) {
  const int h = instance.mask.height();
  const int w = instance.mask.width();
  if (h <= max_height && w <= max_width) return instance;

  const int nh = std::min(h, max_height);
  const int nw = std::min(w, max_width);
  const int ro = (h - nh) / 2;
  const int co = (w - nw) / 2;

  const int bands = instance.patch.bands();
  std::vector<float> patch_data;
  patch_data.reserve(static_cast<std::size_t>(bands) * nh * nw);
  for (int b = 0; b < bands; ++b) {
    for (int r = 0; r < nh; ++r) {
      for (int c = 0; c < nw; ++c) {
        patch_data.push_back(instance.patch.at(b, ro + r, co + c));
      }
    }
  }
  std::vector<std::uint8_t> mask_data;
  mask_data.reserve(static_cast<std::size_t>(nh) * nw);
  for (int r = 0; r < nh; ++r) {
    for (int c = 0; c < nw; ++c) {
      mask_data.push_back(instance.mask.at(ro + r, co + c));
    }
  }

  InstanceRecord out = instance;
  out.patch = Raster(nh, nw, bands, std::move(patch_data), instance.patch.dtype());
  out.mask = BinaryMask(nh, nw, std::move(mask_data));
  out.pixel_count = out.mask.count_set();
  out.source_bbox = BBox{instance.source_bbox.top + ro, instance.source_bbox.left + co, nh, nw};
  return out;
}

void paste_in_place(Sample& sample, const InstanceRecord& instance, int top, int left) {
  if (instance.patch.bands() != sample.image.bands()) {
    throw std::runtime_error("paste: instance has " + std::to_string(instance.patch.bands()) +
                             " bands, sample has " + std::to_string(sample.image.bands()));
  }
  const int h = instance.mask.height();
  const int w = instance.mask.width();
  if (top < 0 || left < 0 || top + h > sample.image.height() || left + w > sample.image.width()) {
    throw std::runtime_error("paste: placement (" + std::to_string(top) + "," + std::to_string(left) +
                             ") does not fit a " + std::to_string(h) + "x" + std::to_string(w) +
                             " instance into " + std::to_string(sample.image.height()) + "x" +
                             std::to_string(sample.image.width()));
  }
  const int bands = sample.image.bands();
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!instance.mask.at(r, c)) continue;
      for (int b = 0; b < bands; ++b) {
        sample.image.at(b, top + r, left + c) = instance.patch.at(b, r, c);
      }
      sample.mask.at(top + r, left + c) = instance.class_id;
    }
  }
}

Sample paste(const Sample& sample, const InstanceRecord& instance, int top, int left) {
  Sample out = sample;
  paste_in_place(out, instance, top, left);
  return out;
}

AugmentResult augment_sample(const Sample& sample, const InstanceBank& bank,
                             const AugmentConfig& config, RngState rng_state) {
  config.validate();
  if (config.n_paste > 0 && bank.total_count() == 0) {
    throw std::runtime_error("augment_sample: n_paste > 0 but the bank is empty");
  }

  Rng rng(rng_state);
  AugmentResult result;
  result.sample = sample;

  const int sh = sample.image.height();
  const int sw = sample.image.width();

  for (std::uint32_t k = 0; k < config.n_paste; ++k) {
    const InstanceRecord& picked = sample_instance(bank, rng);
    const Transform2D t =
        config.pre_paste_augment ? draw_transform(rng, config.flip_probability) : Transform2D{};
    InstanceRecord inst = t.is_identity() ? picked : apply_transform(picked, t);
    inst = center_crop_to_fit(inst, sh, sw);

    const int top = static_cast<int>(rng.bounded(static_cast<std::uint32_t>(sh - inst.mask.height() + 1)));
    const int left = static_cast<int>(rng.bounded(static_cast<std::uint32_t>(sw - inst.mask.width() + 1)));
    paste_in_place(result.sample, inst, top, left);
    result.events.push_back(PasteEvent{picked.id, picked.class_id, t, top, left});
  }

  if (config.post_augment) {
    Transform2D post;
    post.hflip = rng.bernoulli(0.5);
    post.vflip = rng.bernoulli(0.5);
    post.rot90 = static_cast<int>(rng.bounded(4));
    if (post.hflip) {
      result.sample.image = hflip(result.sample.image);
      result.sample.mask = hflip(result.sample.mask);
    }
    if (post.vflip) {
      result.sample.image = vflip(result.sample.image);
      result.sample.mask = vflip(result.sample.mask);
    }
    if (post.rot90 != 0) {
      result.sample.image = rot90_ccw(result.sample.image, post.rot90);
      result.sample.mask = rot90_ccw(result.sample.mask, post.rot90);
    }
    result.post_applied = true;
    result.post_transform = post;
  }
  return result;
}

Sample replay_events(const Sample& sample, const InstanceBank& bank,
                     const std::vector<PasteEvent>& events) {
  Sample out = sample;
  for (const PasteEvent& ev : events) {
    const InstanceRecord* rec = bank.find(ev.instance_id);
    if (rec == nullptr) {
      throw std::runtime_error("replay_events: instance '" + ev.instance_id + "' not in bank");
    }
    InstanceRecord inst = ev.transform.is_identity() ? *rec : apply_transform(*rec, ev.transform);
    inst = center_crop_to_fit(inst, out.image.height(), out.image.width());
    paste_in_place(out, inst, ev.top, ev.left);
  }
  return out;
}

}  // namespace cutpaste
