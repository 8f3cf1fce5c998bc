#include "cutpaste/extraction.hpp"

#include <algorithm>
#include <stdexcept>

namespace cutpaste {

namespace {

// Union-find over provisional labels, path-halving.
struct DisjointSet {
  std::vector<std::uint32_t> parent;

  std::uint32_t make() {
    parent.push_back(static_cast<std::uint32_t>(parent.size()));
    return parent.back();
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
  }
};

}  // namespace

void validate_instance(const InstanceRecord& record, std::size_t class_count) {
  const std::string who = "instance " + (record.id.empty() ? std::string("<unnamed>") : record.id);
  if (record.class_id >= class_count) {
    throw std::runtime_error(who + ": class id " + std::to_string(int(record.class_id)) +
                             " out of range for class count " + std::to_string(class_count));
  }
  if (record.mask.height() != record.patch.height() || record.mask.width() != record.patch.width()) {
    throw std::runtime_error(who + ": mask and patch dimensions disagree");
  }
  if (record.pixel_count != record.mask.count_set()) {
    throw std::runtime_error(who + ": pixel_count " + std::to_string(record.pixel_count) +
                             " does not match mask (" + std::to_string(record.mask.count_set()) + ")");
  }
  if (record.pixel_count == 0) {
    throw std::runtime_error(who + ": empty mask");
  }
  const int h = record.mask.height();
  const int w = record.mask.width();
  bool top = false, bottom = false, left = false, right = false;
  for (int c = 0; c < w; ++c) {
    top = top || record.mask.at(0, c);
    bottom = bottom || record.mask.at(h - 1, c);
  }
  for (int r = 0; r < h; ++r) {
    left = left || record.mask.at(r, 0);
    right = right || record.mask.at(r, w - 1);
  }
  if (!(top && bottom && left && right)) {
    throw std::runtime_error(who + ": mask is not tight against its bounding box");
  }
  if (record.mask.height() != record.source_bbox.height ||
      record.mask.width() != record.source_bbox.width) {
    throw std::runtime_error(who + ": source_bbox dimensions disagree with mask");
  }
}

ComponentLabeling connected_components(const SemanticMask& mask, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw std::invalid_argument("connected_components: connectivity must be 4 or 8");
  }
  const int h = mask.height();
  const int w = mask.width();

  ComponentLabeling out;
  out.height = h;
  out.width = w;
  out.component_ids.assign(static_cast<std::size_t>(h) * w, 0);

  // First pass: provisional labels + equivalences. Label 0 is reserved
  // for ignore pixels; provisional labels here are 0-based into `ds`.
  constexpr std::uint32_t kNone = 0xffffffffu;
  std::vector<std::uint32_t> provisional(static_cast<std::size_t>(h) * w, kNone);
  DisjointSet ds;

  auto idx = [w](int r, int c) { return static_cast<std::size_t>(r) * w + c; };

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::uint8_t cls = mask.at(r, c);
      if (cls == kIgnoreClass) continue;

      std::uint32_t label = kNone;
      auto consider = [&](int rr, int cc) {
        if (rr < 0 || cc < 0 || cc >= w) return;
        if (mask.at(rr, cc) != cls) return;
        const std::uint32_t n = provisional[idx(rr, cc)];
        if (n == kNone) return;
        if (label == kNone) label = n;
        else ds.unite(label, n);
      };
      consider(r, c - 1);
      consider(r - 1, c);
      if (connectivity == 8) {
        consider(r - 1, c - 1);
        consider(r - 1, c + 1);
      }
      if (label == kNone) label = ds.make();
      provisional[idx(r, c)] = label;
    }
  }

  // Second pass: map roots to final component ids in row-major order of
  // first occurrence, and gather per-component stats.
  std::vector<std::uint32_t> root_to_final(ds.parent.size(), 0);
  std::uint32_t next_final = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::uint32_t p = provisional[idx(r, c)];
      if (p == kNone) continue;
      const std::uint32_t root = ds.find(p);
      std::uint32_t final_id = root_to_final[root];
      if (final_id == 0) {
        final_id = ++next_final;
        root_to_final[root] = final_id;
        out.components.push_back(ComponentInfo{final_id, mask.at(r, c), 0, BBox{r, c, 1, 1}});
      }
      out.component_ids[idx(r, c)] = final_id;
      ComponentInfo& info = out.components[final_id - 1];
      info.pixel_count += 1;
      const int bottom = std::max(info.bbox.top + info.bbox.height - 1, r);
      const int right = std::max(info.bbox.left + info.bbox.width - 1, c);
      info.bbox.top = std::min(info.bbox.top, r);
      info.bbox.left = std::min(info.bbox.left, c);
      info.bbox.height = bottom - info.bbox.top + 1;
      info.bbox.width = right - info.bbox.left + 1;
    }
  }
  return out;
}

std::vector<InstanceRecord> extract_instances(const Sample& sample, int connectivity,
                                              std::uint64_t min_pixels) {
  const ComponentLabeling labeling = connected_components(sample.mask, connectivity);
  const Raster& image = sample.image;
  const int bands = image.bands();

  std::vector<InstanceRecord> records;
  records.reserve(labeling.components.size());
  for (const ComponentInfo& info : labeling.components) {
    if (info.pixel_count < min_pixels) continue;

    const BBox& box = info.bbox;
    std::vector<float> patch_data;
    patch_data.reserve(static_cast<std::size_t>(bands) * box.height * box.width);
    for (int b = 0; b < bands; ++b) {
      for (int r = 0; r < box.height; ++r) {
        for (int c = 0; c < box.width; ++c) {
          patch_data.push_back(image.at(b, box.top + r, box.left + c));
        }
      }
    }
    std::vector<std::uint8_t> mask_data;
    mask_data.reserve(static_cast<std::size_t>(box.height) * box.width);
    for (int r = 0; r < box.height; ++r) {
      for (int c = 0; c < box.width; ++c) {
        mask_data.push_back(labeling.at(box.top + r, box.left + c) == info.component_index ? 1 : 0);
      }
    }

    InstanceRecord rec;
    rec.class_id = info.class_id;
    rec.patch = Raster(box.height, box.width, bands, std::move(patch_data), image.dtype());
    rec.mask = BinaryMask(box.height, box.width, std::move(mask_data));
    rec.pixel_count = info.pixel_count;
    rec.source_sample_id = sample.sample_id;
    rec.source_bbox = box;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace cutpaste
