#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cutpaste/types.hpp"

namespace cutpaste {

struct ComponentInfo {
  std::uint32_t component_index = 0;  // >= 1
  std::uint8_t class_id = 0;
  std::uint64_t pixel_count = 0;
  BBox bbox;

  bool operator==(const ComponentInfo&) const = default;
};

// Per-pixel component ids (0 = ignore) plus a component table. Components
// are numbered 1..K in row-major order of their first pixel.
struct ComponentLabeling {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> component_ids;  // row-major
  std::vector<ComponentInfo> components;

  std::uint32_t at(int row, int col) const {
    return component_ids[static_cast<std::size_t>(row) * width + col];
  }
};

// Cropped image patch plus the in-bbox binary mask of one component.
struct InstanceRecord {
  std::string id;  // assigned when the record enters a bank; "i%08u"
  std::uint8_t class_id = 0;
  Raster patch;
  BinaryMask mask;
  std::uint64_t pixel_count = 0;
  std::string source_sample_id;
  BBox source_bbox;

  bool operator==(const InstanceRecord&) const = default;
};

// Throws if mask/patch dimensions disagree, pixel_count is off, or the
// mask is not tight against its bounding box.
void validate_instance(const InstanceRecord& record, std::size_t class_count);

// Two-pass union-find labeling. Two non-ignore pixels share a component
// iff they share a class and are joined by a same-class path under the
// chosen adjacency (4 or 8). Iterative; no recursion.
ComponentLabeling connected_components(const SemanticMask& mask, int connectivity = 4);

// One record per component with pixel_count >= min_pixels. With
// min_pixels=1 the records partition the non-ignore pixels of the mask.
std::vector<InstanceRecord> extract_instances(const Sample& sample, int connectivity = 4,
                                              std::uint64_t min_pixels = 1);

}  // namespace cutpaste
