#include "cutpaste/types.hpp"

#include <cmath>
#include <unordered_set>

namespace cutpaste {

namespace {

void check_dims(int height, int width, const char* what) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument(std::string(what) + ": height and width must be >= 1, got " +
                                std::to_string(height) + "x" + std::to_string(width));
  }
}

}  // namespace

Raster::Raster(int height, int width, int bands, std::vector<float> samples, Dtype dtype)
    : height_(height), width_(width), bands_(bands), dtype_(dtype), samples_(std::move(samples)) {
  check_dims(height, width, "Raster");
  if (bands < 1) {
    throw std::invalid_argument("Raster: bands must be >= 1, got " + std::to_string(bands));
  }
  const std::size_t expected =
      static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * static_cast<std::size_t>(bands);
  if (samples_.size() != expected) {
    throw std::invalid_argument("Raster: sample count " + std::to_string(samples_.size()) +
                                " does not match " + std::to_string(height) + "x" + std::to_string(width) +
                                "x" + std::to_string(bands));
  }
  for (float v : samples_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("Raster: samples must be finite");
    }
  }
}

Raster Raster::filled(int height, int width, int bands, float value, Dtype dtype) {
  check_dims(height, width, "Raster");
  if (bands < 1) {
    throw std::invalid_argument("Raster: bands must be >= 1");
  }
  std::vector<float> data(static_cast<std::size_t>(height) * width * bands, value);
  return Raster(height, width, bands, std::move(data), dtype);
}

SemanticMask::SemanticMask(int height, int width, std::vector<std::uint8_t> values)
    : height_(height), width_(width), values_(std::move(values)) {
  check_dims(height, width, "SemanticMask");
  const std::size_t expected = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  if (values_.size() != expected) {
    throw std::invalid_argument("SemanticMask: value count " + std::to_string(values_.size()) +
                                " does not match " + std::to_string(height) + "x" + std::to_string(width));
  }
}

SemanticMask SemanticMask::filled(int height, int width, std::uint8_t value) {
  check_dims(height, width, "SemanticMask");
  return SemanticMask(height, width,
                      std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, value));
}

void SemanticMask::validate_against(std::size_t class_count) const {
  for (std::uint8_t v : values_) {
    if (v != kIgnoreClass && v >= class_count) {
      throw std::invalid_argument("SemanticMask: class id " + std::to_string(int(v)) +
                                  " out of range for class count " + std::to_string(class_count));
    }
  }
}

BinaryMask::BinaryMask(int height, int width, std::vector<std::uint8_t> values)
    : height_(height), width_(width), values_(std::move(values)) {
  check_dims(height, width, "BinaryMask");
  const std::size_t expected = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  if (values_.size() != expected) {
    throw std::invalid_argument("BinaryMask: value count does not match dimensions");
  }
  for (std::uint8_t v : values_) {
    if (v > 1) {
      throw std::invalid_argument("BinaryMask: values must be 0 or 1");
    }
  }
}

BinaryMask BinaryMask::filled(int height, int width, std::uint8_t value) {
  check_dims(height, width, "BinaryMask");
  if (value > 1) {
    throw std::invalid_argument("BinaryMask: values must be 0 or 1");
  }
  return BinaryMask(height, width,
                    std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, value));
}

std::uint64_t BinaryMask::count_set() const {
  std::uint64_t n = 0;
  for (std::uint8_t v : values_) n += v;
  return n;
}

ClassMap::ClassMap(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) {
    throw std::invalid_argument("ClassMap: at least one class required");
  }
  if (names_.size() > 255) {
    throw std::invalid_argument("ClassMap: at most 255 classes supported (255 is the ignore value)");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) {
      throw std::invalid_argument("ClassMap: duplicate class name '" + n + "'");
    }
  }
}

ClassMap ClassMap::numbered(std::size_t class_count) {
  std::vector<std::string> names;
  names.reserve(class_count);
  for (std::size_t i = 0; i < class_count; ++i) {
    names.push_back("class_" + std::to_string(i));
  }
  return ClassMap(std::move(names));
}

Sample::Sample(Raster img, SemanticMask msk, std::string id, std::string aoi)
    : image(std::move(img)), mask(std::move(msk)), sample_id(std::move(id)), aoi_id(std::move(aoi)) {
  if (image.height() != mask.height() || image.width() != mask.width()) {
    throw std::invalid_argument("Sample: image " + std::to_string(image.height()) + "x" +
                                std::to_string(image.width()) + " and mask " +
                                std::to_string(mask.height()) + "x" + std::to_string(mask.width()) +
                                " dimensions disagree");
  }
}

}  // namespace cutpaste
