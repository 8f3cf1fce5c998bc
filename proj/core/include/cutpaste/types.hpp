#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cutpaste {

// Reserved mask value excluded from extraction, pasting and evaluation.
inline constexpr std::uint8_t kIgnoreClass = 255;

// Persistence element type of a raster file. In memory all samples are
// float; u8/u16 sources widen losslessly and the tag is kept so files
// round-trip byte-identically.
enum class Dtype : std::uint8_t { U8 = 0, U16 = 1, F32 = 2 };

struct BBox {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;

  bool operator==(const BBox&) const = default;
};

// H x W x B multispectral image, band-sequential storage (band, row, col).
class Raster {
 public:
  Raster() = default;
  Raster(int height, int width, int bands, std::vector<float> samples,
         Dtype dtype = Dtype::F32);

  static Raster filled(int height, int width, int bands, float value,
                       Dtype dtype = Dtype::F32);

  int height() const { return height_; }
  int width() const { return width_; }
  int bands() const { return bands_; }
  Dtype dtype() const { return dtype_; }

  float at(int band, int row, int col) const {
    return samples_[index(band, row, col)];
  }
  float& at(int band, int row, int col) { return samples_[index(band, row, col)]; }

  const std::vector<float>& samples() const { return samples_; }
  std::vector<float>& samples() { return samples_; }

  std::size_t index(int band, int row, int col) const {
    return (static_cast<std::size_t>(band) * height_ + row) * width_ + col;
  }

  bool operator==(const Raster&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int bands_ = 0;
  Dtype dtype_ = Dtype::F32;
  std::vector<float> samples_;
};

// H x W per-pixel class ids in [0, 254], or kIgnoreClass.
class SemanticMask {
 public:
  SemanticMask() = default;
  SemanticMask(int height, int width, std::vector<std::uint8_t> values);

  static SemanticMask filled(int height, int width, std::uint8_t value);

  int height() const { return height_; }
  int width() const { return width_; }

  std::uint8_t at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::uint8_t& at(int row, int col) {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }

  const std::vector<std::uint8_t>& values() const { return values_; }
  std::vector<std::uint8_t>& values() { return values_; }

  std::size_t pixel_count() const { return values_.size(); }

  // Every non-ignore value must be < class_count.
  void validate_against(std::size_t class_count) const;

  bool operator==(const SemanticMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> values_;
};

// Binary instance mask; values are 0/1.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, std::vector<std::uint8_t> values);

  static BinaryMask filled(int height, int width, std::uint8_t value);

  int height() const { return height_; }
  int width() const { return width_; }

  std::uint8_t at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::uint8_t& at(int row, int col) {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }

  const std::vector<std::uint8_t>& values() const { return values_; }
  std::vector<std::uint8_t>& values() { return values_; }

  std::uint64_t count_set() const;

  bool operator==(const BinaryMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> values_;
};

// Dense ordered class list; ids are exactly 0..C-1.
class ClassMap {
 public:
  ClassMap() = default;
  explicit ClassMap(std::vector<std::string> names);

  static ClassMap numbered(std::size_t class_count);

  std::size_t class_count() const { return names_.size(); }
  const std::string& name(std::size_t class_id) const { return names_.at(class_id); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const ClassMap&) const = default;

 private:
  std::vector<std::string> names_;
};

// Image/mask pair plus provenance.
struct Sample {
  Raster image;
  SemanticMask mask;
  std::string sample_id;
  std::string aoi_id;

  Sample() = default;
  Sample(Raster img, SemanticMask msk, std::string id, std::string aoi);

  bool operator==(const Sample&) const = default;
};

}  // namespace cutpaste
