#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cutpaste/types.hpp"

namespace cutpaste {

// C x C pixel-count accumulator; row = ground truth, column = prediction.
// Only non-ignore ground-truth pixels accumulate.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t class_count);

  std::size_t class_count() const { return class_count_; }

  std::uint64_t at(std::size_t gt, std::size_t pred) const {
    return counts_[gt * class_count_ + pred];
  }

  void accumulate(const SemanticMask& gt, const SemanticMask& pred);
  void merge(const ConfusionMatrix& other);

  std::uint64_t row_sum(std::size_t gt) const;
  std::uint64_t col_sum(std::size_t pred) const;
  std::uint64_t total() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t class_count_ = 0;
  std::vector<std::uint64_t> counts_;
};

enum class MiouMode {
  // Classes with zero union are left out of the mean (default).
  ExcludeUndefined,
  // Strict 1/C sum; classes with zero union contribute 0.
  DivideByClassCount,
};

// IoU_i = diag / (row_sum + col_sum - diag); nullopt when the union is 0.
std::vector<std::optional<double>> iou_per_class(const ConfusionMatrix& matrix);

double miou(const ConfusionMatrix& matrix, MiouMode mode = MiouMode::ExcludeUndefined);

struct EvalReport {
  std::size_t class_count = 0;
  std::vector<std::optional<double>> per_class_iou;
  double miou = 0.0;
  std::vector<std::uint64_t> gt_pixels;          // per class
  std::vector<std::uint64_t> pred_pixels;        // per class
  std::vector<std::uint64_t> intersection_pixels;  // per class
};

EvalReport make_eval_report(const ConfusionMatrix& matrix, MiouMode mode = MiouMode::ExcludeUndefined);

std::string eval_report_to_json(const EvalReport& report, const ClassMap& class_map);

}  // namespace cutpaste
