#include "cutpaste/metrics.hpp"

#include <stdexcept>

#include <json.hpp>

namespace cutpaste {

ConfusionMatrix::ConfusionMatrix(std::size_t class_count)
    : class_count_(class_count), counts_(class_count * class_count, 0) {
  if (class_count == 0) {
    throw std::invalid_argument("ConfusionMatrix: class count must be >= 1");
  }
}

void ConfusionMatrix::accumulate(const SemanticMask& gt, const SemanticMask& pred) {
  if (gt.height() != pred.height() || gt.width() != pred.width()) {
    throw std::runtime_error("ConfusionMatrix: gt " + std::to_string(gt.height()) + "x" +
                             std::to_string(gt.width()) + " and prediction " +
                             std::to_string(pred.height()) + "x" + std::to_string(pred.width()) +
                             " dimensions disagree");
  }
  const auto& g = gt.values();
  const auto& p = pred.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == kIgnoreClass) continue;
    if (g[i] >= class_count_) {
      throw std::runtime_error("ConfusionMatrix: ground-truth class " + std::to_string(int(g[i])) +
                               " out of range");
    }
    if (p[i] >= class_count_) {
      throw std::runtime_error("ConfusionMatrix: predicted class " + std::to_string(int(p[i])) +
                               " out of range (predictions may not contain ignore)");
    }
    counts_[std::size_t(g[i]) * class_count_ + p[i]] += 1;
  }
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.class_count_ != class_count_) {
    throw std::runtime_error("ConfusionMatrix: cannot merge matrices of different class counts");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t gt) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < class_count_; ++p) s += at(gt, p);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t pred) const {
  std::uint64_t s = 0;
  for (std::size_t g = 0; g < class_count_; ++g) s += at(g, pred);
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (std::uint64_t v : counts_) s += v;
  return s;
}

std::vector<std::optional<double>> iou_per_class(const ConfusionMatrix& matrix) {
  std::vector<std::optional<double>> out(matrix.class_count());
  for (std::size_t c = 0; c < matrix.class_count(); ++c) {
    const std::uint64_t inter = matrix.at(c, c);
    const std::uint64_t uni = matrix.row_sum(c) + matrix.col_sum(c) - inter;
    if (uni > 0) {
      out[c] = static_cast<double>(inter) / static_cast<double>(uni);
    }
  }
  return out;
}

double miou(const ConfusionMatrix& matrix, MiouMode mode) {
  const auto ious = iou_per_class(matrix);
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& v : ious) {
    if (v.has_value()) {
      sum += *v;
      ++defined;
    }
  }
  if (mode == MiouMode::DivideByClassCount) {
    return sum / static_cast<double>(matrix.class_count());
  }
  if (defined == 0) {
    throw std::runtime_error("miou: no class has a defined IoU");
  }
  return sum / static_cast<double>(defined);
}

EvalReport make_eval_report(const ConfusionMatrix& matrix, MiouMode mode) {
  EvalReport report;
  report.class_count = matrix.class_count();
  report.per_class_iou = iou_per_class(matrix);
  report.miou = miou(matrix, mode);
  report.gt_pixels.resize(matrix.class_count());
  report.pred_pixels.resize(matrix.class_count());
  report.intersection_pixels.resize(matrix.class_count());
  for (std::size_t c = 0; c < matrix.class_count(); ++c) {
    report.gt_pixels[c] = matrix.row_sum(c);
    report.pred_pixels[c] = matrix.col_sum(c);
    report.intersection_pixels[c] = matrix.at(c, c);
  }
  return report;
}

std::string eval_report_to_json(const EvalReport& report, const ClassMap& class_map) {
  nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < report.class_count; ++c) {
    nlohmann::ordered_json entry{
        {"class_id", c},
        {"name", class_map.name(c)},
        {"gt_pixels", report.gt_pixels[c]},
        {"pred_pixels", report.pred_pixels[c]},
        {"intersection_pixels", report.intersection_pixels[c]},
    };
    if (report.per_class_iou[c].has_value()) {
      entry["iou"] = *report.per_class_iou[c];
    } else {
      entry["iou"] = nullptr;
    }
    per_class.push_back(entry);
  }
  nlohmann::ordered_json doc{{"per_class", per_class}, {"miou", report.miou}};
  return doc.dump(2) + "\n";
}

}  // namespace cutpaste
