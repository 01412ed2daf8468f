#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

#include "eat/core.hpp"

namespace eat {

using CountMatrix = Eigen::Matrix<std::int64_t, 3, 3>;

/// Rows are true classes, columns predicted classes, both in order 0,1,2.
struct ConfusionMatrix {
  CountMatrix cells = CountMatrix::Zero();

  std::int64_t total() const { return cells.sum(); }
  std::int64_t operator()(CyberLabel truth, CyberLabel predicted) const {
    return cells(to_int(truth), to_int(predicted));
  }
};

ConfusionMatrix confusion(std::span<const CyberLabel> truths,
                          std::span<const CyberLabel> predictions);

/// Zero denominators produce 0 with the matching flag set.
struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

using PerClassMetrics = std::array<ClassMetrics, 3>;

PerClassMetrics per_class_prf(const ConfusionMatrix& matrix);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Unweighted mean over the three classes; macro-F1 is the mean of the
/// per-class F1 values. Throws unless exactly three classes are given.
Prf macro_average(std::span<const ClassMetrics> per_class);

struct EvalReport {
  PerClassMetrics per_class{};
  Prf macro;
  ConfusionMatrix confusion;
  std::size_t n_test = 0;
  std::uint64_t seed = 0;
};

EvalReport evaluate(std::span<const CyberLabel> truths, std::span<const CyberLabel> predictions,
                    std::uint64_t seed);

/// Field-wise mean and population standard deviation over runs.
struct AggregateReport {
  Eigen::Matrix3d per_class_mean = Eigen::Matrix3d::Zero();  // row = class, cols = P,R,F1
  Eigen::Matrix3d per_class_std = Eigen::Matrix3d::Zero();
  Eigen::Vector3d macro_mean = Eigen::Vector3d::Zero();      // P,R,F1
  Eigen::Vector3d macro_std = Eigen::Vector3d::Zero();
  Eigen::Matrix3d confusion_mean = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d confusion_std = Eigen::Matrix3d::Zero();
  std::size_t n_test = 0;
  std::size_t runs = 0;
  std::vector<std::uint64_t> seeds;
};

/// Throws on an empty list or when n_test differs between reports.
AggregateReport aggregate_runs(std::span<const EvalReport> reports);

// CSV layouts. Rows follow class order 0,1,2 followed by the macro row "A".
void write_report_csv(std::ostream& out, const EvalReport& report);
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& matrix);
void write_confusion_csv(std::ostream& out, const Eigen::Matrix3d& matrix);
void write_aggregate_csv(std::ostream& out, const AggregateReport& report);

/// Side-by-side regimes: rows H, D, A; columns <regime>_P, <regime>_R, <regime>_F1.
void write_comparison_csv(std::ostream& out,
                          std::span<const std::pair<std::string, AggregateReport>> regimes);

void to_json(nlohmann::json& j, const AggregateReport& report);
void from_json(const nlohmann::json& j, AggregateReport& report);

}  // namespace eat
