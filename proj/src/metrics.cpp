#include "eat/metrics.hpp"

#include <cmath>
#include <ostream>

namespace eat {

using nlohmann::json;

ConfusionMatrix confusion(std::span<const CyberLabel> truths,
                          std::span<const CyberLabel> predictions) {
  if (truths.size() != predictions.size()) {
    throw Error("confusion: " + std::to_string(truths.size()) + " truths vs " +
                std::to_string(predictions.size()) + " predictions");
  }
  ConfusionMatrix matrix;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const int t = to_int(truths[i]);
    const int p = to_int(predictions[i]);
    if (t < 0 || t > 2 || p < 0 || p > 2) {
      throw Error("confusion: label out of range at position " + std::to_string(i));
    }
    ++matrix.cells(t, p);
  }
  return matrix;
}

PerClassMetrics per_class_prf(const ConfusionMatrix& matrix) {
  PerClassMetrics out{};
  for (int c = 0; c < 3; ++c) {
    const auto tp = static_cast<double>(matrix.cells(c, c));
    const auto predicted = static_cast<double>(matrix.cells.col(c).sum());
    const auto actual = static_cast<double>(matrix.cells.row(c).sum());
    auto& m = out[static_cast<std::size_t>(c)];
    if (predicted > 0) {
      m.precision = tp / predicted;
    } else {
      m.precision_undefined = true;
    }
    if (actual > 0) {
      m.recall = tp / actual;
    } else {
      m.recall_undefined = true;
    }
    if (m.precision + m.recall > 0) {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
      m.f1_undefined = true;
    }
  }
  return out;
}

Prf macro_average(std::span<const ClassMetrics> per_class) {
  if (per_class.size() != 3) {
    throw Error("macro_average: expected 3 classes, got " + std::to_string(per_class.size()));
  }
  Prf macro;
  for (const auto& m : per_class) {
    macro.precision += m.precision;
    macro.recall += m.recall;
    macro.f1 += m.f1;
  }
  macro.precision /= 3.0;
  macro.recall /= 3.0;
  macro.f1 /= 3.0;
  return macro;
}

EvalReport evaluate(std::span<const CyberLabel> truths, std::span<const CyberLabel> predictions,
                    std::uint64_t seed) {
  EvalReport report;
  report.confusion = confusion(truths, predictions);
  report.per_class = per_class_prf(report.confusion);
  report.macro = macro_average(report.per_class);
  report.n_test = truths.size();
  report.seed = seed;
  return report;
}

AggregateReport aggregate_runs(std::span<const EvalReport> reports) {
  if (reports.empty()) throw Error("aggregate_runs: no reports");
  AggregateReport agg;
  agg.n_test = reports.front().n_test;
  agg.runs = reports.size();
  for (const auto& r : reports) {
    if (r.n_test != agg.n_test) {
      throw Error("aggregate_runs: n_test differs (" + std::to_string(agg.n_test) + " vs " +
                  std::to_string(r.n_test) + ")");
    }
    agg.seeds.push_back(r.seed);
  }

  auto fields = [](const EvalReport& r) {
    struct Fields {
      Eigen::Matrix3d per_class;
      Eigen::Vector3d macro;
      Eigen::Matrix3d confusion;
    } f;
    for (int c = 0; c < 3; ++c) {
      const auto& m = r.per_class[static_cast<std::size_t>(c)];
      f.per_class.row(c) << m.precision, m.recall, m.f1;
    }
    f.macro << r.macro.precision, r.macro.recall, r.macro.f1;
    f.confusion = r.confusion.cells.cast<double>();
    return f;
  };

  const double n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    const auto f = fields(r);
    agg.per_class_mean += f.per_class;
    agg.macro_mean += f.macro;
    agg.confusion_mean += f.confusion;
  }
  agg.per_class_mean /= n;
  agg.macro_mean /= n;
  agg.confusion_mean /= n;
  for (const auto& r : reports) {
    const auto f = fields(r);
    agg.per_class_std += (f.per_class - agg.per_class_mean).cwiseAbs2();
    agg.macro_std += (f.macro - agg.macro_mean).cwiseAbs2();
    agg.confusion_std += (f.confusion - agg.confusion_mean).cwiseAbs2();
  }
  agg.per_class_std = (agg.per_class_std / n).cwiseSqrt();
  agg.macro_std = (agg.macro_std / n).cwiseSqrt();
  agg.confusion_std = (agg.confusion_std / n).cwiseSqrt();
  return agg;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "class,precision,recall,f1,undefined\n";
  for (int c = 0; c < 3; ++c) {
    const auto& m = report.per_class[static_cast<std::size_t>(c)];
    std::string flags;
    if (m.precision_undefined) flags += "P";
    if (m.recall_undefined) flags += "R";
    if (m.f1_undefined) flags += "F";
    out << short_name(static_cast<CyberLabel>(c)) << ',' << format_double(m.precision) << ','
        << format_double(m.recall) << ',' << format_double(m.f1) << ',' << flags << '\n';
  }
  out << "A," << format_double(report.macro.precision) << ','
      << format_double(report.macro.recall) << ',' << format_double(report.macro.f1) << ",\n";
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& matrix) {
  out << "true\\pred,0,1,2\n";
  for (int t = 0; t < 3; ++t) {
    out << t;
    for (int p = 0; p < 3; ++p) out << ',' << matrix.cells(t, p);
    out << '\n';
  }
}

void write_confusion_csv(std::ostream& out, const Eigen::Matrix3d& matrix) {
  out << "true\\pred,0,1,2\n";
  for (int t = 0; t < 3; ++t) {
    out << t;
    for (int p = 0; p < 3; ++p) out << ',' << format_double(matrix(t, p));
    out << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const AggregateReport& report) {
  out << "class,precision,recall,f1,precision_std,recall_std,f1_std\n";
  auto row = [&](std::string_view name, const auto& mean, const auto& std) {
    out << name;
    for (int i = 0; i < 3; ++i) out << ',' << format_double(mean(i));
    for (int i = 0; i < 3; ++i) out << ',' << format_double(std(i));
    out << '\n';
  };
  for (int c = 0; c < 3; ++c) {
    row(short_name(static_cast<CyberLabel>(c)), report.per_class_mean.row(c),
        report.per_class_std.row(c));
  }
  row("A", report.macro_mean, report.macro_std);
}

void write_comparison_csv(std::ostream& out,
                          std::span<const std::pair<std::string, AggregateReport>> regimes) {
  out << "row";
  for (const auto& [name, report] : regimes) {
    out << ',' << name << "_P," << name << "_R," << name << "_F1";
  }
  out << '\n';
  for (const int c : {1, 2}) {
    out << short_name(static_cast<CyberLabel>(c));
    for (const auto& [name, report] : regimes) {
      for (int i = 0; i < 3; ++i) out << ',' << format_double(report.per_class_mean(c, i));
    }
    out << '\n';
  }
  out << 'A';
  for (const auto& [name, report] : regimes) {
    for (int i = 0; i < 3; ++i) out << ',' << format_double(report.macro_mean(i));
  }
  out << '\n';
}

namespace {

template <typename M>
json matrix_to_json(const M& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

template <typename M>
void matrix_from_json(const json& j, M& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
    }
  }
}

}  // namespace

void to_json(json& j, const AggregateReport& report) {
  j = json{{"per_class_mean", matrix_to_json(report.per_class_mean)},
           {"per_class_std", matrix_to_json(report.per_class_std)},
           {"macro_mean", matrix_to_json(report.macro_mean)},
           {"macro_std", matrix_to_json(report.macro_std)},
           {"confusion_mean", matrix_to_json(report.confusion_mean)},
           {"confusion_std", matrix_to_json(report.confusion_std)},
           {"n_test", report.n_test},
           {"runs", report.runs},
           {"seeds", report.seeds}};
}

void from_json(const json& j, AggregateReport& report) {
  try {
    matrix_from_json(j.at("per_class_mean"), report.per_class_mean);
    matrix_from_json(j.at("per_class_std"), report.per_class_std);
    matrix_from_json(j.at("macro_mean"), report.macro_mean);
    matrix_from_json(j.at("macro_std"), report.macro_std);
    matrix_from_json(j.at("confusion_mean"), report.confusion_mean);
    matrix_from_json(j.at("confusion_std"), report.confusion_std);
    report.n_test = j.at("n_test").get<std::size_t>();
    report.runs = j.at("runs").get<std::size_t>();
    report.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    throw Error(std::string("aggregate report: ") + e.what());
  }
}

}  // namespace eat
