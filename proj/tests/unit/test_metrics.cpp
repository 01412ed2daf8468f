#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "eat/metrics.hpp"

using namespace eat;

namespace {

std::vector<CyberLabel> labels(std::initializer_list<int> values) {
  std::vector<CyberLabel> out;
  for (const int v : values) out.push_back(cyber_label_from_int(v));
  return out;
}

ConfusionMatrix matrix_of(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  ConfusionMatrix m;
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (const auto v : row) m.cells(r, c++) = v;
    ++r;
  }
  return m;
}

EvalReport report_with_f1(double f1, std::uint64_t seed) {
  EvalReport r;
  for (auto& m : r.per_class) m.f1 = f1;
  r.macro.f1 = f1;
  r.n_test = 10;
  r.seed = seed;
  return r;
}

}  // namespace

TEST_CASE("confusion counts") {
  const auto perfect = confusion(labels({0, 1, 2, 2}), labels({0, 1, 2, 2}));
  CHECK(perfect.cells == (CountMatrix() << 1, 0, 0, 0, 1, 0, 0, 0, 2).finished());

  const auto m = confusion(labels({1, 1, 2}), labels({1, 0, 2}));
  CHECK(m(CyberLabel::harassment, CyberLabel::harassment) == 1);
  CHECK(m(CyberLabel::harassment, CyberLabel::non_cyberbullying) == 1);
  CHECK(m(CyberLabel::defamation, CyberLabel::defamation) == 1);
  CHECK(m.total() == 3);

  CHECK_THROWS_AS(confusion(labels({0, 1}), labels({0})), Error);
}

TEST_CASE("confusion on 200 random pairs equals a direct tally") {
  std::mt19937_64 rng(200);
  std::vector<CyberLabel> t;
  std::vector<CyberLabel> p;
  std::int64_t tally[3][3] = {};
  for (int i = 0; i < 200; ++i) {
    const int a = static_cast<int>(rng() % 3);
    const int b = static_cast<int>(rng() % 3);
    t.push_back(cyber_label_from_int(a));
    p.push_back(cyber_label_from_int(b));
    ++tally[a][b];
  }
  const auto m = confusion(t, p);
  CHECK(m.total() == 200);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) CHECK(m.cells(a, b) == tally[a][b]);
  }
}

TEST_CASE("per-class metrics of a diagonal matrix are all one") {
  for (const auto& m : per_class_prf(matrix_of({{3, 0, 0}, {0, 4, 0}, {0, 0, 5}}))) {
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);
  }
}

TEST_CASE("class absent from truths and predictions is zero and flagged") {
  const auto per_class = per_class_prf(matrix_of({{5, 1, 0}, {2, 7, 0}, {0, 0, 0}}));
  const auto& d = per_class[2];
  CHECK(d.precision == 0.0);
  CHECK(d.recall == 0.0);
  CHECK(d.f1 == 0.0);
  CHECK(d.precision_undefined);
  CHECK(d.recall_undefined);
  CHECK(d.f1_undefined);
  CHECK_FALSE(per_class[0].precision_undefined);
}

TEST_CASE("hand-computed harassment metrics") {
  const auto per_class = per_class_prf(matrix_of({{80, 20, 0}, {10, 90, 0}, {0, 0, 0}}));
  const auto& h = per_class[1];
  CHECK(h.precision == doctest::Approx(90.0 / 110.0).epsilon(1e-12));
  CHECK(h.recall == doctest::Approx(0.9).epsilon(1e-12));
  // 2 * (9/11) * 0.9 / (9/11 + 0.9) = 18/21
  CHECK(h.f1 == doctest::Approx(18.0 / 21.0).epsilon(1e-12));
  CHECK(h.f1 == doctest::Approx(0.857).epsilon(1e-3));
}

TEST_CASE("macro averages") {
  std::array<ClassMetrics, 3> ones{};
  for (auto& m : ones) m = {1, 1, 1};
  const auto all = macro_average(ones);
  CHECK(all.precision == 1.0);
  CHECK(all.f1 == 1.0);

  // Per-class F1 0.89 (H), 0.76 (D) and the back-solved 0.87 give the reported 0.84.
  std::array<ClassMetrics, 3> table{};
  table[0].f1 = 3 * 0.84 - 0.89 - 0.76;
  table[1].f1 = 0.89;
  table[2].f1 = 0.76;
  CHECK(table[0].f1 == doctest::Approx(0.87));
  CHECK(macro_average(table).f1 == doctest::Approx(0.84).epsilon(1e-12));

  std::array<ClassMetrics, 3> zeros{};
  CHECK(macro_average(zeros).f1 == 0.0);
  std::array<ClassMetrics, 2> two{};
  CHECK_THROWS_AS(macro_average(two), Error);
}

TEST_CASE("macro F1 is the mean of per-class F1, not F1 of means") {
  const auto report = evaluate(labels({0, 0, 0, 1, 2, 2}), labels({0, 1, 1, 1, 2, 0}), 1);
  double mean_f1 = 0;
  for (const auto& m : report.per_class) mean_f1 += m.f1 / 3;
  CHECK(report.macro.f1 == doctest::Approx(mean_f1).epsilon(1e-12));
  const double p = report.macro.precision;
  const double r = report.macro.recall;
  CHECK(report.macro.f1 != doctest::Approx(2 * p * r / (p + r)));
}

TEST_CASE("metrics are permutation invariant and bounded") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<std::pair<int, int>> pairs(n);
    for (auto& [a, b] : pairs) {
      a = static_cast<int>(rng() % 3);
      b = static_cast<int>(rng() % 3);
    }
    auto run = [](const std::vector<std::pair<int, int>>& ps) {
      std::vector<CyberLabel> t;
      std::vector<CyberLabel> p;
      for (const auto& [a, b] : ps) {
        t.push_back(cyber_label_from_int(a));
        p.push_back(cyber_label_from_int(b));
      }
      return evaluate(t, p, 0);
    };
    const auto base = run(pairs);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const auto shuffled = run(pairs);
    CHECK(base.confusion.cells == shuffled.confusion.cells);
    CHECK(base.macro.f1 == shuffled.macro.f1);
    CHECK(base.confusion.total() == static_cast<std::int64_t>(n));
    for (const auto& m : base.per_class) {
      for (const double v : {m.precision, m.recall, m.f1}) CHECK((v >= 0.0 && v <= 1.0));
    }
  }
}

TEST_CASE("balanced diagonal-heavy matrix: macro F1 equals the shared per-class F1") {
  const auto per_class = per_class_prf(matrix_of({{8, 1, 1}, {1, 8, 1}, {1, 1, 8}}));
  const auto macro = macro_average(per_class);
  CHECK(macro.f1 == doctest::Approx(per_class[0].f1).epsilon(1e-12));
  CHECK(per_class[0].f1 == doctest::Approx(0.8));
}

TEST_CASE("aggregation of one and two reports") {
  const std::vector<EvalReport> one{report_with_f1(0.6, 1)};
  const auto single = aggregate_runs(one);
  CHECK(single.macro_mean(2) == 0.6);
  CHECK(single.macro_std(2) == 0.0);

  const std::vector<EvalReport> two{report_with_f1(0.6, 1), report_with_f1(0.8, 2)};
  const auto agg = aggregate_runs(two);
  CHECK(agg.macro_mean(2) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(agg.macro_std(2) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(agg.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(agg.runs == 2);
}

TEST_CASE("aggregation of five reports matches field-wise means") {
  std::mt19937_64 rng(5);
  std::vector<EvalReport> reports;
  for (int i = 0; i < 5; ++i) {
    std::vector<CyberLabel> t;
    std::vector<CyberLabel> p;
    for (int k = 0; k < 40; ++k) {
      t.push_back(cyber_label_from_int(static_cast<int>(rng() % 3)));
      p.push_back(cyber_label_from_int(static_cast<int>(rng() % 3)));
    }
    reports.push_back(evaluate(t, p, static_cast<std::uint64_t>(i + 1)));
  }
  const auto agg = aggregate_runs(reports);
  for (int c = 0; c < 3; ++c) {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    for (const auto& r : reports) {
      precision += r.per_class[static_cast<std::size_t>(c)].precision;
      recall += r.per_class[static_cast<std::size_t>(c)].recall;
      f1 += r.per_class[static_cast<std::size_t>(c)].f1;
    }
    CHECK(agg.per_class_mean(c, 0) == doctest::Approx(precision / 5).epsilon(1e-12));
    CHECK(agg.per_class_mean(c, 1) == doctest::Approx(recall / 5).epsilon(1e-12));
    CHECK(agg.per_class_mean(c, 2) == doctest::Approx(f1 / 5).epsilon(1e-12));
    for (int p = 0; p < 3; ++p) {
      double cell = 0;
      for (const auto& r : reports) cell += static_cast<double>(r.confusion.cells(c, p));
      CHECK(agg.confusion_mean(c, p) == doctest::Approx(cell / 5).epsilon(1e-12));
    }
  }
  double f1 = 0;
  for (const auto& r : reports) f1 += r.macro.f1;
  CHECK(agg.macro_mean(2) == doctest::Approx(f1 / 5).epsilon(1e-12));
}

TEST_CASE("aggregation errors") {
  CHECK_THROWS_AS(aggregate_runs(std::vector<EvalReport>{}), Error);
  auto a = report_with_f1(0.5, 1);
  auto b = report_with_f1(0.5, 2);
  b.n_test = 11;
  const std::vector<EvalReport> mixed{a, b};
  CHECK_THROWS_AS(aggregate_runs(mixed), Error);
}

TEST_CASE("report CSV layouts") {
  const auto report = evaluate(labels({0, 1, 1}), labels({0, 1, 0}), 3);
  std::ostringstream out;
  write_report_csv(out, report);
  const std::string csv = out.str();
  CHECK(csv.rfind("class,precision,recall,f1,undefined\nN,", 0) == 0);
  CHECK(csv.find("\nD,0,0,0,PRF\n") != std::string::npos);
  CHECK(csv.find("\nA,") != std::string::npos);

  std::ostringstream conf;
  write_confusion_csv(conf, report.confusion);
  CHECK(conf.str() == "true\\pred,0,1,2\n0,1,0,0\n1,1,1,0\n2,0,0,0\n");

  const std::vector<EvalReport> reports{report};
  const std::vector<std::pair<std::string, AggregateReport>> regimes{
      {"baseline", aggregate_runs(reports)}, {"few_shot", aggregate_runs(reports)}};
  std::ostringstream table;
  write_comparison_csv(table, regimes);
  std::istringstream lines(table.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "row,baseline_P,baseline_R,baseline_F1,few_shot_P,few_shot_R,few_shot_F1");
  std::vector<char> rows;
  for (std::string line; std::getline(lines, line);) rows.push_back(line[0]);
  CHECK(rows == std::vector<char>{'H', 'D', 'A'});
}

TEST_CASE("aggregate report JSON round-trip") {
  const std::vector<EvalReport> reports{
      evaluate(labels({0, 1, 2, 2}), labels({0, 1, 1, 2}), 1),
      evaluate(labels({0, 1, 2, 2}), labels({0, 0, 2, 2}), 2)};
  const auto agg = aggregate_runs(reports);
  const nlohmann::json j = agg;
  const auto back = nlohmann::json::parse(j.dump()).get<AggregateReport>();
  CHECK(back.per_class_mean == agg.per_class_mean);
  CHECK(back.macro_std == agg.macro_std);
  CHECK(back.confusion_mean == agg.confusion_mean);
  CHECK(back.seeds == agg.seeds);
}
