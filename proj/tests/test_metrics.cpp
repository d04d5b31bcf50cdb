#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/metrics.hpp"

using cci::bin_by_cci;
using cci::CciBin;
using cci::class_medians;
using cci::Error;
using cci::ErrorCode;
using cci::evaluate_separability;
using cci::roc_auc;
using cci::roc_curve;
using cci::roc_points_to_csv;
using cci::ScoredItem;
using cci::separability_to_json;
using cci::separability_to_text;
using cci::stratification_to_json;
using cci::stratification_to_text;
using cci::stratified_accuracy;
using cci::StratificationTable;

namespace {

// Independent O(P*N) reference: every (positive, negative) pair contributes
// 1, 0.5 or 0.
double pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double sum = 0.0;
  for (double p : pos)
    for (double n : neg) {
      if (p > n)
        sum += 1.0;
      else if (p == n)
        sum += 0.5;
    }
  return sum / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double trapezoid_area(const std::vector<cci::RocPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) *
            (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

std::vector<ScoredItem> items_with_scores(const std::vector<double>& scores) {
  std::vector<ScoredItem> items;
  for (std::size_t i = 0; i < scores.size(); ++i)
    items.push_back({"i" + std::to_string(i + 1), scores[i], ""});
  return items;
}

}  // namespace

TEST_CASE("perfect and chance separations hit the exact endpoints") {
  std::vector<double> high{0.8, 0.9, 0.7};
  std::vector<double> low{0.1, 0.2, 0.0};
  CHECK(roc_auc(high, low) == 1.0);
  CHECK(roc_auc(low, high) == 0.0);
  std::vector<double> same{0.5, 0.5};
  CHECK(roc_auc(same, same) == 0.5);
}

TEST_CASE("ties get the half credit exactly") {
  // pairs: (0.9>0.1)=1, (0.9>0.5)=1, (0.5=0.5)=0.5, (0.5>0.1)=1 ... worked out:
  std::vector<double> pos{0.9, 0.5};
  std::vector<double> neg{0.5, 0.1};
  // (0.9,0.5)=1 (0.9,0.1)=1 (0.5,0.5)=0.5 (0.5,0.1)=1 -> 3.5/4
  CHECK(roc_auc(pos, neg) == 0.875);
}

TEST_CASE("empty classes are typed errors") {
  std::vector<double> some{0.5};
  std::vector<double> none;
  CHECK_THROWS_AS(roc_auc(none, some), Error);
  CHECK_THROWS_AS(roc_auc(some, none), Error);
  CHECK_THROWS_AS(roc_curve(none, some), Error);
  CHECK_THROWS_AS(class_medians(some, none), Error);
  try {
    roc_auc(none, some);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_class);
  }
}

TEST_CASE("midrank AUC equals the brute-force pairwise count") {
  std::mt19937 rng(31415);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n_pos = 1 + rng() % 40;
    const std::size_t n_neg = 1 + rng() % 40;
    std::vector<double> pos(n_pos), neg(n_neg);
    // Two-decimal quantization forces plenty of exact ties.
    for (auto& v : pos) v = static_cast<double>(rng() % 101) / 100.0;
    for (auto& v : neg) v = static_cast<double>(rng() % 101) / 100.0;
    const double expected = pairwise_auc(pos, neg);
    const double actual = roc_auc(pos, neg);
    CHECK(std::abs(actual - expected) < 1e-9);
  }
}

TEST_CASE("swapping classes mirrors the AUC") {
  std::mt19937 rng(8888);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pos(5 + rng() % 20), neg(5 + rng() % 20);
    for (auto& v : pos) v = static_cast<double>(rng() % 11) / 10.0;
    for (auto& v : neg) v = static_cast<double>(rng() % 11) / 10.0;
    CHECK(std::abs(roc_auc(pos, neg) + roc_auc(neg, pos) - 1.0) < 1e-12);
  }
}

TEST_CASE("AUC is invariant under strictly monotone transforms") {
  std::mt19937 rng(1234);
  std::vector<double> pos(20), neg(25);
  for (auto& v : pos) v = static_cast<double>(rng() % 101) / 100.0;
  for (auto& v : neg) v = static_cast<double>(rng() % 101) / 100.0;
  const double base = roc_auc(pos, neg);
  auto warp = [](std::vector<double> v) {
    for (auto& x : v) x = std::exp(3.0 * x) - 0.5;  // strictly increasing
    return v;
  };
  CHECK(roc_auc(warp(pos), warp(neg)) == base);
}

TEST_CASE("roc curve starts at (0,0), ends at (1,1) and is monotone") {
  std::mt19937 rng(777);
  std::vector<double> pos(12), neg(15);
  for (auto& v : pos) v = static_cast<double>(rng() % 21) / 20.0;
  for (auto& v : neg) v = static_cast<double>(rng() % 21) / 20.0;
  auto points = roc_curve(pos, neg);
  REQUIRE(points.size() >= 2);
  CHECK(points.front().fpr == 0.0);
  CHECK(points.front().tpr == 0.0);
  CHECK(points.back().fpr == 1.0);
  CHECK(points.back().tpr == 1.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    CHECK(points[i].fpr >= points[i - 1].fpr);
    CHECK(points[i].tpr >= points[i - 1].tpr);
  }
}

TEST_CASE("the trapezoid area under the roc curve equals the midrank AUC") {
  std::mt19937 rng(2025);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> pos(1 + rng() % 30), neg(1 + rng() % 30);
    for (auto& v : pos) v = static_cast<double>(rng() % 51) / 50.0;
    for (auto& v : neg) v = static_cast<double>(rng() % 51) / 50.0;
    CHECK(std::abs(trapezoid_area(roc_curve(pos, neg)) - roc_auc(pos, neg)) < 1e-9);
  }
}

TEST_CASE("a perfectly separating scorer passes through (0,1)") {
  std::vector<double> pos{0.9, 0.8};
  std::vector<double> neg{0.2, 0.1};
  auto points = roc_curve(pos, neg);
  const bool hits_corner = std::any_of(points.begin(), points.end(), [](auto& p) {
    return p.fpr == 0.0 && p.tpr == 1.0;
  });
  CHECK(hits_corner);
}

TEST_CASE("medians use the even-count mean-of-middles convention") {
  std::vector<double> odd{0.9, 0.2, 0.8};
  std::vector<double> even{0.1, 0.3};
  auto m = class_medians(odd, even);
  CHECK(m.c_median == 0.8);
  CHECK(m.g_median == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(m.delta == doctest::Approx(0.6).epsilon(1e-12));

  auto single = class_medians(std::vector<double>{0.42}, std::vector<double>{0.13});
  CHECK(single.c_median == 0.42);
  CHECK(single.g_median == 0.13);
}

TEST_CASE("medians are order-insensitive") {
  std::vector<double> a{0.5, 0.1, 0.9, 0.7};
  std::vector<double> b{0.9, 0.7, 0.5, 0.1};
  CHECK(class_medians(a, b).c_median == class_medians(b, a).g_median);
  CHECK(class_medians(a, b).c_median == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("the separability report is self-consistent") {
  std::vector<double> pos{0.9, 0.7, 0.6};
  std::vector<double> neg{0.4, 0.2};
  auto r = evaluate_separability(pos, neg);
  CHECK(r.auc == 1.0);
  CHECK(r.delta == doctest::Approx(r.c_median - r.g_median).epsilon(1e-15));
  CHECK(r.n_positive == 3);
  CHECK(r.n_negative == 2);
  CHECK(std::abs(trapezoid_area(r.roc_points) - r.auc) < 1e-12);

  auto j = separability_to_json(r);
  CHECK(j.at("auc") == r.auc);
  CHECK(j.at("n_positive") == 3);
  CHECK(j.at("roc_points").size() == r.roc_points.size());

  auto text = separability_to_text(r);
  CHECK(text.find("AUC") != std::string::npos);
  CHECK(text.find("1.0000") != std::string::npos);
  CHECK(text.find("Delta") != std::string::npos);

  auto csv = roc_points_to_csv(r.roc_points);
  CHECK(csv.rfind("fpr,tpr\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(r.roc_points.size()) + 1);
}

TEST_CASE("the default bin layout is the catch-all plus nine tenth-wide bins") {
  auto bins = bin_by_cci({});
  REQUIRE(bins.size() == 10);
  CHECK(bins[0].catch_all);
  CHECK(bins[0].range_label == "CCI ≤ 0.1");
  CHECK(bins[1].range_label == "0.1 < CCI ≤ 0.2");
  CHECK(bins[9].range_label == "0.9 < CCI ≤ 1");
  CHECK(bins[9].upper == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& bin : bins) CHECK(bin.item_indices.empty());
}

TEST_CASE("every item lands in exactly one bin") {
  // Scores straddle the boundaries: negatives and the exact edges.
  std::vector<double> scores{-0.8, -0.1, 0.0, 0.1, 0.10000001, 0.2,
                             0.25, 0.3,  0.9, 0.90000001, 1.0};
  auto items = items_with_scores(scores);
  auto bins = bin_by_cci(items);
  std::vector<int> seen(items.size(), 0);
  for (const auto& bin : bins)
    for (auto idx : bin.item_indices) ++seen[idx];
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));

  // Catch-all takes everything at or below 0.1, including all negatives.
  CHECK(bins[0].item_indices == std::vector<std::size_t>{0, 1, 2, 3});
  // (0.1, 0.2] holds the value just above the edge and the right edge itself.
  CHECK(bins[1].item_indices == std::vector<std::size_t>{4, 5});
  // (0.2, 0.3]
  CHECK(bins[2].item_indices == std::vector<std::size_t>{6, 7});
  // (0.8, 0.9] and (0.9, 1.0]
  CHECK(bins[8].item_indices == std::vector<std::size_t>{8});
  CHECK(bins[9].item_indices == std::vector<std::size_t>{9, 10});
}

TEST_CASE("bin boundaries are half-open on the left") {
  auto items = items_with_scores({0.2, 0.2000000000000001});
  auto bins = bin_by_cci(items);
  CHECK(bins[1].item_indices == std::vector<std::size_t>{0});
  CHECK(bins[2].item_indices == std::vector<std::size_t>{1});
}

TEST_CASE("custom widths and catch-all edges reshape the layout") {
  auto bins = bin_by_cci({}, 0.25, 0.25);
  REQUIRE(bins.size() == 4);
  CHECK(bins[0].range_label == "CCI ≤ 0.25");
  CHECK(bins[1].range_label == "0.25 < CCI ≤ 0.5");
  CHECK(bins[3].upper == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(bin_by_cci({}, 0.0, 0.1), Error);
}

TEST_CASE("stratified accuracy divides correct counts by bin sizes") {
  // Two bins populated: catch-all gets 2 items, (0.1,0.2] gets 3.
  auto items = items_with_scores({0.05, -0.2, 0.15, 0.18, 0.2});
  auto bins = bin_by_cci(items);
  std::map<std::string, std::map<std::string, bool>> predictions{
      {"i1", {{"m1", true}, {"m2", false}}},  {"i2", {{"m1", false}, {"m2", false}}},
      {"i3", {{"m1", true}, {"m2", true}}},   {"i4", {{"m1", true}, {"m2", true}}},
      {"i5", {{"m1", true}, {"m2", false}}},
  };
  auto table = stratified_accuracy(items, bins, predictions);
  CHECK(table.total_items == 5);
  REQUIRE(table.rows.size() == 10);
  CHECK(table.rows[0].n_items == 2);
  CHECK(*table.rows[0].accuracy_by_model.at("m1") == 0.5);
  CHECK(*table.rows[0].accuracy_by_model.at("m2") == 0.0);
  CHECK(table.rows[1].n_items == 3);
  CHECK(*table.rows[1].accuracy_by_model.at("m1") == 1.0);
  CHECK(*table.rows[1].accuracy_by_model.at("m2") ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  // Empty bins report no accuracy at all.
  CHECK_FALSE(table.rows[5].accuracy_by_model.at("m1").has_value());
  CHECK(table.overall_accuracy_by_model.at("m1") == 0.8);
  CHECK(table.overall_accuracy_by_model.at("m2") == 0.4);
}

TEST_CASE("overall accuracy equals the bin-size weighted mean of bin accuracies") {
  std::mt19937 rng(606);
  std::vector<double> scores;
  std::map<std::string, std::map<std::string, bool>> predictions;
  for (int i = 0; i < 150; ++i) {
    scores.push_back(static_cast<double>(static_cast<int>(rng() % 201) - 100) / 100.0);
    predictions["i" + std::to_string(i + 1)] = {{"m", rng() % 2 == 0}};
  }
  auto items = items_with_scores(scores);
  auto bins = bin_by_cci(items);
  auto table = stratified_accuracy(items, bins, predictions);

  double weighted = 0.0;
  std::size_t counted = 0;
  for (const auto& row : table.rows) {
    if (!row.n_items) continue;
    weighted += *row.accuracy_by_model.at("m") * static_cast<double>(row.n_items);
    counted += row.n_items;
  }
  CHECK(counted == table.total_items);
  CHECK(std::abs(weighted / static_cast<double>(counted) -
                 table.overall_accuracy_by_model.at("m")) < 1e-12);
}

TEST_CASE("missing predictions are typed errors in both directions") {
  auto items = items_with_scores({0.5, 0.6});
  auto bins = bin_by_cci(items);
  std::map<std::string, std::map<std::string, bool>> missing_item{
      {"i1", {{"m1", true}}}};
  try {
    stratified_accuracy(items, bins, missing_item);
    FAIL("expected MissingPrediction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_prediction);
  }
  std::map<std::string, std::map<std::string, bool>> missing_model{
      {"i1", {{"m1", true}, {"m2", true}}}, {"i2", {{"m1", false}}}};
  try {
    stratified_accuracy(items, bins, missing_model);
    FAIL("expected MissingPrediction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_prediction);
  }
}

TEST_CASE("stratification emitters carry the table faithfully") {
  auto items = items_with_scores({0.05, 0.55, 0.58});
  auto bins = bin_by_cci(items);
  std::map<std::string, std::map<std::string, bool>> predictions{
      {"i1", {{"model-a", true}}},
      {"i2", {{"model-a", false}}},
      {"i3", {{"model-a", true}}},
  };
  auto table = stratified_accuracy(items, bins, predictions);

  auto j = stratification_to_json(table);
  CHECK(j.at("total_items") == 3);
  CHECK(j.at("bins").size() == 10);
  CHECK(j.at("bins")[0].at("range") == "CCI ≤ 0.1");
  CHECK(j.at("bins")[0].at("accuracy_by_model").at("model-a") == 1.0);
  CHECK(j.at("bins")[1].at("accuracy_by_model").at("model-a").is_null());
  CHECK(j.at("bins")[5].at("n_items") == 2);
  CHECK(j.at("overall_accuracy_by_model").at("model-a") ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  auto text = stratification_to_text(table);
  CHECK(text.find("Range") != std::string::npos);
  CHECK(text.find("model-a") != std::string::npos);
  CHECK(text.find("CCI ≤ 0.1") != std::string::npos);
  CHECK(text.find("Overall") != std::string::npos);
  CHECK(text.find("-") != std::string::npos);  // empty-bin placeholder

  // Every row lines up: same display width (code points, not bytes) per line.
  auto width = [](const std::string& line) {
    std::size_t w = 0;
    for (unsigned char c : line)
      if ((c & 0xC0) != 0x80) ++w;
    return w;
  };
  auto lines = [&] {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    return out;
  }();
  REQUIRE(lines.size() == 12);  // header + 10 bins + overall
  // Data rows are all padded to the same width; the header may be narrower
  // than rows whose numeric cells outgrow their headings, but every line in
  // this fixed example matches exactly.
  for (const auto& line : lines) CHECK(width(line) == width(lines[0]));
}
