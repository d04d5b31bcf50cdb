#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "core/errors.hpp"

namespace cci {
namespace {

void require_classes(std::span<const double> positives,
                     std::span<const double> negatives) {
  if (positives.empty()) raise(ErrorCode::empty_class, "no positive scores");
  if (negatives.empty()) raise(ErrorCode::empty_class, "no negative scores");
}

double median_of(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// %.6g with no trailing zeros; bin edges like 0.1 stay "0.1".
std::string format_edge(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Column width in code points, not bytes ("≤" must count as 1).
std::size_t display_width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++w;
  return w;
}

std::string pad_right(const std::string& s, std::size_t width) {
  std::string out = s;
  const std::size_t w = display_width(s);
  if (w < width) out.append(width - w, ' ');
  return out;
}

std::string pad_left(const std::string& s, std::size_t width) {
  const std::size_t w = display_width(s);
  std::string out;
  if (w < width) out.append(width - w, ' ');
  out += s;
  return out;
}

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

}  // namespace

double roc_auc(std::span<const double> positives, std::span<const double> negatives) {
  require_classes(positives, negatives);

  struct Tagged {
    double score;
    bool positive;
  };
  std::vector<Tagged> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Tagged& a, const Tagged& b) { return a.score < b.score; });

  // Midranks give each member of a tie group the group's mean rank, which is
  // exactly the 0.5-per-tied-pair convention.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].positive) positive_rank_sum += midrank;
    i = j;
  }

  const double p = static_cast<double>(positives.size());
  const double n = static_cast<double>(negatives.size());
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

std::vector<RocPoint> roc_curve(std::span<const double> positives,
                                std::span<const double> negatives) {
  require_classes(positives, negatives);

  struct Tagged {
    double score;
    bool positive;
  };
  std::vector<Tagged> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Tagged& a, const Tagged& b) { return a.score > b.score; });

  const double p = static_cast<double>(positives.size());
  const double n = static_cast<double>(negatives.size());

  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    for (std::size_t k = i; k < j; ++k)
      (all[k].positive ? tp : fp) += 1;
    points.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p});
    i = j;
  }
  return points;
}

ClassMedians class_medians(std::span<const double> positives,
                           std::span<const double> negatives) {
  require_classes(positives, negatives);
  ClassMedians m;
  m.c_median = median_of(positives);
  m.g_median = median_of(negatives);
  m.delta = m.c_median - m.g_median;
  return m;
}

SeparabilityReport evaluate_separability(std::span<const double> positives,
                                         std::span<const double> negatives) {
  SeparabilityReport report;
  report.auc = roc_auc(positives, negatives);
  const ClassMedians m = class_medians(positives, negatives);
  report.c_median = m.c_median;
  report.g_median = m.g_median;
  report.delta = m.delta;
  report.roc_points = roc_curve(positives, negatives);
  report.n_positive = positives.size();
  report.n_negative = negatives.size();
  return report;
}

std::vector<CciBin> bin_by_cci(const std::vector<ScoredItem>& items,
                               double width, double lower_catchall) {
  if (width <= 0.0) raise(ErrorCode::invalid_argument, "bin width must be positive");

  std::vector<CciBin> bins;
  CciBin first;
  first.catch_all = true;
  first.upper = lower_catchall;
  first.range_label = "CCI ≤ " + format_edge(lower_catchall);
  bins.push_back(std::move(first));

  auto add_bin = [&] {
    const std::size_t i = bins.size();  // i-th upper edge = lower + i*width
    CciBin bin;
    bin.lower = bins.back().upper;
    bin.upper = lower_catchall + static_cast<double>(i) * width;
    bin.range_label = format_edge(bin.lower) + " < CCI ≤ " + format_edge(bin.upper);
    bins.push_back(std::move(bin));
  };

  // Fixed layout up to the score-line top (CCI never exceeds 1).
  while (bins.back().upper < 1.0 - width * 1e-9) add_bin();

  for (std::size_t idx = 0; idx < items.size(); ++idx) {
    const double score = items[idx].score;
    while (score > bins.back().upper) add_bin();  // defensive: out-of-domain score
    for (auto& bin : bins) {
      if (score <= bin.upper) {
        bin.item_indices.push_back(idx);
        break;
      }
    }
  }
  return bins;
}

StratificationTable stratified_accuracy(
    const std::vector<ScoredItem>& items, const std::vector<CciBin>& bins,
    const std::map<std::string, std::map<std::string, bool>>& predictions) {
  // The model set is the union over the prediction table; every item must
  // then cover every model.
  std::vector<std::string> models;
  for (const auto& [item_id, by_model] : predictions)
    for (const auto& [model, correct] : by_model)
      if (std::find(models.begin(), models.end(), model) == models.end())
        models.push_back(model);
  std::sort(models.begin(), models.end());

  auto flags_for = [&](const std::string& item_id) -> const std::map<std::string, bool>& {
    auto it = predictions.find(item_id);
    if (it == predictions.end())
      raise(ErrorCode::missing_prediction, "no predictions for item " + item_id);
    return it->second;
  };

  StratificationTable table;
  std::map<std::string, std::size_t> overall_correct;
  std::size_t total = 0;

  for (const auto& bin : bins) {
    StratificationTable::Row row;
    row.range_label = bin.range_label;
    row.n_items = bin.item_indices.size();
    std::map<std::string, std::size_t> correct;
    for (std::size_t idx : bin.item_indices) {
      const auto& flags = flags_for(items.at(idx).item_id);
      for (const auto& model : models) {
        auto it = flags.find(model);
        if (it == flags.end())
          raise(ErrorCode::missing_prediction,
                "item " + items.at(idx).item_id + " has no prediction for model " + model);
        if (it->second) {
          ++correct[model];
          ++overall_correct[model];
        }
      }
    }
    for (const auto& model : models) {
      if (row.n_items == 0) {
        row.accuracy_by_model[model] = std::nullopt;
      } else {
        row.accuracy_by_model[model] =
            static_cast<double>(correct[model]) / static_cast<double>(row.n_items);
      }
    }
    total += row.n_items;
    table.rows.push_back(std::move(row));
  }

  table.total_items = total;
  for (const auto& model : models) {
    table.overall_accuracy_by_model[model] =
        total == 0 ? 0.0
                   : static_cast<double>(overall_correct[model]) / static_cast<double>(total);
  }
  return table;
}

nlohmann::json separability_to_json(const SeparabilityReport& report) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : report.roc_points)
    points.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}});
  return {
      {"auc", report.auc},
      {"c_median", report.c_median},
      {"g_median", report.g_median},
      {"delta", report.delta},
      {"n_positive", report.n_positive},
      {"n_negative", report.n_negative},
      {"roc_points", std::move(points)},
  };
}

std::string separability_to_text(const SeparabilityReport& report) {
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"AUC", fixed(report.auc, 4)},
      {"C_median", fixed(report.c_median, 4)},
      {"G_median", fixed(report.g_median, 4)},
      {"Delta", fixed(report.delta, 4)},
      {"positives", std::to_string(report.n_positive)},
      {"negatives", std::to_string(report.n_negative)},
  };
  std::size_t key_w = 0, val_w = 0;
  for (const auto& [k, v] : rows) {
    key_w = std::max(key_w, display_width(k));
    val_w = std::max(val_w, display_width(v));
  }
  std::string out;
  for (const auto& [k, v] : rows)
    out += pad_right(k, key_w) + "  " + pad_left(v, val_w) + "\n";
  return out;
}

std::string roc_points_to_csv(const std::vector<RocPoint>& points) {
  std::string out = "fpr,tpr\n";
  for (const auto& p : points) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", p.fpr, p.tpr);
    out += buf;
  }
  return out;
}

nlohmann::json stratification_to_json(const StratificationTable& table) {
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json acc = nlohmann::json::object();
    for (const auto& [model, a] : row.accuracy_by_model)
      acc[model] = a ? nlohmann::json(*a) : nlohmann::json(nullptr);
    bins.push_back({{"range", row.range_label},
                    {"n_items", row.n_items},
                    {"accuracy_by_model", std::move(acc)}});
  }
  return {
      {"bins", std::move(bins)},
      {"overall_accuracy_by_model", table.overall_accuracy_by_model},
      {"total_items", table.total_items},
  };
}

std::string stratification_to_text(const StratificationTable& table) {
  std::vector<std::string> models;
  for (const auto& [model, acc] : table.overall_accuracy_by_model)
    models.push_back(model);

  std::size_t range_w = display_width("Overall");
  for (const auto& row : table.rows)
    range_w = std::max(range_w, display_width(row.range_label));
  std::size_t n_w = std::max<std::size_t>(display_width("N"),
                                          std::to_string(table.total_items).size());
  std::vector<std::size_t> model_w;
  for (const auto& model : models)
    model_w.push_back(std::max<std::size_t>(display_width(model), 5));

  std::string out = pad_right("Range", range_w) + "  " + pad_left("N", n_w);
  for (std::size_t m = 0; m < models.size(); ++m)
    out += "  " + pad_left(models[m], model_w[m]);
  out += "\n";

  auto emit_row = [&](const std::string& label, std::size_t n,
                      const std::map<std::string, std::optional<double>>& acc) {
    out += pad_right(label, range_w) + "  " + pad_left(std::to_string(n), n_w);
    for (std::size_t m = 0; m < models.size(); ++m) {
      auto it = acc.find(models[m]);
      const std::string cell =
          (it != acc.end() && it->second) ? fixed(*it->second, 3) : "-";
      out += "  " + pad_left(cell, model_w[m]);
    }
    out += "\n";
  };

  for (const auto& row : table.rows)
    emit_row(row.range_label, row.n_items, row.accuracy_by_model);

  std::map<std::string, std::optional<double>> overall;
  for (const auto& [model, acc] : table.overall_accuracy_by_model)
    overall[model] = acc;
  emit_row("Overall", table.total_items, overall);
  return out;
}

}  // namespace cci
