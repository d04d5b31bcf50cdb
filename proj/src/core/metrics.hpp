#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cci {

struct ScoredItem {
  std::string item_id;
  double score = 0.0;              // CCI in [-1,1] or baseline in [0,1]
  std::string label;               // "culture-specific" / "general"; empty when unused
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Mann–Whitney AUC: (#{pos > neg} + 0.5 * #{pos = neg}) / (|P| * |N|),
// computed with midranks so tied scores get the 0.5 convention exactly.
// Throws EmptyClass.
double roc_auc(std::span<const double> positives, std::span<const double> negatives);

// ROC points at every distinct threshold, equal scores grouped into one step;
// starts at (0,0), ends at (1,1). Trapezoidal area equals roc_auc.
std::vector<RocPoint> roc_curve(std::span<const double> positives,
                                std::span<const double> negatives);

struct ClassMedians {
  double c_median = 0.0;
  double g_median = 0.0;
  double delta = 0.0;  // c_median - g_median
};

// Even-count median = mean of the two middle order statistics.
ClassMedians class_medians(std::span<const double> positives,
                           std::span<const double> negatives);

struct SeparabilityReport {
  double auc = 0.0;
  double c_median = 0.0;
  double g_median = 0.0;
  double delta = 0.0;
  std::vector<RocPoint> roc_points;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
};

SeparabilityReport evaluate_separability(std::span<const double> positives,
                                         std::span<const double> negatives);

struct CciBin {
  double lower = 0.0;   // exclusive; meaningless when catch_all
  double upper = 0.0;   // inclusive
  bool catch_all = false;
  std::vector<std::size_t> item_indices;  // positions in the binned item list
  std::string range_label;                // "CCI ≤ 0.1", "0.1 < CCI ≤ 0.2", ...
};

// Partition of the score line: one catch-all bin (score ≤ lower_catchall)
// followed by half-open (a, a+width] bins up to 1.0. Every item lands in
// exactly one bin; empty bins are kept so tables have a fixed layout.
std::vector<CciBin> bin_by_cci(const std::vector<ScoredItem>& items,
                               double width = 0.1, double lower_catchall = 0.1);

struct StratificationTable {
  struct Row {
    std::string range_label;
    std::size_t n_items = 0;
    // absent accuracy = empty bin
    std::map<std::string, std::optional<double>> accuracy_by_model;
  };
  std::vector<Row> rows;
  std::map<std::string, double> overall_accuracy_by_model;
  std::size_t total_items = 0;
};

// predictions: item_id -> model_id -> correct flag. Every binned item must
// carry a flag for every model (MissingPrediction otherwise).
StratificationTable stratified_accuracy(
    const std::vector<ScoredItem>& items, const std::vector<CciBin>& bins,
    const std::map<std::string, std::map<std::string, bool>>& predictions);

nlohmann::json separability_to_json(const SeparabilityReport& report);
std::string separability_to_text(const SeparabilityReport& report);
std::string roc_points_to_csv(const std::vector<RocPoint>& points);

nlohmann::json stratification_to_json(const StratificationTable& table);
std::string stratification_to_text(const StratificationTable& table);

}  // namespace cci
