#include "core/index.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace cci {

namespace {

void require_same_cultures(const GeneralityVector& vec, const CultureSet& set,
                           const char* what) {
  if (vec.cultures != set) {
    raise(ErrorCode::culture_mismatch,
          std::string(what) + ": vector cultures do not match the culture set");
  }
}

void require_unit_interval(double v, std::string_view culture) {
  if (!(v >= 0.0 && v <= 1.0)) {
    raise(ErrorCode::out_of_range_score,
          "score for " + std::string(culture) + " outside [0,1]: " +
              std::to_string(v));
  }
}

}  // namespace

double GeneralityVector::value_for(std::string_view culture) const {
  auto idx = cultures.index_of(culture);
  if (!idx) {
    raise(ErrorCode::culture_mismatch,
          "no score for culture: " + std::string(culture));
  }
  return values[*idx];
}

GeneralityVector make_generality_vector(const std::map<std::string, double>& scores,
                                        const CultureSet& set, VectorKind kind) {
  for (const auto& [name, value] : scores) {
    if (!set.contains(name)) {
      raise(ErrorCode::culture_mismatch, "unexpected culture in scores: " + name);
    }
    require_unit_interval(value, name);
  }
  GeneralityVector vec;
  vec.cultures = set;
  vec.kind = kind;
  vec.values.reserve(set.size());
  for (const auto& name : set.cultures()) {
    auto it = scores.find(name);
    if (it == scores.end()) {
      raise(ErrorCode::culture_mismatch, "missing culture in scores: " + name);
    }
    vec.values.push_back(it->second);
  }
  return vec;
}

GeneralityVector aggregate_runs(std::span<const GeneralityVector> runs,
                                const CultureSet& set) {
  if (runs.empty()) {
    raise(ErrorCode::empty_run_list, "aggregate_runs: no runs given");
  }
  for (const auto& run : runs) {
    require_same_cultures(run, set, "aggregate_runs");
    for (std::size_t i = 0; i < run.values.size(); ++i) {
      require_unit_interval(run.values[i], set.cultures()[i]);
    }
  }
  GeneralityVector mean;
  mean.cultures = set;
  mean.kind = VectorKind::aggregated;
  mean.values.assign(set.size(), 0.0);
  for (const auto& run : runs) {
    for (std::size_t i = 0; i < mean.values.size(); ++i) {
      mean.values[i] += run.values[i];
    }
  }
  const auto n = static_cast<double>(runs.size());
  for (auto& v : mean.values) v /= n;
  return mean;
}

CciResult compute_cci(const GeneralityVector& aggregated, const CultureSet& set,
                      int n_runs) {
  require_same_cultures(aggregated, set, "compute_cci");
  if (set.size() < 2) {
    raise(ErrorCode::degenerate_culture_set,
          "compute_cci needs at least 2 cultures");
  }
  const std::size_t t = set.target_index();
  const double p_target = aggregated.values[t];
  double gap_sum = 0.0;
  for (std::size_t i = 0; i < aggregated.values.size(); ++i) {
    if (i == t) continue;
    gap_sum += p_target - aggregated.values[i];
  }
  CciResult result;
  result.cci = gap_sum / static_cast<double>(set.size() - 1);
  result.target = set.target();
  result.breakdown = aggregated;
  result.n_runs = n_runs;
  return result;
}

double compute_cci_log(const GeneralityVector& aggregated, const CultureSet& set) {
  require_same_cultures(aggregated, set, "compute_cci_log");
  if (set.size() < 2) {
    raise(ErrorCode::degenerate_culture_set,
          "compute_cci_log needs at least 2 cultures (log(1) = 0)");
  }
  const double p_target = aggregated.values[set.target_index()];
  double max_v = aggregated.values[0];
  for (double v : aggregated.values) max_v = std::max(max_v, v);
  double exp_sum = 0.0;
  for (double v : aggregated.values) exp_sum += std::exp(v - max_v);
  const double log_q_target = (p_target - max_v) - std::log(exp_sum);
  const double log_n = std::log(static_cast<double>(set.size()));
  return (1.0 + log_q_target / log_n) * p_target;
}

}  // namespace cci
