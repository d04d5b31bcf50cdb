#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/cultures.hpp"

namespace cci {

enum class VectorKind { single_run, aggregated };

// Per-culture generality scores, aligned with the order of the culture set
// they were elicited for.
struct GeneralityVector {
  CultureSet cultures;
  std::vector<double> values;  // values[i] belongs to cultures.cultures()[i]
  VectorKind kind = VectorKind::single_run;

  double value_for(std::string_view culture) const;
};

// Builds a validated vector from a culture -> score map. The key set must
// equal the culture set (CultureMismatch otherwise) and every score must lie
// in [0, 1] (OutOfRangeScore otherwise).
GeneralityVector make_generality_vector(const std::map<std::string, double>& scores,
                                        const CultureSet& set, VectorKind kind);

// Per-culture arithmetic mean over N independent runs.
GeneralityVector aggregate_runs(std::span<const GeneralityVector> runs,
                                const CultureSet& set);

struct CciResult {
  double cci = 0.0;
  std::optional<double> cci_log;
  std::string target;
  GeneralityVector breakdown;  // the aggregated vector the score derives from
  int n_runs = 1;
};

// Target-culture generality minus the mean generality across the other
// cultures. Evaluated as the mean of per-culture gaps so that a uniform
// vector yields exactly zero and extreme vectors yield exactly +/-1.
CciResult compute_cci(const GeneralityVector& aggregated, const CultureSet& set,
                      int n_runs = 1);

// Log-softmax weighted variant: (1 + log(q_t)/log(|C|)) * p_t with
// q_t = exp(p_t) / sum_c exp(p_c), natural log throughout. log(q_t) is
// evaluated as a max-subtracted log-sum-exp so an all-equal vector yields
// exactly zero for every |C|.
double compute_cci_log(const GeneralityVector& aggregated, const CultureSet& set);

}  // namespace cci
