#pragma once

#include "irsbeam/alt_opt.hpp"
#include "irsbeam/types.hpp"

namespace irsbeam {

/// Closed-form optimum for a single single-antenna user: matched filter at
/// the minimum power meeting the target.
struct SingleUserOracle {
  bool feasible = false;
  double power = 0.0;
  VectorC w;
};

SingleUserOracle single_user_power_oracle(const ChannelSet& channels,
                                          const PhaseProfile& phase,
                                          double gamma, double sigma2);

/// Global search over every discrete phase combination, solving the
/// beamforming subproblem per combination. `certified` is set when each
/// inner solve recovered an exactly rank-one solution, making best_value the
/// true grid optimum rather than a bound.
struct DiscreteSearchResult {
  bool feasible = false;
  double best_value = 0.0;        // min power (PowerQos) or max t (MaxminQos)
  PhaseProfile best_phase;
  double sdr_bound_at_best = 0.0;
  bool certified = false;
  long combinations = 0;
};

/// Pre: discrete phase mode and tau^(total elements) <= 4096.
DiscreteSearchResult exhaustive_discrete_phase(const Scenario& scenario);

}  // namespace irsbeam
