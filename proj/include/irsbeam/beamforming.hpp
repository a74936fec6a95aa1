#pragma once

#include <cstdint>
#include <vector>

#include "irsbeam/sdp.hpp"
#include "irsbeam/types.hpp"

namespace irsbeam {

struct BeamformingOptions {
  uint64_t seed = 0;
  int randomization_trials = 1000;  // 0 disables the randomized path
  double bisect_tol = 1e-4;         // relative, max-min bisection
  double rank1_ratio = 1e-6;        // lambda_2/lambda_1 threshold
  SdpTolerances sdp{};
};

enum class BeamformStatus { Optimal, InfeasibleTargets, RandomizationFailed, SolverFailure };

struct BeamformingResult {
  BeamformStatus status = BeamformStatus::SolverFailure;
  BeamformingSet W;
  double sdr_lower_bound = 0.0;    // power problems: relaxation objective
  double achieved_value = 0.0;     // total power, or achieved t
  bool rank1_exact = false;
  int randomization_trials_used = 0;
  // max-min diagnostics
  double bisection_t = 0.0;        // relaxation t reached by bisection
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  double bracket_low_slack = 0.0;  // phase-I slack at the bracket probes
  double bracket_high_slack = 0.0;
};

/// Relaxed power-minimization program at fixed phase: one block per group,
/// objective sum of traces, one SINR row per MU.
SdpProblem build_power_sdp(const std::vector<MatrixC>& grams,
                           const SystemConfig& config);

/// Constraint system of the max-min step at level t: SINR rows scaled by t
/// plus the total-power row. Pure feasibility problem.
SdpProblem build_maxmin_sdp(const std::vector<MatrixC>& grams,
                            const SystemConfig& config, double t);

/// Principal-eigenpair rank-one factor: sqrt(lambda_1) u_1; zero matrix
/// gives the zero vector.
VectorC extract_rank_one(const MatrixC& X);

/// Minimizes transmit power subject to the SINR targets at fixed phase.
BeamformingResult minimize_power_given_phase(const ChannelSet& channels,
                                             const PhaseProfile& phase,
                                             const SystemConfig& config,
                                             const BeamformingOptions& options = {});

/// Maximizes the minimum scaled SINR under the power budget at fixed phase;
/// bisection on t over relaxed feasibility, then rank-one recovery at full
/// power.
BeamformingResult maxmin_given_phase(const ChannelSet& channels,
                                     const PhaseProfile& phase,
                                     const SystemConfig& config,
                                     const BeamformingOptions& options = {});

}  // namespace irsbeam
