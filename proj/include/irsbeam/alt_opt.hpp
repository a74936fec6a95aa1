#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irsbeam/beamforming.hpp"
#include "irsbeam/channel.hpp"
#include "irsbeam/phase.hpp"
#include "irsbeam/sinr.hpp"
#include "irsbeam/types.hpp"

namespace irsbeam {

enum class ProblemKind { PowerQos, MaxminQos };
enum class Traffic { Unicast, Broadcast, Multicast };

struct AlgorithmOptions {
  double epsilon = 1e-3;          // relative objective change
  int max_outer_iterations = 50;
  int trials = 1000;              // Gaussian randomization draws
  int restarts = 1;
  bool residual_variant = true;   // phase step maximizes SINR residuals
  uint64_t seed = 0;
  double bisect_tol = 1e-4;
  SdpTolerances sdp{};
  int jobs = 1;                   // parallel restarts
};

struct Scenario {
  SystemConfig config;
  ProblemKind problem = ProblemKind::PowerQos;
  Traffic traffic = Traffic::Multicast;
  PhaseConstraints phase_constraints;
  std::optional<ChannelSet> channels;  // inline channels win over the model
  ChannelModelParams model{};
  uint64_t channel_seed = 0;
  AlgorithmOptions options{};

  void validate() const;           // also checks traffic/groups consistency
  ChannelSet realize_channels() const;
};

enum class SolveStatus { Converged, PhaseStepFailed, BeamformingInfeasible, IterationCap };

struct IterationRecord {
  int iteration = 0;        // outer iteration r, 1-based
  double objective = 0.0;   // power, or t
  double sdr_bound = 0.0;   // relaxation value of the beamforming step
  SinrReport sinr;
  double wall_ms = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::IterationCap;
  std::vector<IterationRecord> trajectory;
  BeamformingSet final_W;
  PhaseProfile final_phase;
  double final_objective = 0.0;
  SinrReport final_sinr;
  uint64_t seed = 0;
  int restart_index = 0;
  int restarts = 1;
  double total_wall_ms = 0.0;
};

/// Alternating optimization for power control under QoS. Keeps the best
/// feasible iterate; the power trajectory is non-increasing.
SolveReport solve_power_control(const Scenario& scenario);

/// Alternating optimization for max-min fair QoS; the t trajectory is
/// non-decreasing.
SolveReport solve_maxmin(const Scenario& scenario);

/// Dispatches on scenario.problem.
SolveReport solve_scenario(const Scenario& scenario);

/// Initial profile: phases uniform on the allowed set, amplitudes at their
/// targets. Deterministic in (scenario, seed).
PhaseProfile initial_phase_profile(const SystemConfig& config,
                                   const PhaseConstraints& constraints,
                                   uint64_t seed);

std::string to_string(SolveStatus status);

}  // namespace irsbeam
