#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "irsbeam/sdp.hpp"
#include "irsbeam/types.hpp"

namespace irsbeam {

/// Coupling data of the phase subproblem at fixed beamforming, indexed
/// [mu][antenna][group]: stacked linear coefficients a, direct-path scalars
/// b, and the lifted quadratic matrices A (bottom-right entry zero).
struct PhaseCoupling {
  int dim = 0;  // 1 + sum of IRS sizes
  std::vector<std::vector<std::vector<VectorC>>> a;
  std::vector<std::vector<std::vector<Complex>>> b;
  std::vector<std::vector<std::vector<MatrixC>>> A;
};

PhaseCoupling build_coupling(const ChannelSet& channels,
                             const BeamformingSet& W,
                             const SystemConfig& config);

enum class PhaseVariant { Feasibility, Residual };

struct PhaseOptions {
  uint64_t seed = 0;
  int trials = 1000;
  PhaseVariant variant = PhaseVariant::Residual;
  SdpTolerances sdp{};
};

struct PhaseStepReport {
  SdpStatus sdp_status = SdpStatus::NumericalFailure;
  bool sdp_infeasible = false;
  int candidates_feasible = 0;
  int redraws = 0;
  int selected_trial = -1;
  double selected_min_slack = 0.0;
  bool projection_rejected = false;
};

/// Lifted program over V for the phase step at scale t (1 for power control,
/// the current t for max-min): SINR rows, diagonal rows per amplitude mode,
/// and for the Residual variant one nonnegative slack block per MU whose sum
/// is maximized.
SdpProblem build_phase_sdp(const PhaseCoupling& coupling,
                           const SystemConfig& config,
                           const PhaseConstraints& constraints,
                           double t_scale, PhaseVariant variant);

/// Rank-one candidates from a relaxed V: per trial v = U Lambda^(1/2) r with
/// r ~ CN(0, I), divided by its last entry, truncated, and each entry
/// rescaled to the target magnitude (zero entries get phase 0). Trials draw
/// from independent substreams of (seed, trial); a trial whose last entry is
/// numerically zero redraws within its own substream and is counted.
std::vector<VectorC> gaussian_randomize(const MatrixC& V, int trials,
                                        uint64_t seed,
                                        const VectorR& amplitude_targets,
                                        int* redraws = nullptr);

/// Snaps every entry's phase to the nearest of the tau grid points,
/// preserving magnitude; exact midpoints round to the lower angle.
VectorC project_discrete(const VectorC& phi, int tau);

/// Solves the phase subproblem at fixed W. Returns the recovered profile, or
/// nullopt when the relaxation is infeasible or no candidate (after optional
/// discrete projection of the selected one) satisfies every SINR row at
/// t_scale. Candidate selection maximizes the minimum row slack, ties to the
/// lowest trial index.
std::optional<PhaseProfile> find_phase(const ChannelSet& channels,
                                       const BeamformingSet& W,
                                       const SystemConfig& config,
                                       const PhaseConstraints& constraints,
                                       double t_scale,
                                       const PhaseOptions& options = {},
                                       PhaseStepReport* report = nullptr);

}  // namespace irsbeam
