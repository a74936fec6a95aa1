#pragma once

#include <vector>

#include "irsbeam/types.hpp"

namespace irsbeam {

/// Objective and constraint quantities of one (channels, phase, W) triple.
struct SinrReport {
  std::vector<double> sinr;              // linear, per MU
  std::vector<double> scaled_sinr;       // sinr_i / gamma_i
  std::vector<double> constraint_slacks; // sinr_i - gamma_i
  double total_power = 0.0;
  double min_scaled_sinr = 0.0;
};

/// SINR of MU i under beamforming W. A zero numerator with zero noise is
/// defined as 0 (and logged) instead of NaN.
double sinr(const ChannelSet& channels, const PhaseProfile& phase,
            const BeamformingSet& W, const SystemConfig& config, int mu);

SinrReport evaluate(const ChannelSet& channels, const PhaseProfile& phase,
                    const BeamformingSet& W, const SystemConfig& config);

}  // namespace irsbeam
