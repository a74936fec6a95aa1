#include "irsbeam/sinr.hpp"

#include <algorithm>
#include <stdexcept>

#include "irsbeam/channel.hpp"
#include "irsbeam/log.hpp"

namespace irsbeam {

double sinr(const ChannelSet& channels, const PhaseProfile& phase,
            const BeamformingSet& W, const SystemConfig& config, int mu) {
  if (mu < 0 || mu >= config.num_mus)
    throw std::out_of_range("sinr: mu index out of range");
  const int k = config.group_of(mu);
  const MatrixC gram = effective_gram(channels, phase, mu);

  auto received = [&](int group) {
    const VectorC& w = W.vectors.at(group);
    return (w.adjoint() * gram * w).value().real();
  };

  const double signal = received(k);
  double denom = config.noise_powers[mu];
  for (int j = 0; j < config.num_groups(); ++j) {
    if (j != k) denom += received(j);
  }
  if (denom <= 0.0) {
    if (signal <= 0.0) {
      log_warn("sinr: zero signal with zero noise treated as 0");
      return 0.0;
    }
    return std::numeric_limits<double>::infinity();
  }
  return std::max(signal, 0.0) / denom;
}

SinrReport evaluate(const ChannelSet& channels, const PhaseProfile& phase,
                    const BeamformingSet& W, const SystemConfig& config) {
  SinrReport report;
  report.sinr.resize(config.num_mus);
  report.scaled_sinr.resize(config.num_mus);
  report.constraint_slacks.resize(config.num_mus);
  for (int i = 0; i < config.num_mus; ++i) {
    report.sinr[i] = sinr(channels, phase, W, config, i);
    report.scaled_sinr[i] = report.sinr[i] / config.sinr_targets[i];
    report.constraint_slacks[i] = report.sinr[i] - config.sinr_targets[i];
  }
  report.total_power = W.total_power();
  report.min_scaled_sinr =
      *std::min_element(report.scaled_sinr.begin(), report.scaled_sinr.end());
  return report;
}

}  // namespace irsbeam
