#include "irsbeam/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace irsbeam {

SingleUserOracle single_user_power_oracle(const ChannelSet& channels,
                                          const PhaseProfile& phase, double gamma,
                                          double sigma2) {
  if (channels.num_mus() != 1 || channels.mu_antennas(0) != 1)
    throw std::invalid_argument("single_user_power_oracle needs K=1 with one antenna");
  const RowVectorC h = composite_channel(channels, phase, 0, 0);
  SingleUserOracle out;
  const double h2 = h.squaredNorm();
  if (h2 <= 0.0) {
    out.feasible = false;
    out.w = VectorC::Zero(h.cols());
    return out;
  }
  out.feasible = true;
  out.power = gamma * sigma2 / h2;
  out.w = std::sqrt(gamma * sigma2) * h.adjoint() / h2;
  return out;
}

DiscreteSearchResult exhaustive_discrete_phase(const Scenario& scenario) {
  scenario.validate();
  const SystemConfig& config = scenario.config;
  const PhaseConstraints& constraints = scenario.phase_constraints;
  if (constraints.phase_mode != PhaseMode::Discrete)
    throw std::invalid_argument("exhaustive search requires discrete phases");
  if (constraints.amplitude_mode == AmplitudeMode::FreeUnitInterval)
    throw std::invalid_argument("exhaustive search requires fixed amplitudes");

  const int total = config.total_irs_elements();
  const int tau = constraints.tau;
  double combos = std::pow(static_cast<double>(tau), total);
  if (combos > 4096.0)
    throw std::invalid_argument("exhaustive search cap exceeded (tau^N > 4096)");
  const long count = static_cast<long>(combos);

  const ChannelSet channels = scenario.realize_channels();
  const bool maximize = scenario.problem == ProblemKind::MaxminQos;

  // Rank-one recovery is certified for single-group traffic and for unicast
  // with at most two users; elsewhere the search result is a bound.
  const bool certified_regime =
      config.num_groups() == 1 ||
      (scenario.traffic == Traffic::Unicast && config.num_mus <= 2);

  BeamformingOptions options;
  options.seed = scenario.options.seed;
  options.bisect_tol = scenario.options.bisect_tol;
  options.sdp = scenario.options.sdp;
  options.randomization_trials = certified_regime ? 0 : scenario.options.trials;

  DiscreteSearchResult result;
  result.certified = certified_regime;

  std::vector<int> indices(total, 0);
  PhaseProfile profile;
  profile.amplitude_mode = constraints.amplitude_mode;
  profile.phase_mode = PhaseMode::Discrete;
  profile.tau = tau;
  for (int l = 0; l < config.num_irs(); ++l) {
    profile.amplitudes.push_back(constraints.amplitude_targets(config.irs_sizes, l));
    profile.phases.push_back(VectorR::Zero(config.irs_sizes[l]));
  }

  for (long c = 0; c < count; ++c) {
    int pos = 0;
    for (int l = 0; l < config.num_irs(); ++l)
      for (int n = 0; n < config.irs_sizes[l]; ++n, ++pos)
        profile.phases[l][n] = discrete_phase(indices[pos], tau);
    ++result.combinations;

    BeamformingResult inner =
        maximize ? maxmin_given_phase(channels, profile, config, options)
                 : minimize_power_given_phase(channels, profile, config, options);
    if (inner.status == BeamformStatus::Optimal) {
      const bool better = !result.feasible ||
                          (maximize ? inner.achieved_value > result.best_value
                                    : inner.achieved_value < result.best_value);
      if (better) {
        result.feasible = true;
        result.best_value = inner.achieved_value;
        result.best_phase = profile;
        result.sdr_bound_at_best = maximize ? inner.bisection_t : inner.sdr_lower_bound;
      }
      result.certified = result.certified && inner.rank1_exact;
    }

    // Odometer increment over the phase indices.
    for (int p = total - 1; p >= 0; --p) {
      if (++indices[p] < tau) break;
      indices[p] = 0;
    }
  }
  return result;
}

}  // namespace irsbeam
