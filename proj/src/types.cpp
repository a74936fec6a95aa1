#include "irsbeam/types.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace irsbeam {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

double normalize_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

}  // namespace

int nearest_grid_index(double phase, int tau) {
  const double step = kTwoPi / static_cast<double>(tau);
  const double x = phase / step;
  const int lower = static_cast<int>(std::floor(x));
  const double frac = x - static_cast<double>(lower);
  int m = lower;
  if (frac > 0.5) m = lower + 1;
  return ((m % tau) + tau) % tau;
}

int SystemConfig::total_irs_elements() const {
  return std::accumulate(irs_sizes.begin(), irs_sizes.end(), 0);
}

int SystemConfig::group_of(int mu) const {
  for (int k = 0; k < num_groups(); ++k) {
    for (int i : groups[k]) {
      if (i == mu) return k;
    }
  }
  throw std::invalid_argument("mu index " + std::to_string(mu) + " not in any group");
}

void SystemConfig::validate() const {
  require(num_bs_antennas >= 1, "num_bs_antennas must be >= 1");
  require(!irs_sizes.empty(), "irs_sizes must be nonempty");
  for (int n : irs_sizes) require(n >= 1, "every IRS size must be >= 1");
  require(num_mus >= 1, "num_mus must be >= 1");
  require(!groups.empty(), "groups must be nonempty");
  std::vector<int> seen(num_mus, 0);
  for (const auto& group : groups) {
    require(!group.empty(), "groups must not contain empty sets");
    for (int i : group) {
      require(i >= 0 && i < num_mus, "group member out of range");
      require(seen[i] == 0, "groups must be disjoint");
      seen[i] = 1;
    }
  }
  for (int i = 0; i < num_mus; ++i)
    require(seen[i] == 1, "groups must cover every MU");
  require(static_cast<int>(mu_antennas.size()) == num_mus, "mu_antennas length must equal num_mus");
  for (int q : mu_antennas) require(q >= 1, "every MU antenna count must be >= 1");
  require(static_cast<int>(noise_powers.size()) == num_mus, "noise_powers length must equal num_mus");
  for (double s : noise_powers)
    require(std::isfinite(s) && s > 0.0, "noise powers must be positive");
  require(static_cast<int>(sinr_targets.size()) == num_mus, "sinr_targets length must equal num_mus");
  for (double g : sinr_targets)
    require(std::isfinite(g) && g > 0.0, "SINR targets must be positive");
  require(std::isfinite(power_budget) && power_budget >= 0.0,
          "power_budget must be nonnegative");
}

VectorR PhaseConstraints::amplitude_targets(const std::vector<int>& irs_sizes, int l) const {
  const int n = irs_sizes.at(l);
  if (amplitude_mode == AmplitudeMode::FixedValues) return fixed_amplitudes.at(l);
  return VectorR::Ones(n);  // FreeUnitInterval starts from unit targets
}

void PhaseConstraints::validate(const std::vector<int>& irs_sizes) const {
  if (phase_mode == PhaseMode::Discrete)
    require(tau >= 1, "tau must be a positive integer");
  if (amplitude_mode == AmplitudeMode::FixedValues) {
    require(fixed_amplitudes.size() == irs_sizes.size(),
            "fixed_amplitudes must have one vector per IRS");
    for (size_t l = 0; l < irs_sizes.size(); ++l) {
      require(fixed_amplitudes[l].size() == irs_sizes[l],
              "fixed_amplitudes length must match the IRS size");
      for (int n = 0; n < fixed_amplitudes[l].size(); ++n)
        require(fixed_amplitudes[l][n] >= 0.0 && fixed_amplitudes[l][n] <= 1.0,
                "amplitudes must lie in [0,1]");
    }
  }
}

int PhaseProfile::total_elements() const {
  int total = 0;
  for (const auto& a : amplitudes) total += static_cast<int>(a.size());
  return total;
}

VectorC PhaseProfile::reflection_coefficients(int l) const {
  const auto& beta = amplitudes.at(l);
  const auto& theta = phases.at(l);
  VectorC out(beta.size());
  for (int n = 0; n < beta.size(); ++n)
    out[n] = beta[n] * Complex(std::cos(theta[n]), std::sin(theta[n]));
  return out;
}

VectorC PhaseProfile::stacked_phi() const {
  VectorC out(total_elements());
  int pos = 0;
  for (int l = 0; l < num_irs(); ++l) {
    const VectorC coeff = reflection_coefficients(l);
    for (int n = 0; n < coeff.size(); ++n) out[pos++] = std::conj(coeff[n]);
  }
  return out;
}

PhaseProfile PhaseProfile::from_stacked_phi(const VectorC& phi,
                                            const std::vector<int>& irs_sizes,
                                            const std::vector<VectorR>& amplitude_targets,
                                            PhaseMode phase_mode, int tau,
                                            AmplitudeMode amplitude_mode) {
  PhaseProfile profile;
  profile.amplitude_mode = amplitude_mode;
  profile.phase_mode = phase_mode;
  profile.tau = phase_mode == PhaseMode::Discrete ? tau : 0;
  int pos = 0;
  for (size_t l = 0; l < irs_sizes.size(); ++l) {
    const int n = irs_sizes[l];
    VectorR beta = amplitude_targets.at(l);
    VectorR theta(n);
    for (int i = 0; i < n; ++i) {
      const Complex e = phi[pos++];
      // phi holds conjugated coefficients, so theta = -arg(phi).
      double t = normalize_angle(-std::arg(e));
      if (beta[i] == 0.0 || e == Complex(0.0, 0.0)) t = 0.0;
      if (phase_mode == PhaseMode::Discrete)
        t = discrete_phase(nearest_grid_index(t, tau), tau);
      theta[i] = t;
    }
    profile.amplitudes.push_back(std::move(beta));
    profile.phases.push_back(std::move(theta));
  }
  return profile;
}

void PhaseProfile::validate(const std::vector<int>& irs_sizes) const {
  require(amplitudes.size() == irs_sizes.size() && phases.size() == irs_sizes.size(),
          "phase profile must have one amplitude and phase vector per IRS");
  for (size_t l = 0; l < irs_sizes.size(); ++l) {
    require(amplitudes[l].size() == irs_sizes[l] && phases[l].size() == irs_sizes[l],
            "phase profile lengths must match the IRS sizes");
    for (int n = 0; n < amplitudes[l].size(); ++n) {
      const double beta = amplitudes[l][n];
      const double theta = phases[l][n];
      require(std::isfinite(beta) && beta >= 0.0 && beta <= 1.0, "amplitudes must lie in [0,1]");
      require(std::isfinite(theta) && theta >= 0.0 && theta < kTwoPi,
              "phases must lie in [0, 2*pi)");
      if (amplitude_mode == AmplitudeMode::FixedUnit)
        require(beta == 1.0, "fixed_unit profiles must have unit amplitudes");
      if (phase_mode == PhaseMode::Discrete) {
        require(tau >= 1, "discrete profiles need tau >= 1");
        require(theta == discrete_phase(nearest_grid_index(theta, tau), tau),
                "discrete phases must sit exactly on the grid");
      }
    }
  }
}

int ChannelSet::num_bs_antennas() const {
  if (!bs_to_irs.empty()) return static_cast<int>(bs_to_irs[0].cols());
  if (!bs_to_mu.empty() && !bs_to_mu[0].empty())
    return static_cast<int>(bs_to_mu[0][0].cols());
  return 0;
}

void ChannelSet::validate(const SystemConfig& config) const {
  require(num_irs() == config.num_irs(), "channel set has a wrong IRS count");
  require(num_mus() == config.num_mus, "channel set has a wrong MU count");
  auto check_finite = [](const auto& m) {
    require(m.allFinite(), "channel entries must be finite");
  };
  for (int l = 0; l < num_irs(); ++l) {
    require(bs_to_irs[l].rows() == config.irs_sizes[l] &&
                bs_to_irs[l].cols() == config.num_bs_antennas,
            "bs_to_irs shape mismatch");
    check_finite(bs_to_irs[l]);
    require(static_cast<int>(irs_to_mu[l].size()) == config.num_mus,
            "irs_to_mu shape mismatch");
    for (int i = 0; i < config.num_mus; ++i) {
      require(static_cast<int>(irs_to_mu[l][i].size()) == config.mu_antennas[i],
              "irs_to_mu antenna count mismatch");
      for (const auto& row : irs_to_mu[l][i]) {
        require(row.cols() == config.irs_sizes[l], "irs_to_mu row length mismatch");
        check_finite(row);
      }
    }
  }
  for (int i = 0; i < config.num_mus; ++i) {
    require(static_cast<int>(bs_to_mu[i].size()) == config.mu_antennas[i],
            "bs_to_mu antenna count mismatch");
    for (const auto& row : bs_to_mu[i]) {
      require(row.cols() == config.num_bs_antennas, "bs_to_mu row length mismatch");
      check_finite(row);
    }
  }
}

double BeamformingSet::total_power() const {
  double power = 0.0;
  for (const auto& w : vectors) power += w.squaredNorm();
  return power;
}

void ChannelModelParams::validate() const {
  require(bs_irs_gain >= 0.0 && irs_mu_gain >= 0.0 && bs_mu_gain >= 0.0,
          "path gains must be nonnegative");
  require(std::isfinite(bs_irs_gain) && std::isfinite(irs_mu_gain) && std::isfinite(bs_mu_gain),
          "path gains must be finite");
  if (kind == Kind::Rician)
    require(std::isfinite(rician_k) && rician_k >= 0.0, "rician_k must be nonnegative");
}

}  // namespace irsbeam
