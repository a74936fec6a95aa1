#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <vector>

namespace irsbeam {

using Complex = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;
using RowVectorC = Eigen::RowVectorXcd;
using VectorR = Eigen::VectorXd;
using MatrixR = Eigen::MatrixXd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Dimensions, grouping and QoS parameters of one downlink scenario.
/// Mobile-user and group indices are 0-based throughout the library.
struct SystemConfig {
  int num_bs_antennas = 1;                   // M
  std::vector<int> irs_sizes;                // N_1..N_L
  int num_mus = 1;                           // K
  std::vector<std::vector<int>> groups;      // partition of {0..K-1}
  std::vector<int> mu_antennas;              // Q_1..Q_K
  std::vector<double> noise_powers;          // sigma^2, watts
  std::vector<double> sinr_targets;          // gamma, linear
  double power_budget = 1.0;                 // P, watts (max-min only)

  int num_irs() const { return static_cast<int>(irs_sizes.size()); }
  int num_groups() const { return static_cast<int>(groups.size()); }
  int total_irs_elements() const;
  int group_of(int mu) const;

  /// Throws std::invalid_argument when the partition or any dimension,
  /// noise power, target or budget is invalid.
  void validate() const;
};

enum class AmplitudeMode { FixedUnit, FixedValues, FreeUnitInterval };
enum class PhaseMode { Continuous, Discrete };

/// Exact phase value of grid point m on the tau-point discrete circle.
/// All discrete phases in the library are produced by this expression so
/// equality checks against the grid are bitwise.
inline double discrete_phase(int m, int tau) {
  return (kTwoPi * static_cast<double>(m)) / static_cast<double>(tau);
}

/// Nearest grid index for a phase in [0, 2*pi); exact midpoints round to the
/// lower angle.
int nearest_grid_index(double phase, int tau);

/// Constraint set for reflection coefficients, prior to choosing a profile.
struct PhaseConstraints {
  AmplitudeMode amplitude_mode = AmplitudeMode::FixedUnit;
  PhaseMode phase_mode = PhaseMode::Continuous;
  int tau = 2;                                  // discrete levels
  std::vector<VectorR> fixed_amplitudes;        // per IRS, FixedValues only

  VectorR amplitude_targets(const std::vector<int>& irs_sizes, int l) const;
  void validate(const std::vector<int>& irs_sizes) const;
};

/// Per-unit amplitudes and phase shifts of every IRS.
struct PhaseProfile {
  std::vector<VectorR> amplitudes;   // beta, in [0,1]
  std::vector<VectorR> phases;       // theta, in [0, 2*pi)
  AmplitudeMode amplitude_mode = AmplitudeMode::FixedUnit;
  PhaseMode phase_mode = PhaseMode::Continuous;
  int tau = 0;                       // discrete levels when Discrete

  int num_irs() const { return static_cast<int>(amplitudes.size()); }
  int total_elements() const;

  /// Diagonal of the reflection matrix of IRS l: beta_n * exp(j*theta_n).
  VectorC reflection_coefficients(int l) const;

  /// Lifted variable convention: entries are conjugated reflection
  /// coefficients, IRSs stacked in order.
  VectorC stacked_phi() const;

  /// Rebuilds a profile from a stacked vector. Amplitudes are taken from
  /// `amplitude_targets` (exact), phases from the entries; discrete phases
  /// snap to the nearest grid point so the grid invariant holds bitwise.
  static PhaseProfile from_stacked_phi(const VectorC& phi,
                                       const std::vector<int>& irs_sizes,
                                       const std::vector<VectorR>& amplitude_targets,
                                       PhaseMode phase_mode, int tau,
                                       AmplitudeMode amplitude_mode);

  void validate(const std::vector<int>& irs_sizes) const;
};

/// All channel matrices of one scenario. Row vectors store the conjugated
/// channels exactly as they enter the downlink products.
struct ChannelSet {
  std::vector<MatrixC> bs_to_irs;                              // [l]: N_l x M
  std::vector<std::vector<std::vector<RowVectorC>>> irs_to_mu; // [l][i][q]: 1 x N_l
  std::vector<std::vector<RowVectorC>> bs_to_mu;               // [i][q]: 1 x M

  int num_bs_antennas() const;
  int num_irs() const { return static_cast<int>(bs_to_irs.size()); }
  int num_mus() const { return static_cast<int>(bs_to_mu.size()); }
  int mu_antennas(int i) const { return static_cast<int>(bs_to_mu[i].size()); }
  int irs_size(int l) const { return static_cast<int>(bs_to_irs[l].rows()); }

  /// Throws when shapes disagree with the config or entries are not finite.
  void validate(const SystemConfig& config) const;
};

/// One transmit vector per group.
struct BeamformingSet {
  std::vector<VectorC> vectors;   // w_k, each length M

  int num_groups() const { return static_cast<int>(vectors.size()); }
  double total_power() const;
};

/// Synthetic channel statistics: iid entries per link class, scaled by the
/// per-class gain. Rician adds a deterministic unit line-of-sight term.
struct ChannelModelParams {
  enum class Kind { Rayleigh, Rician, Los };
  Kind kind = Kind::Rayleigh;
  double bs_irs_gain = 1.0;
  double irs_mu_gain = 1.0;
  double bs_mu_gain = 1.0;
  double rician_k = 0.0;

  void validate() const;
};

}  // namespace irsbeam
