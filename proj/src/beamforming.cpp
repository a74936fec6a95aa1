#include "irsbeam/beamforming.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "irsbeam/channel.hpp"
#include "irsbeam/log.hpp"
#include "irsbeam/rng.hpp"

namespace irsbeam {

namespace {

std::vector<MatrixC> all_grams(const ChannelSet& channels, const PhaseProfile& phase,
                               const SystemConfig& config) {
  std::vector<MatrixC> grams(config.num_mus);
  for (int i = 0; i < config.num_mus; ++i) grams[i] = effective_gram(channels, phase, i);
  return grams;
}

double quad_form(const MatrixC& H, const VectorC& w) {
  return std::max(0.0, (w.adjoint() * H * w).value().real());
}

// Common scale c putting c*W at the lowest power meeting every SINR target;
// nullopt when some target is unreachable along this direction.
std::optional<double> min_power_scale(const std::vector<MatrixC>& grams,
                                      const SystemConfig& config,
                                      const BeamformingSet& W) {
  double c2 = 0.0;
  for (int k = 0; k < config.num_groups(); ++k) {
    for (int i : config.groups[k]) {
      const double signal = quad_form(grams[i], W.vectors[k]);
      double interference = 0.0;
      for (int j = 0; j < config.num_groups(); ++j) {
        if (j != k) interference += quad_form(grams[i], W.vectors[j]);
      }
      const double margin = signal - config.sinr_targets[i] * interference;
      if (margin <= 0.0) return std::nullopt;
      c2 = std::max(c2, config.sinr_targets[i] * config.noise_powers[i] / margin);
    }
  }
  return std::sqrt(c2);
}

double min_scaled_sinr_of(const std::vector<MatrixC>& grams, const SystemConfig& config,
                          const BeamformingSet& W) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < config.num_groups(); ++k) {
    for (int i : config.groups[k]) {
      const double signal = quad_form(grams[i], W.vectors[k]);
      double denom = config.noise_powers[i];
      for (int j = 0; j < config.num_groups(); ++j) {
        if (j != k) denom += quad_form(grams[i], W.vectors[j]);
      }
      const double value = denom > 0.0 ? signal / denom : 0.0;
      worst = std::min(worst, value / config.sinr_targets[i]);
    }
  }
  return worst;
}

struct BlockFactor {
  MatrixC factor;        // U * sqrt(Lambda)
  VectorC principal;     // sqrt(lambda_1) u_1
  double lambda_ratio;   // lambda_2 / lambda_1 (0 when rank deficient)
};

BlockFactor factorize(const MatrixC& X, double rank1_ratio) {
  BlockFactor out;
  Eigen::SelfAdjointEigenSolver<MatrixC> es(X);
  VectorR lambda = es.eigenvalues().cwiseMax(0.0);
  const int n = static_cast<int>(lambda.size());
  out.factor = es.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
  const double l1 = lambda[n - 1];
  const double l2 = n >= 2 ? lambda[n - 2] : 0.0;
  out.lambda_ratio = l1 > 0.0 ? l2 / l1 : 0.0;
  if (l1 > 0.0) {
    VectorC u = es.eigenvectors().col(n - 1);
    // Deterministic global phase: largest entry real positive.
    int arg_max = 0;
    u.cwiseAbs().maxCoeff(&arg_max);
    const Complex pivot = u[arg_max];
    if (std::abs(pivot) > 0.0) u *= std::conj(pivot) / std::abs(pivot);
    out.principal = std::sqrt(l1) * u;
  } else {
    out.principal = VectorC::Zero(X.rows());
  }
  (void)rank1_ratio;
  return out;
}

BeamformingSet draw_candidate(const std::vector<BlockFactor>& factors, GaussianStream& stream) {
  BeamformingSet W;
  for (const auto& f : factors) {
    const int n = static_cast<int>(f.factor.rows());
    VectorC r(n);
    for (int m = 0; m < n; ++m) r[m] = stream.complex_normal();
    W.vectors.push_back(f.factor * r);
  }
  return W;
}

}  // namespace

SdpProblem build_power_sdp(const std::vector<MatrixC>& grams, const SystemConfig& config) {
  const int g = config.num_groups();
  const int m = config.num_bs_antennas;
  SdpProblem problem;
  problem.sense = SdpSense::Minimize;
  problem.block_sizes.assign(g, m);
  for (int k = 0; k < g; ++k)
    problem.objective.push_back({k, MatrixC(MatrixC::Identity(m, m))});
  for (int k = 0; k < g; ++k) {
    for (int i : config.groups[k]) {
      SdpConstraint row;
      row.terms.push_back({k, grams[i]});
      for (int j = 0; j < g; ++j) {
        if (j != k) row.terms.push_back({j, MatrixC(-config.sinr_targets[i] * grams[i])});
      }
      row.rel = Relation::Ge;
      row.rhs = config.sinr_targets[i] * config.noise_powers[i];
      problem.constraints.push_back(std::move(row));
    }
  }
  return problem;
}

SdpProblem build_maxmin_sdp(const std::vector<MatrixC>& grams, const SystemConfig& config,
                            double t) {
  const int g = config.num_groups();
  const int m = config.num_bs_antennas;
  SdpProblem problem;
  problem.sense = SdpSense::Feasibility;
  problem.block_sizes.assign(g, m);
  for (int k = 0; k < g; ++k) {
    for (int i : config.groups[k]) {
      SdpConstraint row;
      row.terms.push_back({k, grams[i]});
      for (int j = 0; j < g; ++j) {
        if (j != k)
          row.terms.push_back({j, MatrixC(-t * config.sinr_targets[i] * grams[i])});
      }
      row.rel = Relation::Ge;
      row.rhs = t * config.sinr_targets[i] * config.noise_powers[i];
      problem.constraints.push_back(std::move(row));
    }
  }
  SdpConstraint power;
  for (int k = 0; k < g; ++k) power.terms.push_back({k, MatrixC(MatrixC::Identity(m, m))});
  power.rel = Relation::Le;
  power.rhs = config.power_budget;
  problem.constraints.push_back(std::move(power));
  return problem;
}

VectorC extract_rank_one(const MatrixC& X) {
  return factorize(X, 0.0).principal;
}

BeamformingResult minimize_power_given_phase(const ChannelSet& channels,
                                             const PhaseProfile& phase,
                                             const SystemConfig& config,
                                             const BeamformingOptions& options) {
  config.validate();
  channels.validate(config);
  const std::vector<MatrixC> grams = all_grams(channels, phase, config);
  const SdpProblem problem = build_power_sdp(grams, config);

  BeamformingResult result;

  const SdpSolution probe = feasibility(problem, options.sdp);
  if (probe.status == SdpStatus::Infeasible) {
    result.status = BeamformStatus::InfeasibleTargets;
    return result;
  }
  if (probe.status != SdpStatus::Optimal) {
    result.status = BeamformStatus::SolverFailure;
    return result;
  }

  SdpSolution sol = solve(problem, options.sdp);
  if (sol.status != SdpStatus::Optimal) {
    result.status = BeamformStatus::SolverFailure;
    return result;
  }
  result.sdr_lower_bound = sol.objective;

  std::vector<BlockFactor> factors;
  bool rank1 = true;
  for (const auto& X : sol.blocks) {
    factors.push_back(factorize(X, options.rank1_ratio));
    rank1 = rank1 && factors.back().lambda_ratio <= options.rank1_ratio;
  }
  result.rank1_exact = rank1;

  auto finish = [&](BeamformingSet W) -> bool {
    const auto scale = min_power_scale(grams, config, W);
    if (!scale) return false;
    for (auto& w : W.vectors) w *= *scale;
    result.W = std::move(W);
    result.achieved_value = result.W.total_power();
    result.status = BeamformStatus::Optimal;
    return true;
  };

  BeamformingSet principal;
  for (const auto& f : factors) principal.vectors.push_back(f.principal);

  if (rank1 && finish(principal)) return result;

  // Randomized recovery: best feasible candidate by rescaled power.
  double best_power = std::numeric_limits<double>::infinity();
  BeamformingSet best;
  for (int z = 0; z < options.randomization_trials; ++z) {
    GaussianStream stream(substream_seed(options.seed, static_cast<uint64_t>(z)));
    BeamformingSet cand = draw_candidate(factors, stream);
    ++result.randomization_trials_used;
    const auto scale = min_power_scale(grams, config, cand);
    if (!scale) continue;
    double power = 0.0;
    for (auto& w : cand.vectors) {
      w *= *scale;
      power += w.squaredNorm();
    }
    if (power < best_power) {
      best_power = power;
      best = std::move(cand);
    }
  }
  if (std::isfinite(best_power)) {
    result.W = std::move(best);
    result.achieved_value = best_power;
    result.status = BeamformStatus::Optimal;
    return result;
  }
  // No feasible draw: principal direction scaled to feasibility, when possible.
  if (finish(principal)) return result;
  result.status = BeamformStatus::RandomizationFailed;
  return result;
}

BeamformingResult maxmin_given_phase(const ChannelSet& channels, const PhaseProfile& phase,
                                     const SystemConfig& config,
                                     const BeamformingOptions& options) {
  config.validate();
  channels.validate(config);
  const std::vector<MatrixC> grams = all_grams(channels, phase, config);
  const int m = config.num_bs_antennas;

  BeamformingResult result;
  BeamformingSet zero;
  for (int k = 0; k < config.num_groups(); ++k) zero.vectors.push_back(VectorC::Zero(m));

  // Single-user upper bound on the relaxed t; zero when nothing is received.
  double t_bound = 0.0;
  for (int i = 0; i < config.num_mus; ++i) {
    Eigen::SelfAdjointEigenSolver<MatrixC> es(grams[i]);
    const double lmax = std::max(0.0, es.eigenvalues().maxCoeff());
    t_bound = std::max(t_bound, config.power_budget * lmax /
                                    (config.sinr_targets[i] * config.noise_powers[i]));
  }
  if (t_bound <= 0.0) {
    result.status = BeamformStatus::Optimal;
    result.W = zero;
    return result;
  }

  double t_low = 0.0;
  double t_high = t_bound * (1.0 + 2.0 * options.bisect_tol) + 1e-12;
  result.bracket_high = t_high;
  std::optional<SdpSolution> feasible_point;

  const int max_probes = 200;
  for (int probe = 0; probe < max_probes; ++probe) {
    if (t_high - t_low <= options.bisect_tol * std::max(1.0, t_low)) break;
    const double t_mid = 0.5 * (t_low + t_high);
    const SdpSolution sol = feasibility(build_maxmin_sdp(grams, config, t_mid), options.sdp);
    if (sol.status == SdpStatus::Optimal) {
      t_low = t_mid;
      result.bracket_low_slack = sol.objective;
      feasible_point = sol;
    } else {
      if (sol.status != SdpStatus::Infeasible)
        log_warn("maxmin bisection: probe treated as infeasible (" + to_string(sol.status) + ")");
      t_high = t_mid;
      result.bracket_high_slack = sol.objective;
    }
  }
  result.bisection_t = t_low;
  result.bracket_low = t_low;
  result.bracket_high = t_high;

  if (!feasible_point) {
    // No positive t certified; fall back to the t=0 system to get a point.
    const SdpSolution sol = feasibility(build_maxmin_sdp(grams, config, 0.0), options.sdp);
    if (sol.status != SdpStatus::Optimal) {
      result.status = BeamformStatus::SolverFailure;
      return result;
    }
    feasible_point = sol;
  }

  std::vector<BlockFactor> factors;
  bool rank1 = true;
  for (const auto& X : feasible_point->blocks) {
    factors.push_back(factorize(X, options.rank1_ratio));
    rank1 = rank1 && factors.back().lambda_ratio <= options.rank1_ratio;
  }
  result.rank1_exact = rank1;

  auto at_full_power = [&](BeamformingSet W) -> std::optional<BeamformingSet> {
    const double p = W.total_power();
    if (p <= 0.0) return std::nullopt;
    const double c = std::sqrt(config.power_budget / p);
    for (auto& w : W.vectors) w *= c;
    return W;
  };

  BeamformingSet best = zero;
  double best_t = 0.0;

  BeamformingSet principal;
  for (const auto& f : factors) principal.vectors.push_back(f.principal);
  if (auto W = at_full_power(std::move(principal))) {
    best_t = min_scaled_sinr_of(grams, config, *W);
    best = std::move(*W);
  }

  if (!rank1) {
    for (int z = 0; z < options.randomization_trials; ++z) {
      GaussianStream stream(substream_seed(options.seed, static_cast<uint64_t>(z)));
      auto W = at_full_power(draw_candidate(factors, stream));
      ++result.randomization_trials_used;
      if (!W) continue;
      const double t = min_scaled_sinr_of(grams, config, *W);
      if (t > best_t) {
        best_t = t;
        best = std::move(*W);
      }
    }
  }

  result.W = std::move(best);
  result.achieved_value = best_t;
  result.status = BeamformStatus::Optimal;
  return result;
}

}  // namespace irsbeam
