#include "irsbeam/phase.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "irsbeam/log.hpp"
#include "irsbeam/rng.hpp"

namespace irsbeam {

namespace {

// Row data of one SINR constraint in stacked-phi coordinates:
//   sum_q |b_own + phi^H a_own|^2
//     >= t*gamma*(sigma^2 + sum_{j != k} sum_q |b_j + phi^H a_j|^2)
struct SinrRow {
  int mu = 0;
  int group = 0;
};

std::vector<SinrRow> sinr_rows(const SystemConfig& config) {
  std::vector<SinrRow> rows;
  for (int k = 0; k < config.num_groups(); ++k)
    for (int i : config.groups[k]) rows.push_back({i, k});
  return rows;
}

double received_power(const PhaseCoupling& coupling, const VectorC& phi, int mu, int group) {
  double value = 0.0;
  for (size_t q = 0; q < coupling.a[mu].size(); ++q) {
    const Complex amplitude =
        coupling.b[mu][q][group] + (phi.adjoint() * coupling.a[mu][q][group]).value();
    value += std::norm(amplitude);
  }
  return value;
}

// Minimum normalized slack of the SINR system at t_scale for a concrete phi;
// each row is scaled by 1 + its right-hand side so acceptance is
// scale-invariant.
double min_row_slack(const PhaseCoupling& coupling, const SystemConfig& config,
                     double t_scale, const VectorC& phi) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& row : sinr_rows(config)) {
    const double own = received_power(coupling, phi, row.mu, row.group);
    double interference = 0.0;
    for (int j = 0; j < config.num_groups(); ++j) {
      if (j != row.group) interference += received_power(coupling, phi, row.mu, j);
    }
    const double rhs =
        t_scale * config.sinr_targets[row.mu] * (config.noise_powers[row.mu] + interference);
    worst = std::min(worst, (own - rhs) / (1.0 + rhs));
  }
  return worst;
}

PhaseCoupling reduce_coupling(const PhaseCoupling& full, const std::vector<int>& active) {
  const int rdim = static_cast<int>(active.size()) + 1;
  PhaseCoupling out;
  out.dim = rdim;
  out.a.resize(full.a.size());
  out.b = full.b;
  out.A.resize(full.A.size());
  std::vector<int> keep = active;
  keep.push_back(full.dim - 1);  // homogenization index stays
  for (size_t i = 0; i < full.a.size(); ++i) {
    out.a[i].resize(full.a[i].size());
    out.A[i].resize(full.A[i].size());
    for (size_t q = 0; q < full.a[i].size(); ++q) {
      out.a[i][q].resize(full.a[i][q].size());
      out.A[i][q].resize(full.A[i][q].size());
      for (size_t k = 0; k < full.a[i][q].size(); ++k) {
        VectorC ar(active.size());
        for (size_t n = 0; n < active.size(); ++n) ar[n] = full.a[i][q][k][active[n]];
        MatrixC Ar(rdim, rdim);
        for (int r = 0; r < rdim; ++r)
          for (int c = 0; c < rdim; ++c) Ar(r, c) = full.A[i][q][k](keep[r], keep[c]);
        out.a[i][q][k] = std::move(ar);
        out.A[i][q][k] = std::move(Ar);
      }
    }
  }
  return out;
}

}  // namespace

PhaseCoupling build_coupling(const ChannelSet& channels, const BeamformingSet& W,
                             const SystemConfig& config) {
  const int total = config.total_irs_elements();
  const int dim = total + 1;
  const int g = config.num_groups();

  PhaseCoupling coupling;
  coupling.dim = dim;
  coupling.a.resize(config.num_mus);
  coupling.b.resize(config.num_mus);
  coupling.A.resize(config.num_mus);

  for (int i = 0; i < config.num_mus; ++i) {
    const int qi = config.mu_antennas[i];
    coupling.a[i].resize(qi);
    coupling.b[i].resize(qi);
    coupling.A[i].resize(qi);
    for (int q = 0; q < qi; ++q) {
      coupling.a[i][q].resize(g);
      coupling.b[i][q].resize(g);
      coupling.A[i][q].resize(g);
      for (int k = 0; k < g; ++k) {
        const VectorC& w = W.vectors[k];
        VectorC stacked(total);
        int pos = 0;
        for (int l = 0; l < config.num_irs(); ++l) {
          const VectorC forward = channels.bs_to_irs[l] * w;
          const RowVectorC& reflect = channels.irs_to_mu[l][i][q];
          for (int n = 0; n < config.irs_sizes[l]; ++n)
            stacked[pos++] = reflect[n] * forward[n];
        }
        const Complex b = (channels.bs_to_mu[i][q] * w).value();
        MatrixC A = MatrixC::Zero(dim, dim);
        A.topLeftCorner(total, total) = stacked * stacked.adjoint();
        A.block(0, total, total, 1) = stacked * std::conj(b);
        A.block(total, 0, 1, total) = b * stacked.adjoint();
        coupling.a[i][q][k] = std::move(stacked);
        coupling.b[i][q][k] = b;
        coupling.A[i][q][k] = std::move(A);
      }
    }
  }
  return coupling;
}

SdpProblem build_phase_sdp(const PhaseCoupling& coupling, const SystemConfig& config,
                           const PhaseConstraints& constraints, double t_scale,
                           PhaseVariant variant) {
  const int dim = coupling.dim;
  SdpProblem problem;
  problem.block_sizes.push_back(dim);
  problem.sense = variant == PhaseVariant::Residual ? SdpSense::Maximize : SdpSense::Feasibility;

  std::vector<int> alpha_block(config.num_mus, -1);
  if (variant == PhaseVariant::Residual) {
    MatrixC one(1, 1);
    one(0, 0) = 1.0;
    for (int i = 0; i < config.num_mus; ++i) {
      alpha_block[i] = static_cast<int>(problem.block_sizes.size());
      problem.block_sizes.push_back(1);
      problem.objective.push_back({alpha_block[i], one});
    }
  }

  for (const auto& row : sinr_rows(config)) {
    const double tg = t_scale * config.sinr_targets[row.mu];
    MatrixC S = MatrixC::Zero(dim, dim);
    double constant = 0.0;  // own |b|^2 minus t*gamma*(interfering |b|^2)
    for (size_t q = 0; q < coupling.A[row.mu].size(); ++q) {
      S += coupling.A[row.mu][q][row.group];
      constant += std::norm(coupling.b[row.mu][q][row.group]);
    }
    for (int j = 0; j < config.num_groups(); ++j) {
      if (j == row.group) continue;
      for (size_t q = 0; q < coupling.A[row.mu].size(); ++q) {
        S -= tg * coupling.A[row.mu][q][j];
        constant -= tg * std::norm(coupling.b[row.mu][q][j]);
      }
    }
    SdpConstraint c;
    c.terms.push_back({0, std::move(S)});
    if (variant == PhaseVariant::Residual) {
      MatrixC minus_one(1, 1);
      minus_one(0, 0) = -1.0;
      c.terms.push_back({alpha_block[row.mu], minus_one});
    }
    c.rel = Relation::Ge;
    c.rhs = tg * config.noise_powers[row.mu] - constant;
    problem.constraints.push_back(std::move(c));
  }

  // Diagonal rows. For reduced problems the caller passes amplitude targets
  // aligned with the active indices through `constraints`.
  auto diag_row = [&](int n, Relation rel, double rhs) {
    SdpConstraint c;
    MatrixC E = MatrixC::Zero(dim, dim);
    E(n, n) = 1.0;
    c.terms.push_back({0, std::move(E)});
    c.rel = rel;
    c.rhs = rhs;
    problem.constraints.push_back(std::move(c));
  };

  switch (constraints.amplitude_mode) {
    case AmplitudeMode::FixedUnit:
      for (int n = 0; n < dim - 1; ++n) diag_row(n, Relation::Eq, 1.0);
      break;
    case AmplitudeMode::FixedValues: {
      int idx = 0;
      for (const auto& beta : constraints.fixed_amplitudes)
        for (int n = 0; n < beta.size(); ++n, ++idx)
          diag_row(idx, Relation::Eq, beta[n] * beta[n]);
      break;
    }
    case AmplitudeMode::FreeUnitInterval:
      for (int n = 0; n < dim - 1; ++n) {
        diag_row(n, Relation::Ge, 0.0);
        diag_row(n, Relation::Le, 1.0);
      }
      break;
  }
  diag_row(dim - 1, Relation::Eq, 1.0);
  return problem;
}

std::vector<VectorC> gaussian_randomize(const MatrixC& V, int trials, uint64_t seed,
                                        const VectorR& amplitude_targets, int* redraws) {
  const int dim = static_cast<int>(V.rows());
  Eigen::SelfAdjointEigenSolver<MatrixC> es(V);
  const VectorR lambda = es.eigenvalues().cwiseMax(0.0);
  const MatrixC factor = es.eigenvectors() * lambda.cwiseSqrt().asDiagonal();

  int redraw_count = 0;
  std::vector<VectorC> candidates;
  candidates.reserve(trials);
  for (int z = 0; z < trials; ++z) {
    GaussianStream stream(substream_seed(seed, static_cast<uint64_t>(z)));
    VectorC v(dim);
    Complex last(0.0, 0.0);
    bool normalized = false;
    for (int attempt = 0; attempt < 64; ++attempt) {
      VectorC r(dim);
      for (int n = 0; n < dim; ++n) r[n] = stream.complex_normal();
      v = factor * r;
      last = v[dim - 1];
      if (std::abs(last) > 1e-12 * (1.0 + v.norm())) {
        normalized = true;
        break;
      }
      ++redraw_count;
    }
    VectorC head = normalized ? VectorC((v / last).head(dim - 1)) : VectorC(v.head(dim - 1));
    VectorC phi(dim - 1);
    for (int n = 0; n < dim - 1; ++n) {
      const double mag = std::abs(head[n]);
      phi[n] = mag > 0.0 ? Complex(amplitude_targets[n] * (head[n] / mag))
                         : Complex(amplitude_targets[n], 0.0);
    }
    candidates.push_back(std::move(phi));
  }
  if (redraws != nullptr) *redraws = redraw_count;
  return candidates;
}

VectorC project_discrete(const VectorC& phi, int tau) {
  VectorC out(phi.size());
  for (int n = 0; n < phi.size(); ++n) {
    const double mag = std::abs(phi[n]);
    if (mag == 0.0) {
      out[n] = Complex(0.0, 0.0);
      continue;
    }
    double p = std::arg(phi[n]);
    if (p < 0.0) p += kTwoPi;
    if (p >= kTwoPi) p = 0.0;
    const double snapped = discrete_phase(nearest_grid_index(p, tau), tau);
    out[n] = mag * Complex(std::cos(snapped), std::sin(snapped));
  }
  return out;
}

std::optional<PhaseProfile> find_phase(const ChannelSet& channels, const BeamformingSet& W,
                                       const SystemConfig& config,
                                       const PhaseConstraints& constraints, double t_scale,
                                       const PhaseOptions& options, PhaseStepReport* report) {
  config.validate();
  constraints.validate(config.irs_sizes);
  PhaseStepReport local;
  PhaseStepReport& rep = report != nullptr ? *report : local;

  const PhaseCoupling full = build_coupling(channels, W, config);
  const int total = config.total_irs_elements();

  // Stacked fixed amplitude targets; zero-amplitude units drop out of the
  // lifted variable so the relaxation keeps a strict interior.
  VectorR targets_full(total);
  {
    int idx = 0;
    for (int l = 0; l < config.num_irs(); ++l) {
      const VectorR t = constraints.amplitude_targets(config.irs_sizes, l);
      for (int n = 0; n < t.size(); ++n) targets_full[idx++] = t[n];
    }
  }
  std::vector<int> active;
  for (int n = 0; n < total; ++n) {
    if (constraints.amplitude_mode == AmplitudeMode::FreeUnitInterval || targets_full[n] > 0.0)
      active.push_back(n);
  }
  const bool reduced = static_cast<int>(active.size()) != total;
  const PhaseCoupling coupling = reduced ? reduce_coupling(full, active) : full;

  PhaseConstraints reduced_constraints = constraints;
  if (constraints.amplitude_mode == AmplitudeMode::FixedValues) {
    VectorR beta(active.size());
    for (size_t n = 0; n < active.size(); ++n) beta[n] = targets_full[active[n]];
    reduced_constraints.fixed_amplitudes = {beta};
  } else {
    reduced_constraints.fixed_amplitudes.clear();
  }

  const SdpProblem problem =
      build_phase_sdp(coupling, config, reduced_constraints, t_scale, options.variant);

  MatrixC V;
  const SdpSolution probe = feasibility(problem, options.sdp);
  rep.sdp_status = probe.status;
  if (probe.status == SdpStatus::Infeasible) {
    rep.sdp_infeasible = true;
    return std::nullopt;
  }
  if (probe.status != SdpStatus::Optimal) return std::nullopt;
  V = probe.blocks[0];
  if (options.variant == PhaseVariant::Residual) {
    const SdpSolution sol = solve(problem, options.sdp);
    if (sol.status == SdpStatus::Optimal) {
      V = sol.blocks[0];
      rep.sdp_status = sol.status;
    } else {
      log_warn("phase step: residual solve " + to_string(sol.status) +
               ", falling back to the feasibility point");
    }
  }

  VectorR targets_active(active.size());
  if (constraints.amplitude_mode == AmplitudeMode::FreeUnitInterval) {
    for (size_t n = 0; n < active.size(); ++n)
      targets_active[n] = std::sqrt(std::clamp(V(static_cast<int>(n), static_cast<int>(n)).real(), 0.0, 1.0));
  } else {
    for (size_t n = 0; n < active.size(); ++n) targets_active[n] = targets_full[active[n]];
  }

  const std::vector<VectorC> candidates =
      gaussian_randomize(V, options.trials, options.seed, targets_active, &rep.redraws);

  auto expand = [&](const VectorC& phi_active) {
    VectorC phi = VectorC::Zero(total);
    for (size_t n = 0; n < active.size(); ++n) phi[active[n]] = phi_active[n];
    return phi;
  };

  // Acceptance floor, well inside the reported -1e-6 contract.
  auto accepted = [](double slack) { return slack >= -1e-9; };

  int best_trial = -1;
  double best_slack = -std::numeric_limits<double>::infinity();
  for (int z = 0; z < static_cast<int>(candidates.size()); ++z) {
    const VectorC phi_full = expand(candidates[z]);
    const double slack = min_row_slack(full, config, t_scale, phi_full);
    if (accepted(slack)) {
      ++rep.candidates_feasible;
      if (slack > best_slack) {
        best_slack = slack;
        best_trial = z;
      }
    }
  }
  if (best_trial < 0) return std::nullopt;
  rep.selected_trial = best_trial;
  rep.selected_min_slack = best_slack;

  VectorC chosen = expand(candidates[best_trial]);
  if (constraints.phase_mode == PhaseMode::Discrete) {
    chosen = project_discrete(chosen, constraints.tau);
    const double slack = min_row_slack(full, config, t_scale, chosen);
    if (!accepted(slack)) {
      rep.projection_rejected = true;
      return std::nullopt;
    }
    rep.selected_min_slack = slack;
  }

  // Amplitude targets per IRS for the rebuilt profile.
  std::vector<VectorR> amp_targets;
  {
    VectorR stacked = targets_full;
    for (size_t n = 0; n < active.size(); ++n) stacked[active[n]] = targets_active[n];
    int idx = 0;
    for (int l = 0; l < config.num_irs(); ++l) {
      amp_targets.push_back(stacked.segment(idx, config.irs_sizes[l]));
      idx += config.irs_sizes[l];
    }
  }
  return PhaseProfile::from_stacked_phi(chosen, config.irs_sizes, amp_targets,
                                        constraints.phase_mode, constraints.tau,
                                        constraints.amplitude_mode);
}

}  // namespace irsbeam
