#include "irsbeam/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "irsbeam/log.hpp"

namespace irsbeam {

namespace {

double hermiticity_error(const MatrixC& A) {
  return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs(const MatrixC& A) {
  return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Real symmetric standard form: min <C,X> s.t. <A_c,X> = b_c, X in PSD blocks.
// Complex blocks enter through the real embedding (values double); inequality
// rows carry an extra real scalar slack block.
// ---------------------------------------------------------------------------

struct RealTerm {
  int block;
  MatrixR matrix;
};

struct RealRow {
  std::vector<RealTerm> terms;
  double rhs = 0.0;
};

struct RealProblem {
  std::vector<int> sizes;
  std::vector<RealTerm> objective;
  std::vector<RealRow> rows;
};

struct IpmResult {
  SdpStatus status = SdpStatus::NumericalFailure;
  std::vector<MatrixR> X;
  double objective = 0.0;   // <C,X>, real scale
  double gap = 0.0;         // <X,Z>, real scale
  int iterations = 0;
};

class InteriorPoint {
 public:
  InteriorPoint(const RealProblem& problem, const SdpTolerances& tol, double mu0)
      : p_(problem), tol_(tol), mu0_(mu0) {}

  IpmResult run() {
    const int m = static_cast<int>(p_.rows.size());
    const int nblocks = static_cast<int>(p_.sizes.size());
    int nu = 0;
    for (int s : p_.sizes) nu += s;

    std::vector<MatrixR> X(nblocks), Z(nblocks);
    for (int b = 0; b < nblocks; ++b) {
      X[b] = mu0_ * MatrixR::Identity(p_.sizes[b], p_.sizes[b]);
      Z[b] = mu0_ * MatrixR::Identity(p_.sizes[b], p_.sizes[b]);
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    double bmax = 0.0;
    for (const auto& row : p_.rows) bmax = std::max(bmax, std::abs(row.rhs));
    double cmax = 0.0;
    for (const auto& term : p_.objective) cmax = std::max(cmax, term.matrix.cwiseAbs().maxCoeff());

    double sigma = 0.5;
    IpmResult result;
    result.X = X;

    for (int it = 1; it <= tol_.max_iterations; ++it) {
      result.iterations = it;

      // Residuals and merit quantities.
      Eigen::VectorXd rp(m);
      for (int c = 0; c < m; ++c) rp[c] = p_.rows[c].rhs - dot_row(p_.rows[c], X);
      std::vector<MatrixR> Rd = dual_residual(y, Z);

      double gap = 0.0;
      for (int b = 0; b < nblocks; ++b) gap += X[b].cwiseProduct(Z[b]).sum();
      const double mu = gap / nu;
      const double pobj = dot_terms(p_.objective, X);

      const double prim_res = m == 0 ? 0.0 : rp.cwiseAbs().maxCoeff() / (1.0 + bmax);
      double dual_res = 0.0;
      for (const auto& R : Rd)
        dual_res = std::max(dual_res, R.size() ? R.cwiseAbs().maxCoeff() : 0.0);
      dual_res /= (1.0 + cmax);
      const double rel_gap = gap / (1.0 + std::abs(pobj));

      if (!std::isfinite(gap) || !std::isfinite(prim_res)) {
        result.status = SdpStatus::NumericalFailure;
        result.X = X;
        return result;
      }
      if (prim_res <= tol_.feas_tol && dual_res <= tol_.feas_tol && rel_gap <= tol_.gap_tol) {
        result.status = SdpStatus::Optimal;
        result.X = X;
        result.objective = pobj;
        result.gap = gap;
        return result;
      }

      // Nesterov-Todd scaling point per block: W Z W = X.
      std::vector<MatrixR> W(nblocks), Zinv(nblocks);
      bool scaled = true;
      for (int b = 0; b < nblocks; ++b) {
        scaled = scaled && nt_scaling(X[b], Z[b], W[b], Zinv[b]);
      }
      if (!scaled) {
        result.status = SdpStatus::NumericalFailure;
        result.X = X;
        result.objective = pobj;
        result.gap = gap;
        return result;
      }

      // Schur system M dy = b + A(W Rd W - sigma*mu*Zinv).
      std::vector<MatrixR> T(nblocks);
      for (int b = 0; b < nblocks; ++b)
        T[b] = W[b] * Rd[b] * W[b] - sigma * mu * Zinv[b];
      Eigen::VectorXd h(m);
      for (int c = 0; c < m; ++c) h[c] = p_.rows[c].rhs + dot_row(p_.rows[c], T);

      MatrixR M = MatrixR::Zero(m, m);
      for (int d = 0; d < m; ++d) {
        std::vector<std::pair<int, MatrixR>> Sd;
        Sd.reserve(p_.rows[d].terms.size());
        for (const auto& term : p_.rows[d].terms)
          Sd.emplace_back(term.block, MatrixR(W[term.block] * term.matrix * W[term.block]));
        for (int c = 0; c <= d; ++c) {
          double v = 0.0;
          for (const auto& term : p_.rows[c].terms) {
            for (const auto& [blk, S] : Sd) {
              if (blk == term.block) v += term.matrix.cwiseProduct(S).sum();
            }
          }
          M(c, d) = v;
          M(d, c) = v;
        }
      }

      Eigen::VectorXd dy;
      if (!solve_schur(M, h, dy)) {
        result.status = SdpStatus::NumericalFailure;
        result.X = X;
        result.objective = pobj;
        result.gap = gap;
        return result;
      }

      std::vector<MatrixR> dZ(nblocks), dX(nblocks);
      std::vector<MatrixR> ATdy = apply_adjoint(dy);
      for (int b = 0; b < nblocks; ++b) {
        dZ[b] = Rd[b] - ATdy[b];
        dX[b] = sigma * mu * Zinv[b] - X[b] - W[b] * dZ[b] * W[b];
        dX[b] = 0.5 * (dX[b] + dX[b].transpose()).eval();
      }

      const double alpha_p = std::min(1.0, 0.98 * max_step(X, dX));
      const double alpha_d = std::min(1.0, 0.98 * max_step(Z, dZ));

      for (int b = 0; b < nblocks; ++b) {
        X[b] += alpha_p * dX[b];
        Z[b] += alpha_d * dZ[b];
      }
      y += alpha_d * dy;

      const double alpha = std::min(alpha_p, alpha_d);
      if (alpha >= 0.7) {
        sigma = std::max(0.05, 0.3 * sigma);
      } else if (alpha < 0.3) {
        sigma = std::min(0.9, 2.0 * sigma);
      }

      double xmax = 0.0;
      for (const auto& Xb : X) xmax = std::max(xmax, Xb.cwiseAbs().maxCoeff());
      if (xmax > 1e16 * (1.0 + bmax)) {
        result.status = SdpStatus::NumericalFailure;
        result.X = X;
        result.objective = pobj;
        result.gap = gap;
        return result;
      }
    }

    result.status = SdpStatus::MaxIterations;
    result.X = X;
    result.objective = dot_terms(p_.objective, X);
    double gap = 0.0;
    for (int b = 0; b < nblocks; ++b) gap += X[b].cwiseProduct(Z[b]).sum();
    result.gap = gap;
    return result;
  }

 private:
  static double dot_pair(const MatrixR& A, const MatrixR& B) {
    return A.cwiseProduct(B).sum();
  }

  double dot_row(const RealRow& row, const std::vector<MatrixR>& X) const {
    double v = 0.0;
    for (const auto& term : row.terms) v += dot_pair(term.matrix, X[term.block]);
    return v;
  }

  double dot_terms(const std::vector<RealTerm>& terms, const std::vector<MatrixR>& X) const {
    double v = 0.0;
    for (const auto& term : terms) v += dot_pair(term.matrix, X[term.block]);
    return v;
  }

  std::vector<MatrixR> apply_adjoint(const Eigen::VectorXd& y) const {
    std::vector<MatrixR> out(p_.sizes.size());
    for (size_t b = 0; b < p_.sizes.size(); ++b)
      out[b] = MatrixR::Zero(p_.sizes[b], p_.sizes[b]);
    for (size_t c = 0; c < p_.rows.size(); ++c) {
      for (const auto& term : p_.rows[c].terms)
        out[term.block] += y[static_cast<int>(c)] * term.matrix;
    }
    return out;
  }

  std::vector<MatrixR> dual_residual(const Eigen::VectorXd& y, const std::vector<MatrixR>& Z) const {
    std::vector<MatrixR> Rd = apply_adjoint(y);
    for (size_t b = 0; b < p_.sizes.size(); ++b) {
      MatrixR Cb = MatrixR::Zero(p_.sizes[b], p_.sizes[b]);
      for (const auto& term : p_.objective) {
        if (term.block == static_cast<int>(b)) Cb += term.matrix;
      }
      Rd[b] = Cb - Rd[b] - Z[b];
    }
    return Rd;
  }

  // W = X^(1/2) (X^(1/2) Z X^(1/2))^(-1/2) X^(1/2), plus Z^(-1).
  static bool nt_scaling(const MatrixR& X, const MatrixR& Z, MatrixR& W, MatrixR& Zinv) {
    Eigen::SelfAdjointEigenSolver<MatrixR> ex(X);
    if (ex.info() != Eigen::Success) return false;
    const double xtop = ex.eigenvalues().maxCoeff();
    if (!(xtop > 0.0) || ex.eigenvalues().minCoeff() < -1e-10 * xtop) return false;
    Eigen::VectorXd lx = ex.eigenvalues().cwiseMax(1e-16 * xtop);
    const MatrixR sqx =
        ex.eigenvectors() * lx.cwiseSqrt().asDiagonal() * ex.eigenvectors().transpose();

    Eigen::SelfAdjointEigenSolver<MatrixR> ez(Z);
    if (ez.info() != Eigen::Success) return false;
    const double ztop = ez.eigenvalues().maxCoeff();
    if (!(ztop > 0.0) || ez.eigenvalues().minCoeff() < -1e-10 * ztop) return false;
    Eigen::VectorXd lz = ez.eigenvalues().cwiseMax(1e-16 * ztop);
    Zinv = ez.eigenvectors() * lz.cwiseInverse().asDiagonal() * ez.eigenvectors().transpose();

    const MatrixR G = sqx * Z * sqx;
    Eigen::SelfAdjointEigenSolver<MatrixR> eg(G);
    if (eg.info() != Eigen::Success) return false;
    const double gtop = eg.eigenvalues().maxCoeff();
    if (!(gtop > 0.0)) return false;
    Eigen::VectorXd lg = eg.eigenvalues().cwiseMax(1e-16 * gtop);
    const MatrixR ginvsq = eg.eigenvectors() * lg.cwiseSqrt().cwiseInverse().asDiagonal() *
                           eg.eigenvectors().transpose();
    W = sqx * ginvsq * sqx;
    W = 0.5 * (W + W.transpose()).eval();
    return true;
  }

  static bool solve_schur(const MatrixR& M, const Eigen::VectorXd& h, Eigen::VectorXd& dy) {
    const int m = static_cast<int>(M.rows());
    if (m == 0) {
      dy.resize(0);
      return true;
    }
    double jitter = 0.0;
    const double scale = std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 4; ++attempt) {
      MatrixR Mj = M;
      if (jitter > 0.0) Mj += jitter * MatrixR::Identity(m, m);
      Eigen::LDLT<MatrixR> ldlt(Mj);
      if (ldlt.info() == Eigen::Success) {
        dy = ldlt.solve(h);
        // One step of iterative refinement keeps the direction usable when
        // the system turns ill-conditioned near the solution.
        dy += ldlt.solve(h - M * dy);
        if (dy.allFinite()) return true;
      }
      jitter = jitter == 0.0 ? 1e-14 * scale : jitter * 100.0;
    }
    return false;
  }

  // Largest step keeping every block of S + alpha*dS positive semidefinite.
  static double max_step(const std::vector<MatrixR>& S, const std::vector<MatrixR>& dS) {
    double alpha = 1e6;
    for (size_t b = 0; b < S.size(); ++b) {
      Eigen::SelfAdjointEigenSolver<MatrixR> es(S[b]);
      const double top = es.eigenvalues().maxCoeff();
      Eigen::VectorXd l = es.eigenvalues().cwiseMax(1e-300 + 1e-16 * std::max(top, 0.0));
      const MatrixR inv_sq = es.eigenvectors() * l.cwiseSqrt().cwiseInverse().asDiagonal() *
                             es.eigenvectors().transpose();
      const MatrixR Y = inv_sq * dS[b] * inv_sq;
      Eigen::SelfAdjointEigenSolver<MatrixR> ey(0.5 * (Y + Y.transpose()));
      const double lmin = ey.eigenvalues().minCoeff();
      if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
    }
    return alpha;
  }

  const RealProblem& p_;
  SdpTolerances tol_;
  double mu0_;
};

// ---------------------------------------------------------------------------
// Complex <-> real conversion
// ---------------------------------------------------------------------------

struct Conversion {
  RealProblem real;
  int num_complex_blocks = 0;
};

Conversion to_real(const SdpProblem& problem, bool negate_objective) {
  Conversion conv;
  conv.num_complex_blocks = static_cast<int>(problem.block_sizes.size());
  RealProblem& rp = conv.real;
  for (int n : problem.block_sizes) rp.sizes.push_back(2 * n);

  const double sign = negate_objective ? -1.0 : 1.0;
  for (const auto& term : problem.objective)
    rp.objective.push_back({term.block, sign * hermitian_real_embedding(term.matrix)});

  for (const auto& constraint : problem.constraints) {
    RealRow row;
    for (const auto& term : constraint.terms)
      row.terms.push_back({term.block, hermitian_real_embedding(term.matrix)});
    row.rhs = 2.0 * constraint.rhs;
    if (constraint.rel != Relation::Eq) {
      const int slack = static_cast<int>(rp.sizes.size());
      rp.sizes.push_back(1);
      MatrixR coeff(1, 1);
      coeff(0, 0) = constraint.rel == Relation::Ge ? -1.0 : 1.0;
      row.terms.push_back({slack, coeff});
    }
    rp.rows.push_back(std::move(row));
  }
  return conv;
}

MatrixC extract_complex(const MatrixR& E) {
  const int n = static_cast<int>(E.rows()) / 2;
  MatrixC X(n, n);
  // Group averaging over the embedding symmetry keeps PSD and all traces.
  const MatrixR re = 0.5 * (E.topLeftCorner(n, n) + E.bottomRightCorner(n, n));
  const MatrixR im = 0.5 * (E.bottomLeftCorner(n, n) - E.topRightCorner(n, n));
  X.real() = 0.5 * (re + re.transpose());
  X.imag() = 0.5 * (im - im.transpose());
  return X;
}

double constraint_value(const SdpConstraint& c, const std::vector<MatrixC>& blocks) {
  double v = 0.0;
  for (const auto& term : c.terms)
    v += term.matrix.transpose().cwiseProduct(blocks[term.block]).sum().real();
  return v;
}

double violation_of(const SdpProblem& problem, const std::vector<MatrixC>& blocks) {
  double worst = 0.0;
  for (const auto& c : problem.constraints) {
    const double v = constraint_value(c, blocks);
    double viol = 0.0;
    switch (c.rel) {
      case Relation::Ge: viol = std::max(0.0, c.rhs - v); break;
      case Relation::Le: viol = std::max(0.0, v - c.rhs); break;
      case Relation::Eq: viol = std::abs(v - c.rhs); break;
    }
    worst = std::max(worst, viol);
  }
  return worst;
}

}  // namespace

int SdpProblem::total_dimension() const {
  int total = 0;
  for (int n : block_sizes) total += n;
  return total;
}

void SdpProblem::validate(int dimension_cap) const {
  if (block_sizes.empty()) throw std::invalid_argument("sdp: no variable blocks");
  for (int n : block_sizes)
    if (n < 1) throw std::invalid_argument("sdp: block sizes must be positive");
  if (total_dimension() > dimension_cap)
    throw std::invalid_argument("sdp: total dimension exceeds the cap");

  auto check_term = [&](const SdpTerm& term, const char* where) {
    if (term.block < 0 || term.block >= static_cast<int>(block_sizes.size()))
      throw std::invalid_argument(std::string("sdp: bad block index in ") + where);
    if (term.matrix.rows() != block_sizes[term.block] ||
        term.matrix.cols() != block_sizes[term.block])
      throw std::invalid_argument(std::string("sdp: coefficient shape mismatch in ") + where);
    if (!term.matrix.allFinite())
      throw std::invalid_argument(std::string("sdp: non-finite coefficient in ") + where);
    if (hermiticity_error(term.matrix) > 1e-12 * std::max(1.0, max_abs(term.matrix)))
      throw std::invalid_argument(std::string("sdp: non-Hermitian coefficient in ") + where);
  };
  for (const auto& term : objective) check_term(term, "objective");
  for (const auto& c : constraints) {
    if (!std::isfinite(c.rhs)) throw std::invalid_argument("sdp: non-finite rhs");
    for (const auto& term : c.terms) check_term(term, "constraint");
  }
}

MatrixR hermitian_real_embedding(const MatrixC& H) {
  if (H.rows() != H.cols()) throw std::invalid_argument("embedding: matrix must be square");
  if (hermiticity_error(H) > 1e-12 * std::max(1.0, max_abs(H)))
    throw std::invalid_argument("embedding: matrix must be Hermitian");
  const int n = static_cast<int>(H.rows());
  MatrixR E(2 * n, 2 * n);
  E.topLeftCorner(n, n) = H.real();
  E.topRightCorner(n, n) = -H.imag();
  E.bottomLeftCorner(n, n) = H.imag();
  E.bottomRightCorner(n, n) = H.real();
  return E;
}

SdpSolution solve(const SdpProblem& problem, const SdpTolerances& tol) {
  if (problem.sense == SdpSense::Feasibility) return feasibility(problem, tol);
  problem.validate();

  const bool maximize = problem.sense == SdpSense::Maximize;
  Conversion conv = to_real(problem, maximize);

  double bmax = 0.0;
  for (const auto& c : problem.constraints) bmax = std::max(bmax, std::abs(c.rhs));
  const double mu0 = 1.0 + bmax;

  InteriorPoint ipm(conv.real, tol, mu0);
  IpmResult res = ipm.run();

  SdpSolution solution;
  solution.status = res.status;
  solution.iterations = res.iterations;
  solution.blocks.resize(problem.block_sizes.size());
  for (size_t b = 0; b < problem.block_sizes.size(); ++b)
    solution.blocks[b] = extract_complex(res.X[b]);
  const double obj = res.objective / 2.0;
  solution.objective = maximize ? -obj : obj;
  solution.duality_gap = res.gap / 2.0;
  solution.max_violation = violation_of(problem, solution.blocks);
  return solution;
}

SdpSolution feasibility(const SdpProblem& problem, const SdpTolerances& tol) {
  problem.validate();

  // Phase-I: maximize the common slack s = s_p - s_m of all rows (equalities
  // enter as a two-sided pair), with s capped and a tiny trace regularizer
  // keeping the maximizer bounded when the feasible set has recession
  // directions.
  SdpProblem phase1;
  phase1.block_sizes = problem.block_sizes;
  const int sp = static_cast<int>(phase1.block_sizes.size());
  phase1.block_sizes.push_back(1);
  const int sm = sp + 1;
  phase1.block_sizes.push_back(1);
  phase1.sense = SdpSense::Maximize;

  MatrixC one(1, 1), minus_one(1, 1);
  one(0, 0) = 1.0;
  minus_one(0, 0) = -1.0;

  double bmax = 0.0;
  for (const auto& c : problem.constraints) bmax = std::max(bmax, std::abs(c.rhs));
  const double cap = 1.0 + bmax;
  const double eta = 1e-10 * cap / (1.0 + problem.total_dimension());

  phase1.objective.push_back({sp, one});
  phase1.objective.push_back({sm, minus_one});
  for (size_t b = 0; b < problem.block_sizes.size(); ++b) {
    const int n = problem.block_sizes[b];
    phase1.objective.push_back({static_cast<int>(b), MatrixC(-eta * MatrixC::Identity(n, n))});
  }

  auto add_row = [&](const SdpConstraint& base, Relation rel) {
    SdpConstraint row;
    row.terms = base.terms;
    row.rhs = base.rhs;
    row.rel = rel;
    if (rel == Relation::Ge) {
      row.terms.push_back({sp, minus_one});
      row.terms.push_back({sm, one});
    } else {
      row.terms.push_back({sp, one});
      row.terms.push_back({sm, minus_one});
    }
    phase1.constraints.push_back(std::move(row));
  };

  for (const auto& c : problem.constraints) {
    switch (c.rel) {
      case Relation::Ge: add_row(c, Relation::Ge); break;
      case Relation::Le: add_row(c, Relation::Le); break;
      case Relation::Eq:
        add_row(c, Relation::Ge);
        add_row(c, Relation::Le);
        break;
    }
  }
  for (int s : {sp, sm}) {
    SdpConstraint capr;
    capr.terms.push_back({s, one});
    capr.rel = Relation::Le;
    capr.rhs = cap;
    phase1.constraints.push_back(std::move(capr));
  }

  SdpSolution inner = solve(phase1, tol);

  SdpSolution out;
  out.iterations = inner.iterations;
  out.duality_gap = inner.duality_gap;
  out.blocks.assign(inner.blocks.begin(), inner.blocks.end() - 2);
  out.max_violation = violation_of(problem, out.blocks);
  const double slack =
      inner.blocks[sp](0, 0).real() - inner.blocks[sm](0, 0).real();
  out.objective = slack;
  if (inner.status != SdpStatus::Optimal) {
    out.status = inner.status;
    return out;
  }
  out.status = slack >= -tol.feas_tol ? SdpStatus::Optimal : SdpStatus::Infeasible;
  return out;
}

void dump_problem(const SdpProblem& problem, std::ostream& os) {
  os.precision(17);
  os << "blocks " << problem.block_sizes.size();
  for (int n : problem.block_sizes) os << ' ' << n;
  os << '\n';
  os << "sense "
     << (problem.sense == SdpSense::Minimize
             ? "minimize"
             : problem.sense == SdpSense::Maximize ? "maximize" : "feasibility")
     << '\n';

  auto dump_terms = [&](const std::vector<SdpTerm>& terms) {
    long nnz = 0;
    for (const auto& term : terms) {
      for (int r = 0; r < term.matrix.rows(); ++r)
        for (int c = 0; c < term.matrix.cols(); ++c)
          if (term.matrix(r, c) != Complex(0.0, 0.0)) ++nnz;
    }
    os << ' ' << nnz << '\n';
    for (const auto& term : terms) {
      for (int r = 0; r < term.matrix.rows(); ++r)
        for (int c = 0; c < term.matrix.cols(); ++c) {
          const Complex v = term.matrix(r, c);
          if (v != Complex(0.0, 0.0))
            os << term.block << ' ' << r << ' ' << c << ' ' << v.real() << ' ' << v.imag()
               << '\n';
        }
    }
  };

  os << "objective";
  dump_terms(problem.objective);
  for (size_t i = 0; i < problem.constraints.size(); ++i) {
    const auto& c = problem.constraints[i];
    os << "constraint " << i << ' '
       << (c.rel == Relation::Ge ? "ge" : c.rel == Relation::Le ? "le" : "eq") << ' ' << c.rhs;
    dump_terms(c.terms);
  }
}

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::MaxIterations: return "max_iterations";
    case SdpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

}  // namespace irsbeam
