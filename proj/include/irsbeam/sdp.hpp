#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "irsbeam/types.hpp"

namespace irsbeam {

enum class Relation { Ge, Le, Eq };
enum class SdpSense { Minimize, Maximize, Feasibility };
enum class SdpStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

/// One Hermitian coefficient attached to a variable block.
struct SdpTerm {
  int block = 0;
  MatrixC matrix;
};

/// sum_b Re trace(terms[b] X_b)  rel  rhs
struct SdpConstraint {
  std::vector<SdpTerm> terms;
  Relation rel = Relation::Ge;
  double rhs = 0.0;
};

/// Block-diagonal Hermitian-variable program:
///   min / max  sum_b Re trace(C_b X_b)
///   s.t.       sum_b Re trace(A_cb X_b)  rel_c  r_c,   X_b PSD.
struct SdpProblem {
  std::vector<int> block_sizes;
  std::vector<SdpTerm> objective;      // absent blocks contribute zero cost
  std::vector<SdpConstraint> constraints;
  SdpSense sense = SdpSense::Minimize;

  int total_dimension() const;
  /// Rejects non-Hermitian coefficients (1e-12 relative), bad block indices,
  /// non-finite data and dimensions above `dimension_cap`.
  void validate(int dimension_cap = 200) const;
};

struct SdpTolerances {
  double feas_tol = 1e-7;
  double gap_tol = 1e-7;
  int max_iterations = 200;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  std::vector<MatrixC> blocks;     // Hermitian PSD primal blocks
  double objective = 0.0;          // in the problem's sense
  double max_violation = 0.0;      // against the stated constraints
  double duality_gap = 0.0;
  int iterations = 0;
};

/// Primal-dual path-following interior point on the real symmetric embedding
/// with Nesterov-Todd scaling; dense factorizations throughout.
SdpSolution solve(const SdpProblem& problem, const SdpTolerances& tol = {});

/// Phase-I: maximizes the common slack s of all inequality constraints
/// (equalities stay hard). Feasible iff the optimal s >= -feas_tol; the
/// returned blocks are the max-slack point.
SdpSolution feasibility(const SdpProblem& problem, const SdpTolerances& tol = {});

/// [[Re H, -Im H], [Im H, Re H]]. Eigenvalues double up, the trace doubles,
/// and trace(embed(A) embed(B)) = 2 Re trace(A B). Rejects non-Hermitian
/// input.
MatrixR hermitian_real_embedding(const MatrixC& H);

/// Sparse-triplet text dump for cross-checking against external solvers.
/// Line format: "blocks", "sense", then per matrix one "<block> <row> <col>
/// <re> <im>" triplet list headed by "objective <nnz>" or
/// "constraint <index> <ge|le|eq> <rhs> <nnz>".
void dump_problem(const SdpProblem& problem, std::ostream& os);

std::string to_string(SdpStatus status);

}  // namespace irsbeam
