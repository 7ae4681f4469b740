#pragma once

// The sweep written as an explicit affine map p -> A p + v on the stacked
// vector (q, conj q), with structural checks and a direct fixed-point solve.

#include <cstdint>
#include <vector>

#include "core/solver.hpp"

namespace hyperbolize {

struct SparseOperator {
  std::size_t m = 0;  // active points; dim = 2m
  // CSR rows. Entries are kept unmerged: a column may repeat within a row.
  std::vector<std::int64_t> row_start;
  std::vector<std::int32_t> col;
  std::vector<Complex> val;
  std::vector<Complex> shift;

  std::size_t dim() const { return 2 * m; }
  std::size_t nnz() const { return col.size(); }

  /// A x (no shift), optionally restricted to rows/columns flagged in `mask`.
  void multiply(const std::vector<Complex>& x, std::vector<Complex>& y,
                const std::vector<std::uint8_t>* mask = nullptr) const;
  /// A x + v.
  std::vector<Complex> apply(const std::vector<Complex>& x) const;
};

SparseOperator assemble(const SolverState& state);

/// max over rows of |sum |coeff| - 1|.
double row_sum_deviation(const SparseOperator& op);

/// max |A(i, j) - conj(A(i +- m, j -+ m))| and |v_i - conj(v_{i+m})|.
double block_symmetry_defect(const SparseOperator& op);

/// max |(A (p, conj p) + v)_k - sweep(p)_k| over the first half.
double sweep_equivalence(const SolverState& state, const SparseOperator& op);

/// Union of the strongly connected components of the sparsity graph that
/// contain a seed row. Sorted.
std::vector<std::int32_t> irreducible_component(const SparseOperator& op, const std::vector<std::int32_t>& seeds);

struct SpectralReport {
  double rho_estimate = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
  std::size_t irreducible_component_size = 0;
};

/// Power iteration on the linear part restricted to `restricted`.
SpectralReport spectral_radius(const SparseOperator& op, const std::vector<std::int32_t>& restricted, double tol,
                               std::int64_t max_iters);

/// Largest eigenvalue magnitude by a dense eigensolve; dim of the
/// restriction must not exceed `cap`.
double dense_spectral_radius(const SparseOperator& op, const std::vector<std::int32_t>& restricted,
                             std::size_t cap = 600);

/// Solves (I - A) p = v; returns the full 2m vector. Throws TooLarge above
/// `cap` and NoUniqueFixedPoint when singular.
std::vector<Complex> direct_fixed_point(const SparseOperator& op, std::size_t cap = 4000);

struct VerifyOptions {
  std::size_t dim_cap = 4000;
  std::size_t dense_cap = 600;
  double polish_tol = 1e-13;
  std::int64_t polish_max_sweeps = 2'000'000;
  double rho_tol = 1e-12;
  std::int64_t rho_max_iters = 400'000;
};

struct VerifyReport {
  std::size_t m = 0, dim = 0, nnz = 0;
  double row_sum_max_deviation = 0.0;
  double block_symmetry_defect = 0.0;
  double sweep_equivalence_error = 0.0;
  std::size_t component_size = 0;
  bool component_has_all_inner = false;
  SpectralReport spectral;
  double dense_rho = -1.0;  // negative when skipped
  double stored_map_error = 0.0;   // |p_stored - p_direct| / diam, informational
  double polished_residual = 0.0;
  std::int64_t polish_sweeps = 0;
  double cross_validation_error = 0.0;  // |p_iter - p_direct| / diam after polishing
  double conjugate_consistency = 0.0;
  bool row_sum_ok = false, block_ok = false, equivalence_ok = false, component_ok = false, rho_ok = false,
       dense_ok = true, cross_ok = false, conjugate_ok = false;
  bool passed() const {
    return row_sum_ok && block_ok && equivalence_ok && component_ok && rho_ok && dense_ok && cross_ok && conjugate_ok;
  }
};

/// Full check of a solved state. Throws TooLarge when 2m exceeds the cap.
VerifyReport verify(const SolverState& state, const VerifyOptions& opts = {});

}  // namespace hyperbolize
