#include "core/verifier.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace hyperbolize {

void SparseOperator::multiply(const std::vector<Complex>& x, std::vector<Complex>& y,
                              const std::vector<std::uint8_t>* mask) const {
  const std::int64_t n = static_cast<std::int64_t>(dim());
  y.assign(dim(), Complex{});
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    if (mask && !(*mask)[i]) continue;
    Complex acc{};
    for (std::int64_t e = row_start[i]; e < row_start[i + 1]; ++e) {
      if (mask && !(*mask)[col[e]]) continue;
      acc += val[e] * x[col[e]];
    }
    y[i] = acc;
  }
}

std::vector<Complex> SparseOperator::apply(const std::vector<Complex>& x) const {
  std::vector<Complex> y;
  multiply(x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += shift[i];
  return y;
}

SparseOperator assemble(const SolverState& s) {
  SparseOperator op;
  const std::int32_t m = static_cast<std::int32_t>(s.size());
  op.m = s.size();
  op.shift.assign(2 * op.m, Complex{});
  op.row_start.assign(2 * op.m + 1, 0);

  std::vector<std::int32_t> cols;
  std::vector<Complex> vals;
  for (std::int32_t k = 0; k < m; ++k) {
    for (int d = 0; d < 4; ++d) {
      const std::int32_t src = s.stencil[k][d];
      if (src < m) {
        cols.push_back(src);
        vals.push_back(0.25);
        continue;
      }
      const GhostRule& r = s.ghosts[src - m];
      for (int c = 0; c < 4; ++c) {
        if (r.weights[c] == 0.0) continue;
        // Reflections read the conjugate half of the stacked vector.
        cols.push_back(r.corners[c] + (r.conjugating ? m : 0));
        vals.push_back(0.25 * r.weights[c] * r.rot);
      }
      op.shift[k] += 0.25 * r.shift;
    }
    op.row_start[k + 1] = static_cast<std::int64_t>(cols.size());
  }
  for (std::int32_t k = 0; k < m; ++k) {
    for (std::int64_t e = op.row_start[k]; e < op.row_start[k + 1]; ++e) {
      const std::int32_t c = cols[e];
      cols.push_back(c < m ? c + m : c - m);
      vals.push_back(std::conj(vals[e]));
    }
    op.row_start[m + k + 1] = static_cast<std::int64_t>(cols.size());
    op.shift[m + k] = std::conj(op.shift[k]);
  }
  op.col = std::move(cols);
  op.val = std::move(vals);
  return op;
}

double row_sum_deviation(const SparseOperator& op) {
  double worst = 0.0;
  for (std::size_t i = 0; i < op.dim(); ++i) {
    double sum = 0.0;
    for (std::int64_t e = op.row_start[i]; e < op.row_start[i + 1]; ++e) sum += std::abs(op.val[e]);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double block_symmetry_defect(const SparseOperator& op) {
  const std::int64_t m = static_cast<std::int64_t>(op.m);
  double worst = 0.0;
  for (std::int64_t i = 0; i < m; ++i) {
    const std::int64_t a = op.row_start[i], b = op.row_start[i + m];
    const std::int64_t len = op.row_start[i + 1] - a;
    if (op.row_start[i + m + 1] - b != len) return std::numeric_limits<double>::infinity();
    for (std::int64_t e = 0; e < len; ++e) {
      const std::int64_t c = op.col[a + e];
      if (op.col[b + e] != (c < m ? c + m : c - m)) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::abs(op.val[a + e] - std::conj(op.val[b + e])));
    }
    worst = std::max(worst, std::abs(op.shift[i] - std::conj(op.shift[i + m])));
  }
  return worst;
}

double sweep_equivalence(const SolverState& s, const SparseOperator& op) {
  std::vector<Complex> stacked(op.dim());
  for (std::size_t k = 0; k < op.m; ++k) {
    stacked[k] = s.p[k];
    stacked[k + op.m] = std::conj(s.p[k]);
  }
  const std::vector<Complex> a = op.apply(stacked);
  const std::vector<Complex> b = sweep_image(s, s.p);
  double worst = 0.0;
  for (std::size_t k = 0; k < op.m; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

std::vector<std::int32_t> irreducible_component(const SparseOperator& op, const std::vector<std::int32_t>& seeds) {
  // Iterative Tarjan over the digraph row -> column.
  const std::int32_t n = static_cast<std::int32_t>(op.dim());
  std::vector<std::int32_t> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<std::uint8_t> on_stack(n, 0);
  std::vector<std::pair<std::int32_t, std::int64_t>> call;
  std::int32_t counter = 0, n_comp = 0;
  for (std::int32_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.emplace_back(root, op.row_start[root]);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, e] = call.back();
      if (e < op.row_start[v + 1]) {
        const std::int32_t w = op.col[e++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, op.row_start[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::int32_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::int32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = n_comp;
        } while (w != done);
        ++n_comp;
      }
    }
  }
  std::vector<std::uint8_t> chosen(n_comp, 0);
  for (std::int32_t sd : seeds)
    if (sd >= 0 && sd < n) chosen[comp[sd]] = 1;
  std::vector<std::int32_t> out;
  for (std::int32_t i = 0; i < n; ++i)
    if (chosen[comp[i]]) out.push_back(i);
  return out;
}

namespace {

double norm2(const std::vector<Complex>& x) {
  double s = 0.0;
  for (const Complex& c : x) s += std::norm(c);
  return std::sqrt(s);
}

struct PowerRun {
  double estimate = 0.0, last_change = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
};

// Power iteration on A^2 so that a +-rho pair does not make the Rayleigh
// quotient oscillate; the estimate is sqrt |x* A^2 x| / |x|^2.
PowerRun power(const SparseOperator& op, const std::vector<std::uint8_t>& mask, std::vector<Complex> x, double tol,
               std::int64_t max_iters) {
  PowerRun run;
  std::vector<Complex> y, z;
  double nx = norm2(x);
  for (auto& c : x) c /= nx;
  double prev = -1.0;
  int calm = 0;
  for (std::int64_t it = 1; it <= max_iters; ++it) {
    op.multiply(x, y, &mask);
    op.multiply(y, z, &mask);
    Complex rq{};
    for (std::size_t i = 0; i < x.size(); ++i) rq += std::conj(x[i]) * z[i];
    const double est = std::sqrt(std::abs(rq));
    run.iterations = it;
    run.estimate = est;
    run.last_change = std::abs(est - prev);
    calm = run.last_change < tol ? calm + 1 : 0;
    // Also demand a small eigen-residual: slow drift can mimic a settled estimate.
    double resid = 0.0;
    if (calm >= 3) {
      for (std::size_t i = 0; i < x.size(); ++i) resid += std::norm(z[i] - rq * x[i]);
      resid = std::sqrt(resid) / std::max(std::abs(rq), 1e-300);
    }
    if (calm >= 3 && resid <= 1e-6) {
      run.converged = true;
      return run;
    }
    prev = est;
    const double nz = norm2(z);
    if (!(nz > 0.0)) {
      run.estimate = 0.0;
      run.converged = true;
      return run;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = z[i] / nz;
  }
  return run;
}

}  // namespace

SpectralReport spectral_radius(const SparseOperator& op, const std::vector<std::int32_t>& restricted, double tol,
                               std::int64_t max_iters) {
  if (restricted.empty()) throw Error(ErrorCode::InvalidArgument, "empty component");
  std::vector<std::uint8_t> mask(op.dim(), 0);
  for (std::int32_t r : restricted) mask[r] = 1;
  std::vector<Complex> start(op.dim(), Complex{});
  for (std::int32_t r : restricted) start[r] = 1.0;
  PowerRun run = power(op, mask, start, tol, std::max<std::int64_t>(1, max_iters / 2));
  std::int64_t used = run.iterations;
  if (!run.converged) {
    // Restart from a shifted start vector in case the first one stalled.
    for (std::int32_t r : restricted) start[r] = Complex{1.0, 0.5 * std::sin(static_cast<double>(r))};
    PowerRun again = power(op, mask, start, tol, std::max<std::int64_t>(1, max_iters - used));
    used += again.iterations;
    if (again.converged || again.last_change < run.last_change) run = again;
  }
  SpectralReport rep;
  rep.rho_estimate = run.estimate;
  rep.iterations = used;
  rep.converged = run.converged;
  rep.irreducible_component_size = restricted.size();
  return rep;
}

double dense_spectral_radius(const SparseOperator& op, const std::vector<std::int32_t>& restricted, std::size_t cap) {
  const std::size_t n = restricted.size();
  if (n > cap) throw Error(ErrorCode::TooLarge, "restriction too large for a dense eigensolve");
  std::vector<std::int32_t> pos(op.dim(), -1);
  for (std::size_t k = 0; k < n; ++k) pos[restricted[k]] = static_cast<std::int32_t>(k);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::int32_t i = restricted[k];
    for (std::int64_t e = op.row_start[i]; e < op.row_start[i + 1]; ++e)
      if (pos[op.col[e]] >= 0) a(k, pos[op.col[e]]) += op.val[e];
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NotConverged, "dense eigensolve failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<Complex> direct_fixed_point(const SparseOperator& op, std::size_t cap) {
  const std::size_t n = op.dim();
  if (n > cap)
    throw Error(ErrorCode::TooLarge, "instance too large for direct verification (dim " + std::to_string(n) +
                                         " > " + std::to_string(cap) + ")");
  using SpMat = Eigen::SparseMatrix<Complex>;
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(op.nnz() + n);
  for (std::size_t i = 0; i < n; ++i) {
    trip.emplace_back(i, i, 1.0);
    for (std::int64_t e = op.row_start[i]; e < op.row_start[i + 1]; ++e) trip.emplace_back(i, op.col[e], -op.val[e]);
  }
  SpMat a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());  // duplicates are summed
  a.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw Error(ErrorCode::NoUniqueFixedPoint, "no unique fixed point: singular system");
  Eigen::VectorXcd v(n);
  for (std::size_t i = 0; i < n; ++i) v(i) = op.shift[i];
  const Eigen::VectorXcd x = lu.solve(v);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw Error(ErrorCode::NoUniqueFixedPoint, "no unique fixed point: solve failed");
  const double res = (a * x - v).norm();
  if (!(res <= 1e-8 * std::max(1.0, v.norm() + x.norm())))
    throw Error(ErrorCode::NoUniqueFixedPoint, "no unique fixed point: residual " + std::to_string(res));
  return std::vector<Complex>(x.data(), x.data() + n);
}

VerifyReport verify(const SolverState& state, const VerifyOptions& opts) {
  VerifyReport rep;
  rep.m = state.size();
  rep.dim = 2 * rep.m;
  if (rep.dim > opts.dim_cap)
    throw Error(ErrorCode::TooLarge, "instance too large for direct verification (dim " + std::to_string(rep.dim) +
                                         " > " + std::to_string(opts.dim_cap) + ")");
  const SparseOperator op = assemble(state);
  rep.nnz = op.nnz();
  rep.row_sum_max_deviation = row_sum_deviation(op);
  rep.row_sum_ok = rep.row_sum_max_deviation <= 1e-12;
  rep.block_symmetry_defect = block_symmetry_defect(op);
  rep.block_ok = rep.block_symmetry_defect <= 1e-12;
  rep.sweep_equivalence_error = sweep_equivalence(state, op);
  rep.equivalence_ok = rep.sweep_equivalence_error < 1e-12;

  std::vector<std::int32_t> seeds;
  for (std::size_t k = 0; k < state.size(); ++k)
    if (state.inner[k]) seeds.push_back(static_cast<std::int32_t>(k));
  const std::vector<std::int32_t> comp = irreducible_component(op, seeds);
  rep.component_size = comp.size();
  rep.component_has_all_inner = true;
  for (std::int32_t sd : seeds)
    rep.component_has_all_inner = rep.component_has_all_inner && std::binary_search(comp.begin(), comp.end(), sd);
  rep.component_ok = rep.component_has_all_inner;

  rep.spectral = spectral_radius(op, comp, opts.rho_tol, opts.rho_max_iters);
  rep.rho_ok = rep.spectral.rho_estimate < 1.0 - 1e-6;
  if (comp.size() <= opts.dense_cap) {
    rep.dense_rho = dense_spectral_radius(op, comp, opts.dense_cap);
    rep.dense_ok = std::abs(rep.dense_rho - rep.spectral.rho_estimate) <= 1e-6;
  }

  const std::vector<Complex> direct = direct_fixed_point(op, opts.dim_cap);
  const double diam = state.target_diameter();
  for (std::size_t k = 0; k < rep.m; ++k) {
    rep.stored_map_error = std::max(rep.stored_map_error, std::abs(state.p[k] - direct[k]) / diam);
    rep.conjugate_consistency = std::max(rep.conjugate_consistency, std::abs(direct[k + rep.m] - std::conj(direct[k])));
  }
  rep.conjugate_ok = rep.conjugate_consistency <= 1e-10;

  SolverState polished = state;
  const std::int64_t before = polished.iterations;
  run(polished, opts.polish_tol, opts.polish_max_sweeps);
  rep.polish_sweeps = polished.iterations - before;
  rep.polished_residual = polished.residual;
  for (std::size_t k = 0; k < rep.m; ++k)
    rep.cross_validation_error = std::max(rep.cross_validation_error, std::abs(polished.p[k] - direct[k]) / diam);
  rep.cross_ok = rep.cross_validation_error <= 1e-6;
  return rep;
}

}  // namespace hyperbolize
