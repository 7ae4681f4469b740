#pragma once

// Discrete conformal map between a source cell T_H and a target cell T_E by
// neighbour averaging on a square grid of spacing delta. Neighbours outside
// the source cell are ghosts: folded into the cell, interpolated, and carried
// back by the matching motion of the target group.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "core/geometry.hpp"
#include "core/symmetry.hpp"

namespace hyperbolize {

struct GridIndex {
  int i = 0, j = 0;
  Complex point(double delta) const { return {delta * i, delta * j}; }
  bool operator==(const GridIndex& o) const { return i == o.i && j == o.j; }
};

struct GhostRule {
  GridIndex source;
  GroupWord fold_word;
  GridIndex cell_corner;
  std::array<double, 4> weights{};  // (1-l)(1-m), l(1-m), (1-l)m, lm
  Motion back_motion;
  // Precomputed for the sweep: positions in p of the four corners, and the
  // affine back motion as v -> rot * (conj?)v + shift.
  std::array<std::int32_t, 4> corners{};
  Complex rot{1.0}, shift{0.0};
  bool conjugating = false;
};

struct SolverOptions {
  double relaxation = 1.0;
  int word_cap = 0;  // 0: four times the largest corner order
  // Called every `progress_every` sweeps with (sweep, residual); return false to stop.
  std::function<bool(std::int64_t, double)> progress;
  std::int64_t progress_every = 1000;
};

struct SolverState {
  double delta = 0.0;
  CellSpec source;  // T_H
  CellSpec target;  // T_E

  // Grid window [i0, i0 + width) x [j0, j0 + height) holding the active set
  // with a margin of two points; slot maps window positions to indices in p.
  int i0 = 0, j0 = 0, width = 0, height = 0;
  std::vector<std::int32_t> slot;
  std::vector<std::int32_t> ghost_slot;

  std::vector<GridIndex> points;  // the active set A, row-major (j, i)
  std::vector<std::uint8_t> inner;  // 1 for points of I
  std::vector<GhostRule> ghosts;
  std::vector<std::array<std::int32_t, 4>> stencil;  // +d, -d, +id, -id into [p | ghost values]
  std::vector<Complex> p;

  std::int64_t iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::vector<double> history;  // residual per sweep

  // Sweep scratch: [p | ghost values] and the next iterate.
  std::vector<Complex> buffer, next;

  std::size_t size() const { return points.size(); }
  std::size_t inner_count() const;
  std::int32_t index_of(GridIndex g) const;        // -1 if not active
  std::int32_t ghost_index_of(GridIndex g) const;  // -1 if no rule
  bool is_inner(GridIndex g) const;
  double target_diameter() const { return euclidean_diameter(target); }
};

struct SolveReport {
  std::int64_t iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  double conformality_median = 0.0;
  double wall_time = 0.0;
};

SolverState build_grid(const CellSpec& source, double delta);

void build_ghost_rules(SolverState& state, const ReflectionGroup& g_source, const ReflectionGroup& g_target,
                       int word_cap = 0);

/// Affine (triangles) or projective (quadrilaterals) corner-matching start.
void init_state(SolverState& state, const CellSpec& source, const CellSpec& target);

/// Starts from a solved coarser map, interpolated onto this grid.
void init_from(SolverState& state, const SolverState& coarse);

/// Fills `ghost_values` with beta(w) for every rule from the current p.
void evaluate_ghosts(const SolverState& state, const std::vector<Complex>& p, std::vector<Complex>& ghost_values);

/// One Jacobi sweep; returns the residual max |dp| / diam(T_E).
double sweep(SolverState& state, double relaxation = 1.0);

/// The image of one sweep without touching the state.
std::vector<Complex> sweep_image(const SolverState& state, const std::vector<Complex>& p);

/// Builds grid and ghosts, initializes, and sweeps until residual <= tol.
SolverState prepare(const CellSpec& source, const CellSpec& target, double delta, int word_cap = 0);
SolveReport run(SolverState& state, double tol, std::int64_t max_sweeps, const SolverOptions& opts = {});
std::pair<SolverState, SolveReport> solve(const CellSpec& source, const CellSpec& target, double delta, double tol,
                                          std::int64_t max_sweeps, const SolverOptions& opts = {});

/// Cell weights at z: corner (i, j) and bilinear weights; throws
/// OutsideInterpolationDomain when the cell is not complete.
std::pair<std::array<std::int32_t, 4>, std::array<double, 4>> interpolation_cell(const SolverState& state, Complex z,
                                                                                  GridIndex* corner = nullptr);
bool try_interpolation_cell(const SolverState& state, Complex z, std::array<std::int32_t, 4>& idx,
                            std::array<double, 4>& w, GridIndex* corner = nullptr);

Complex interpolate(const SolverState& state, Complex z);

/// psi continued beyond the cell: grid interpolation where the active set
/// covers z, otherwise fold into the cell and carry back by the target group.
Complex extended_map(const SolverState& state, const ReflectionGroup& g_source, const ReflectionGroup& g_target,
                     Complex z, int word_cap = 64);

/// Bilinear weights for fractional offsets (l, m) inside a unit cell.
std::array<double, 4> bilinear_weights(double l, double m);

struct ConformalityStats {
  std::size_t samples = 0;
  double angle_median = 0.0;  // radians
  double angle_max = 0.0;
  double ratio_median = 0.0;
  double ratio_max = 0.0;
  double energy_mean = 0.0;   // mean |d1 + i d2|^2 / (|d1|^2 + |d2|^2)
};

/// Difference-vector statistics over inner points farther than
/// `corner_exclusion` from every source vertex.
ConformalityStats conformality_report(const SolverState& state, double corner_exclusion);

struct ModulusResult {
  double t_star = 0.5;
  double energy = 0.0;
  std::vector<std::pair<double, double>> evaluations;  // (t, E(t)) in call order
  SolverState state;
  SolveReport report;
};

struct ModulusOptions {
  double delta = 0.02;
  double solve_tol = 1e-9;
  std::int64_t max_sweeps = 2000000;
  double corner_exclusion_cells = 5.0;
  SolverOptions solver;
};

/// Golden-section search over the quadrilateral family for the most
/// conformal member; bracket width < tol on return.
ModulusResult modulus_search(const std::array<int, 4>& orders, const CellSpec& q_e, double tol,
                             const ModulusOptions& opts = {});

/// Energy of the solved map for one family member.
double modulus_energy(const std::array<int, 4>& orders, const CellSpec& q_e, double t, const ModulusOptions& opts,
                      SolverState* state_out = nullptr, SolveReport* report_out = nullptr);

}  // namespace hyperbolize
