#include "hyperbolize/hyperbolize.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "core/error.hpp"
#include "core/map_file.hpp"
#include "core/renderer.hpp"
#include "core/verifier.hpp"

using namespace hyperbolize;

struct hyp_map {
  SolvedMap map;
  double wall_time = 0.0;
};

struct hyp_image {
  Image image;
};

namespace {

thread_local std::string g_last_error;

hyp_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return HYP_ERR_INVALID_ARGUMENT;
    case ErrorCode::InversionPole: return HYP_ERR_INVERSION_POLE;
    case ErrorCode::DegenerateTriple: return HYP_ERR_DEGENERATE_TRIPLE;
    case ErrorCode::DegenerateGeodesic: return HYP_ERR_DEGENERATE_GEODESIC;
    case ErrorCode::DegenerateCrossRatio: return HYP_ERR_DEGENERATE_CROSS_RATIO;
    case ErrorCode::PointAtInfinity: return HYP_ERR_POINT_AT_INFINITY;
    case ErrorCode::NotEuclideanSignature: return HYP_ERR_NOT_EUCLIDEAN_SIGNATURE;
    case ErrorCode::NotHyperbolic: return HYP_ERR_NOT_HYPERBOLIC;
    case ErrorCode::NotWallpaperSignature: return HYP_ERR_NOT_WALLPAPER_SIGNATURE;
    case ErrorCode::TargetNotHyperbolic: return HYP_ERR_TARGET_NOT_HYPERBOLIC;
    case ErrorCode::Unsupported: return HYP_ERR_UNSUPPORTED;
    case ErrorCode::WordLengthExceeded: return HYP_ERR_WORD_LENGTH_EXCEEDED;
    case ErrorCode::LabelMismatch: return HYP_ERR_LABEL_MISMATCH;
    case ErrorCode::GridTooCoarse: return HYP_ERR_GRID_TOO_COARSE;
    case ErrorCode::GridTooCoarseNearCorner: return HYP_ERR_GRID_TOO_COARSE_NEAR_CORNER;
    case ErrorCode::OutsideInterpolationDomain: return HYP_ERR_OUTSIDE_INTERPOLATION_DOMAIN;
    case ErrorCode::SearchFailed: return HYP_ERR_SEARCH_FAILED;
    case ErrorCode::NoUniqueFixedPoint: return HYP_ERR_NO_UNIQUE_FIXED_POINT;
    case ErrorCode::TooLarge: return HYP_ERR_TOO_LARGE;
    case ErrorCode::NotConverged: return HYP_ERR_NOT_CONVERGED;
    case ErrorCode::Io: return HYP_ERR_IO;
    case ErrorCode::Format: return HYP_ERR_FORMAT;
    case ErrorCode::Checksum: return HYP_ERR_CHECKSUM;
  }
  return HYP_ERR_INTERNAL;
}

hyp_status fail(hyp_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
hyp_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return HYP_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HYP_ERR_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return fail(HYP_ERR_INTERNAL, std::string("internal error: ") + e.what());
  } catch (...) {
    return fail(HYP_ERR_INTERNAL, "internal error");
  }
}

void need(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

void copy_str(char* dst, std::size_t n, const std::string& src) {
  std::strncpy(dst, src.c_str(), n - 1);
  dst[n - 1] = '\0';
}

ProblemSpec to_spec(const hyp_problem* p) {
  need(p != nullptr, "null problem");
  need(p->source_signature != nullptr, "missing source signature");
  need(p->target_orders != nullptr || p->target_order_count == 0, "null target orders");
  ProblemSpec spec;
  spec.source_signature = p->source_signature;
  spec.target_orders.assign(p->target_orders, p->target_orders + p->target_order_count);
  spec.t = p->t;
  spec.aspect = p->aspect;
  spec.rectangular = p->rectangular != 0;
  return spec;
}

SolveSettings to_settings(const hyp_solve_options* o) {
  hyp_solve_options d;
  hyp_solve_options_init(&d);
  if (!o) o = &d;
  need(std::isfinite(o->delta) && o->delta > 0.0 && o->delta <= 0.5, "delta must lie in (0, 0.5]");
  need(std::isfinite(o->tol) && o->tol > 0.0, "tolerance must be positive");
  need(o->max_sweeps >= 1, "max sweeps must be at least 1");
  need(o->relaxation >= 1.0 && o->relaxation < 1.95, "relaxation must lie in [1, 1.95)");
  return {o->delta, o->tol, o->relaxation, o->max_sweeps};
}

SolverOptions to_solver_options(const hyp_solve_options* o) {
  SolverOptions so;
  if (!o) return so;
  so.relaxation = o->relaxation;
  if (o->progress) {
    const hyp_progress_fn fn = o->progress;
    void* user = o->progress_user;
    so.progress = [fn, user](std::int64_t sweep, double res) { return fn(user, sweep, res) != 0; };
  }
  if (o->progress_every > 0) so.progress_every = o->progress_every;
  return so;
}

void fill_signature(const OrbifoldSignature& sig, hyp_signature_info* out) {
  std::memset(out, 0, sizeof(*out));
  copy_str(out->name, sizeof(out->name), sig.name);
  copy_str(out->alias, sizeof(out->alias), sig.crystallographic_alias);
  SupergroupReduction red = supergroup_reduction(sig, true);
  copy_str(out->supergroup, sizeof(out->supergroup), red.supergroup_signature.name);
  out->index = red.index;
  try {
    (void)supergroup_reduction(sig, false);
    out->needs_rectangular = 0;
  } catch (const Error&) {
    out->needs_rectangular = 1;
  }
  out->corner_count = static_cast<int>(euclidean_orders(red.supergroup_signature).size());
}

Rgb srgb_colour(const float c[3]) {
  for (int k = 0; k < 3; ++k) need(c[k] >= 0.0f && c[k] <= 1.0f, "colour components must lie in [0, 1]");
  return {srgb_to_linear(c[0]), srgb_to_linear(c[1]), srgb_to_linear(c[2])};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

extern "C" {

const char* hyp_version(void) { return "1.0.0"; }

const char* hyp_last_error(void) { return g_last_error.c_str(); }

const char* hyp_status_name(hyp_status s) {
  switch (s) {
    case HYP_OK: return "ok";
    case HYP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HYP_ERR_INVERSION_POLE: return "inversion pole";
    case HYP_ERR_DEGENERATE_TRIPLE: return "degenerate triple";
    case HYP_ERR_DEGENERATE_GEODESIC: return "degenerate geodesic";
    case HYP_ERR_DEGENERATE_CROSS_RATIO: return "degenerate cross ratio";
    case HYP_ERR_POINT_AT_INFINITY: return "point at infinity";
    case HYP_ERR_NOT_EUCLIDEAN_SIGNATURE: return "not a Euclidean signature";
    case HYP_ERR_NOT_HYPERBOLIC: return "not hyperbolic";
    case HYP_ERR_NOT_WALLPAPER_SIGNATURE: return "not a wallpaper signature";
    case HYP_ERR_TARGET_NOT_HYPERBOLIC: return "target not hyperbolic";
    case HYP_ERR_UNSUPPORTED: return "unsupported";
    case HYP_ERR_WORD_LENGTH_EXCEEDED: return "word length exceeded";
    case HYP_ERR_LABEL_MISMATCH: return "label mismatch";
    case HYP_ERR_GRID_TOO_COARSE: return "grid too coarse";
    case HYP_ERR_GRID_TOO_COARSE_NEAR_CORNER: return "grid too coarse near corner";
    case HYP_ERR_OUTSIDE_INTERPOLATION_DOMAIN: return "outside interpolation domain";
    case HYP_ERR_SEARCH_FAILED: return "search failed";
    case HYP_ERR_NO_UNIQUE_FIXED_POINT: return "no unique fixed point";
    case HYP_ERR_TOO_LARGE: return "too large";
    case HYP_ERR_NOT_CONVERGED: return "not converged";
    case HYP_ERR_IO: return "i/o error";
    case HYP_ERR_FORMAT: return "format error";
    case HYP_ERR_CHECKSUM: return "checksum failure";
    case HYP_ERR_OUT_OF_MEMORY: return "out of memory";
    case HYP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

hyp_status hyp_set_workers(int workers) {
  return guarded([&] {
    need(workers >= 0, "worker count must be non-negative");
#ifdef _OPENMP
    static const int initial = omp_get_max_threads();
    omp_set_num_threads(workers == 0 ? initial : workers);
#endif
  });
}

hyp_status hyp_signature_lookup(const char* text, hyp_signature_info* out) {
  return guarded([&] {
    need(text && out, "null argument");
    fill_signature(parse_signature(text), out);
  });
}

size_t hyp_signature_count(void) { return all_signatures().size(); }

hyp_status hyp_signature_at(size_t index, hyp_signature_info* out) {
  return guarded([&] {
    need(out != nullptr, "null argument");
    need(index < all_signatures().size(), "signature index out of range");
    fill_signature(all_signatures()[index], out);
  });
}

void hyp_problem_init(hyp_problem* p) {
  if (!p) return;
  std::memset(p, 0, sizeof(*p));
  p->t = 0.5;
  p->aspect = 1.0;
}

void hyp_solve_options_init(hyp_solve_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof(*o));
  o->delta = 0.01;
  o->tol = 1e-8;
  o->max_sweeps = 500000;
  o->relaxation = 1.0;
  o->progress_every = 1000;
}

hyp_status hyp_solve(const hyp_problem* problem, const hyp_solve_options* options, hyp_map** out) {
  return guarded([&] {
    need(out != nullptr, "null output handle");
    *out = nullptr;
    const ProblemSpec spec = to_spec(problem);
    const SolveSettings settings = to_settings(options);
    auto h = std::make_unique<hyp_map>();
    const auto t0 = std::chrono::steady_clock::now();
    h->map = prepare_map(spec, settings);
    run(h->map.state, settings.tol, settings.max_sweeps, to_solver_options(options));
    h->wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    *out = h.release();
  });
}

hyp_status hyp_map_report(const hyp_map* map, hyp_solve_report* out) {
  return guarded([&] {
    need(map && out, "null argument");
    std::memset(out, 0, sizeof(*out));
    const SolvedMap& m = map->map;
    copy_str(out->source_signature, sizeof(out->source_signature), m.problem.source.name);
    copy_str(out->supergroup_signature, sizeof(out->supergroup_signature),
             m.problem.reduction.supergroup_signature.name);
    out->corner_count = m.problem.spec.target_orders.size();
    for (std::size_t k = 0; k < out->corner_count && k < 4; ++k) out->target_orders[k] = m.problem.spec.target_orders[k];
    out->t = m.problem.spec.t;
    out->delta = m.state.delta;
    out->active_points = m.state.size();
    out->inner_points = m.state.inner_count();
    out->ghost_rules = m.state.ghosts.size();
    out->iterations = m.state.iterations;
    out->residual = m.state.residual;
    out->converged = m.state.converged ? 1 : 0;
    out->wall_time = map->wall_time;
  });
}

hyp_status hyp_map_conformality(const hyp_map* map, double corner_exclusion_cells, hyp_conformality* out) {
  return guarded([&] {
    need(map && out, "null argument");
    need(corner_exclusion_cells >= 0.0, "corner exclusion must be non-negative");
    const ConformalityStats c = conformality_report(map->map.state, corner_exclusion_cells * map->map.state.delta);
    out->samples = c.samples;
    out->angle_median_deg = c.angle_median * 180.0 / kPi;
    out->angle_max_deg = c.angle_max * 180.0 / kPi;
    out->ratio_median = c.ratio_median;
    out->ratio_max = c.ratio_max;
    out->energy_mean = c.energy_mean;
  });
}

hyp_status hyp_map_evaluate(const hyp_map* map, double re, double im, double* out_re, double* out_im) {
  return guarded([&] {
    need(map && out_re && out_im, "null argument");
    const Complex v = interpolate(map->map.state, {re, im});
    *out_re = v.real();
    *out_im = v.imag();
  });
}

hyp_status hyp_map_save(const hyp_map* map, const char* path) {
  return guarded([&] {
    need(map && path, "null argument");
    save_map(path, map->map);
  });
}

hyp_status hyp_map_load(const char* path, hyp_map** out) {
  return guarded([&] {
    need(path && out, "null argument");
    *out = nullptr;
    auto h = std::make_unique<hyp_map>();
    h->map = load_map(path);
    *out = h.release();
  });
}

void hyp_map_free(hyp_map* map) { delete map; }

hyp_status hyp_modulus_search(const hyp_problem* problem, const hyp_solve_options* options, double bracket_tol,
                              hyp_modulus_result* result, hyp_map** out) {
  return guarded([&] {
    need(result != nullptr, "null result");
    if (out) *out = nullptr;
    need(std::isfinite(bracket_tol) && bracket_tol > 0.0 && bracket_tol < 0.2, "bracket tolerance must lie in (0, 0.2)");
    ProblemSpec spec = to_spec(problem);
    spec.t = 0.5;
    const SolveSettings settings = to_settings(options);
    Problem pr = make_problem(spec);
    need(pr.quadrilateral(), "modulus search needs a source that reduces to *2222");
    const auto& o = spec.target_orders;
    ModulusOptions mo;
    mo.delta = settings.delta;
    mo.solve_tol = settings.tol;
    mo.max_sweeps = settings.max_sweeps;
    mo.solver = to_solver_options(options);
    const auto t0 = std::chrono::steady_clock::now();
    ModulusResult r = modulus_search({o[0], o[1], o[2], o[3]}, pr.euclidean, bracket_tol, mo);
    std::memset(result, 0, sizeof(*result));
    result->t_star = r.t_star;
    result->energy = r.energy;
    result->evaluation_count = std::min<std::size_t>(r.evaluations.size(), HYP_MAX_MODULUS_EVALUATIONS);
    for (std::size_t k = 0; k < result->evaluation_count; ++k) {
      result->eval_t[k] = r.evaluations[k].first;
      result->eval_energy[k] = r.evaluations[k].second;
    }
    if (out) {
      auto h = std::make_unique<hyp_map>();
      spec.t = r.t_star;
      h->map.problem = make_problem(spec);
      h->map.settings = settings;
      h->map.state = std::move(r.state);
      h->wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      *out = h.release();
    }
  });
}

hyp_status hyp_modulus_energy(const hyp_problem* problem, const hyp_solve_options* options, double* energy) {
  return guarded([&] {
    need(energy != nullptr, "null output");
    const ProblemSpec spec = to_spec(problem);
    const SolveSettings settings = to_settings(options);
    Problem pr = make_problem(spec);
    need(pr.quadrilateral(), "modulus energy needs a source that reduces to *2222");
    const auto& o = spec.target_orders;
    ModulusOptions mo;
    mo.delta = settings.delta;
    mo.solve_tol = settings.tol;
    mo.max_sweeps = settings.max_sweeps;
    mo.solver = to_solver_options(options);
    *energy = modulus_energy({o[0], o[1], o[2], o[3]}, pr.euclidean, spec.t, mo);
  });
}

void hyp_verify_options_init(hyp_verify_options* o) {
  if (!o) return;
  const VerifyOptions d;
  o->dim_cap = d.dim_cap;
  o->dense_cap = d.dense_cap;
  o->polish_tol = d.polish_tol;
}

hyp_status hyp_verify(const hyp_map* map, const hyp_verify_options* options, hyp_verify_report* out) {
  return guarded([&] {
    need(map && out, "null argument");
    VerifyOptions vo;
    if (options) {
      need(options->polish_tol > 0.0, "polish tolerance must be positive");
      vo.dim_cap = options->dim_cap;
      vo.dense_cap = options->dense_cap;
      vo.polish_tol = options->polish_tol;
    }
    const VerifyReport r = verify(map->map.state, vo);
    std::memset(out, 0, sizeof(*out));
    out->active_points = r.m;
    out->dim = r.dim;
    out->nnz = r.nnz;
    out->row_sum_max_deviation = r.row_sum_max_deviation;
    out->block_symmetry_defect = r.block_symmetry_defect;
    out->sweep_equivalence_error = r.sweep_equivalence_error;
    out->component_size = r.component_size;
    out->rho_estimate = r.spectral.rho_estimate;
    out->rho_iterations = r.spectral.iterations;
    out->rho_converged = r.spectral.converged;
    out->dense_rho = r.dense_rho;
    out->stored_map_error = r.stored_map_error;
    out->polished_residual = r.polished_residual;
    out->cross_validation_error = r.cross_validation_error;
    out->conjugate_consistency = r.conjugate_consistency;
    out->row_sum_ok = r.row_sum_ok;
    out->block_ok = r.block_ok;
    out->equivalence_ok = r.equivalence_ok;
    out->component_ok = r.component_ok;
    out->rho_ok = r.rho_ok;
    out->dense_ok = r.dense_ok;
    out->cross_ok = r.cross_ok;
    out->conjugate_ok = r.conjugate_ok;
    out->passed = r.passed();
  });
}

void hyp_render_options_init(hyp_render_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof(*o));
  const RenderConfig d;
  o->resolution = d.resolution;
  o->supersampling = d.supersampling;
  o->max_word_length = d.max_word_length;
  o->background[0] = o->background[1] = o->background[2] = 1.0f;
  o->ornament = HYP_ORNAMENT_CHECKERBOARD;
  o->wrap = HYP_WRAP_GROUP;
  o->constant[0] = o->constant[1] = o->constant[2] = 0.5f;
}

hyp_status hyp_render(const hyp_map* map, const hyp_render_options* options, hyp_image** out,
                      hyp_render_stats* stats) {
  return guarded([&] {
    need(map && out, "null argument");
    *out = nullptr;
    hyp_render_options d;
    hyp_render_options_init(&d);
    const hyp_render_options* o = options ? options : &d;
    const Problem& pr = map->map.problem;

    RenderConfig cfg;
    cfg.resolution = o->resolution;
    cfg.supersampling = o->supersampling;
    cfg.max_word_length = o->max_word_length;
    cfg.background = srgb_colour(o->background);
    cfg.disk_margin = o->disk_margin;
    cfg.force = o->force != 0;

    OrnamentSampler sampler;
    switch (o->ornament) {
      case HYP_ORNAMENT_CHECKERBOARD:
        sampler = synthesize_test_ornament(OrnamentKind::Checkerboard, pr.g_e);
        break;
      case HYP_ORNAMENT_GRID:
        sampler = synthesize_test_ornament(OrnamentKind::CoordinateGrid, pr.g_e);
        break;
      case HYP_ORNAMENT_CORNERS:
        sampler = synthesize_test_ornament(OrnamentKind::CornerLabels, pr.g_e);
        break;
      case HYP_ORNAMENT_CONSTANT:
        sampler = constant_ornament(srgb_colour(o->constant));
        break;
      case HYP_ORNAMENT_IMAGE: {
        need(o->image_path != nullptr, "image ornament needs an image path");
        need(o->wrap == HYP_WRAP_GROUP || o->wrap == HYP_WRAP_TILE, "unknown wrap mode");
        AffineFrame frame;
        if (o->has_frame) {
          for (double v : o->frame) need(std::isfinite(v), "frame values must be finite");
          frame.origin = {o->frame[0], o->frame[1]};
          frame.e1 = {o->frame[2], o->frame[3]};
          frame.e2 = {o->frame[4], o->frame[5]};
        }
        sampler = raster_ornament(read_png(o->image_path), pr.g_e, o->wrap == HYP_WRAP_TILE ? Wrap::Tile : Wrap::Group,
                                  o->has_frame ? &frame : nullptr);
        break;
      }
      default:
        need(false, "unknown ornament kind");
    }
    need(std::isfinite(o->shift[0]) && std::isfinite(o->shift[1]), "shift must be finite");
    sampler.shift = {o->shift[0], o->shift[1]};

    RenderStats st;
    auto h = std::make_unique<hyp_image>();
    h->image = render(map->map.state, pr.g_h, pr.g_e, sampler, cfg, &st);
    if (stats) {
      stats->disk_samples = st.disk_samples;
      stats->capped_samples = st.capped_samples;
    }
    *out = h.release();
  });
}

int hyp_image_width(const hyp_image* image) { return image ? image->image.width : 0; }
int hyp_image_height(const hyp_image* image) { return image ? image->image.height : 0; }
const float* hyp_image_pixels(const hyp_image* image) { return image ? image->image.rgb.data() : nullptr; }

hyp_status hyp_image_save_png(const hyp_image* image, const hyp_map* map, int max_word_length, const char* path) {
  return guarded([&] {
    need(image && path, "null argument");
    std::vector<std::pair<std::string, std::string>> text = {{"Software", std::string("hyperbolize ") + hyp_version()}};
    if (map) {
      const SolvedMap& m = map->map;
      std::string orders;
      for (int o : m.problem.spec.target_orders) orders += (orders.empty() ? "" : ",") + std::to_string(o);
      text.emplace_back("Source", m.problem.source.name);
      text.emplace_back("Supergroup", m.problem.reduction.supergroup_signature.name);
      text.emplace_back("Target", orders);
      text.emplace_back("Delta", fmt(m.state.delta));
      text.emplace_back("Residual", fmt(m.state.residual));
    }
    text.emplace_back("WordCap", std::to_string(max_word_length));
    write_image_png(path, image->image, text);
  });
}

void hyp_image_free(hyp_image* image) { delete image; }

hyp_status hyp_symmetry_check(const hyp_map* map, const hyp_image* image, size_t samples, uint64_t seed,
                              double disk_margin, hyp_symmetry_result* out) {
  return guarded([&] {
    need(map && image && out, "null argument");
    need(disk_margin >= 0.0 && disk_margin < 0.5, "disk margin must lie in [0, 0.5)");
    const SymmetryCheck c = symmetry_check(image->image, map->map.problem.g_h.generators, samples, seed, disk_margin);
    out->max_mismatch = c.max_mismatch;
    out->mean_mismatch = c.mean_mismatch;
    out->probes = c.probes;
  });
}

}  // extern "C"
