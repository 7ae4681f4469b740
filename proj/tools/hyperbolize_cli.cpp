// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "hyperbolize/hyperbolize.h"

namespace {

enum Exit {
  kOk = 0,
  kInternal = 1,
  kInvalid = 2,
  kNotConverged = 3,
  kFile = 4,
  kVerifyFailed = 5,
  kTooLarge = 6,
  kSearchFailed = 7,
};

int exit_for(hyp_status s) {
  switch (s) {
    case HYP_OK: return kOk;
    case HYP_ERR_NOT_CONVERGED: return kNotConverged;
    case HYP_ERR_IO:
    case HYP_ERR_FORMAT:
    case HYP_ERR_CHECKSUM: return kFile;
    case HYP_ERR_TOO_LARGE: return kTooLarge;
    case HYP_ERR_SEARCH_FAILED: return kSearchFailed;
    case HYP_ERR_INTERNAL:
    case HYP_ERR_OUT_OF_MEMORY: return kInternal;
    default: return kInvalid;
  }
}

int report_error(hyp_status s) {
  std::fprintf(stderr, "error: %s\n", hyp_last_error()[0] ? hyp_last_error() : hyp_status_name(s));
  return exit_for(s);
}

struct ProblemArgs {
  std::string from;
  std::string to;
  double aspect = 1.0;
  bool rectangular = false;
  std::vector<int> orders;
};

struct SolveArgs {
  double delta = 0.01;
  double tol = 1e-8;
  long long max_sweeps = 500000;
  double relax = 1.0;
  int workers = 0;
  bool progress = false;
};

void add_problem_options(CLI::App* cmd, ProblemArgs& p) {
  cmd->add_option("--from", p.from, "source wallpaper signature, e.g. \"*333\" or p6m")->required();
  cmd->add_option("--to", p.to, "target corner orders, e.g. 4,3,3")->required();
  cmd->add_option("--aspect", p.aspect, "width/height of the rectangular cell")->check(CLI::Range(0.01, 100.0));
  cmd->add_flag("--rectangular", p.rectangular, "the Euclidean cell of a 2222 or o source is a rectangle");
}

void add_solve_options(CLI::App* cmd, SolveArgs& s) {
  cmd->add_option("--delta", s.delta, "grid spacing")->check(CLI::Range(1e-5, 0.5));
  cmd->add_option("--tol", s.tol, "residual target relative to the Euclidean cell diameter")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-sweeps", s.max_sweeps, "sweep budget")->check(CLI::Range(1LL, 1000000000LL));
  cmd->add_option("--relax", s.relax, "over-relaxation factor in [1, 1.95)")->check(CLI::Range(1.0, 1.95));
  cmd->add_option("--workers", s.workers, "worker threads (0: default)")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--progress", s.progress, "print the residual while solving");
}

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--to", "bad corner order list '" + text + "'");
    }
  }
  if (out.size() != 3 && out.size() != 4)
    throw CLI::ValidationError("--to", "expected 3 or 4 corner orders, got '" + text + "'");
  return out;
}

hyp_problem make_problem(ProblemArgs& p, double t) {
  p.orders = parse_orders(p.to);
  hyp_problem pr;
  hyp_problem_init(&pr);
  pr.source_signature = p.from.c_str();
  pr.target_orders = p.orders.data();
  pr.target_order_count = p.orders.size();
  pr.t = t;
  pr.aspect = p.aspect;
  pr.rectangular = p.rectangular ? 1 : 0;
  return pr;
}

int print_progress(void*, int64_t sweep, double residual) {
  std::fprintf(stderr, "sweep %lld residual %.3e\n", static_cast<long long>(sweep), residual);
  return 1;
}

hyp_solve_options make_solve_options(const SolveArgs& s) {
  hyp_solve_options o;
  hyp_solve_options_init(&o);
  o.delta = s.delta;
  o.tol = s.tol;
  o.max_sweeps = s.max_sweeps;
  o.relaxation = s.relax;
  if (s.progress) {
    o.progress = print_progress;
    o.progress_every = 10000;
  }
  return o;
}

void print_report(const hyp_map* map) {
  hyp_solve_report r;
  if (hyp_map_report(map, &r) != HYP_OK) return;
  std::printf("source: %s\n", r.source_signature);
  std::printf("supergroup: %s\n", r.supergroup_signature);
  std::printf("target:");
  for (std::size_t k = 0; k < r.corner_count; ++k) std::printf("%s%d", k ? "," : " ", r.target_orders[k]);
  std::printf("\n");
  if (r.corner_count == 4) std::printf("t: %.9g\n", r.t);
  std::printf("delta: %g\n", r.delta);
  std::printf("active points: %zu\n", r.active_points);
  std::printf("inner points: %zu\n", r.inner_points);
  std::printf("ghost rules: %zu\n", r.ghost_rules);
  std::printf("sweeps: %lld\n", static_cast<long long>(r.iterations));
  std::printf("residual: %.3e\n", r.residual);
  std::printf("converged: %s\n", r.converged ? "yes" : "no");
  if (r.wall_time > 0.0) std::printf("wall time: %.2f s\n", r.wall_time);
  hyp_conformality c;
  if (hyp_map_conformality(map, 5.0, &c) == HYP_OK && c.samples > 0)
    std::printf("conformality: angle median %.4f deg, max %.4f deg; ratio median %.5f\n", c.angle_median_deg,
                c.angle_max_deg, c.ratio_median);
}

int finish_map(hyp_map* map, const std::string& out) {
  print_report(map);
  hyp_solve_report r;
  hyp_map_report(map, &r);
  if (!out.empty()) {
    const hyp_status s = hyp_map_save(map, out.c_str());
    if (s != HYP_OK) {
      hyp_map_free(map);
      return report_error(s);
    }
    std::printf("wrote: %s\n", out.c_str());
  }
  hyp_map_free(map);
  if (!r.converged) {
    std::fprintf(stderr, "error: not converged within the sweep budget\n");
    return kNotConverged;
  }
  return kOk;
}

int run_search(ProblemArgs& p, const SolveArgs& s, double bracket_tol, const std::string& out) {
  hyp_problem pr = make_problem(p, 0.5);
  const hyp_solve_options o = make_solve_options(s);
  hyp_modulus_result res;
  hyp_map* map = nullptr;
  const hyp_status st = hyp_modulus_search(&pr, &o, bracket_tol, &res, &map);
  if (st != HYP_OK) return report_error(st);
  for (std::size_t k = 0; k < res.evaluation_count; ++k)
    std::printf("E(%.6f) = %.9e\n", res.eval_t[k], res.eval_energy[k]);
  std::printf("t_star: %.9g\n", res.t_star);
  std::printf("energy: %.9e\n", res.energy);
  return finish_map(map, out);
}

int cmd_solve(ProblemArgs& p, const SolveArgs& s, const std::string& modulus, double bracket_tol,
              const std::string& out) {
  if (modulus == "search") return run_search(p, s, bracket_tol, out);
  double t = 0.5;
  if (!modulus.empty()) {
    char* end = nullptr;
    t = std::strtod(modulus.c_str(), &end);
    if (end == modulus.c_str() || *end != '\0' || !(t > 0.0 && t < 1.0)) {
      std::fprintf(stderr, "error: --modulus expects a value in (0, 1) or \"search\"\n");
      return kInvalid;
    }
  }
  hyp_problem pr = make_problem(p, t);
  const hyp_solve_options o = make_solve_options(s);
  hyp_map* map = nullptr;
  const hyp_status st = hyp_solve(&pr, &o, &map);
  if (st != HYP_OK) return report_error(st);
  return finish_map(map, out);
}

const char* pass(int ok) { return ok ? "PASS" : "FAIL"; }

int cmd_verify(const std::string& path, std::size_t dim_cap) {
  hyp_map* map = nullptr;
  hyp_status st = hyp_map_load(path.c_str(), &map);
  if (st != HYP_OK) return report_error(st);
  hyp_verify_options vo;
  hyp_verify_options_init(&vo);
  vo.dim_cap = dim_cap;
  hyp_verify_report r;
  st = hyp_verify(map, &vo, &r);
  hyp_map_free(map);
  if (st != HYP_OK) return report_error(st);
  std::printf("active points: %zu (operator dimension %zu, %zu entries)\n", r.active_points, r.dim, r.nnz);
  std::printf("row sums: max deviation %.3e: %s\n", r.row_sum_max_deviation, pass(r.row_sum_ok));
  std::printf("block symmetry: defect %.3e: %s\n", r.block_symmetry_defect, pass(r.block_ok));
  std::printf("sweep equivalence: error %.3e: %s\n", r.sweep_equivalence_error, pass(r.equivalence_ok));
  std::printf("inner component: %zu rows: %s\n", r.component_size, pass(r.component_ok));
  std::printf("rho estimate: %.10f (%lld iterations%s)\n", r.rho_estimate, static_cast<long long>(r.rho_iterations),
              r.rho_converged ? "" : ", not converged");
  std::printf("rho < 1: %s\n", pass(r.rho_ok));
  if (r.dense_rho >= 0.0)
    std::printf("dense rho: %.10f: %s\n", r.dense_rho, pass(r.dense_ok));
  std::printf("stored map vs direct: %.3e\n", r.stored_map_error);
  std::printf("cross-validation error: %.3e (polished residual %.1e): %s\n", r.cross_validation_error,
              r.polished_residual, pass(r.cross_ok));
  std::printf("conjugate consistency: %.3e: %s\n", r.conjugate_consistency, pass(r.conjugate_ok));
  std::printf("verdict: %s\n", pass(r.passed));
  return r.passed ? kOk : kVerifyFailed;
}

bool parse_colour(const std::string& text, float out[3]) {
  if (text.size() == 7 && text[0] == '#') {
    for (int k = 0; k < 3; ++k) {
      char* end = nullptr;
      const std::string hex = text.substr(1 + 2 * k, 2);
      const long v = std::strtol(hex.c_str(), &end, 16);
      if (*end != '\0') return false;
      out[k] = static_cast<float>(v) / 255.0f;
    }
    return true;
  }
  double r = 0, g = 0, b = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &r, &g, &b, &tail) != 3) return false;
  out[0] = static_cast<float>(r);
  out[1] = static_cast<float>(g);
  out[2] = static_cast<float>(b);
  for (int k = 0; k < 3; ++k)
    if (!(out[k] >= 0.0f && out[k] <= 1.0f)) return false;
  return true;
}

struct RenderArgs {
  std::string map_path;
  std::string out;
  std::string ornament;
  std::string image;
  std::vector<double> frame;
  std::string wrap = "group";
  int resolution = 1024;
  int supersample = 2;
  int word_cap = 200;
  std::string background = "#ffffff";
  double margin = 0.0;
  bool force = false;
  std::size_t symmetry_samples = 10000;
  int workers = 0;
};

int cmd_render(const RenderArgs& a) {
  hyp_render_options o;
  hyp_render_options_init(&o);
  o.resolution = a.resolution;
  o.supersampling = a.supersample;
  o.max_word_length = a.word_cap;
  o.disk_margin = a.margin;
  o.force = a.force ? 1 : 0;
  if (!parse_colour(a.background, o.background)) {
    std::fprintf(stderr, "error: --background expects #rrggbb or r,g,b in [0, 1]\n");
    return kInvalid;
  }
  if (!a.image.empty()) {
    o.ornament = HYP_ORNAMENT_IMAGE;
    o.image_path = a.image.c_str();
    o.wrap = a.wrap == "tile" ? HYP_WRAP_TILE : HYP_WRAP_GROUP;
    if (!a.frame.empty()) {
      o.has_frame = 1;
      for (int k = 0; k < 6; ++k) o.frame[k] = a.frame[k];
    }
  } else if (a.ornament.empty() || a.ornament == "checkerboard") {
    o.ornament = HYP_ORNAMENT_CHECKERBOARD;
  } else if (a.ornament == "grid") {
    o.ornament = HYP_ORNAMENT_GRID;
  } else if (a.ornament == "corners") {
    o.ornament = HYP_ORNAMENT_CORNERS;
  }

  hyp_map* map = nullptr;
  hyp_status st = hyp_map_load(a.map_path.c_str(), &map);
  if (st != HYP_OK) return report_error(st);
  hyp_image* img = nullptr;
  hyp_render_stats stats;
  st = hyp_render(map, &o, &img, &stats);
  if (st != HYP_OK) {
    hyp_map_free(map);
    return report_error(st);
  }
  st = hyp_image_save_png(img, map, a.word_cap, a.out.c_str());
  if (st == HYP_OK) {
    std::printf("wrote: %s (%dx%d)\n", a.out.c_str(), hyp_image_width(img), hyp_image_height(img));
    std::printf("samples in disk: %zu, beyond word cap: %zu\n", stats.disk_samples, stats.capped_samples);
    if (a.symmetry_samples > 0) {
      hyp_symmetry_result sym;
      st = hyp_symmetry_check(map, img, a.symmetry_samples, 1, a.margin, &sym);
      if (st == HYP_OK)
        std::printf("symmetry check: max mismatch %.4f, mean %.5f over %zu probes\n", sym.max_mismatch,
                    sym.mean_mismatch, sym.probes);
    }
  }
  hyp_image_free(img);
  hyp_map_free(map);
  return st == HYP_OK ? kOk : report_error(st);
}

int set_workers(int workers) {
  const hyp_status s = hyp_set_workers(workers);
  return s == HYP_OK ? kOk : report_error(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperbolization of Euclidean wallpaper ornaments"};
  app.set_version_flag("--version", std::string(hyp_version()));
  app.set_config("--config", "", "read options from a TOML/INI file; command-line flags take precedence");
  app.require_subcommand(1);

  ProblemArgs problem;
  SolveArgs solve;
  std::string modulus, out;
  double bracket_tol = 1e-3;

  auto* solve_cmd = app.add_subcommand("solve", "solve the conformal map of one cell and write a map file");
  add_problem_options(solve_cmd, problem);
  add_solve_options(solve_cmd, solve);
  solve_cmd->add_option("--modulus", modulus, "quadrilateral family parameter in (0, 1), or \"search\"");
  solve_cmd->add_option("--bracket-tol", bracket_tol, "final bracket width of the modulus search")
      ->check(CLI::Range(1e-6, 0.19));
  solve_cmd->add_option("-o,--output", out, "map file to write");

  auto* modulus_cmd = app.add_subcommand("modulus", "search the most conformal quadrilateral for a *2222 source");
  add_problem_options(modulus_cmd, problem);
  add_solve_options(modulus_cmd, solve);
  modulus_cmd->add_option("--bracket-tol", bracket_tol, "final bracket width")->check(CLI::Range(1e-6, 0.19));
  modulus_cmd->add_option("-o,--output", out, "map file to write");

  std::string verify_path;
  std::size_t dim_cap = 4000;
  int verify_workers = 0;
  auto* verify_cmd = app.add_subcommand("verify", "check the iteration operator of a solved map");
  verify_cmd->add_option("map", verify_path, "map file")->required();
  verify_cmd->add_option("--dim-cap", dim_cap, "largest operator dimension for the direct solve")
      ->check(CLI::Range(static_cast<std::size_t>(2), static_cast<std::size_t>(200000)));
  verify_cmd->add_option("--workers", verify_workers, "worker threads")->check(CLI::NonNegativeNumber);

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "render an ornament onto the Poincare disk");
  render_cmd->add_option("map", render.map_path, "map file")->required();
  render_cmd->add_option("-o,--output", render.out, "PNG to write")->required();
  auto* orn = render_cmd->add_option("--ornament", render.ornament, "synthetic ornament")
                  ->check(CLI::IsMember({"checkerboard", "grid", "corners"}));
  auto* img = render_cmd->add_option("--image", render.image, "PNG wallpaper cell image");
  orn->excludes(img);
  img->excludes(orn);
  render_cmd->add_option("--frame", render.frame, "origin x y, e1 x y, e2 x y of the image pixel frame")
      ->expected(6)
      ->needs(img);
  render_cmd->add_option("--wrap", render.wrap, "periodic extension of the image")
      ->check(CLI::IsMember({"group", "tile"}))
      ->needs(img);
  render_cmd->add_option("--resolution", render.resolution, "pixels per side")->check(CLI::Range(16, 16384));
  render_cmd->add_option("--supersample", render.supersample, "samples per pixel axis")
      ->check(CLI::IsMember({1, 2, 4}));
  render_cmd->add_option("--word-cap", render.word_cap, "maximum reflections per sample")
      ->check(CLI::Range(1, 100000));
  render_cmd->add_option("--background", render.background, "colour outside the disk: #rrggbb or r,g,b");
  render_cmd->add_option("--margin", render.margin, "disk margin")->check(CLI::Range(0.0, 0.49));
  render_cmd->add_flag("--force", render.force, "render an unconverged map");
  render_cmd->add_option("--symmetry-samples", render.symmetry_samples, "probes for the symmetry statistic");
  render_cmd->add_option("--workers", render.workers, "worker threads")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*solve_cmd) {
      if (int rc = set_workers(solve.workers)) return rc;
      return cmd_solve(problem, solve, modulus, bracket_tol, out);
    }
    if (*modulus_cmd) {
      if (int rc = set_workers(solve.workers)) return rc;
      return run_search(problem, solve, bracket_tol, out);
    }
    if (*verify_cmd) {
      if (int rc = set_workers(verify_workers)) return rc;
      return cmd_verify(verify_path, dim_cap);
    }
    if (*render_cmd) {
      if (int rc = set_workers(render.workers)) return rc;
      return cmd_render(render);
    }
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  }
  return kInternal;
}
