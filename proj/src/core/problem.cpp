#include "core/problem.hpp"

#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace hyperbolize {

Problem make_problem(const ProblemSpec& spec) {
  Problem pr;
  pr.spec = spec;
  pr.source = parse_signature(spec.source_signature);
  pr.reduction = supergroup_reduction(pr.source, spec.rectangular);
  validate_target(pr.source, spec.target_orders, spec.rectangular);
  const std::vector<int> eo = euclidean_orders(pr.reduction.supergroup_signature);
  const auto& to = spec.target_orders;
  if (eo.size() == 3) {
    pr.euclidean = euclidean_triangle(eo[0], eo[1], eo[2]);
    pr.hyperbolic = hyperbolic_triangle(to[0], to[1], to[2]);
  } else {
    if (!(spec.aspect > 0.0) || !std::isfinite(spec.aspect) || spec.aspect > 100.0 || spec.aspect < 0.01)
      throw Error(ErrorCode::InvalidArgument, "aspect must lie in [0.01, 100]");
    pr.euclidean = euclidean_rectangle(spec.aspect, 1.0);
    pr.hyperbolic = hyperbolic_quadrilateral({to[0], to[1], to[2], to[3]}, spec.t);
  }
  pr.g_e = reflection_group(pr.euclidean);
  pr.g_h = reflection_group(pr.hyperbolic);
  return pr;
}

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad corner order list: '" + text + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw Error(ErrorCode::InvalidArgument, "bad corner order list: '" + text + "'");
    out.push_back(v);
  }
  if (out.size() != 3 && out.size() != 4)
    throw Error(ErrorCode::InvalidArgument, "expected 3 or 4 corner orders, got '" + text + "'");
  return out;
}

}  // namespace hyperbolize
