#pragma once

// A hyperbolization problem: source wallpaper signature plus target corner
// orders, resolved into the Euclidean and hyperbolic cells of the reflection
// supergroup.

#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/symmetry.hpp"

namespace hyperbolize {

struct ProblemSpec {
  std::string source_signature;
  std::vector<int> target_orders;
  double t = 0.5;       // quadrilateral family parameter
  double aspect = 1.0;  // width / height of the *2222 rectangle
  bool rectangular = false;
};

struct Problem {
  ProblemSpec spec;
  OrbifoldSignature source;
  SupergroupReduction reduction;
  CellSpec euclidean;
  CellSpec hyperbolic;
  ReflectionGroup g_e;
  ReflectionGroup g_h;

  bool quadrilateral() const { return euclidean.size() == 4; }
};

Problem make_problem(const ProblemSpec& spec);

/// "4,3,3" -> {4, 3, 3}; throws InvalidArgument on junk.
std::vector<int> parse_orders(const std::string& text);

}  // namespace hyperbolize
