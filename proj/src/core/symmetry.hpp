#pragma once

// Wallpaper signatures, kaleidoscope groups of a fundamental cell, and the
// folding of arbitrary points back into the cell.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "core/geometry.hpp"

namespace hyperbolize {

struct OrbifoldSignature {
  std::string name;                  // orbifold notation, e.g. "*632", "22×", "○"
  std::string crystallographic_alias;  // e.g. "p6m"

  bool operator==(const OrbifoldSignature& o) const { return name == o.name; }
};

/// All 17 wallpaper signatures in a fixed order.
const std::vector<OrbifoldSignature>& all_signatures();

/// Accepts orbifold names (ASCII x/X for × and o/O for ○ allowed) and
/// crystallographic aliases, the latter case-insensitively.
OrbifoldSignature parse_signature(std::string_view text);

/// True for *ijk and *2222.
bool is_reflection_group(const OrbifoldSignature& sig);

/// Corner orders of the Euclidean cell of a reflection signature.
std::vector<int> euclidean_orders(const OrbifoldSignature& reflection_sig);

struct ReflectionGroup {
  CellSpec cell;
  std::vector<Motion> generators;  // reflection in edge i
  std::vector<std::string> edge_labels;
};

ReflectionGroup reflection_group(const CellSpec& cell);

/// Edge labels by index into ReflectionGroup::generators, in application order.
struct GroupWord {
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  int distinct_labels() const;
};

struct Located {
  GroupWord word;
  Complex z_in;
};

/// Folds z into the closed cell. Throws WordLengthExceeded past max_len.
Located locate(const ReflectionGroup& g, Complex z, int max_len);

/// Non-throwing variant for hot loops; returns false when the cap is hit.
bool try_locate(const ReflectionGroup& g, Complex z, int max_len, Located& out);

/// The motion of `target` spelled by `word`: the last label is applied last.
Motion corresponding_word(const GroupWord& word, const ReflectionGroup& target);

struct SupergroupReduction {
  OrbifoldSignature source_signature;
  OrbifoldSignature supergroup_signature;
  int index = 1;
  std::string cell_pairing;
};

/// Reflection supergroup used for hyperbolization. 2222 and ○ need
/// `rectangular` (the caller vouches that the Euclidean cell is a rectangle).
SupergroupReduction supergroup_reduction(const OrbifoldSignature& sig, bool rectangular = false);

/// Checks that `target_orders` turn the supergroup cell of `source` hyperbolic.
GeometryKind validate_target(const OrbifoldSignature& source, const std::vector<int>& target_orders,
                             bool rectangular = false);

}  // namespace hyperbolize
