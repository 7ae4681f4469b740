#include "core/symmetry.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>

#include "core/error.hpp"

namespace hyperbolize {

namespace {

struct SignatureRow {
  const char* ascii;  // orbifold name with x for × and o for ○
  const char* name;
  const char* alias;
  const char* supergroup;
  int index;
  bool needs_rectangle;
  const char* pairing;
};

// clang-format off
const SignatureRow kRows[] = {
  {"*632",  "*632",  "p6m",  "*632",  1, false, "the cell itself"},
  {"632",   "632",   "p6",   "*632",  2, false, "two *632 cells joined across one mirror"},
  {"*442",  "*442",  "p4m",  "*442",  1, false, "the cell itself"},
  {"442",   "442",   "p4",   "*442",  2, false, "two *442 cells joined across one mirror"},
  {"4*2",   "4*2",   "p4g",  "*442",  2, false, "two *442 cells joined across the mirror through the 2-fold corner"},
  {"*333",  "*333",  "p3m1", "*333",  1, false, "the cell itself"},
  {"333",   "333",   "p3",   "*333",  2, false, "two *333 cells joined across one mirror"},
  {"3*3",   "3*3",   "p31m", "*632",  2, false, "two *632 cells joined across the mirror opposite the 3-fold corner"},
  {"*2222", "*2222", "pmm",  "*2222", 1, false, "the cell itself"},
  {"2222",  "2222",  "p2",   "*2222", 2, true,  "two *2222 rectangles joined along one side"},
  {"22*",   "22*",   "pmg",  "*2222", 2, false, "two *2222 rectangles joined along one side"},
  {"22x",   "22×", "pgg", "*2222", 4, false, "four *2222 rectangles forming a 2x2 block"},
  {"2*22",  "2*22",  "cmm",  "*2222", 2, false, "two *2222 rectangles joined along one side"},
  {"**",    "**",    "pm",   "*2222", 2, false, "two *2222 rectangles joined along one side"},
  {"*x",    "*×", "cm",  "*2222", 4, false, "four *2222 rectangles forming a 2x2 block"},
  {"xx",    "××", "pg", "*2222", 4, false, "four *2222 rectangles forming a 2x2 block"},
  {"o",     "○", "p1",   "*2222", 4, true,  "four *2222 rectangles forming a 2x2 block"},
};
// clang-format on

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
  return s;
}

std::string to_ascii_key(std::string_view text) {
  std::string s(text);
  s = replace_all(s, "×", "x");
  s = replace_all(s, "○", "o");
  s = replace_all(s, "∗", "*");
  std::string out;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

const SignatureRow& row_of(const OrbifoldSignature& sig) {
  for (const auto& r : kRows)
    if (sig.name == r.name) return r;
  throw Error(ErrorCode::NotWallpaperSignature, "not a wallpaper signature: " + sig.name);
}

OrbifoldSignature from_row(const SignatureRow& r) { return {r.name, r.alias}; }

constexpr double kOnEdge = 1e-12;

}  // namespace

const std::vector<OrbifoldSignature>& all_signatures() {
  static const std::vector<OrbifoldSignature> sigs = [] {
    std::vector<OrbifoldSignature> v;
    for (const auto& r : kRows) v.push_back(from_row(r));
    return v;
  }();
  return sigs;
}

OrbifoldSignature parse_signature(std::string_view text) {
  const std::string key = to_ascii_key(text);
  for (const auto& r : kRows)
    if (key == r.ascii || key == r.alias) return from_row(r);
  throw Error(ErrorCode::NotWallpaperSignature, "not a wallpaper signature: '" + std::string(text) + "'");
}

bool is_reflection_group(const OrbifoldSignature& sig) {
  const auto& r = row_of(sig);
  return r.index == 1;
}

std::vector<int> euclidean_orders(const OrbifoldSignature& sig) {
  if (sig.name == "*632") return {6, 3, 2};
  if (sig.name == "*442") return {4, 4, 2};
  if (sig.name == "*333") return {3, 3, 3};
  if (sig.name == "*2222") return {2, 2, 2, 2};
  throw Error(ErrorCode::InvalidArgument, "not a reflection signature: " + sig.name);
}

int GroupWord::distinct_labels() const {
  std::set<std::uint8_t> s(labels.begin(), labels.end());
  return static_cast<int>(s.size());
}

ReflectionGroup reflection_group(const CellSpec& cell) {
  validate(cell);
  ReflectionGroup g{cell, {}, {}};
  for (std::size_t k = 0; k < cell.size(); ++k) {
    g.generators.push_back(Motion::reflection(cell.edges[k]));
    g.edge_labels.push_back("e" + std::to_string(k));
  }
  return g;
}

bool try_locate(const ReflectionGroup& g, Complex z, int max_len, Located& out) {
  out.word.labels.clear();
  const CellSpec& cell = g.cell;
  if (cell.kind == GeometryKind::Hyperbolic && !(std::abs(z) < 1.0)) return false;
  for (;;) {
    int nearest = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cell.size(); ++k) {
      const double s = cell.side(k, z);
      if (s < -kOnEdge && -s < best) {
        best = -s;
        nearest = static_cast<int>(k);
      }
    }
    if (nearest < 0) {
      out.z_in = z;
      return true;
    }
    if (static_cast<int>(out.word.size()) >= max_len) return false;
    z = invert(cell.edges[nearest], z);
    out.word.labels.push_back(static_cast<std::uint8_t>(nearest));
  }
}

Located locate(const ReflectionGroup& g, Complex z, int max_len) {
  if (g.cell.kind == GeometryKind::Hyperbolic && !(std::abs(z) < 1.0))
    throw Error(ErrorCode::InvalidArgument, "point outside the unit disk");
  Located out;
  if (!try_locate(g, z, max_len, out))
    throw Error(ErrorCode::WordLengthExceeded, "word length exceeded: more than " + std::to_string(max_len) + " reflections");
  return out;
}

Motion corresponding_word(const GroupWord& word, const ReflectionGroup& target) {
  Motion m = Motion::identity();
  for (std::uint8_t label : word.labels) {
    if (label >= target.generators.size())
      throw Error(ErrorCode::LabelMismatch, "label mismatch: e" + std::to_string(label) + " not in target group");
    m = compose(target.generators[label], m);
  }
  return m;
}

SupergroupReduction supergroup_reduction(const OrbifoldSignature& sig, bool rectangular) {
  const auto& r = row_of(sig);
  if (r.needs_rectangle && !rectangular)
    throw Error(ErrorCode::Unsupported,
                "requires two-parameter adjustment - unsupported: " + sig.name + " needs a rectangular cell assertion");
  return {from_row(r), parse_signature(r.supergroup), r.index, r.pairing};
}

GeometryKind validate_target(const OrbifoldSignature& source, const std::vector<int>& target, bool rectangular) {
  const SupergroupReduction red = supergroup_reduction(source, rectangular);
  const std::vector<int> euclid = euclidean_orders(red.supergroup_signature);
  if (target.size() != euclid.size())
    throw Error(ErrorCode::InvalidArgument, "target for " + red.supergroup_signature.name + " needs " +
                                                std::to_string(euclid.size()) + " corner orders");
  long long den = 1;
  for (int o : target) {
    if (o < 2) throw Error(ErrorCode::InvalidArgument, "corner orders must be at least 2");
    if (o > 1000) throw Error(ErrorCode::InvalidArgument, "corner order too large");
    den *= o;
  }
  long long num = 0;
  for (int o : target) num += den / o;
  // Hyperbolic iff sum of 1/order stays below n - 2.
  const long long flat = static_cast<long long>(target.size()) - 2;
  bool raised = false;
  for (std::size_t k = 0; k < target.size(); ++k) raised = raised || target[k] > euclid[k];
  if (!(num < flat * den) || !raised)
    throw Error(ErrorCode::TargetNotHyperbolic, "target not hyperbolic: angle sum is not below the Euclidean value");
  return GeometryKind::Hyperbolic;
}

}  // namespace hyperbolize
