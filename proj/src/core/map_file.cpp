#include "core/map_file.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "core/error.hpp"

namespace hyperbolize {

namespace {

constexpr char kMagic[8] = {'H', 'Y', 'P', 'M', 'A', 'P', '0', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

struct Reader {
  const std::string& data;
  std::size_t pos = 0;

  template <typename T>
  T get() {
    if (data.size() - pos < sizeof(T)) throw Error(ErrorCode::Format, "malformed map file: truncated");
    unsigned char b[sizeof(T)];
    std::memcpy(b, data.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
};

nlohmann::json cell_json(const CellSpec& c) {
  nlohmann::json v = nlohmann::json::array();
  for (Complex z : c.vertices) v.push_back({z.real(), z.imag()});
  return {{"kind", c.kind == GeometryKind::Hyperbolic ? "hyperbolic" : "euclidean"},
          {"vertices", v},
          {"corner_orders", c.corner_orders}};
}

std::uint32_t crc(const std::string& s, std::size_t n) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(n)));
}

}  // namespace

SolvedMap prepare_map(const ProblemSpec& spec, const SolveSettings& settings) {
  SolvedMap map;
  map.problem = make_problem(spec);
  map.settings = settings;
  map.state = prepare(map.problem.hyperbolic, map.problem.euclidean, settings.delta);
  return map;
}

std::string encode_map(const SolvedMap& map) {
  const auto& s = map.state;
  const auto& spec = map.problem.spec;
  nlohmann::json h = {
      {"format", "hyperbolize solved map"},
      {"source_signature", map.problem.source.name},
      {"supergroup_signature", map.problem.reduction.supergroup_signature.name},
      {"supergroup_index", map.problem.reduction.index},
      {"target_orders", spec.target_orders},
      {"t", spec.t},
      {"aspect", spec.aspect},
      {"rectangular", spec.rectangular},
      {"delta", map.settings.delta},
      {"tol", map.settings.tol},
      {"relaxation", map.settings.relaxation},
      {"max_sweeps", map.settings.max_sweeps},
      {"iterations", s.iterations},
      {"residual", std::isfinite(s.residual) ? nlohmann::json(s.residual) : nlohmann::json(nullptr)},
      {"converged", s.converged},
      {"source_cell", cell_json(s.source)},
      {"target_cell", cell_json(s.target)},
  };
  const std::string header = h.dump();
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  put<std::uint64_t>(out, s.size());
  for (const GridIndex& g : s.points) {
    put<std::int32_t>(out, g.i);
    put<std::int32_t>(out, g.j);
  }
  for (const Complex& z : s.p) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  put<std::uint32_t>(out, crc(out, out.size()));
  return out;
}

SolvedMap decode_map(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + 12 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw Error(ErrorCode::Format, "malformed map file: bad magic");
  Reader tail{bytes, bytes.size() - 4};
  if (tail.get<std::uint32_t>() != crc(bytes, bytes.size() - 4))
    throw Error(ErrorCode::Checksum, "checksum failure: map file is corrupted");
  Reader r{bytes, sizeof(kMagic)};
  if (r.get<std::uint32_t>() != kVersion) throw Error(ErrorCode::Format, "unsupported map file version");
  const std::uint32_t hlen = r.get<std::uint32_t>();
  if (bytes.size() - r.pos < hlen) throw Error(ErrorCode::Format, "malformed map file: truncated header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(bytes.substr(r.pos, hlen));
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Format, std::string("malformed map file header: ") + e.what());
  }
  r.pos += hlen;

  SolvedMap map;
  try {
    ProblemSpec spec;
    spec.source_signature = h.at("source_signature").get<std::string>();
    spec.target_orders = h.at("target_orders").get<std::vector<int>>();
    spec.t = h.at("t").get<double>();
    spec.aspect = h.at("aspect").get<double>();
    spec.rectangular = h.at("rectangular").get<bool>();
    SolveSettings st;
    st.delta = h.at("delta").get<double>();
    st.tol = h.at("tol").get<double>();
    st.relaxation = h.at("relaxation").get<double>();
    st.max_sweeps = h.at("max_sweeps").get<std::int64_t>();
    map = prepare_map(spec, st);
    map.state.iterations = h.at("iterations").get<std::int64_t>();
    map.state.residual = h.at("residual").is_null() ? std::numeric_limits<double>::infinity()
                                                    : h.at("residual").get<double>();
    map.state.converged = h.at("converged").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Format, std::string("malformed map file header: ") + e.what());
  }

  const std::uint64_t m = r.get<std::uint64_t>();
  auto& s = map.state;
  if (m != s.size()) throw Error(ErrorCode::Format, "malformed map file: grid size does not match its header");
  if (bytes.size() - 4 - r.pos != m * 24) throw Error(ErrorCode::Format, "malformed map file: payload size mismatch");
  for (std::uint64_t k = 0; k < m; ++k) {
    const GridIndex g{r.get<std::int32_t>(), r.get<std::int32_t>()};
    if (!(g == s.points[k])) throw Error(ErrorCode::Format, "malformed map file: grid indices do not match");
  }
  for (std::uint64_t k = 0; k < m; ++k) {
    const double re = r.get<double>(), im = r.get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) throw Error(ErrorCode::Format, "malformed map file: non-finite value");
    s.p[k] = {re, im};
  }
  return map;
}

void save_map(const std::string& path, const SolvedMap& map) {
  const std::string bytes = encode_map(map);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

SolvedMap load_map(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open map file '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_map(bytes);
}

}  // namespace hyperbolize
