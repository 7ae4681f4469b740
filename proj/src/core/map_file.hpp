#pragma once

// Solved-map files.
//
//   bytes 0..7   "HYPMAP01"
//   u32          format version (1)
//   u32          header length n
//   n bytes      JSON header (problem, grid spacing, solve statistics, cells)
//   u64          m, number of active grid points
//   m x (i32 i, i32 j)     grid indices, row-major (j, then i)
//   m x (f64 re, f64 im)   image positions p
//   u32          CRC-32 of every preceding byte
//
// Integers and doubles are little-endian. Doubles in the header are printed
// with round-trip precision, so load(save(x)) reproduces x bit for bit.

#include <cstdint>
#include <string>

#include "core/problem.hpp"
#include "core/solver.hpp"

namespace hyperbolize {

struct SolveSettings {
  double delta = 0.0;
  double tol = 0.0;
  double relaxation = 1.0;
  std::int64_t max_sweeps = 0;
};

struct SolvedMap {
  Problem problem;
  SolveSettings settings;
  SolverState state;
};

/// Builds the problem, grid and ghost rules; p starts from the corner-matching guess.
SolvedMap prepare_map(const ProblemSpec& spec, const SolveSettings& settings);

void save_map(const std::string& path, const SolvedMap& map);
SolvedMap load_map(const std::string& path);

/// In-memory variants; the file functions wrap these.
std::string encode_map(const SolvedMap& map);
SolvedMap decode_map(const std::string& bytes);

}  // namespace hyperbolize
