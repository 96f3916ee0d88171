#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "msweep/engine.hpp"
#include "msweep/rng.hpp"

namespace msweep {

struct GenSpec {
  int rows = 9;
  int cols = 9;
  int n_mines = 10;
  std::vector<Coord> safe_cells;
  std::uint64_t seed = 0;
};

struct SuiteSpec {
  GenSpec gen;
  int pool_size = 1000;
  int keep = 100;
  int min_first_reveal = 10;
  Coord first_click;
};

/// Default suite: the center is the first click and is kept mine-free.
inline SuiteSpec default_suite_spec(int rows, int cols, int mines, std::uint64_t seed) {
  SuiteSpec s;
  s.first_click = center_of(rows, cols);
  s.gen = {rows, cols, mines, {s.first_click}, seed};
  return s;
}

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by build_suite when the pool does not contain enough qualifying boards.
class InsufficientBoardsError : public GenerationError {
 public:
  InsufficientBoardsError(int qualified, int wanted, int pool)
      : GenerationError("only " + std::to_string(qualified) + " of " + std::to_string(pool) +
                        " candidate boards qualified; " + std::to_string(wanted) + " requested"),
        qualified_(qualified) {}
  int qualified() const { return qualified_; }

 private:
  int qualified_;
};

inline void check(const GenSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) throw GenerationError("board dimensions must be positive");
  if (spec.n_mines < 0) throw GenerationError("mine count must be non-negative");
  std::vector<Coord> safe = spec.safe_cells;
  std::sort(safe.begin(), safe.end());
  safe.erase(std::unique(safe.begin(), safe.end()), safe.end());
  for (const auto& c : safe)
    if (c.row < 1 || c.row > spec.rows || c.col < 1 || c.col > spec.cols)
      throw GenerationError("safe cell " + to_string(c) + " is out of bounds");
  const long free_cells = static_cast<long>(spec.rows) * spec.cols - static_cast<long>(safe.size());
  if (spec.n_mines > free_cells)
    throw GenerationError("cannot place " + std::to_string(spec.n_mines) + " mines in " + std::to_string(free_cells) +
                          " non-safe cells");
  if (spec.n_mines >= spec.rows * spec.cols) throw GenerationError("at least one cell must stay mine-free");
}

/// Uniform sample of n_mines distinct non-safe cells (partial Fisher-Yates over the
/// row-major list of candidates).
inline MineField generate_minefield(const GenSpec& spec) {
  check(spec);
  std::vector<Coord> pool;
  pool.reserve(static_cast<std::size_t>(spec.rows) * spec.cols);
  for (int r = 1; r <= spec.rows; ++r)
    for (int c = 1; c <= spec.cols; ++c)
      if (std::find(spec.safe_cells.begin(), spec.safe_cells.end(), Coord{r, c}) == spec.safe_cells.end())
        pool.push_back({r, c});

  Rng rng = make_rng(spec.seed);
  for (int i = 0; i < spec.n_mines; ++i) {
    const auto j = i + uniform_below(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(spec.n_mines);
  return MineField(spec.rows, spec.cols, std::move(pool));
}

/// Number of cells the first left click reveals on a fresh game.
inline int first_reveal_count(const MineField& field, Coord first_click) {
  if (!field.in_bounds(first_click)) throw std::invalid_argument("first click " + to_string(first_click) + " is out of bounds");
  if (field.is_mine(first_click)) throw std::invalid_argument("first click " + to_string(first_click) + " is a mine");
  GameState s = new_game(field, {ActionKind::Left, first_click});
  return static_cast<int>(apply_action(s, {ActionKind::Left, first_click}).revealed.size());
}

inline bool qualify(const MineField& field, Coord first_click, int min_reveal) {
  return first_reveal_count(field, first_click) >= min_reveal;
}

/// Candidate i is generated from substream i of the suite seed, so the filter never
/// shifts later candidates. Returns the first `keep` qualifying fields in pool order.
inline std::vector<MineField> build_suite(const SuiteSpec& spec) {
  if (spec.keep < 0 || spec.pool_size < 0) throw GenerationError("pool and keep must be non-negative");
  if (spec.keep > spec.pool_size) throw GenerationError("keep exceeds pool size");
  if (spec.min_first_reveal > spec.gen.rows * spec.gen.cols)
    throw GenerationError("min_first_reveal exceeds the number of cells");
  check(spec.gen);

  std::vector<MineField> kept;
  if (spec.keep == 0) return kept;
  int qualified = 0;
  for (int i = 0; i < spec.pool_size; ++i) {
    GenSpec g = spec.gen;
    g.seed = substream_seed(spec.gen.seed, static_cast<std::uint64_t>(i));
    MineField f = generate_minefield(g);
    if (f.is_mine(spec.first_click)) continue;
    if (!qualify(f, spec.first_click, spec.min_first_reveal)) continue;
    ++qualified;
    if (static_cast<int>(kept.size()) < spec.keep) kept.push_back(std::move(f));
    if (static_cast<int>(kept.size()) == spec.keep) return kept;
  }
  throw InsufficientBoardsError(qualified, spec.keep, spec.pool_size);
}

}  // namespace msweep
