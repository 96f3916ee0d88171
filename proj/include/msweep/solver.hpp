#pragma once

#include <optional>
#include <vector>

#include "msweep/engine.hpp"

namespace msweep {

/// First move fired by the single-point rules, scanning numbered cells row-major:
///   flagged == n and some neighbor unopened        -> M on the numbered cell
///   unopened + flagged == n and some unopened       -> R on the first unopened neighbor
/// Both rules are sound as long as every existing flag is correct.
inline std::optional<Action> single_point_move(const BoardView& view) {
  for (int r = 1; r <= view.rows(); ++r) {
    for (int c = 1; c <= view.cols(); ++c) {
      const Coord at{r, c};
      const Cell& cell = view.at(at);
      if (!cell.is_numbered()) continue;
      int flagged = 0, unopened = 0;
      std::optional<Coord> first_unopened;
      for (const auto& nb : neighbors(at, view.rows(), view.cols())) {
        const Cell& n = view.at(nb);
        if (n.is_flagged()) ++flagged;
        if (n.is_unopened()) {
          ++unopened;
          if (!first_unopened) first_unopened = nb;
        }
      }
      if (unopened == 0) continue;
      if (flagged == cell.number) return Action{ActionKind::Middle, at};
      if (unopened + flagged == cell.number) return Action{ActionKind::Right, *first_unopened};
    }
  }
  return std::nullopt;
}

/// Deterministic baseline: the rule-fired move, or a stall flag on the first unopened
/// cell (first flagged cell if nothing is unopened).
inline Action single_point_agent(const BoardView& view) {
  if (auto a = single_point_move(view)) return *a;
  for (int r = 1; r <= view.rows(); ++r)
    for (int c = 1; c <= view.cols(); ++c)
      if (view.at({r, c}).is_unopened()) return Action::right(r, c);
  for (int r = 1; r <= view.rows(); ++r)
    for (int c = 1; c <= view.cols(); ++c)
      if (view.at({r, c}).is_flagged()) return Action::right(r, c);
  return Action::left(1, 1);
}

/// Plays a full game the way an average annotator would: the first click, then single-point
/// deductions, guessing the first unopened cell (left click) when stuck. Returns the
/// complete action history, including the losing click when a guess hits a mine.
inline std::vector<Action> autoplay_history(const MineField& field, Coord first_click, int max_actions = 0) {
  if (max_actions <= 0) max_actions = 3 * field.cell_count();
  GameState s = new_game(field, {ActionKind::Left, first_click});
  std::vector<Action> out;
  auto play = [&](const Action& a) {
    apply_action(s, a);
    out.push_back(a);
  };
  play({ActionKind::Left, first_click});
  while (s.status.in_progress() && static_cast<int>(out.size()) < max_actions) {
    if (auto a = single_point_move(s.view)) {
      play(*a);
      continue;
    }
    std::optional<Coord> guess;
    for (int r = 1; r <= s.view.rows() && !guess; ++r)
      for (int c = 1; c <= s.view.cols() && !guess; ++c)
        if (s.view.at({r, c}).is_unopened()) guess = Coord{r, c};
    if (!guess) break;
    play({ActionKind::Left, *guess});
  }
  return out;
}

}  // namespace msweep
