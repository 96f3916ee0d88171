#include <gtest/gtest.h>

#include <set>

#include "msweep/engine.hpp"
#include "msweep/rng.hpp"
#include "oracle_check.hpp"

using namespace msweep;

namespace {

MineField column5_field() { return MineField(5, 5, {{1, 5}, {3, 5}, {5, 5}}); }

GameState started(const MineField& f, Action first) {
  GameState s = new_game(f);
  apply_action(s, first);
  return s;
}

}  // namespace

TEST(Neighbors, CornerEdgeInterior) {
  EXPECT_EQ(neighbors({1, 1}, 9, 9), (std::vector<Coord>{{1, 2}, {2, 1}, {2, 2}}));
  EXPECT_EQ(neighbors({5, 5}, 9, 9).size(), 8u);
  // 3x3 window around (1,5): row 0 is dropped, (1,5) itself is excluded.
  EXPECT_EQ(neighbors({1, 5}, 9, 9), (std::vector<Coord>{{1, 4}, {1, 6}, {2, 4}, {2, 5}, {2, 6}}));
}

TEST(Neighbors, OutOfBoundsAnchor) {
  EXPECT_EQ(neighbors({0, 0}, 9, 9), (std::vector<Coord>{{1, 1}}));
  EXPECT_TRUE(neighbors({-5, -5}, 9, 9).empty());
}

TEST(MineField, RejectsInvalidLayouts) {
  EXPECT_THROW(MineField(0, 3, {}), std::invalid_argument);
  EXPECT_THROW(MineField(2, 2, {{1, 1}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(MineField(2, 2, {{3, 1}}), std::invalid_argument);
  EXPECT_THROW(MineField(1, 2, {{1, 1}, {1, 2}}), std::invalid_argument);
}

TEST(MineField, TextRoundTrip) {
  const auto f = column5_field();
  EXPECT_EQ(write_minefield(f), "5 5\n1 5\n3 5\n5 5\n");
  EXPECT_EQ(read_minefield(write_minefield(f)), f);
  EXPECT_THROW(read_minefield("5 5\n1"), std::invalid_argument);
  EXPECT_THROW(read_minefield("5 5\n1 x\n"), std::invalid_argument);
}

TEST(NewGame, AllUnopened) {
  auto s = new_game(MineField(5, 5, {{1, 1}, {2, 2}, {4, 4}, {5, 1}}));
  EXPECT_EQ(s.view.count(Cell::Kind::Unopened), 25);
  EXPECT_TRUE(s.status.in_progress());
  EXPECT_TRUE(s.applied.empty());
  EXPECT_FALSE(s.first_action_done);
  EXPECT_EQ(s.required_first, Action::left(3, 3));

  auto tiny = new_game(MineField(1, 2, {{1, 2}}));
  EXPECT_EQ(tiny.view.count(Cell::Kind::Unopened), 2);
  EXPECT_EQ(new_game(MineField(9, 9, {})).required_first, Action::left(5, 5));
  EXPECT_EQ(new_game(MineField(4, 6, {})).required_first, Action::left(2, 3));
}

TEST(Validate, BoundsMessage) {
  auto s = new_game(MineField(9, 9, {{1, 1}}));
  auto v = validate_action(s, Action::left(0, 10));
  ASSERT_FALSE(v);
  EXPECT_EQ(v.message,
            "Invalid Coordinates! Please make sure your coordinate are within [1, 9] for rows and [1, 9] for columns.");
  auto s2 = new_game(MineField(5, 7, {{1, 1}}));
  EXPECT_EQ(validate_action(s2, Action::right(6, 1)).message,
            "Invalid Coordinates! Please make sure your coordinate are within [1, 5] for rows and [1, 7] for columns.");
}

TEST(Validate, MiddleWithoutFlags) {
  // (5,5) sees exactly two mines.
  auto s = started(MineField(9, 9, {{4, 4}, {6, 6}, {9, 9}}), Action::left(5, 5));
  ASSERT_EQ(s.view.at({5, 5}), Cell::numbered(2));
  auto v = validate_action(s, Action::middle(5, 5));
  EXPECT_EQ(v.kind, InvalidKind::MiddleNoFlaggedNeighbor);
  EXPECT_EQ(v.message, "Error: No flagged cells detected nearby. Flag adjacent mines before middle-clicking.");
}

TEST(Validate, LeftOnUnopenedIsOk) {
  auto s = started(MineField(9, 9, {{4, 4}, {6, 6}}), Action::left(5, 5));
  EXPECT_TRUE(validate_action(s, Action::left(1, 9)));
}

TEST(Validate, DoesNotMutate) {
  auto s = new_game(MineField(3, 3, {{1, 1}}));
  auto before = s.view;
  validate_action(s, Action::right(2, 2));
  validate_action(s, Action::left(2, 2));
  EXPECT_EQ(s.view, before);
  EXPECT_TRUE(s.applied.empty());
}

TEST(Validate, LeftElsewhereFirstIsAccepted) {
  auto s = new_game(MineField(5, 5, {{5, 5}}));
  EXPECT_TRUE(validate_action(s, Action::left(1, 1)));
  auto fb = apply_action(s, Action::left(1, 1));
  EXPECT_TRUE(fb.accepted());
  EXPECT_TRUE(s.first_action_done);
}

TEST(Apply, FloodFillGolden) {
  // Mines only in column 5: every cell of columns 1-3 is blank, column 4 is the
  // numbered frontier, and (2,5), (4,5) stay hidden.
  auto s = new_game(column5_field());
  auto fb = apply_action(s, Action::left(1, 1));
  ASSERT_EQ(fb.kind, Feedback::Kind::BoardUpdated);
  std::vector<Coord> expected;
  for (int r = 1; r <= 5; ++r)
    for (int c = 1; c <= 4; ++c) expected.push_back({r, c});
  EXPECT_EQ(fb.revealed, expected);
  EXPECT_EQ(s.view.at({1, 4}), Cell::numbered(1));
  EXPECT_EQ(s.view.at({2, 4}), Cell::numbered(2));
  EXPECT_EQ(s.view.at({3, 4}), Cell::numbered(1));
  EXPECT_EQ(s.view.at({4, 4}), Cell::numbered(2));
  EXPECT_EQ(s.view.at({5, 4}), Cell::numbered(1));
  EXPECT_EQ(s.view.at({3, 2}), Cell::blank());
  EXPECT_TRUE(s.view.at({2, 5}).is_unopened());

  EXPECT_EQ(apply_action(s, Action::left(2, 5)).revealed, (std::vector<Coord>{{2, 5}}));
  EXPECT_EQ(s.view.at({2, 5}), Cell::numbered(2));
  EXPECT_EQ(apply_action(s, Action::left(4, 5)).kind, Feedback::Kind::GameSolved);
  EXPECT_EQ(s.status.kind, GameStatus::Kind::Solved);
}

TEST(Apply, RightClickToggles) {
  auto s = started(column5_field(), Action::left(1, 1));
  const auto before = s.view;
  auto fb = apply_action(s, Action::right(2, 5));
  EXPECT_EQ(fb.flag_changes, (std::vector<Coord>{{2, 5}}));
  EXPECT_TRUE(s.view.at({2, 5}).is_flagged());
  apply_action(s, Action::right(2, 5));
  EXPECT_EQ(s.view, before);
}

TEST(Apply, FlagsAreNotCapped) {
  auto s = started(MineField(3, 3, {{1, 1}}), Action::left(3, 3));
  // Only (1,1) hidden: 3x3 with one corner mine reveals everything else.
  EXPECT_EQ(s.status.kind, GameStatus::Kind::Solved);

  auto s2 = started(MineField(4, 4, {{1, 1}, {1, 4}}), Action::left(4, 1));
  int flags = 0;
  for (int r = 1; r <= 4; ++r)
    for (int c = 1; c <= 4; ++c)
      if (s2.status.in_progress() && s2.view.at({r, c}).is_unopened()) {
        EXPECT_TRUE(apply_action(s2, Action::right(r, c)).accepted());
        ++flags;
      }
  EXPECT_GE(flags, 2);
}

TEST(Apply, ChordOverWrongFlagFails) {
  // (1,2) is Numbered(1) with mine (1,1); the flag goes on the safe, still hidden (2,1).
  MineField f(3, 3, {{1, 1}, {3, 1}});
  auto s = new_game(f);
  apply_action(s, Action::left(1, 2));
  ASSERT_EQ(s.view.at({1, 2}), Cell::numbered(1));
  apply_action(s, Action::right(2, 1));  // (2,1) is safe
  auto fb = apply_action(s, Action::middle(1, 2));
  EXPECT_EQ(fb.kind, Feedback::Kind::GameFailed);
  EXPECT_EQ(fb.cause, FailCause::WrongFlagChord);
  EXPECT_EQ(fb.cause_at, (Coord{2, 1}));
  EXPECT_EQ(s.status.kind, GameStatus::Kind::Failed);
}

TEST(Apply, ChordRevealsRemainingNeighbors) {
  MineField f(3, 3, {{1, 1}});
  auto s = new_game(f);
  apply_action(s, Action::left(1, 2));
  apply_action(s, Action::right(1, 1));
  // Flagging the single mine already solves via the flag condition.
  EXPECT_EQ(s.status.kind, GameStatus::Kind::Solved);

  MineField g(3, 4, {{1, 1}, {3, 4}});
  auto t = new_game(g);
  apply_action(t, Action::left(1, 2));
  apply_action(t, Action::right(1, 1));
  auto fb = apply_action(t, Action::middle(1, 2));
  EXPECT_TRUE(fb.accepted());
  EXPECT_FALSE(fb.revealed.empty());
  for (const auto& nb : neighbors({1, 2}, 3, 4))
    if (!g.is_mine(nb)) EXPECT_TRUE(t.view.at(nb).is_revealed());
}

TEST(Apply, MineEndsGameWithoutRevealing) {
  auto s = started(MineField(5, 5, {{1, 1}, {2, 2}, {4, 4}}), Action::left(3, 3));
  ASSERT_TRUE(s.status.in_progress());
  const auto before = s.view;
  auto fb = apply_action(s, Action::left(1, 1));
  EXPECT_EQ(fb.kind, Feedback::Kind::GameFailed);
  EXPECT_EQ(fb.cause, FailCause::MineTriggered);
  EXPECT_EQ(s.status.at, (Coord{1, 1}));
  EXPECT_EQ(s.view, before);
  EXPECT_THROW(apply_action(s, Action::left(2, 2)), GameOverError);
}

TEST(Apply, InvalidIsRecordedButChangesNothing) {
  auto s = new_game(MineField(5, 5, {{1, 1}}));
  auto fb = apply_action(s, Action::middle(3, 3));
  EXPECT_EQ(fb.kind, Feedback::Kind::Invalid);
  EXPECT_EQ(fb.message, "Please begin by left-clicking on the center cell.");
  EXPECT_EQ(s.applied.size(), 1u);
  EXPECT_FALSE(s.first_action_done);
  EXPECT_EQ(s.view.count(Cell::Kind::Unopened), 25);
}

TEST(IsSolved, Conditions) {
  MineField f(2, 2, {{1, 1}});
  BoardView v(2, 2);
  EXPECT_FALSE(is_solved(v, f));
  v.at({1, 2}) = Cell::numbered(1);
  v.at({2, 1}) = Cell::numbered(1);
  v.at({2, 2}) = Cell::numbered(1);
  EXPECT_TRUE(is_solved(v, f));  // all safe revealed, zero flags

  BoardView w(2, 2);
  w.at({1, 1}) = Cell::flagged();
  EXPECT_TRUE(is_solved(w, f));
  w.at({2, 2}) = Cell::flagged();
  EXPECT_FALSE(is_solved(w, f));  // extraneous flag
}

TEST(EnumerateActions, Sizes) {
  EXPECT_EQ(enumerate_actions(9, 9).size(), 243u);
  EXPECT_EQ(enumerate_actions(5, 5).size(), 75u);
  auto one = enumerate_actions(1, 1);
  EXPECT_EQ(one, (std::vector<Action>{Action::left(1, 1), Action::right(1, 1), Action::middle(1, 1)}));
  const auto all = enumerate_actions(9, 9);
  std::set<Action> distinct(all.begin(), all.end());
  EXPECT_EQ(distinct.size(), 243u);
}

TEST(ParseAction, Forms) {
  EXPECT_EQ(parse_action("L(5,5)"), Action::left(5, 5));
  EXPECT_EQ(parse_action("M(0,10)"), Action::middle(0, 10));
  EXPECT_THROW(parse_action("F(3,1)"), std::invalid_argument);
  EXPECT_THROW(parse_action("L(3,1"), std::invalid_argument);
}

// Property: random play keeps every reachable view consistent with the field.
TEST(EngineProperties, RandomPlayInvariants) {
  Rng rng = make_rng(1234);
  for (int game = 0; game < 300; ++game) {
    const int rows = uniform_int(rng, 2, 7), cols = uniform_int(rng, 2, 7);
    std::vector<Coord> mines;
    for (int r = 1; r <= rows; ++r)
      for (int c = 1; c <= cols; ++c)
        if (uniform_below(rng, 6) == 0) mines.push_back({r, c});
    if (static_cast<int>(mines.size()) >= rows * cols) mines.pop_back();
    MineField f(rows, cols, mines);
    GameState s = new_game(f);
    std::vector<Action> sent;
    const auto space = enumerate_actions(rows, cols);
    int prev_revealed = 0;
    while (s.status.in_progress() && sent.size() < 40) {
      const Action a = space[uniform_below(rng, space.size())];
      sent.push_back(a);
      const auto before = s.view;
      const auto fb = apply_action(s, a);
      if (!fb.accepted()) EXPECT_EQ(s.view, before);
      if (s.status.kind == GameStatus::Kind::Failed) {
        EXPECT_TRUE(a.kind == ActionKind::Left || a.kind == ActionKind::Middle);
        EXPECT_EQ(s.view, before);
      }
      // Flood-fill closure for blanks opened by this action. (An older blank can border an
      // unopened cell after a flag next to it is removed.)
      for (const auto& at : fb.revealed)
        if (s.view.at(at).is_blank())
          for (const auto& nb : neighbors(at, rows, cols)) EXPECT_FALSE(s.view.at(nb).is_unopened());
      // Number correctness.
      for (int r = 1; r <= rows; ++r)
        for (int c = 1; c <= cols; ++c) {
          const Cell& cell = s.view.at({r, c});
          if (cell.is_revealed()) {
            EXPECT_FALSE(f.is_mine({r, c}));
            EXPECT_EQ(cell.number, f.adjacent_mines({r, c}));
          }
        }
      // Monotone reveals; previously revealed cells stay revealed.
      for (int r = 1; r <= rows; ++r)
        for (int c = 1; c <= cols; ++c)
          if (before.at({r, c}).is_revealed()) EXPECT_EQ(s.view.at({r, c}), before.at({r, c}));
      EXPECT_GE(s.view.revealed_count(), prev_revealed);
      prev_revealed = s.view.revealed_count();
    }
    // Replay determinism.
    GameState again = replay(f, sent);
    EXPECT_EQ(again.view, s.view);
    EXPECT_EQ(again.status, s.status);
    EXPECT_EQ(again.applied, s.applied);
  }
}

// Reduced-size run of the exhaustive comparison; the acceptance suite runs the full 3x3 sweep.
TEST(OracleEquivalence, SmallBoardsDepth3) {
  const auto stats = oracle::exhaustive(3, 3, 2, 3);
  EXPECT_EQ(stats.disagreements, 0u) << stats.first_disagreement;
  EXPECT_GT(stats.steps, 100000u);
}
