#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace msweep {

/// 1-indexed board coordinate. Out-of-range values are representable so that
/// the bounds feedback can be produced for them.
struct Coord {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const Coord&, const Coord&) = default;
};

inline std::string to_string(Coord c) {
  return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

/// All in-bounds cells at Chebyshev distance 1 from `at`, row-major.
inline std::vector<Coord> neighbors(Coord at, int rows, int cols) {
  std::vector<Coord> out;
  out.reserve(8);
  for (int r = at.row - 1; r <= at.row + 1; ++r) {
    for (int c = at.col - 1; c <= at.col + 1; ++c) {
      if (r == at.row && c == at.col) continue;
      if (r < 1 || r > rows || c < 1 || c > cols) continue;
      out.push_back({r, c});
    }
  }
  return out;
}

/// Center cell used by the default first move; rounds up for even sizes.
constexpr Coord center_of(int rows, int cols) { return {(rows + 1) / 2, (cols + 1) / 2}; }

/// Ground-truth mine layout.
class MineField {
 public:
  MineField() = default;

  MineField(int rows, int cols, std::vector<Coord> mines) : rows_(rows), cols_(cols), mines_(std::move(mines)) {
    if (rows_ < 1 || cols_ < 1) throw std::invalid_argument("minefield dimensions must be positive");
    std::sort(mines_.begin(), mines_.end());
    if (std::adjacent_find(mines_.begin(), mines_.end()) != mines_.end())
      throw std::invalid_argument("minefield contains duplicate mine coordinates");
    if (mines_.size() >= static_cast<std::size_t>(rows_) * cols_)
      throw std::invalid_argument("minefield must leave at least one safe cell");
    mask_.assign(static_cast<std::size_t>(rows_) * cols_, 0);
    for (const auto& m : mines_) {
      if (!in_bounds(m)) throw std::invalid_argument("mine " + to_string(m) + " is out of bounds");
      mask_[index(m)] = 1;
    }
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int cell_count() const { return rows_ * cols_; }
  const std::vector<Coord>& mines() const { return mines_; }

  bool in_bounds(Coord c) const { return c.row >= 1 && c.row <= rows_ && c.col >= 1 && c.col <= cols_; }
  bool is_mine(Coord c) const { return in_bounds(c) && mask_[index(c)] != 0; }

  int adjacent_mines(Coord c) const {
    int n = 0;
    for (const auto& nb : neighbors(c, rows_, cols_)) n += is_mine(nb) ? 1 : 0;
    return n;
  }

  friend bool operator==(const MineField& a, const MineField& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.mines_ == b.mines_;
  }

 private:
  std::size_t index(Coord c) const { return static_cast<std::size_t>(c.row - 1) * cols_ + (c.col - 1); }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Coord> mines_;
  std::vector<std::uint8_t> mask_;
};

/// Minefield interchange text: "rows cols" then one "row col" line per mine.
inline std::string write_minefield(const MineField& f) {
  std::ostringstream os;
  os << f.rows() << ' ' << f.cols() << '\n';
  for (const auto& m : f.mines()) os << m.row << ' ' << m.col << '\n';
  return os.str();
}

inline MineField read_minefield(std::istream& in) {
  int rows = 0, cols = 0;
  if (!(in >> rows >> cols)) throw std::invalid_argument("minefield file: missing \"rows cols\" header");
  std::vector<Coord> mines;
  int r = 0, c = 0;
  while (in >> r) {
    if (!(in >> c)) throw std::invalid_argument("minefield file: dangling coordinate");
    mines.push_back({r, c});
  }
  if (!in.eof()) throw std::invalid_argument("minefield file: unexpected token");
  return MineField(rows, cols, std::move(mines));
}

inline MineField read_minefield(const std::string& text) {
  std::istringstream in(text);
  return read_minefield(in);
}

/// What the player sees at one cell.
struct Cell {
  enum class Kind : std::uint8_t { Unopened, Flagged, Blank, Numbered };

  Kind kind = Kind::Unopened;
  int number = 0;  // 1..8 when Numbered, else 0

  static constexpr Cell unopened() { return {Kind::Unopened, 0}; }
  static constexpr Cell flagged() { return {Kind::Flagged, 0}; }
  static constexpr Cell blank() { return {Kind::Blank, 0}; }
  static constexpr Cell numbered(int n) { return {Kind::Numbered, n}; }
  /// Revealed cell with `n` adjacent mines.
  static constexpr Cell revealed(int n) { return n == 0 ? blank() : numbered(n); }

  constexpr bool is_unopened() const { return kind == Kind::Unopened; }
  constexpr bool is_flagged() const { return kind == Kind::Flagged; }
  constexpr bool is_blank() const { return kind == Kind::Blank; }
  constexpr bool is_numbered() const { return kind == Kind::Numbered; }
  constexpr bool is_revealed() const { return is_blank() || is_numbered(); }

  friend constexpr bool operator==(const Cell&, const Cell&) = default;
};

/// Player-visible grid.
class BoardView {
 public:
  BoardView() = default;
  BoardView(int rows, int cols, Cell fill = Cell::unopened())
      : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("board dimensions must be positive");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool in_bounds(Coord c) const { return c.row >= 1 && c.row <= rows_ && c.col >= 1 && c.col <= cols_; }

  const Cell& at(Coord c) const { return cells_.at(index(c)); }
  Cell& at(Coord c) { return cells_.at(index(c)); }

  int count(Cell::Kind kind) const {
    return static_cast<int>(std::count_if(cells_.begin(), cells_.end(), [kind](const Cell& x) { return x.kind == kind; }));
  }
  int revealed_count() const { return count(Cell::Kind::Blank) + count(Cell::Kind::Numbered); }

  friend bool operator==(const BoardView&, const BoardView&) = default;

 private:
  std::size_t index(Coord c) const {
    if (!in_bounds(c)) throw std::out_of_range("cell " + to_string(c) + " is outside the board");
    return static_cast<std::size_t>(c.row - 1) * cols_ + (c.col - 1);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Cell> cells_;
};

enum class ActionKind : std::uint8_t { Left, Right, Middle };

constexpr char action_letter(ActionKind k) {
  switch (k) {
    case ActionKind::Left: return 'L';
    case ActionKind::Right: return 'R';
    case ActionKind::Middle: return 'M';
  }
  return '?';
}

struct Action {
  ActionKind kind = ActionKind::Left;
  Coord at;

  static constexpr Action left(int r, int c) { return {ActionKind::Left, {r, c}}; }
  static constexpr Action right(int r, int c) { return {ActionKind::Right, {r, c}}; }
  static constexpr Action middle(int r, int c) { return {ActionKind::Middle, {r, c}}; }

  friend constexpr auto operator<=>(const Action&, const Action&) = default;
};

/// "L(5,5)" style.
inline std::string to_string(const Action& a) { return std::string(1, action_letter(a.kind)) + to_string(a.at); }

/// Parses exactly "K(r,c)"; throws std::invalid_argument otherwise.
inline Action parse_action(const std::string& s) {
  Action a;
  char k = 0, lp = 0, comma = 0, rp = 0;
  std::istringstream in(s);
  if (!(in >> k >> lp >> a.at.row >> comma >> a.at.col >> rp) || lp != '(' || comma != ',' || rp != ')')
    throw std::invalid_argument("malformed action \"" + s + "\"");
  in >> std::ws;
  if (!in.eof()) throw std::invalid_argument("trailing characters after action \"" + s + "\"");
  switch (k) {
    case 'L': a.kind = ActionKind::Left; break;
    case 'R': a.kind = ActionKind::Right; break;
    case 'M': a.kind = ActionKind::Middle; break;
    default: throw std::invalid_argument("unknown action letter in \"" + s + "\"");
  }
  return a;
}

/// The full syntactic action space: for each cell in row-major order, L, R, M.
inline std::vector<Action> enumerate_actions(int rows, int cols) {
  std::vector<Action> out;
  out.reserve(static_cast<std::size_t>(3) * rows * cols);
  for (int r = 1; r <= rows; ++r)
    for (int c = 1; c <= cols; ++c)
      for (auto k : {ActionKind::Left, ActionKind::Right, ActionKind::Middle}) out.push_back({k, {r, c}});
  return out;
}

/// The invalid-action categories and their player-facing feedback.
enum class InvalidKind : std::uint8_t {
  OutOfBounds,
  StartWithRight,
  StartWithMiddle,
  LeftOnBlank,
  LeftOnFlagged,
  LeftOnNumbered,
  MiddleOnBlank,
  MiddleOnFlagged,
  MiddleOnUnopened,
  MiddleNoFlaggedNeighbor,
  MiddleFlagMismatch,
  RightOnBlank,
  RightOnNumbered,
};

inline constexpr InvalidKind kAllInvalidKinds[] = {
    InvalidKind::OutOfBounds,       InvalidKind::StartWithRight,    InvalidKind::StartWithMiddle,
    InvalidKind::LeftOnBlank,       InvalidKind::LeftOnFlagged,     InvalidKind::LeftOnNumbered,
    InvalidKind::MiddleOnBlank,     InvalidKind::MiddleOnFlagged,   InvalidKind::MiddleOnUnopened,
    InvalidKind::MiddleNoFlaggedNeighbor, InvalidKind::MiddleFlagMismatch, InvalidKind::RightOnBlank,
    InvalidKind::RightOnNumbered,
};

inline const char* invalid_kind_name(InvalidKind k) {
  switch (k) {
    case InvalidKind::OutOfBounds: return "out_of_bounds";
    case InvalidKind::StartWithRight: return "start_with_right";
    case InvalidKind::StartWithMiddle: return "start_with_middle";
    case InvalidKind::LeftOnBlank: return "left_on_blank";
    case InvalidKind::LeftOnFlagged: return "left_on_flagged";
    case InvalidKind::LeftOnNumbered: return "left_on_numbered";
    case InvalidKind::MiddleOnBlank: return "middle_on_blank";
    case InvalidKind::MiddleOnFlagged: return "middle_on_flagged";
    case InvalidKind::MiddleOnUnopened: return "middle_on_unopened";
    case InvalidKind::MiddleNoFlaggedNeighbor: return "middle_no_flagged_neighbor";
    case InvalidKind::MiddleFlagMismatch: return "middle_flag_mismatch";
    case InvalidKind::RightOnBlank: return "right_on_blank";
    case InvalidKind::RightOnNumbered: return "right_on_numbered";
  }
  return "unknown";
}

inline InvalidKind invalid_kind_from_name(const std::string& name) {
  for (auto k : kAllInvalidKinds)
    if (name == invalid_kind_name(k)) return k;
  throw std::invalid_argument("unknown invalid-action kind \"" + name + "\"");
}

/// Exact feedback text. Only the bounds message depends on the board size.
inline std::string invalid_message(InvalidKind k, int rows, int cols) {
  static const std::string left_tail = " Left-click is only for unopened cells (`?').";
  static const std::string middle_tail = " Middle-click is only for numbered cells (`1' to `8').";
  // The flagged-cells token in this message really is `?'; the catalog is reproduced verbatim.
  static const std::string right_tail = " Right-click is only for unopened cells (`?') or flagged cells (`?').";
  switch (k) {
    case InvalidKind::OutOfBounds:
      return "Invalid Coordinates! Please make sure your coordinate are within [1, " + std::to_string(rows) +
             "] for rows and [1, " + std::to_string(cols) + "] for columns.";
    case InvalidKind::StartWithRight:
    case InvalidKind::StartWithMiddle: return "Please begin by left-clicking on the center cell.";
    case InvalidKind::LeftOnBlank: return "Invalid action: Cannot left-click a blank cell." + left_tail;
    case InvalidKind::LeftOnFlagged: return "Invalid action: Cannot left-click a flagged cell." + left_tail;
    case InvalidKind::LeftOnNumbered: return "Invalid action: Cannot left-click a numbered cell." + left_tail;
    case InvalidKind::MiddleOnBlank: return "Invalid action: Cannot middle-click a blank cell." + middle_tail;
    case InvalidKind::MiddleOnFlagged: return "Invalid action: Cannot middle-click a flagged cell." + middle_tail;
    case InvalidKind::MiddleOnUnopened: return "Invalid action: Cannot middle-click an unopened cell." + middle_tail;
    case InvalidKind::MiddleNoFlaggedNeighbor:
      return "Error: No flagged cells detected nearby. Flag adjacent mines before middle-clicking.";
    case InvalidKind::MiddleFlagMismatch:
      return "Error: Flag count mismatch. Ensure all adjacent mines are flagged before middle-clicking.";
    case InvalidKind::RightOnBlank: return "Invalid action: Cannot right-click a blank cell." + right_tail;
    case InvalidKind::RightOnNumbered: return "Invalid action: Cannot right-click a numbered cell." + right_tail;
  }
  return {};
}

enum class FailCause : std::uint8_t { MineTriggered, WrongFlagChord };

struct GameStatus {
  enum class Kind : std::uint8_t { InProgress, Solved, Failed, Aborted };

  Kind kind = Kind::InProgress;
  FailCause cause = FailCause::MineTriggered;  // meaningful when Failed
  Coord at;                                    // triggering mine or wrong flag, when Failed
  std::string reason;                          // when Aborted

  bool in_progress() const { return kind == Kind::InProgress; }
  bool terminal() const { return !in_progress(); }

  friend bool operator==(const GameStatus&, const GameStatus&) = default;
};

inline const char* status_name(GameStatus::Kind k) {
  switch (k) {
    case GameStatus::Kind::InProgress: return "in_progress";
    case GameStatus::Kind::Solved: return "solved";
    case GameStatus::Kind::Failed: return "failed";
    case GameStatus::Kind::Aborted: return "aborted";
  }
  return "unknown";
}

struct Feedback {
  enum class Kind : std::uint8_t { BoardUpdated, GameSolved, GameFailed, Invalid };

  Kind kind = Kind::BoardUpdated;
  std::vector<Coord> revealed;      // row-major
  std::vector<Coord> flag_changes;  // cells whose flag toggled
  FailCause cause = FailCause::MineTriggered;
  Coord cause_at;
  InvalidKind invalid = InvalidKind::OutOfBounds;
  std::string message;  // exact catalog text when Invalid

  bool accepted() const { return kind != Kind::Invalid; }

  friend bool operator==(const Feedback&, const Feedback&) = default;
};

inline const char* feedback_kind_name(Feedback::Kind k) {
  switch (k) {
    case Feedback::Kind::BoardUpdated: return "board_updated";
    case Feedback::Kind::GameSolved: return "game_solved";
    case Feedback::Kind::GameFailed: return "game_failed";
    case Feedback::Kind::Invalid: return "invalid";
  }
  return "unknown";
}

struct AppliedAction {
  Action action;
  Feedback feedback;

  friend bool operator==(const AppliedAction&, const AppliedAction&) = default;
};

struct GameState {
  MineField field;
  BoardView view;
  GameStatus status;
  std::vector<AppliedAction> applied;
  bool first_action_done = false;
  Action required_first;
};

/// Thrown when an action is submitted to a game that has already ended.
class GameOverError : public std::logic_error {
 public:
  explicit GameOverError(GameStatus status)
      : std::logic_error(std::string("game is already over (") + status_name(status.kind) + ")"),
        status_(std::move(status)) {}
  const GameStatus& status() const { return status_; }

 private:
  GameStatus status_;
};

inline GameState new_game(MineField field) {
  GameState s;
  s.view = BoardView(field.rows(), field.cols());
  s.required_first = {ActionKind::Left, center_of(field.rows(), field.cols())};
  s.field = std::move(field);
  return s;
}

inline GameState new_game(MineField field, Action required_first) {
  GameState s = new_game(std::move(field));
  s.required_first = required_first;
  return s;
}

struct ValidationResult {
  bool ok = true;
  InvalidKind kind = InvalidKind::OutOfBounds;
  std::string message;

  explicit operator bool() const { return ok; }
};

namespace detail {

inline ValidationResult reject(InvalidKind k, const GameState& s) {
  return {false, k, invalid_message(k, s.view.rows(), s.view.cols())};
}

inline int count_flagged_around(const BoardView& v, Coord at) {
  int n = 0;
  for (const auto& nb : neighbors(at, v.rows(), v.cols())) n += v.at(nb).is_flagged() ? 1 : 0;
  return n;
}

}  // namespace detail

/// Checks `a` against the invalid-action catalog. Mutates nothing.
inline ValidationResult validate_action(const GameState& s, const Action& a) {
  if (!s.view.in_bounds(a.at)) return detail::reject(InvalidKind::OutOfBounds, s);
  if (!s.first_action_done) {
    if (a.kind == ActionKind::Right) return detail::reject(InvalidKind::StartWithRight, s);
    if (a.kind == ActionKind::Middle) return detail::reject(InvalidKind::StartWithMiddle, s);
  }
  const Cell& cell = s.view.at(a.at);
  switch (a.kind) {
    case ActionKind::Left:
      if (cell.is_blank()) return detail::reject(InvalidKind::LeftOnBlank, s);
      if (cell.is_flagged()) return detail::reject(InvalidKind::LeftOnFlagged, s);
      if (cell.is_numbered()) return detail::reject(InvalidKind::LeftOnNumbered, s);
      break;
    case ActionKind::Middle: {
      if (cell.is_blank()) return detail::reject(InvalidKind::MiddleOnBlank, s);
      if (cell.is_flagged()) return detail::reject(InvalidKind::MiddleOnFlagged, s);
      if (cell.is_unopened()) return detail::reject(InvalidKind::MiddleOnUnopened, s);
      const int flags = detail::count_flagged_around(s.view, a.at);
      if (flags == 0) return detail::reject(InvalidKind::MiddleNoFlaggedNeighbor, s);
      if (flags != cell.number) return detail::reject(InvalidKind::MiddleFlagMismatch, s);
      break;
    }
    case ActionKind::Right:
      if (cell.is_blank()) return detail::reject(InvalidKind::RightOnBlank, s);
      if (cell.is_numbered()) return detail::reject(InvalidKind::RightOnNumbered, s);
      break;
  }
  return {};
}

/// Victory: exactly the mines are flagged, or every safe cell is revealed.
inline bool is_solved(const BoardView& view, const MineField& field) {
  bool flags_exact = true;
  bool all_safe_revealed = true;
  for (int r = 1; r <= view.rows(); ++r) {
    for (int c = 1; c <= view.cols(); ++c) {
      const Coord at{r, c};
      const Cell& cell = view.at(at);
      const bool mine = field.is_mine(at);
      if (cell.is_flagged() != mine) flags_exact = false;
      if (!mine && !cell.is_revealed()) all_safe_revealed = false;
    }
  }
  return flags_exact || all_safe_revealed;
}

namespace detail {

// Reveals `start` (which must be safe and unopened); flood-fills breadth-first from blanks.
// Flagged cells are never opened by the fill. Appends newly revealed cells to `out`.
inline void reveal_from(GameState& s, Coord start, std::vector<Coord>& out) {
  const int rows = s.view.rows(), cols = s.view.cols();
  std::deque<Coord> queue;
  auto open = [&](Coord at) {
    const int n = s.field.adjacent_mines(at);
    s.view.at(at) = Cell::revealed(n);
    out.push_back(at);
    if (n == 0) queue.push_back(at);
  };
  open(start);
  while (!queue.empty()) {
    const Coord cur = queue.front();
    queue.pop_front();
    for (const auto& nb : neighbors(cur, rows, cols)) {
      if (s.view.at(nb).is_unopened() && !s.field.is_mine(nb)) open(nb);
    }
  }
}

}  // namespace detail

/// Applies `a` in place and returns the feedback. Invalid actions leave the view untouched
/// but are still recorded in the history. Throws GameOverError on a finished game.
inline Feedback apply_action(GameState& s, const Action& a) {
  if (s.status.terminal()) throw GameOverError(s.status);

  Feedback fb;
  if (auto v = validate_action(s, a); !v) {
    fb.kind = Feedback::Kind::Invalid;
    fb.invalid = v.kind;
    fb.message = std::move(v.message);
    s.applied.push_back({a, fb});
    return fb;
  }

  auto fail = [&](FailCause cause, Coord at) {
    s.status.kind = GameStatus::Kind::Failed;
    s.status.cause = cause;
    s.status.at = at;
    fb.kind = Feedback::Kind::GameFailed;
    fb.cause = cause;
    fb.cause_at = at;
  };

  switch (a.kind) {
    case ActionKind::Left:
      s.first_action_done = true;
      if (s.field.is_mine(a.at)) {
        fail(FailCause::MineTriggered, a.at);
      } else {
        detail::reveal_from(s, a.at, fb.revealed);
      }
      break;
    case ActionKind::Right: {
      Cell& cell = s.view.at(a.at);
      cell = cell.is_flagged() ? Cell::unopened() : Cell::flagged();
      fb.flag_changes.push_back(a.at);
      break;
    }
    case ActionKind::Middle: {
      const auto around = neighbors(a.at, s.view.rows(), s.view.cols());
      for (const auto& nb : around) {
        if (s.view.at(nb).is_flagged() && !s.field.is_mine(nb)) {
          fail(FailCause::WrongFlagChord, nb);
          break;
        }
      }
      if (fb.kind == Feedback::Kind::GameFailed) break;
      for (const auto& nb : around) {
        if (s.view.at(nb).is_unopened()) detail::reveal_from(s, nb, fb.revealed);
      }
      break;
    }
  }

  std::sort(fb.revealed.begin(), fb.revealed.end());
  if (fb.kind != Feedback::Kind::GameFailed && is_solved(s.view, s.field)) {
    s.status.kind = GameStatus::Kind::Solved;
    fb.kind = Feedback::Kind::GameSolved;
  }
  s.applied.push_back({a, fb});
  return fb;
}

/// Ends an in-progress game without a win or loss (session aborts, explicit finalize).
inline void abort_game(GameState& s, std::string reason) {
  if (s.status.terminal()) throw GameOverError(s.status);
  s.status.kind = GameStatus::Kind::Aborted;
  s.status.reason = std::move(reason);
}

/// Replays `actions` on a fresh game. Stops quietly if the game ends early.
inline GameState replay(const MineField& field, const std::vector<Action>& actions) {
  GameState s = new_game(field);
  for (const auto& a : actions) {
    if (s.status.terminal()) break;
    apply_action(s, a);
  }
  return s;
}

}  // namespace msweep
