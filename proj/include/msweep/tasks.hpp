#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "msweep/engine.hpp"
#include "msweep/rng.hpp"
#include "msweep/textboard.hpp"

namespace msweep {

/// One annotated game: a minefield plus the player's complete action history.
struct AnnotatedGame {
  std::string id;
  MineField field;
  std::vector<Action> actions;
};

/// Board state after action `action_index` (0-based) of a source history.
struct Snapshot {
  BoardView view;
  std::string source_game;
  int action_index = 0;
};

struct NavInstance {
  Snapshot snapshot;
  Coord target;
  Cell gold;
};

struct CountInstance {
  Snapshot snapshot;
  Coord target;
  Cell query;  // one of kCountQueries
  int gold = 0;
};

/// The four states a neighbor-counting question may ask about: unopened, blank, 1, 2.
inline constexpr std::array<Cell, 4> kCountQueries = {Cell::unopened(), Cell::blank(), Cell::numbered(1),
                                                      Cell::numbered(2)};

inline bool is_count_query(const Cell& c) {
  return std::find(kCountQueries.begin(), kCountQueries.end(), c) != kCountQueries.end();
}

/// Neighbors of `at` whose state equals `query`.
inline int count_neighbors(const BoardView& view, Coord at, const Cell& query) {
  if (!view.in_bounds(at)) throw std::out_of_range("target " + to_string(at) + " is outside the board");
  if (!is_count_query(query)) throw std::invalid_argument("query state is not one of ?, ., 1, 2");
  int n = 0;
  for (const auto& nb : neighbors(at, view.rows(), view.cols())) n += view.at(nb) == query ? 1 : 0;
  return n;
}

struct SampleResult {
  std::vector<NavInstance> navigation;
  std::vector<CountInstance> counting;
  std::vector<std::string> warnings;
};

/// Per game (substream i of `seed`): one snapshot after a random action that is neither
/// the first nor the last, then `n_coords` random cells, each with a random count query.
/// Both tasks share the cells.
inline SampleResult sample_instances(const std::vector<AnnotatedGame>& games, int n_coords, std::uint64_t seed) {
  SampleResult out;
  if (n_coords <= 0) return out;
  for (std::size_t i = 0; i < games.size(); ++i) {
    const auto& g = games[i];
    const int n = static_cast<int>(g.actions.size());
    if (n < 3) {
      out.warnings.push_back("game " + g.id + ": history has " + std::to_string(n) +
                             " actions, need at least 3; skipped");
      continue;
    }
    Rng rng = make_rng(seed, i);
    const int k = uniform_int(rng, 1, n - 2);
    GameState s = new_game(g.field);
    for (int j = 0; j <= k && s.status.in_progress(); ++j) apply_action(s, g.actions[j]);
    Snapshot snap{s.view, g.id, k};
    for (int j = 0; j < n_coords; ++j) {
      const Coord target{uniform_int(rng, 1, s.view.rows()), uniform_int(rng, 1, s.view.cols())};
      const Cell query = kCountQueries[uniform_below(rng, kCountQueries.size())];
      out.navigation.push_back({snap, target, s.view.at(target)});
      out.counting.push_back({snap, target, query, count_neighbors(s.view, target, query)});
    }
  }
  return out;
}

struct TaskPromptOptions {
  BoardFormat representation = BoardFormat::Table;
  bool with_indices = true;  // table only
  bool with_example = false;
  bool with_cot = false;
  SymbolMap symbols;

  static TaskPromptOptions navigation(BoardFormat f) { return {f, true, false, false, {}}; }
  static TaskPromptOptions counting(BoardFormat f) { return {f, true, true, true, {}}; }
};

namespace detail {

inline RenderOptions task_render_options(const TaskPromptOptions& o) {
  RenderOptions r = o.representation == BoardFormat::Table ? table_options(o.symbols) : coordinate_options(o.symbols);
  r.with_indices = o.with_indices;
  return r;
}

// Table prompts quote states LaTeX-style; coordinate prompts use plain double quotes in prose.
inline std::string q(const std::string& tok, BoardFormat f) {
  return f == BoardFormat::Table ? "`" + tok + "'" : "\"" + tok + "\"";
}

inline std::string task_preamble(const TaskPromptOptions& o) {
  const auto f = o.representation;
  const auto& s = o.symbols;
  std::string p;
  p += "You are given the board of a Minesweeper game. Each cell is in one of four states:\n";
  p += "- Unopened (" + q(s.unopened, f) + "): the content of the cell is unknown.\n";
  p += "- Numbered (" + q(s.numbers[0], f) + " to " + q(s.numbers[7], f) +
       "): the number of mines among the cell's neighbors, including diagonal ones.\n";
  p += "- Blank (" + q(s.blank, f) + "): a revealed cell with no neighboring mines.\n";
  p += "- Flagged (" + q(s.flagged, f) + "): a cell marked as a suspected mine.\n\n";
  if (f == BoardFormat::Table) {
    if (o.with_indices)
      p += "The board is shown as a table. The first row lists the column indices and the first entry of every "
           "other row is its row index. Rows are separated by line breaks and columns by commas. Cell states are "
           "enclosed in `' quotation marks.\n";
    else
      p += "The board is shown as a table without index labels. Row 1 is the top line and column 1 is the leftmost "
           "entry of each line. Rows are separated by line breaks and columns by commas. Cell states are enclosed "
           "in `' quotation marks.\n";
  } else {
    p += "The board is shown as a list of cells, one per line, in the form (row,column): state.\n";
  }
  p += "Cells are addressed as (row, column); both indices start from 1.\n";
  return p;
}

inline BoardView example_board() {
  BoardView v(3, 3);
  v.at({1, 1}) = Cell::blank();
  v.at({1, 2}) = Cell::numbered(1);
  v.at({1, 3}) = Cell::unopened();
  v.at({2, 1}) = Cell::numbered(1);
  v.at({2, 2}) = Cell::numbered(2);
  v.at({2, 3}) = Cell::unopened();
  v.at({3, 1}) = Cell::flagged();
  v.at({3, 2}) = Cell::unopened();
  v.at({3, 3}) = Cell::unopened();
  return v;
}

inline std::string answer_line(const std::string& answer) { return "Answer: " + answer; }

}  // namespace detail

inline std::string build_task_prompt(const NavInstance& inst, const TaskPromptOptions& o) {
  const auto f = o.representation;
  const auto ro = detail::task_render_options(o);
  std::string p = detail::task_preamble(o);
  p += "\nYour task is to report the state of one cell of the board.\n";
  if (o.with_example) {
    const auto ex = detail::example_board();
    p += "\nExample board:\n" + render(ex, ro) + "\n";
    p += "Question: What is the state of the cell at (2,2)?\n";
    if (o.with_cot) p += "The cell at row 2, column 2 holds " + detail::q(o.symbols.token(ex.at({2, 2})), f) + ".\n";
    p += detail::answer_line(detail::q(o.symbols.token(ex.at({2, 2})), f)) + "\n";
  }
  p += "\nBoard:\n" + render(inst.snapshot.view, ro) + "\n\n";
  p += "Question: What is the state of the cell at " + to_string(inst.target) + "?\n";
  if (o.with_cot) p += "Let's think step by step: locate the row first, then the column, and read the cell state.\n";
  p += "End your response with a single line of the form \"Answer: <state>\".\n";
  return p;
}

inline std::string build_task_prompt(const CountInstance& inst, const TaskPromptOptions& o) {
  const auto f = o.representation;
  const auto ro = detail::task_render_options(o);
  std::string p = detail::task_preamble(o);
  p += "\nThe neighbors of a cell are the up to 8 cells around it, including the diagonal ones.\n";
  p += "Your task is to count how many neighbors of a given cell are in a given state.\n";

  // A worked example is always included for counting.
  const auto ex = detail::example_board();
  const Coord ex_at{2, 2};
  const Cell ex_query = Cell::unopened();
  p += "\nExample board:\n" + render(ex, ro) + "\n";
  p += "Question: How many neighbors of the cell at (2,2) are in state " + detail::q(o.symbols.token(ex_query), f) + "?\n";
  if (o.with_cot) {
    p += "The neighbors of (2,2) are:";
    int hits = 0;
    for (const auto& nb : neighbors(ex_at, ex.rows(), ex.cols())) {
      p += " " + to_string(nb) + " is " + detail::q(o.symbols.token(ex.at(nb)), f) + ";";
      hits += ex.at(nb) == ex_query ? 1 : 0;
    }
    p.back() = '.';
    p += "\nCounting the " + detail::q(o.symbols.token(ex_query), f) + " cells among them gives " +
         std::to_string(hits) + ".\n";
    p += detail::answer_line(std::to_string(hits)) + "\n";
  } else {
    p += detail::answer_line(std::to_string(count_neighbors(ex, ex_at, ex_query))) + "\n";
  }

  p += "\nBoard:\n" + render(inst.snapshot.view, ro) + "\n\n";
  p += "Question: How many neighbors of the cell at " + to_string(inst.target) + " are in state " +
       detail::q(o.symbols.token(inst.query), f) + "?\n";
  if (o.with_cot)
    p += "Let's think step by step. First list every neighbor of " + to_string(inst.target) +
         " with its state, then count the ones in the requested state.\n";
  p += "End your response with a single line of the form \"Answer: <number>\".\n";
  return p;
}

struct GradeResult {
  bool correct = false;
  bool unparseable = false;
  std::string extracted;
};

namespace detail {

// Text after the last "answer" marker (case-insensitive), else the last non-empty line.
inline std::string answer_segment(const std::string& response) {
  std::string lower = response;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  const auto pos = lower.rfind("answer");
  if (pos != std::string::npos) return response.substr(pos + 6);
  const auto lines = split_lines(response);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it)
    if (it->find_first_not_of(" \t") != std::string::npos) return *it;
  return {};
}

inline std::optional<Cell> last_state_token(const std::string& seg, const SymbolMap& symbols) {
  // Quoted tokens win: `X', "X", 'X'.
  static const std::regex quoted(R"([`'"]([^`'"\s]{1,4})['"])");
  std::optional<Cell> found;
  for (auto it = std::sregex_iterator(seg.begin(), seg.end(), quoted); it != std::sregex_iterator(); ++it)
    if (auto c = symbols.cell((*it)[1].str())) found = c;
  if (found) return found;

  std::istringstream words(seg);
  std::string w;
  while (words >> w) {
    const auto b = w.find_first_not_of("`'\"(*:");
    if (b == std::string::npos) continue;
    w = w.substr(b);
    while (w.size() > 1 && std::string("`'\")*,;:!.").find(w.back()) != std::string::npos) w.pop_back();
    if (auto c = symbols.cell(w)) found = c;
  }
  return found;
}

inline std::optional<int> last_integer(const std::string& seg) {
  static const std::regex number(R"(\b(\d+|zero|one|two|three|four|five|six|seven|eight)\b)", std::regex::icase);
  static const char* words[] = {"zero", "one", "two", "three", "four", "five", "six", "seven", "eight"};
  std::optional<int> found;
  for (auto it = std::sregex_iterator(seg.begin(), seg.end(), number); it != std::sregex_iterator(); ++it) {
    std::string m = (*it)[1].str();
    if (std::isdigit(static_cast<unsigned char>(m[0]))) {
      found = m.size() > 6 ? -1 : std::stoi(m);
      continue;
    }
    std::transform(m.begin(), m.end(), m.begin(), [](unsigned char ch) { return std::tolower(ch); });
    for (int i = 0; i <= 8; ++i)
      if (m == words[i]) found = i;
  }
  return found;
}

}  // namespace detail

/// Exact-match grading; the last explicit state token after the answer marker wins.
inline GradeResult grade(const std::string& response, const NavInstance& inst, const SymbolMap& symbols = {}) {
  GradeResult g;
  const auto tok = detail::last_state_token(detail::answer_segment(response), symbols);
  if (!tok) {
    g.unparseable = true;
    return g;
  }
  g.extracted = symbols.token(*tok);
  g.correct = *tok == inst.gold;
  return g;
}

inline GradeResult grade(const std::string& response, const CountInstance& inst) {
  GradeResult g;
  const auto n = detail::last_integer(detail::answer_segment(response));
  if (!n) {
    g.unparseable = true;
    return g;
  }
  g.extracted = std::to_string(*n);
  g.correct = *n == inst.gold;
  return g;
}

}  // namespace msweep
