#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "msweep/engine.hpp"
#include "msweep/io.hpp"
#include "msweep/session.hpp"
#include "msweep/textboard.hpp"

namespace msweep {

/// A log whose recorded feedback or views disagree with an engine replay.
class ReplayMismatch : public std::runtime_error {
 public:
  ReplayMismatch(std::string board, std::string diff)
      : std::runtime_error("session log " + board + " is not replay-consistent:\n" + diff), diff_(std::move(diff)) {}
  const std::string& diff() const { return diff_; }

 private:
  std::string diff_;
};

struct BoardStats {
  std::string board_id;
  SessionOutcome outcome = SessionOutcome::Exhausted;
  bool solved = false;
  bool failed = false;
  int mines_total = 0;
  int mines_correctly_flagged = 0;
  int flags_wrong = 0;
  int actions_total = 0;  // agent turns, unrecognized included
  int actions_valid = 0;
  int actions_invalid = 0;
  int actions_unrecognized = 0;
  int actions_failed = 0;  // the losing click; counted in the total only
  int actions_repeated = 0;
  int actions_effective = 0;

  friend bool operator==(const BoardStats&, const BoardStats&) = default;
};

/// Replays the log through the engine and lists every disagreement; empty means consistent.
inline std::string replay_diff(const SessionLog& log) {
  std::string diff;
  auto note = [&](const std::string& where, const std::string& what) { diff += where + ": " + what + "\n"; };
  GameState s = new_game(log.field, log.first_action);
  if (apply_action(s, log.first_action) != log.first_feedback) note("first action", "feedback differs");
  if (s.view != log.initial_view)
    note("first action", "view differs\nlogged:\n" + render_table(log.initial_view, table_options()) +
                             "\nreplayed:\n" + render_table(s.view, table_options()));
  for (std::size_t i = 0; i < log.turns.size(); ++i) {
    const auto& t = log.turns[i];
    const std::string where = "turn " + std::to_string(i + 1);
    if (!t.parsed) {
      if (t.feedback) note(where, "unrecognized turn carries feedback");
      if (t.view_after != s.view) note(where, "view changed on an unrecognized turn");
      continue;
    }
    if (s.status.terminal()) {
      note(where, "action " + to_string(*t.parsed) + " after the game ended");
      break;
    }
    const Feedback fb = apply_action(s, *t.parsed);
    if (!t.feedback) {
      note(where, "missing feedback for " + to_string(*t.parsed));
    } else if (fb != *t.feedback) {
      note(where, std::string("feedback for ") + to_string(*t.parsed) + " logged as " +
                      feedback_kind_name(t.feedback->kind) + ", replay gives " + feedback_kind_name(fb.kind));
    }
    if (s.view != t.view_after)
      note(where, "view differs\nlogged:\n" + render_table(t.view_after, table_options()) + "\nreplayed:\n" +
                      render_table(s.view, table_options()));
  }
  const bool solved = s.status.kind == GameStatus::Kind::Solved;
  const bool failed = s.status.kind == GameStatus::Kind::Failed;
  if ((log.outcome == SessionOutcome::Solved) != solved || (log.outcome == SessionOutcome::Failed) != failed)
    note("outcome", std::string("logged ") + outcome_name(log.outcome) + ", replay ends " + status_name(s.status.kind));
  return diff;
}

/// Scores one session. Valid = accepted and not losing; repeated = same kind and cell as an
/// earlier agent action (the harness first action is not compared); effective = valid and
/// not repeated, and either opened a cell, placed a flag, or solved the game.
inline BoardStats score_session(const SessionLog& log) {
  if (auto diff = replay_diff(log); !diff.empty()) throw ReplayMismatch(log.board_id, diff);

  BoardStats st;
  st.board_id = log.board_id;
  st.outcome = log.outcome;
  st.solved = log.outcome == SessionOutcome::Solved;
  st.failed = log.outcome == SessionOutcome::Failed;
  st.mines_total = static_cast<int>(log.field.mines().size());

  std::set<Action> seen;
  BoardView final_view = log.initial_view;
  for (const auto& t : log.turns) {
    ++st.actions_total;
    final_view = t.view_after;
    if (!t.parsed) {
      ++st.actions_unrecognized;
      continue;
    }
    const bool repeated = !seen.insert(*t.parsed).second;
    st.actions_repeated += repeated ? 1 : 0;
    const auto kind = t.feedback->kind;
    if (kind == Feedback::Kind::Invalid) ++st.actions_invalid;
    if (kind == Feedback::Kind::GameFailed) ++st.actions_failed;
    const bool valid = kind == Feedback::Kind::BoardUpdated || kind == Feedback::Kind::GameSolved;
    if (!valid) continue;
    ++st.actions_valid;
    const bool placed_flag = t.parsed->kind == ActionKind::Right && t.view_after.at(t.parsed->at).is_flagged();
    if (!repeated && (!t.feedback->revealed.empty() || placed_flag || kind == Feedback::Kind::GameSolved))
      ++st.actions_effective;
  }

  for (int r = 1; r <= final_view.rows(); ++r)
    for (int c = 1; c <= final_view.cols(); ++c) {
      if (!final_view.at({r, c}).is_flagged()) continue;
      if (log.field.is_mine({r, c}))
        ++st.mines_correctly_flagged;
      else
        ++st.flags_wrong;
    }
  return st;
}

struct Report {
  int n_games = 0;
  int n_solved = 0;
  int n_failed = 0;
  int mines_total = 0;
  int mines_flagged = 0;
  int total_actions = 0;
  int valid = 0;
  int invalid = 0;
  int unrecognized = 0;
  int repeated = 0;
  int effective = 0;
  double pct_solved = 0;
  double pct_failed = 0;
  double pct_flagged = 0;
  double pct_valid = 0;
  double pct_repeated = 0;
  double pct_effective = 0;
  double pct_valid_recognized = 0;  // alternative: unrecognized turns left out of the denominator
  std::vector<BoardStats> boards;
};

namespace detail {
inline double pct(int num, int den) { return den == 0 ? 0.0 : 100.0 * num / den; }
}  // namespace detail

inline Report aggregate(const std::vector<BoardStats>& stats) {
  if (stats.empty()) throw std::invalid_argument("cannot aggregate an empty list of boards");
  Report r;
  r.boards = stats;
  r.n_games = static_cast<int>(stats.size());
  for (const auto& s : stats) {
    r.n_solved += s.solved;
    r.n_failed += s.failed;
    r.mines_total += s.mines_total;
    r.mines_flagged += s.mines_correctly_flagged;
    r.total_actions += s.actions_total;
    r.valid += s.actions_valid;
    r.invalid += s.actions_invalid;
    r.unrecognized += s.actions_unrecognized;
    r.repeated += s.actions_repeated;
    r.effective += s.actions_effective;
  }
  r.pct_solved = detail::pct(r.n_solved, r.n_games);
  r.pct_failed = detail::pct(r.n_failed, r.n_games);
  r.pct_flagged = detail::pct(r.mines_flagged, r.mines_total);
  r.pct_valid = detail::pct(r.valid, r.total_actions);
  r.pct_repeated = detail::pct(r.repeated, r.total_actions);
  r.pct_effective = detail::pct(r.effective, r.total_actions);
  r.pct_valid_recognized = detail::pct(r.valid, r.total_actions - r.unrecognized);
  return r;
}

inline Json board_stats_json(const BoardStats& s) {
  return {{"board_id", s.board_id},
          {"outcome", outcome_name(s.outcome)},
          {"solved", s.solved},
          {"failed", s.failed},
          {"mines_total", s.mines_total},
          {"mines_correctly_flagged", s.mines_correctly_flagged},
          {"flags_wrong", s.flags_wrong},
          {"actions_total", s.actions_total},
          {"actions_valid", s.actions_valid},
          {"actions_invalid", s.actions_invalid},
          {"actions_unrecognized", s.actions_unrecognized},
          {"actions_failed", s.actions_failed},
          {"actions_repeated", s.actions_repeated},
          {"actions_effective", s.actions_effective}};
}

inline BoardStats board_stats_from(const Json& j) {
  BoardStats s;
  s.board_id = j.at("board_id").get<std::string>();
  s.outcome = outcome_from_name(j.at("outcome").get<std::string>());
  s.solved = j.at("solved").get<bool>();
  s.failed = j.at("failed").get<bool>();
  s.mines_total = j.at("mines_total").get<int>();
  s.mines_correctly_flagged = j.at("mines_correctly_flagged").get<int>();
  s.flags_wrong = j.at("flags_wrong").get<int>();
  s.actions_total = j.at("actions_total").get<int>();
  s.actions_valid = j.at("actions_valid").get<int>();
  s.actions_invalid = j.at("actions_invalid").get<int>();
  s.actions_unrecognized = j.at("actions_unrecognized").get<int>();
  s.actions_failed = j.at("actions_failed").get<int>();
  s.actions_repeated = j.at("actions_repeated").get<int>();
  s.actions_effective = j.at("actions_effective").get<int>();
  return s;
}

inline double round1(double v) { return std::round(v * 10.0) / 10.0; }

inline Json report_json(const Report& r) {
  Json boards = Json::array();
  for (const auto& b : r.boards) boards.push_back(board_stats_json(b));
  return {{"n_games", r.n_games},
          {"n_solved", r.n_solved},
          {"n_failed", r.n_failed},
          {"pct_solved", round1(r.pct_solved)},
          {"pct_failed", round1(r.pct_failed)},
          {"mines_total", r.mines_total},
          {"mines_flagged", r.mines_flagged},
          {"pct_flagged", round1(r.pct_flagged)},
          {"total_actions", r.total_actions},
          {"valid", r.valid},
          {"invalid", r.invalid},
          {"unrecognized", r.unrecognized},
          {"repeated", r.repeated},
          {"effective", r.effective},
          {"pct_valid", round1(r.pct_valid)},
          {"pct_repeated", round1(r.pct_repeated)},
          {"pct_effective", round1(r.pct_effective)},
          {"pct_valid_recognized", round1(r.pct_valid_recognized)},
          {"boards", boards}};
}

/// Markdown table with the outcome, mine identification and action validity blocks.
inline std::string report_markdown(const Report& r, const std::string& column = "Agent") {
  auto f1 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return std::string(buf);
  };
  std::string md;
  md += "| Category | Metric | " + column + " |\n";
  md += "|---|---|---|\n";
  md += "| Game Outcome | % Solved | " + f1(r.pct_solved) + " |\n";
  md += "| | % Failed | " + f1(r.pct_failed) + " |\n";
  md += "| Mine Identification | # Total Mines | " + std::to_string(r.mines_total) + " |\n";
  md += "| | % Flagged | " + f1(r.pct_flagged) + " |\n";
  md += "| Action Validity | # Total Actions | " + std::to_string(r.total_actions) + " |\n";
  md += "| | % Valid | " + f1(r.pct_valid) + " |\n";
  md += "| | % Repeated | " + f1(r.pct_repeated) + " |\n";
  md += "\n" + std::to_string(r.n_games) + " games. % Valid counts unrecognized responses (" +
        std::to_string(r.unrecognized) + ") in the denominator; without them it is " + f1(r.pct_valid_recognized) +
        ". " + std::to_string(r.effective) + " actions (" + f1(r.pct_effective) + "%) were effective.\n";
  return md;
}

// ---------------------------------------------------------------------------
// Reasoning chains for manual review

struct ReviewBundle {
  std::vector<const SessionLog*> logs;
  std::string notice;
};

/// The k logs with the most valid actions, ties broken by board id.
inline ReviewBundle select_reasoning_chains(const std::vector<SessionLog>& logs, int k = 5) {
  ReviewBundle b;
  if (k <= 0) return b;
  std::vector<std::pair<int, const SessionLog*>> ranked;
  for (const auto& l : logs) ranked.emplace_back(score_session(l).actions_valid, &l);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& c) {
    if (a.first != c.first) return a.first > c.first;
    return a.second->board_id < c.second->board_id;
  });
  if (static_cast<int>(ranked.size()) < k)
    b.notice = "only " + std::to_string(ranked.size()) + " logs available; " + std::to_string(k) + " requested";
  for (int i = 0; i < std::min<int>(k, static_cast<int>(ranked.size())); ++i) b.logs.push_back(ranked[i].second);
  return b;
}

inline std::string review_markdown(const ReviewBundle& b) {
  const auto opts = table_options();
  std::string md = "# Reasoning chains for review\n";
  if (!b.notice.empty()) md += "\n_" + b.notice + "_\n";
  for (const auto* log : b.logs) {
    const auto st = score_session(*log);
    md += "\n## " + log->board_id + " (" + outcome_name(log->outcome) + ", " + std::to_string(st.actions_valid) +
          " valid actions)\n\n";
    md += "First action " + to_string(log->first_action) + ".\n";
    BoardView before = log->initial_view;
    for (std::size_t i = 0; i < log->turns.size(); ++i) {
      const auto& t = log->turns[i];
      md += "\n### Turn " + std::to_string(i + 1) + "\n\nBoard:\n\n```\n" + render(before, opts) + "\n```\n\n";
      md += "Response:\n\n```\n" + t.raw_response + "\n```\n\n";
      md += "Parsed action: " + (t.parsed ? to_string(*t.parsed) : std::string("unrecognized")) + "\n";
      if (t.parsed && t.feedback) md += "Feedback: " + feedback_text(*t.parsed, *t.feedback, t.view_after) + "\n";
      before = t.view_after;
    }
  }
  return md;
}

}  // namespace msweep
