#pragma once

#include <array>
#include <chrono>
#include <functional>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "msweep/engine.hpp"
#include "msweep/solver.hpp"
#include "msweep/textboard.hpp"

namespace msweep {

/// NC keeps the whole conversation; CH recompiles one self-contained prompt per turn.
enum class PromptMode { NC, CH };

inline const char* mode_name(PromptMode m) { return m == PromptMode::NC ? "NC" : "CH"; }

inline PromptMode mode_from_name(const std::string& s) {
  if (s == "NC" || s == "nc") return PromptMode::NC;
  if (s == "CH" || s == "ch") return PromptMode::CH;
  throw std::invalid_argument("unknown prompt mode \"" + s + "\" (expected NC or CH)");
}

struct SessionConfig {
  int max_actions = 10;
  std::optional<Action> first_action;  // defaults to L at the center
  BoardFormat representation = BoardFormat::Table;
  bool with_indices = true;
  PromptMode mode = PromptMode::NC;
  SymbolMap symbols;
  bool obfuscate_prose = false;
  std::array<bool, 3> examples = {true, true, true};  // left, right, middle click examples
  bool free_invalid_retries = false;
  int transport_attempts = 3;
  std::chrono::milliseconds backoff_base{500};

  Action first_action_for(const MineField& f) const {
    return first_action.value_or(Action{ActionKind::Left, center_of(f.rows(), f.cols())});
  }
  RenderOptions render_options() const {
    RenderOptions r = representation == BoardFormat::Table ? table_options(symbols) : coordinate_options(symbols);
    r.with_indices = with_indices;
    return r;
  }
};

struct ChatMessage {
  std::string role;  // "user" or "assistant"
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// What an agent sees on one turn. `view` is the structured board for builtin agents;
/// remote agents only ever send the text.
struct AgentRequest {
  PromptMode mode = PromptMode::NC;
  std::vector<ChatMessage> messages;  // NC: full history ending with a user message
  std::string prompt;                 // CH: the compiled prompt
  BoardView view;
  int turn = 0;
};

struct AgentReply {
  std::string text;
  std::string request_body;   // verbatim wire bodies, remote agents only
  std::string response_body;
  int prompt_tokens = -1;
  int completion_tokens = -1;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An agent under evaluation. All state the harness needs lives in the SessionLog.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual AgentReply respond(const AgentRequest& req) = 0;
  virtual std::string name() const = 0;
  virtual bool remote() const { return false; }
};

enum class SessionOutcome { Solved, Failed, Exhausted, AbortedUnrecognizable, TransportFailed };

inline const char* outcome_name(SessionOutcome o) {
  switch (o) {
    case SessionOutcome::Solved: return "solved";
    case SessionOutcome::Failed: return "failed";
    case SessionOutcome::Exhausted: return "exhausted";
    case SessionOutcome::AbortedUnrecognizable: return "aborted_unrecognizable";
    case SessionOutcome::TransportFailed: return "transport_failed";
  }
  return "unknown";
}

inline SessionOutcome outcome_from_name(const std::string& s) {
  for (auto o : {SessionOutcome::Solved, SessionOutcome::Failed, SessionOutcome::Exhausted,
                 SessionOutcome::AbortedUnrecognizable, SessionOutcome::TransportFailed})
    if (s == outcome_name(o)) return o;
  throw std::invalid_argument("unknown session outcome \"" + s + "\"");
}

struct Turn {
  std::string prompt_or_delta;
  std::string raw_response;
  std::optional<Action> parsed;      // nullopt = unrecognized
  std::optional<Feedback> feedback;  // nullopt when unrecognized
  BoardView view_after;
  std::string request_body;
  std::string response_body;
  int prompt_tokens = -1;
  int completion_tokens = -1;
  std::optional<double> latency_ms;  // remote agents only, keeps builtin logs reproducible
};

struct SessionLog {
  std::string board_id;
  std::string agent;
  SessionConfig config;
  MineField field;
  Action first_action;
  Feedback first_feedback;
  BoardView initial_view;  // after the harness-issued first action
  std::vector<Turn> turns;
  SessionOutcome outcome = SessionOutcome::Exhausted;
  std::string error;
};

// ---------------------------------------------------------------------------
// Prose

/// Rewrites game prose as a generic puzzle: no "Minesweeper", "mine" becomes "thorn",
/// click names become abstract action symbols.
inline std::string obfuscate_prose(std::string text) {
  static const std::vector<std::pair<std::regex, std::string>> rules = [] {
    std::vector<std::pair<std::regex, std::string>> r;
    auto add = [&](const char* re, const char* to) { r.emplace_back(std::regex(re), to); };
    add(R"(\bMinesweeper\b)", "a grid logic puzzle");
    add(R"(\b(left|Left)-clicking\b)", "using action L");
    add(R"(\b(right|Right)-clicking\b)", "using action R");
    add(R"(\b(middle|Middle)-clicking\b)", "using action M");
    add(R"(\bLeft-click\b)", "Action L");
    add(R"(\bRight-click\b)", "Action R");
    add(R"(\bMiddle-click\b)", "Action M");
    add(R"(\bleft-click(ed)?\b)", "action L");
    add(R"(\bright-click(ed)?\b)", "action R");
    add(R"(\bmiddle-click(ed)?\b)", "action M");
    add(R"(\bmines\b)", "thorns");
    add(R"(\bMines\b)", "Thorns");
    add(R"(\bmine\b)", "thorn");
    add(R"(\bMine\b)", "Thorn");
    return r;
  }();
  for (const auto& [re, to] : rules) text = std::regex_replace(text, re, to);
  return text;
}

namespace detail {

inline std::string prose(const SessionConfig& cfg, std::string text) {
  return cfg.obfuscate_prose ? obfuscate_prose(std::move(text)) : text;
}

inline std::string sq(const SessionConfig& cfg, const std::string& tok) {
  return cfg.representation == BoardFormat::Table ? "`" + tok + "'" : "\"" + tok + "\"";
}

inline BoardView parse_example(int rows, int cols, const char* cells) {
  BoardView v(rows, cols);
  for (int i = 0; i < rows * cols; ++i) {
    const char ch = cells[i];
    v.at({i / cols + 1, i % cols + 1}) = ch == '?' ? Cell::unopened()
                                        : ch == 'F' ? Cell::flagged()
                                        : ch == '.' ? Cell::blank()
                                                    : Cell::numbered(ch - '0');
  }
  return v;
}

inline std::string board_intro(const SessionConfig& cfg) {
  if (cfg.representation == BoardFormat::Coordinate)
    return "The board is given as a list of cells, one per line, in the form (row,column): state.";
  if (cfg.with_indices)
    return "The board is given as a table. The first row lists the column indices and the first entry of every "
           "other row is its row index. Rows are separated by line breaks and columns by commas; cell states are "
           "enclosed in `' quotation marks.";
  return "The board is given as a table without index labels. Row 1 is the top line and column 1 is the leftmost "
         "entry. Rows are separated by line breaks and columns by commas; cell states are enclosed in `' quotation "
         "marks.";
}

inline std::string rules_text(const MineField& field, const SessionConfig& cfg) {
  const auto& s = cfg.symbols;
  const Action first = cfg.first_action_for(field);
  std::string p;
  p += "You are playing Minesweeper on a board of " + std::to_string(field.rows()) + " rows and " +
       std::to_string(field.cols()) + " columns. " + std::to_string(field.mines().size()) +
       " of the cells hide mines. You win by opening every cell that does not hide a mine, or by flagging "
       "exactly the cells that hide mines. You lose if you open a mine.\n\n";
  p += "Each cell is in one of four states:\n";
  p += "- Unopened (" + sq(cfg, s.unopened) + "): the content of the cell is unknown.\n";
  p += "- Numbered (" + sq(cfg, s.numbers[0]) + " to " + sq(cfg, s.numbers[7]) +
       "): an opened cell showing how many of its neighbors, including diagonal ones, hide mines.\n";
  p += "- Blank (" + sq(cfg, s.blank) +
       "): an opened cell with no neighboring mines. Its neighbors are opened automatically.\n";
  p += "- Flagged (" + sq(cfg, s.flagged) + "): a cell you marked as a mine.\n\n";
  p += board_intro(cfg) + "\nCells are addressed as (row,column); both indices start from 1.\n\n";
  p += "You can take one of three actions per turn:\n";
  p += "- L(row,column): left-click an unopened cell to open it.\n";
  p += "- R(row,column): right-click an unopened cell to flag it as a mine, or right-click a flagged cell to "
       "remove the flag.\n";
  p += "- M(row,column): middle-click a numbered cell whose number of flagged neighbors equals its number. All "
       "of its other unopened neighbors are opened. If any of those flags is wrong, you lose.\n\n";
  p += "Response format: first explain your reasoning about the board step by step, then end your response "
       "with a single line containing exactly one action in the form\n";
  p += "ACTION: L(row,column)\n";
  p += "using L, R or M as the action letter.\n\n";
  p += "Instructions:\n";
  p += "- The game begins by left-clicking the center cell: " + to_string(first) +
       ". This first action has already been taken for you.\n";
  p += "- Take exactly one action per response.\n";
  p += "- Do not repeat actions you have already taken. Every action should change the board.\n";
  p += "- You can take at most " + std::to_string(cfg.max_actions) + " actions.\n";

  const auto ro = cfg.render_options();
  int shown = 0;
  std::string ex;
  if (cfg.examples[0]) {
    const auto b = parse_example(3, 3, "F1?11????");
    ex += "\nExample " + std::to_string(++shown) + ":\n" + render(b, ro) + "\n";
    ex += "Reasoning: The cell at (2,2) is " + sq(cfg, s.numbers[0]) +
          ", so it has exactly one neighboring mine, and its neighbor (1,1) is already flagged. The remaining "
          "unopened neighbors of (2,2), namely (1,3), (2,3), (3,1), (3,2) and (3,3), are therefore safe, and it is "
          "logical to open one of them.\nACTION: L(2,3)\n";
  }
  if (cfg.examples[1]) {
    const auto b = parse_example(3, 3, "?1.11....");
    ex += "\nExample " + std::to_string(++shown) + ":\n" + render(b, ro) + "\n";
    ex += "Reasoning: The cell at (2,2) is " + sq(cfg, s.numbers[0]) +
          " and its only unopened neighbor is (1,1). Given that there's just one adjacent mine, it's logical to "
          "deduce that the unopened cell at (1,1) contains the mine, so it should be flagged.\nACTION: R(1,1)\n";
  }
  if (cfg.examples[2]) {
    const auto b = parse_example(3, 3, "F2F??????");
    ex += "\nExample " + std::to_string(++shown) + ":\n" + render(b, ro) + "\n";
    ex += "Reasoning: The cell at (1,2) is " + sq(cfg, s.numbers[1]) +
          " and both of its neighbors (1,1) and (1,3) are flagged, which accounts for its two neighboring mines. "
          "Middle-clicking (1,2) opens its remaining unopened neighbors (2,1), (2,2) and (2,3).\nACTION: M(1,2)\n";
  }
  if (shown) p += "\nExamples:\n" + ex.substr(1);
  return p;
}

}  // namespace detail

/// Summary of one feedback as relayed to the agent.
inline std::string feedback_text(const Action& a, const Feedback& fb) {
  switch (fb.kind) {
    case Feedback::Kind::Invalid: return fb.message;
    case Feedback::Kind::GameSolved: return "Congratulations! You have solved the game.";
    case Feedback::Kind::GameFailed:
      if (fb.cause == FailCause::MineTriggered) return "Game over! The cell at " + to_string(fb.cause_at) + " was a mine.";
      return "Game over! The flag at " + to_string(fb.cause_at) + " was not on a mine, so middle-clicking " +
             to_string(a.at) + " opened a mine.";
    case Feedback::Kind::BoardUpdated: break;
  }
  if (a.kind == ActionKind::Right) {
    return fb.flag_changes.empty() ? "Board updated." : "Flag toggled at " + to_string(a.at) + ".";
  }
  const auto n = fb.revealed.size();
  return "Board updated. " + std::to_string(n) + (n == 1 ? " cell was" : " cells were") + " opened.";
}

inline std::string feedback_text(const Action& a, const Feedback& fb, const BoardView& after) {
  if (a.kind == ActionKind::Right && fb.kind == Feedback::Kind::BoardUpdated)
    return after.at(a.at).is_flagged() ? "Flag placed at " + to_string(a.at) + "."
                                       : "Flag removed from " + to_string(a.at) + ".";
  return feedback_text(a, fb);
}

/// "N. K(r,c) → summary"
inline std::string history_line(int n, const Action& a, const std::string& summary) {
  return std::to_string(n) + ". " + to_string(a) + " → " + summary;
}

/// The opening prompt: rules, legend, actions, response contract, examples and the board
/// after the harness-issued first click.
inline std::string build_initial_prompt(const MineField& field, const BoardView& board, const SessionConfig& cfg) {
  std::string p = detail::rules_text(field, cfg);
  if (cfg.mode == PromptMode::CH) p += "\nAction history: no actions taken yet.\n";
  p += "\nCurrent board:\n" + render(board, cfg.render_options()) + "\n\nWhat is your next action?";
  return detail::prose(cfg, p);
}

/// CH prompt for a later turn: rules, condensed (action, feedback) history, current board.
inline std::string build_compact_prompt(const MineField& field, const BoardView& board, const SessionConfig& cfg,
                                        const std::vector<std::string>& history) {
  if (history.empty()) return build_initial_prompt(field, board, cfg);
  std::string p = detail::rules_text(field, cfg);
  p += "\nAction history:\n";
  for (const auto& line : history) p += line + "\n";
  p += "\nCurrent board:\n" + render(board, cfg.render_options()) + "\n\nWhat is your next action?";
  return detail::prose(cfg, p);
}

/// NC user message following an applied action.
inline std::string build_turn_message(const Action& a, const Feedback& fb, const BoardView& board,
                                      const SessionConfig& cfg) {
  std::string p = feedback_text(a, fb, board);
  if (fb.kind == Feedback::Kind::Invalid)
    p += "\n\nThe board is unchanged:\n" + render(board, cfg.render_options()) + "\n\nPlease choose a different action.";
  else
    p += "\n\nCurrent board:\n" + render(board, cfg.render_options()) + "\n\nWhat is your next action?";
  return detail::prose(cfg, p);
}

/// Extends the NC message list (assistant reply + user feedback) or recompiles the CH
/// prompt from `history`.
inline void next_context(AgentRequest& req, const MineField& field, const SessionConfig& cfg,
                         const std::string& raw_response, const Action& a, const Feedback& fb, const BoardView& board,
                         const std::vector<std::string>& history) {
  req.view = board;
  ++req.turn;
  if (cfg.mode == PromptMode::NC) {
    req.messages.push_back({"assistant", raw_response});
    req.messages.push_back({"user", build_turn_message(a, fb, board, cfg)});
  } else {
    req.prompt = build_compact_prompt(field, board, cfg, history);
    req.messages = {{"user", req.prompt}};
  }
}

// ---------------------------------------------------------------------------
// Parsing agent output

/// Finds "K(r,c)" in free text. After an "ACTION:" marker only the text following the last
/// marker counts (first match there); otherwise the last match in the whole text wins.
/// Letters other than L, R, M make the response unrecognized.
inline std::optional<Action> extract_action(const std::string& raw) {
  static const std::regex marker(R"(ACTION\s*:)", std::regex::icase);
  static const std::regex pattern(R"((?:^|[^A-Za-z])([A-Za-z])\s*\(\s*(-?\d{1,6})\s*,\s*(-?\d{1,6})\s*\))");

  std::string scope = raw;
  bool after_marker = false;
  for (auto it = std::sregex_iterator(raw.begin(), raw.end(), marker); it != std::sregex_iterator(); ++it) {
    scope = raw.substr(static_cast<std::size_t>(it->position() + it->length()));
    after_marker = true;
  }

  std::optional<std::smatch> chosen;
  for (auto it = std::sregex_iterator(scope.begin(), scope.end(), pattern); it != std::sregex_iterator(); ++it) {
    chosen = *it;
    if (after_marker) break;
  }
  if (!chosen) return std::nullopt;
  const auto& m = *chosen;
  Action a;
  switch (m[1].str()[0]) {
    case 'L': a.kind = ActionKind::Left; break;
    case 'R': a.kind = ActionKind::Right; break;
    case 'M': a.kind = ActionKind::Middle; break;
    default: return std::nullopt;
  }
  a.at = {std::stoi(m[2].str()), std::stoi(m[3].str())};
  return a;
}

// ---------------------------------------------------------------------------
// Builtin agents

/// Replays canned responses in order; answers "" (unrecognized) once they run out.
class ScriptedAgent : public Agent {
 public:
  explicit ScriptedAgent(std::vector<std::string> responses, std::string name = "builtin:scripted")
      : responses_(std::move(responses)), name_(std::move(name)) {}
  static ScriptedAgent from_actions(const std::vector<Action>& actions) {
    std::vector<std::string> r;
    for (const auto& a : actions) r.push_back("ACTION: " + to_string(a));
    return ScriptedAgent(std::move(r));
  }
  AgentReply respond(const AgentRequest&) override {
    AgentReply r;
    if (next_ < responses_.size()) r.text = responses_[next_++];
    return r;
  }
  std::string name() const override { return name_; }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
  std::string name_;
};

class FunctionAgent : public Agent {
 public:
  FunctionAgent(std::string name, std::function<std::string(const AgentRequest&)> fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}
  AgentReply respond(const AgentRequest& req) override { return {fn_(req)}; }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  std::function<std::string(const AgentRequest&)> fn_;
};

/// Deterministic single-point baseline reading the structured board.
class SinglePointAgent : public Agent {
 public:
  AgentReply respond(const AgentRequest& req) override {
    const auto rule = single_point_move(req.view);
    const Action a = rule ? *rule : single_point_agent(req.view);
    std::string why = !rule ? "No single-point deduction applies; flagging the first unopened cell."
                      : a.kind == ActionKind::Middle ? "The numbered cell has as many flagged neighbors as its number."
                                                     : "The numbered cell's unopened neighbors must all be mines.";
    return {why + "\nACTION: " + to_string(a)};
  }
  std::string name() const override { return "builtin:single-point"; }
};

// ---------------------------------------------------------------------------
// The loop

namespace detail {

inline SessionOutcome outcome_for(const GameStatus& s) {
  return s.kind == GameStatus::Kind::Solved ? SessionOutcome::Solved : SessionOutcome::Failed;
}

}  // namespace detail

/// Drives one game: the harness plays the first action, then the agent acts until the game
/// ends, an unrecognizable response arrives, or `max_actions` actions have been taken.
/// Invalid actions consume a slot unless `free_invalid_retries` is set.
inline SessionLog run_session(const MineField& field, Agent& agent, const SessionConfig& cfg,
                              std::string board_id = {}) {
  if (cfg.max_actions < 1) throw std::invalid_argument("max_actions must be at least 1");
  cfg.symbols.validate();

  SessionLog log;
  log.board_id = std::move(board_id);
  log.agent = agent.name();
  log.config = cfg;
  log.field = field;
  log.first_action = cfg.first_action_for(field);

  GameState state = new_game(field, log.first_action);
  log.first_feedback = apply_action(state, log.first_action);
  log.initial_view = state.view;
  if (state.status.terminal()) {
    log.outcome = detail::outcome_for(state.status);
    return log;
  }

  AgentRequest req;
  req.mode = cfg.mode;
  req.view = state.view;
  if (cfg.mode == PromptMode::NC) {
    req.messages = {{"user", build_initial_prompt(field, state.view, cfg)}};
  } else {
    req.prompt = build_initial_prompt(field, state.view, cfg);
    req.messages = {{"user", req.prompt}};
  }

  std::vector<std::string> history;
  int counted = 0;
  int turns = 0;
  const int hard_cap = cfg.free_invalid_retries ? 5 * cfg.max_actions : cfg.max_actions;

  while (counted < cfg.max_actions && turns < hard_cap) {
    Turn t;
    t.prompt_or_delta = cfg.mode == PromptMode::NC ? req.messages.back().content : req.prompt;

    AgentReply reply;
    bool delivered = false;
    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, cfg.transport_attempts) && !delivered; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(cfg.backoff_base * (1 << (attempt - 1)));
      const auto start = std::chrono::steady_clock::now();
      try {
        reply = agent.respond(req);
        delivered = true;
      } catch (const TransportError& e) {
        last_error = e.what();
      }
      if (agent.remote())
        t.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    if (!delivered) {
      log.outcome = SessionOutcome::TransportFailed;
      log.error = "agent transport failed after " + std::to_string(cfg.transport_attempts) + " attempts: " + last_error;
      return log;
    }

    t.raw_response = reply.text;
    t.request_body = std::move(reply.request_body);
    t.response_body = std::move(reply.response_body);
    t.prompt_tokens = reply.prompt_tokens;
    t.completion_tokens = reply.completion_tokens;
    t.parsed = extract_action(t.raw_response);
    ++turns;

    if (!t.parsed) {
      t.view_after = state.view;
      log.turns.push_back(std::move(t));
      log.outcome = SessionOutcome::AbortedUnrecognizable;
      return log;
    }

    const Feedback fb = apply_action(state, *t.parsed);
    t.feedback = fb;
    t.view_after = state.view;
    if (!(cfg.free_invalid_retries && fb.kind == Feedback::Kind::Invalid)) ++counted;
    const Action acted = *t.parsed;
    const std::string raw = t.raw_response;
    log.turns.push_back(std::move(t));

    if (state.status.terminal()) {
      log.outcome = detail::outcome_for(state.status);
      return log;
    }
    history.push_back(history_line(static_cast<int>(history.size()) + 1, acted, feedback_text(acted, fb, state.view)));
    next_context(req, field, cfg, raw, acted, fb, state.view, history);
  }
  log.outcome = SessionOutcome::Exhausted;
  return log;
}

/// Actions the agent issued, in order (unrecognized turns skipped).
inline std::vector<Action> agent_actions(const SessionLog& log) {
  std::vector<Action> out;
  for (const auto& t : log.turns)
    if (t.parsed) out.push_back(*t.parsed);
  return out;
}

/// The full engine history of a session, harness first action included.
inline std::vector<Action> all_actions(const SessionLog& log) {
  std::vector<Action> out{log.first_action};
  const auto rest = agent_actions(log);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace msweep
