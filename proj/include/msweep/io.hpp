#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "msweep/boardgen.hpp"
#include "msweep/session.hpp"
#include "msweep/tasks.hpp"
#include "msweep/textboard.hpp"

namespace msweep {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

// ---------------------------------------------------------------------------
// Leaf values

inline Json coord_json(Coord c) { return Json::array({c.row, c.col}); }
inline Coord coord_from(const Json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

inline Json coords_json(const std::vector<Coord>& cs) {
  Json a = Json::array();
  for (const auto& c : cs) a.push_back(coord_json(c));
  return a;
}
inline std::vector<Coord> coords_from(const Json& j) {
  std::vector<Coord> out;
  for (const auto& c : j) out.push_back(coord_from(c));
  return out;
}

inline Json minefield_json(const MineField& f) {
  return {{"rows", f.rows()}, {"cols", f.cols()}, {"mines", coords_json(f.mines())}};
}
inline MineField minefield_from(const Json& j) {
  return MineField(j.at("rows").get<int>(), j.at("cols").get<int>(), coords_from(j.at("mines")));
}

/// One string per row, one default-symbol character per cell.
inline Json view_json(const BoardView& v) {
  const auto sym = default_symbols();
  Json rows = Json::array();
  for (int r = 1; r <= v.rows(); ++r) {
    std::string line;
    for (int c = 1; c <= v.cols(); ++c) line += sym.token(v.at({r, c}));
    rows.push_back(line);
  }
  return rows;
}
inline BoardView view_from(const Json& j) {
  const auto sym = default_symbols();
  const int rows = static_cast<int>(j.size());
  if (rows == 0) throw FormatError("board view has no rows");
  const int cols = static_cast<int>(j.at(0).get<std::string>().size());
  BoardView v(rows, cols);
  for (int r = 1; r <= rows; ++r) {
    const auto line = j.at(r - 1).get<std::string>();
    if (static_cast<int>(line.size()) != cols) throw FormatError("ragged board view row " + std::to_string(r));
    for (int c = 1; c <= cols; ++c) {
      const auto cell = sym.cell(std::string(1, line[c - 1]));
      if (!cell) throw FormatError("unknown cell symbol '" + std::string(1, line[c - 1]) + "'");
      v.at({r, c}) = *cell;
    }
  }
  return v;
}

inline Json action_json(const Action& a) { return to_string(a); }
inline Action action_from(const Json& j) { return parse_action(j.get<std::string>()); }

inline const char* fail_cause_name(FailCause c) {
  return c == FailCause::MineTriggered ? "mine_triggered" : "wrong_flag_chord";
}

inline Json feedback_json(const Feedback& fb) {
  Json j = {{"kind", feedback_kind_name(fb.kind)}};
  switch (fb.kind) {
    case Feedback::Kind::BoardUpdated:
    case Feedback::Kind::GameSolved:
      j["revealed"] = coords_json(fb.revealed);
      j["flag_changes"] = coords_json(fb.flag_changes);
      break;
    case Feedback::Kind::GameFailed:
      j["cause"] = fail_cause_name(fb.cause);
      j["cause_at"] = coord_json(fb.cause_at);
      break;
    case Feedback::Kind::Invalid:
      j["invalid"] = invalid_kind_name(fb.invalid);
      j["message"] = fb.message;
      break;
  }
  return j;
}

inline Feedback feedback_from(const Json& j) {
  Feedback fb;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "board_updated" || kind == "game_solved") {
    fb.kind = kind == "board_updated" ? Feedback::Kind::BoardUpdated : Feedback::Kind::GameSolved;
    fb.revealed = coords_from(j.at("revealed"));
    fb.flag_changes = coords_from(j.at("flag_changes"));
  } else if (kind == "game_failed") {
    fb.kind = Feedback::Kind::GameFailed;
    const auto cause = j.at("cause").get<std::string>();
    if (cause != "mine_triggered" && cause != "wrong_flag_chord") throw FormatError("unknown fail cause " + cause);
    fb.cause = cause == "mine_triggered" ? FailCause::MineTriggered : FailCause::WrongFlagChord;
    fb.cause_at = coord_from(j.at("cause_at"));
  } else if (kind == "invalid") {
    fb.kind = Feedback::Kind::Invalid;
    fb.invalid = invalid_kind_from_name(j.at("invalid").get<std::string>());
    fb.message = j.at("message").get<std::string>();
  } else {
    throw FormatError("unknown feedback kind " + kind);
  }
  return fb;
}

inline Json symbols_json(const SymbolMap& s) {
  return {{"unopened", s.unopened}, {"blank", s.blank}, {"flagged", s.flagged}, {"numbers", s.numbers}};
}
inline SymbolMap symbols_from(const Json& j) {
  SymbolMap s;
  s.unopened = j.at("unopened").get<std::string>();
  s.blank = j.at("blank").get<std::string>();
  s.flagged = j.at("flagged").get<std::string>();
  const auto numbers = j.at("numbers").get<std::vector<std::string>>();
  if (numbers.size() != s.numbers.size()) throw FormatError("symbol map needs 8 number tokens");
  std::copy(numbers.begin(), numbers.end(), s.numbers.begin());
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Session logs

inline Json config_json(const SessionConfig& c) {
  Json j;
  j["max_actions"] = c.max_actions;
  j["first_action"] = c.first_action ? Json(to_string(*c.first_action)) : Json(nullptr);
  j["representation"] = format_name(c.representation);
  j["with_indices"] = c.with_indices;
  j["mode"] = mode_name(c.mode);
  j["symbols"] = symbols_json(c.symbols);
  j["obfuscate_prose"] = c.obfuscate_prose;
  j["examples"] = c.examples;
  j["free_invalid_retries"] = c.free_invalid_retries;
  j["transport_attempts"] = c.transport_attempts;
  j["backoff_base_ms"] = c.backoff_base.count();
  return j;
}

inline SessionConfig config_from(const Json& j) {
  SessionConfig c;
  c.max_actions = j.at("max_actions").get<int>();
  if (!j.at("first_action").is_null()) c.first_action = action_from(j.at("first_action"));
  c.representation = format_from_name(j.at("representation").get<std::string>());
  c.with_indices = j.at("with_indices").get<bool>();
  c.mode = mode_from_name(j.at("mode").get<std::string>());
  c.symbols = symbols_from(j.at("symbols"));
  c.obfuscate_prose = j.at("obfuscate_prose").get<bool>();
  c.examples = j.at("examples").get<std::array<bool, 3>>();
  c.free_invalid_retries = j.at("free_invalid_retries").get<bool>();
  c.transport_attempts = j.at("transport_attempts").get<int>();
  c.backoff_base = std::chrono::milliseconds(j.at("backoff_base_ms").get<long long>());
  return c;
}

inline Json turn_json(const Turn& t) {
  Json j;
  j["prompt_or_delta"] = t.prompt_or_delta;
  j["raw_response"] = t.raw_response;
  j["parsed"] = t.parsed ? action_json(*t.parsed) : Json(nullptr);
  j["feedback"] = t.feedback ? feedback_json(*t.feedback) : Json(nullptr);
  j["view_after"] = view_json(t.view_after);
  j["request_body"] = t.request_body;
  j["response_body"] = t.response_body;
  j["prompt_tokens"] = t.prompt_tokens;
  j["completion_tokens"] = t.completion_tokens;
  j["latency_ms"] = t.latency_ms ? Json(*t.latency_ms) : Json(nullptr);
  return j;
}

inline Turn turn_from(const Json& j) {
  Turn t;
  t.prompt_or_delta = j.at("prompt_or_delta").get<std::string>();
  t.raw_response = j.at("raw_response").get<std::string>();
  if (!j.at("parsed").is_null()) t.parsed = action_from(j.at("parsed"));
  if (!j.at("feedback").is_null()) t.feedback = feedback_from(j.at("feedback"));
  t.view_after = view_from(j.at("view_after"));
  t.request_body = j.value("request_body", "");
  t.response_body = j.value("response_body", "");
  t.prompt_tokens = j.value("prompt_tokens", -1);
  t.completion_tokens = j.value("completion_tokens", -1);
  if (j.contains("latency_ms") && !j["latency_ms"].is_null()) t.latency_ms = j["latency_ms"].get<double>();
  return t;
}

inline Json session_json(const SessionLog& log) {
  Json j;
  j["board_id"] = log.board_id;
  j["agent"] = log.agent;
  j["outcome"] = outcome_name(log.outcome);
  j["error"] = log.error;
  j["config"] = config_json(log.config);
  j["field"] = minefield_json(log.field);
  j["first_action"] = action_json(log.first_action);
  j["first_feedback"] = feedback_json(log.first_feedback);
  j["initial_view"] = view_json(log.initial_view);
  Json turns = Json::array();
  for (const auto& t : log.turns) turns.push_back(turn_json(t));
  j["turns"] = std::move(turns);
  return j;
}

inline SessionLog session_from(const Json& j) {
  SessionLog log;
  log.board_id = j.at("board_id").get<std::string>();
  log.agent = j.value("agent", "");
  log.outcome = outcome_from_name(j.at("outcome").get<std::string>());
  log.error = j.value("error", "");
  log.config = config_from(j.at("config"));
  log.field = minefield_from(j.at("field"));
  log.first_action = action_from(j.at("first_action"));
  log.first_feedback = feedback_from(j.at("first_feedback"));
  log.initial_view = view_from(j.at("initial_view"));
  for (const auto& t : j.at("turns")) log.turns.push_back(turn_from(t));
  return log;
}

inline void save_session(const std::filesystem::path& p, const SessionLog& log) {
  write_file(p, session_json(log).dump(2) + "\n");
}

inline SessionLog load_session(const std::filesystem::path& p) {
  try {
    return session_from(Json::parse(read_file(p)));
  } catch (const Json::exception& e) {
    throw FormatError(p.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

/// All *.json session logs in a directory, sorted by file name. Files that are not session
/// logs (run_config.json, report.json) are skipped.
inline std::vector<SessionLog> load_sessions(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<SessionLog> out;
  for (const auto& f : files) {
    Json j;
    try {
      j = Json::parse(read_file(f));
    } catch (const Json::exception& e) {
      throw FormatError(f.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("turns") || !j.contains("field")) continue;
    try {
      out.push_back(session_from(j));
    } catch (const std::exception& e) {
      throw FormatError(f.string() + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Suites: <dir>/manifest.json plus one minefield text file per board.

struct SuiteBoard {
  std::string id;
  MineField field;
};

inline std::string board_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "board_%03zu", index);
  return buf;
}

inline Json suite_manifest(const SuiteSpec& spec, const std::vector<MineField>& boards) {
  Json j;
  j["rows"] = spec.gen.rows;
  j["cols"] = spec.gen.cols;
  j["mines"] = spec.gen.n_mines;
  j["seed"] = spec.gen.seed;
  j["pool"] = spec.pool_size;
  j["keep"] = spec.keep;
  j["min_reveal"] = spec.min_first_reveal;
  j["first_click"] = coord_json(spec.first_click);
  j["safe_cells"] = coords_json(spec.gen.safe_cells);
  Json list = Json::array();
  for (std::size_t i = 0; i < boards.size(); ++i)
    list.push_back({{"id", board_id(i)},
                    {"file", board_id(i) + ".txt"},
                    {"first_reveal", first_reveal_count(boards[i], spec.first_click)}});
  j["boards"] = std::move(list);
  return j;
}

inline void write_suite(const std::filesystem::path& dir, const SuiteSpec& spec, const std::vector<MineField>& boards) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < boards.size(); ++i) write_file(dir / (board_id(i) + ".txt"), write_minefield(boards[i]));
  write_file(dir / "manifest.json", suite_manifest(spec, boards).dump(2) + "\n");
}

inline Json load_suite_manifest(const std::filesystem::path& dir) {
  try {
    return Json::parse(read_file(dir / "manifest.json"));
  } catch (const Json::exception& e) {
    throw FormatError((dir / "manifest.json").string() + ": " + e.what());
  }
}

inline std::vector<SuiteBoard> load_suite(const std::filesystem::path& dir) {
  const auto manifest = load_suite_manifest(dir);
  std::vector<SuiteBoard> out;
  for (const auto& b : manifest.at("boards")) {
    const auto file = dir / b.at("file").get<std::string>();
    try {
      out.push_back({b.at("id").get<std::string>(), read_minefield(read_file(file))});
    } catch (const std::invalid_argument& e) {
      throw FormatError(file.string() + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotated games: <dir>/<id>.txt (minefield) + <id>.history.txt (numbered action list).

inline void write_annotation(const std::filesystem::path& dir, const AnnotatedGame& g) {
  write_file(dir / (g.id + ".txt"), write_minefield(g.field));
  write_file(dir / (g.id + ".history.txt"), render_action_history(g.actions) + "\n");
}

/// Loads every <id>.history.txt in `dir` with its minefield. The minefield is read from
/// `dir`, or from `boards_dir` when given.
inline std::vector<AnnotatedGame> load_annotations(const std::filesystem::path& dir,
                                                   const std::filesystem::path& boards_dir = {}) {
  const std::string suffix = ".history.txt";
  std::vector<std::string> ids;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      ids.push_back(name.substr(0, name.size() - suffix.size()));
  }
  std::sort(ids.begin(), ids.end());
  std::vector<AnnotatedGame> out;
  for (const auto& id : ids) {
    const auto field_dir = boards_dir.empty() ? dir : boards_dir;
    out.push_back({id, read_minefield(read_file(field_dir / (id + ".txt"))),
                   parse_action_history(read_file(dir / (id + suffix)))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Task instances and graded results

inline Json snapshot_json(const Snapshot& s, const SymbolMap& sym = {}) {
  return {{"source_game", s.source_game},
          {"action_index", s.action_index},
          {"view", view_json(s.view)},
          {"table", render(s.view, table_options(sym))},
          {"coordinate", render(s.view, coordinate_options(sym))}};
}

inline Snapshot snapshot_from(const Json& j) {
  return {view_from(j.at("view")), j.at("source_game").get<std::string>(), j.at("action_index").get<int>()};
}

inline Json instances_json(const SampleResult& r) {
  const auto sym = default_symbols();
  Json nav = Json::array(), cnt = Json::array();
  for (std::size_t i = 0; i < r.navigation.size(); ++i) {
    const auto& n = r.navigation[i];
    nav.push_back({{"id", "nav_" + std::to_string(i)},
                   {"snapshot", snapshot_json(n.snapshot)},
                   {"target", coord_json(n.target)},
                   {"gold", sym.token(n.gold)}});
  }
  for (std::size_t i = 0; i < r.counting.size(); ++i) {
    const auto& c = r.counting[i];
    cnt.push_back({{"id", "count_" + std::to_string(i)},
                   {"snapshot", snapshot_json(c.snapshot)},
                   {"target", coord_json(c.target)},
                   {"query", sym.token(c.query)},
                   {"gold", c.gold}});
  }
  return {{"navigation", nav}, {"counting", cnt}, {"warnings", r.warnings}};
}

inline SampleResult instances_from(const Json& j) {
  const auto sym = default_symbols();
  SampleResult r;
  for (const auto& n : j.at("navigation")) {
    const auto gold = sym.cell(n.at("gold").get<std::string>());
    if (!gold) throw FormatError("bad navigation gold");
    r.navigation.push_back({snapshot_from(n.at("snapshot")), coord_from(n.at("target")), *gold});
  }
  for (const auto& c : j.at("counting")) {
    const auto query = sym.cell(c.at("query").get<std::string>());
    if (!query || !is_count_query(*query)) throw FormatError("bad counting query");
    r.counting.push_back({snapshot_from(c.at("snapshot")), coord_from(c.at("target")), *query, c.at("gold").get<int>()});
  }
  r.warnings = j.value("warnings", std::vector<std::string>{});
  return r;
}

}  // namespace msweep
