#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>

#include <httplib.h>

#include "msweep/boardgen.hpp"
#include "msweep/io.hpp"
#include "msweep/session.hpp"

namespace msweep {

/// An error with an HTTP status and a JSON body.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, Json body)
      : std::runtime_error(body.value("error", std::string("error"))), status_(status), body_(std::move(body)) {}
  ApiError(int status, const std::string& message) : ApiError(status, Json{{"error", message}}) {}
  ApiError(int status, const char* message) : ApiError(status, std::string(message)) {}
  int status() const { return status_; }
  const Json& body() const { return body_; }

 private:
  int status_;
  Json body_;
};

struct GameHandle {
  std::string id;
  GameState state;
  Json created_from;
  std::string annotator;
  bool finalized = false;
  std::mutex mu;
};

/// Holds interactive games. Each game is journaled to <data_dir>/games/<id>.jsonl
/// (create line, then one line per action) so handles survive a restart.
class GameStore {
 public:
  GameStore() = default;
  explicit GameStore(std::filesystem::path data_dir) : data_dir_(std::move(data_dir)) {
    if (!data_dir_.empty()) restore();
  }

  void add_suite(const std::string& name, std::vector<SuiteBoard> boards) {
    std::unique_lock lock(mu_);
    suites_[name] = std::move(boards);
  }
  void set_sessions_dir(std::filesystem::path dir) { sessions_dir_ = std::move(dir); }

  /// {"suite": name, "index": i} or {"rows", "cols", "mines", "seed"}; optional "annotator".
  Json create(const Json& req) {
    MineField field;
    Json from;
    if (req.contains("suite")) {
      const auto name = req.at("suite").get<std::string>();
      const int index = req.value("index", 0);
      std::shared_lock lock(mu_);
      const auto it = suites_.find(name);
      if (it == suites_.end()) throw ApiError(404, "unknown suite \"" + name + "\"");
      if (index < 0 || index >= static_cast<int>(it->second.size()))
        throw ApiError(400, "suite index " + std::to_string(index) + " is out of range [0, " +
                                std::to_string(it->second.size()) + ")");
      field = it->second[index].field;
      from = {{"suite", name}, {"index", index}, {"board", it->second[index].id}};
    } else {
      GenSpec spec;
      spec.rows = req.value("rows", 9);
      spec.cols = req.value("cols", 9);
      spec.n_mines = req.value("mines", 10);
      spec.seed = req.value("seed", std::uint64_t{0});
      if (spec.rows < 1 || spec.cols < 1) throw ApiError(400, "board dimensions must be positive");
      spec.safe_cells = {center_of(spec.rows, spec.cols)};
      try {
        field = generate_minefield(spec);
      } catch (const GenerationError& e) {
        throw ApiError(400, e.what());
      }
      from = {{"rows", spec.rows}, {"cols", spec.cols}, {"mines", spec.n_mines}, {"seed", spec.seed}};
    }
    auto h = std::make_shared<GameHandle>();
    h->id = fresh_id();
    h->state = new_game(field);
    h->created_from = from;
    h->annotator = req.value("annotator", "");
    journal(h->id, {{"type", "create"},
                    {"field", minefield_json(field)},
                    {"created_from", from},
                    {"annotator", h->annotator}});
    {
      std::unique_lock lock(mu_);
      games_[h->id] = h;
    }
    std::lock_guard g(h->mu);
    return view_body(*h, "table", "default");
  }

  Json view(const std::string& id, const std::string& format = "table", const std::string& symbols = "default") {
    auto h = get(id);
    std::lock_guard g(h->mu);
    return view_body(*h, format, symbols);
  }

  /// Applies one action. Invalid actions answer 422 with the exact feedback text, actions on
  /// a finished game 409.
  Json act(const std::string& id, const Action& a) {
    auto h = get(id);
    std::lock_guard g(h->mu);
    if (h->state.status.terminal()) {
      throw ApiError(409, Json{{"error", "game is already over"}, {"status", status_json(h->state)}});
    }
    const Feedback fb = apply_action(h->state, a);
    journal(h->id, {{"type", "action"}, {"action", to_string(a)}});
    Json body = view_body(*h, "table", "default");
    body["action"] = to_string(a);
    body["feedback"] = feedback_json(fb);
    body["feedback_text"] = feedback_text(a, fb, h->state.view);
    if (fb.kind == Feedback::Kind::Invalid) {
      body["error"] = fb.message;
      throw ApiError(422, body);
    }
    return body;
  }

  Json finalize(const std::string& id) {
    auto h = get(id);
    std::lock_guard g(h->mu);
    if (!h->finalized) {
      h->finalized = true;
      if (h->state.status.in_progress()) abort_game(h->state, "finalized before the game ended");
      journal(h->id, {{"type", "finalize"}});
    }
    return view_body(*h, "table", "default");
  }

  /// Numbered action history plus the minefield file; only for finished or finalized games.
  Json export_annotation(const std::string& id) {
    auto h = get(id);
    std::lock_guard g(h->mu);
    if (h->state.status.in_progress())
      throw ApiError(409, "game " + id + " is still in progress; finish or finalize it first");
    std::vector<Action> actions;
    for (const auto& ap : h->state.applied) actions.push_back(ap.action);
    const bool complete = h->state.status.kind == GameStatus::Kind::Solved ||
                          h->state.status.kind == GameStatus::Kind::Failed;
    return {{"id", h->id},
            {"history", render_action_history(actions) + "\n"},
            {"board", write_minefield(h->state.field)},
            {"complete", complete},
            {"status", status_json(h->state)},
            {"annotator", h->annotator}};
  }

  Json suites() const {
    std::shared_lock lock(mu_);
    Json out = Json::array();
    for (const auto& [name, boards] : suites_) {
      Json s = {{"name", name}, {"count", boards.size()}};
      if (!boards.empty()) {
        s["rows"] = boards[0].field.rows();
        s["cols"] = boards[0].field.cols();
        s["mines"] = boards[0].field.mines().size();
      }
      out.push_back(s);
    }
    return out;
  }

  Json sessions() const {
    Json out = Json::array();
    if (sessions_dir_.empty() || !std::filesystem::exists(sessions_dir_)) return out;
    for (const auto& log : load_sessions(sessions_dir_))
      out.push_back({{"name", log.board_id},
                     {"agent", log.agent},
                     {"outcome", outcome_name(log.outcome)},
                     {"turns", log.turns.size()}});
    return out;
  }

  Json session(const std::string& name) const {
    if (sessions_dir_.empty()) throw ApiError(404, "no session directory configured");
    if (name.find_first_of("/\\") != std::string::npos || name.find("..") != std::string::npos)
      throw ApiError(400, "bad session name");
    for (const auto& log : load_sessions(sessions_dir_))
      if (log.board_id == name) return session_json(log);
    throw ApiError(404, "unknown session \"" + name + "\"");
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return games_.size();
  }

 private:
  std::shared_ptr<GameHandle> get(const std::string& id) const {
    std::shared_lock lock(mu_);
    const auto it = games_.find(id);
    if (it == games_.end()) throw ApiError(404, "unknown game \"" + id + "\"");
    return it->second;
  }

  static Json status_json(const GameState& s) {
    Json j = {{"kind", status_name(s.status.kind)}};
    if (s.status.kind == GameStatus::Kind::Failed) {
      j["cause"] = fail_cause_name(s.status.cause);
      j["at"] = coord_json(s.status.at);
    }
    if (s.status.kind == GameStatus::Kind::Aborted) j["reason"] = s.status.reason;
    return j;
  }

  // Never includes the minefield.
  static Json view_body(const GameHandle& h, const std::string& format, const std::string& symbols) {
    BoardFormat f;
    SymbolMap sym;
    try {
      f = format_from_name(format);
      sym = symbol_map_named(symbols);
    } catch (const std::invalid_argument& e) {
      throw ApiError(400, e.what());
    }
    return {{"id", h.id},
            {"rows", h.state.view.rows()},
            {"cols", h.state.view.cols()},
            {"status", status_json(h.state)},
            {"actions", h.state.applied.size()},
            {"first_action", to_string(h.state.required_first)},
            {"format", format_name(f)},
            {"board", render(h.state.view, f == BoardFormat::Table ? table_options(sym) : coordinate_options(sym))},
            {"renders",
             {{"table", render(h.state.view, table_options(sym))},
              {"coordinate", render(h.state.view, coordinate_options(sym))}}},
            {"view", view_json(h.state.view)},
            {"annotator", h.annotator},
            {"finalized", h.finalized}};
  }

  std::string fresh_id() {
    std::lock_guard g(rng_mu_);
    static const char* hex = "0123456789abcdef";
    for (;;) {
      std::string id;
      for (int i = 0; i < 16; ++i) id += hex[rng_() & 15];
      std::shared_lock lock(mu_);
      if (!games_.count(id)) return id;
    }
  }

  void journal(const std::string& id, const Json& line) {
    if (data_dir_.empty()) return;
    const auto dir = data_dir_ / "games";
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / (id + ".jsonl"), std::ios::app);
    out << line.dump() << "\n";
  }

  void restore() {
    const auto dir = data_dir_ / "games";
    if (!std::filesystem::exists(dir)) return;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      if (e.path().extension() != ".jsonl") continue;
      std::ifstream in(e.path());
      std::string line;
      std::shared_ptr<GameHandle> h;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = Json::parse(line);
        const auto type = j.at("type").get<std::string>();
        if (type == "create") {
          h = std::make_shared<GameHandle>();
          h->id = e.path().stem().string();
          h->state = new_game(minefield_from(j.at("field")));
          h->created_from = j.at("created_from");
          h->annotator = j.value("annotator", "");
        } else if (h && type == "action" && h->state.status.in_progress()) {
          apply_action(h->state, parse_action(j.at("action").get<std::string>()));
        } else if (h && type == "finalize") {
          h->finalized = true;
          if (h->state.status.in_progress()) abort_game(h->state, "finalized before the game ended");
        }
      }
      if (h) games_[h->id] = h;
    }
  }

  std::filesystem::path data_dir_;
  std::filesystem::path sessions_dir_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<GameHandle>> games_;
  std::map<std::string, std::vector<SuiteBoard>> suites_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_{std::random_device{}()};
};

namespace detail {

inline void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    send_json(res, 200, f());
  } catch (const ApiError& e) {
    send_json(res, e.status(), e.body());
  } catch (const Json::exception& e) {
    send_json(res, 400, Json{{"error", std::string("malformed JSON: ") + e.what()}});
  } catch (const std::exception& e) {
    send_json(res, 500, Json{{"error", e.what()}});
  }
}

inline Action action_from_body(const Json& j) {
  if (j.contains("action")) {
    try {
      return parse_action(j.at("action").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ApiError(400, e.what());
    }
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind.size() != 1 || std::string("LRM").find(kind[0]) == std::string::npos)
    throw ApiError(400, "action kind must be L, R or M");
  return parse_action(kind + "(" + std::to_string(j.at("row").get<int>()) + "," +
                      std::to_string(j.at("col").get<int>()) + ")");
}

inline std::string param(const httplib::Request& req, const char* key, const char* fallback) {
  return req.has_param(key) ? req.get_param_value(key) : fallback;
}

}  // namespace detail

/// Registers the /api routes on `srv`; serves `static_dir` at / when given.
inline void mount_api(httplib::Server& srv, GameStore& store, const std::filesystem::path& static_dir = {}) {
  using detail::guarded;
  srv.Post("/api/games", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return store.create(req.body.empty() ? Json::object() : Json::parse(req.body)); });
    if (res.status == 200) res.status = 201;
  });
  srv.Get(R"(/api/games/([0-9a-f]+))", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      return store.view(req.matches[1], detail::param(req, "format", "table"), detail::param(req, "symbols", "default"));
    });
  });
  srv.Post(R"(/api/games/([0-9a-f]+)/actions)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return store.act(req.matches[1], detail::action_from_body(Json::parse(req.body))); });
  });
  srv.Post(R"(/api/games/([0-9a-f]+)/finalize)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return store.finalize(req.matches[1]); });
  });
  srv.Get(R"(/api/games/([0-9a-f]+)/export)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return store.export_annotation(req.matches[1]); });
  });
  srv.Get("/api/suites", [&](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return store.suites(); });
  });
  srv.Get("/api/sessions", [&](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return store.sessions(); });
  });
  srv.Get(R"(/api/sessions/([A-Za-z0-9_.-]+))", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return store.session(req.matches[1]); });
  });
  if (!static_dir.empty()) srv.set_mount_point("/", static_dir.string());
}

}  // namespace msweep
