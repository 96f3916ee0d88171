// msbench: board generation, understanding tasks, gameplay runs, evaluation, replay and the
// HTTP server behind one binary.

#include <atomic>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "msweep/boardgen.hpp"
#include "msweep/io.hpp"
#include "msweep/metrics.hpp"
#include "msweep/remote_agent.hpp"
#include "msweep/server.hpp"
#include "msweep/session.hpp"
#include "msweep/solver.hpp"
#include "msweep/tasks.hpp"

namespace fs = std::filesystem;
using namespace msweep;

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kGeneration = 3, kTransport = 4, kConsistency = 5 };

struct ExitError : std::runtime_error {
  ExitError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

[[noreturn]] void config_error(const std::string& what) { throw ExitError(kConfig, what); }

struct AgentOptions {
  std::string agent = "builtin:single-point";
  std::string endpoint;
  std::string model;
  bool completion = false;
  std::string api_key_env = "MSWEEP_API_KEY";
  std::string api_key_file;
  int timeout_s = 120;
};

void add_agent_options(CLI::App* cmd, AgentOptions& o, const std::string& default_agent) {
  o.agent = default_agent;
  cmd->add_option("--agent", o.agent, "builtin:<name> or remote")->capture_default_str()->envname("MSWEEP_AGENT");
  cmd->add_option("--endpoint", o.endpoint, "chat-completion URL for remote agents")->envname("MSWEEP_ENDPOINT");
  cmd->add_option("--model", o.model, "model name for remote agents")->envname("MSWEEP_MODEL");
  cmd->add_flag("--completion", o.completion, "send a single prompt instead of a message list");
  cmd->add_option("--api-key-env", o.api_key_env, "environment variable holding the API key")->capture_default_str();
  cmd->add_option("--api-key-file", o.api_key_file, "file holding the API key")->envname("MSWEEP_API_KEY_FILE");
  cmd->add_option("--timeout", o.timeout_s, "remote request timeout in seconds")->capture_default_str();
}

bool is_remote(const AgentOptions& o) { return o.agent == "remote"; }

/// Checks settings and reads the credential before any board is loaded.
RemoteAgentConfig remote_config(const AgentOptions& o) {
  if (o.endpoint.empty()) config_error("remote agent needs --endpoint (or MSWEEP_ENDPOINT)");
  if (o.model.empty()) config_error("remote agent needs --model (or MSWEEP_MODEL)");
  RemoteAgentConfig rc;
  rc.endpoint = o.endpoint;
  rc.model = o.model;
  rc.chat = !o.completion;
  rc.timeout_s = o.timeout_s;
  try {
    rc.api_key = resolve_api_key(o.api_key_env, o.api_key_file);
    RemoteAgent probe(rc);
  } catch (const ConfigError& e) {
    config_error(e.what());
  }
  return rc;
}

Json agent_json(const AgentOptions& o) {
  Json j = {{"agent", o.agent}};
  if (is_remote(o)) {
    j["endpoint"] = o.endpoint;
    j["model"] = o.model;
    j["style"] = o.completion ? "completion" : "chat";
  }
  return j;
}

std::vector<SuiteBoard> load_suite_or_fail(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json")) config_error("no suite at " + dir.string() + " (manifest.json missing)");
  try {
    return load_suite(dir);
  } catch (const std::exception& e) {
    config_error(e.what());
  }
}

/// Deterministic subsample of k boards, kept in suite order.
std::vector<SuiteBoard> subsample(std::vector<SuiteBoard> boards, int k, std::uint64_t seed) {
  if (k <= 0 || k >= static_cast<int>(boards.size())) return boards;
  std::vector<std::size_t> idx(boards.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng = make_rng(seed, 0x5ab5);
  for (int i = 0; i < k; ++i) std::swap(idx[i], idx[i + uniform_below(rng, idx.size() - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<SuiteBoard> out;
  for (auto i : idx) out.push_back(std::move(boards[i]));
  return out;
}

SymbolMap symbols_or_fail(const std::string& name) {
  try {
    return symbol_map_named(name);
  } catch (const std::invalid_argument& e) {
    config_error(e.what());
  }
}

BoardFormat format_or_fail(const std::string& name) {
  try {
    return format_from_name(name);
  } catch (const std::invalid_argument& e) {
    config_error(e.what());
  }
}

// ---------------------------------------------------------------------------
// gen-boards

struct GenOptions {
  int rows = 9, cols = 9, mines = 10, pool = 1000, keep = 100, min_reveal = 10;
  std::uint64_t seed = 7;
  std::string out;
};

int cmd_gen_boards(const GenOptions& o) {
  SuiteSpec spec = default_suite_spec(o.rows, o.cols, o.mines, o.seed);
  spec.pool_size = o.pool;
  spec.keep = o.keep;
  spec.min_first_reveal = o.min_reveal;
  std::vector<MineField> boards;
  try {
    boards = build_suite(spec);
  } catch (const GenerationError& e) {
    throw ExitError(kGeneration, e.what());
  }
  write_suite(o.out, spec, boards);
  std::cout << "wrote " << boards.size() << " boards (" << o.rows << "x" << o.cols << ", " << o.mines
            << " mines, seed " << o.seed << ") to " << o.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// annotate

int cmd_annotate(const std::string& suite_dir, const std::string& out) {
  const auto boards = load_suite_or_fail(suite_dir);
  const auto manifest = load_suite_manifest(suite_dir);
  const Coord first = coord_from(manifest.at("first_click"));
  for (const auto& b : boards) write_annotation(out, {b.id, b.field, autoplay_history(b.field, first)});
  std::cout << "wrote " << boards.size() << " annotated games to " << out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// run-understanding

struct UnderstandingOptions {
  std::string suite, annotations, out;
  int coords = 3;
  std::uint64_t seed = 7;
  std::string repr = "table";
  bool no_indices = false;
  bool nav_example = false;
  bool no_cot = false;
  std::string symbols = "default";
  int limit = 0;
  AgentOptions agent;
};

Json task_block(int correct, int unparseable, int total, Json items) {
  return {{"correct", correct},
          {"unparseable", unparseable},
          {"total", total},
          {"accuracy", total ? round1(100.0 * correct / total) : 0.0},
          {"items", std::move(items)}};
}

int cmd_run_understanding(const UnderstandingOptions& o) {
  std::optional<RemoteAgentConfig> rc;
  if (is_remote(o.agent)) rc = remote_config(o.agent);
  else if (o.agent.agent != "builtin:oracle" && o.agent.agent != "builtin:random")
    config_error("run-understanding agents: builtin:oracle, builtin:random, remote (got " + o.agent.agent + ")");
  const BoardFormat f = format_or_fail(o.repr);
  const SymbolMap sym = symbols_or_fail(o.symbols);

  std::vector<AnnotatedGame> games;
  if (!o.annotations.empty()) {
    games = load_annotations(o.annotations, o.suite.empty() ? fs::path{} : fs::path(o.suite));
  } else {
    if (o.suite.empty()) config_error("run-understanding needs --suite or --annotations");
    const auto manifest = load_suite_manifest(o.suite);
    const Coord first = coord_from(manifest.at("first_click"));
    for (const auto& b : load_suite_or_fail(o.suite)) games.push_back({b.id, b.field, autoplay_history(b.field, first)});
  }

  const auto inst = sample_instances(games, o.coords, o.seed);
  for (const auto& w : inst.warnings) std::cerr << "warning: " << w << "\n";
  fs::create_directories(o.out);
  write_file(fs::path(o.out) / "instances.json", instances_json(inst).dump(2) + "\n");

  std::unique_ptr<RemoteAgent> remote;
  if (rc) remote = std::make_unique<RemoteAgent>(*rc);
  Rng rng = make_rng(o.seed, 0x7a5c);
  auto ask = [&](const std::string& prompt, const std::string& oracle_answer, bool counting) -> std::string {
    if (remote) {
      AgentRequest req;
      req.mode = PromptMode::CH;
      req.prompt = prompt;
      req.messages = {{"user", prompt}};
      for (int attempt = 0;; ++attempt) {
        try {
          return remote->respond(req).text;
        } catch (const TransportError& e) {
          if (attempt == 2) throw ExitError(kTransport, e.what());
          std::this_thread::sleep_for(std::chrono::milliseconds(500 << attempt));
        }
      }
    }
    if (o.agent.agent == "builtin:oracle") return "Answer: " + oracle_answer;
    if (counting) return "Answer: " + std::to_string(uniform_int(rng, 0, 8));
    static const char* states[] = {"?", ".", "F", "1"};
    return "Answer: " + sym.token(*default_symbols().cell(states[uniform_below(rng, 4)]));
  };

  auto nav_opts = TaskPromptOptions::navigation(f);
  nav_opts.with_indices = !o.no_indices;
  nav_opts.with_example = o.nav_example;
  nav_opts.symbols = sym;
  auto cnt_opts = TaskPromptOptions::counting(f);
  cnt_opts.with_indices = !o.no_indices;
  cnt_opts.with_cot = !o.no_cot;
  cnt_opts.symbols = sym;

  const std::size_t n_nav = o.limit > 0 ? std::min<std::size_t>(o.limit, inst.navigation.size()) : inst.navigation.size();
  const std::size_t n_cnt = o.limit > 0 ? std::min<std::size_t>(o.limit, inst.counting.size()) : inst.counting.size();
  int nav_ok = 0, nav_bad = 0, cnt_ok = 0, cnt_bad = 0;
  Json nav_items = Json::array(), cnt_items = Json::array();
  for (std::size_t i = 0; i < n_nav; ++i) {
    const auto& n = inst.navigation[i];
    const auto response = ask(build_task_prompt(n, nav_opts), detail::q(sym.token(n.gold), f), false);
    const auto g = grade(response, n, sym);
    nav_ok += g.correct;
    nav_bad += g.unparseable;
    nav_items.push_back({{"id", "nav_" + std::to_string(i)}, {"target", coord_json(n.target)},
                         {"gold", sym.token(n.gold)}, {"extracted", g.extracted}, {"correct", g.correct},
                         {"unparseable", g.unparseable}, {"response", response}});
  }
  for (std::size_t i = 0; i < n_cnt; ++i) {
    const auto& c = inst.counting[i];
    const auto response = ask(build_task_prompt(c, cnt_opts), std::to_string(c.gold), true);
    const auto g = grade(response, c);
    cnt_ok += g.correct;
    cnt_bad += g.unparseable;
    cnt_items.push_back({{"id", "count_" + std::to_string(i)}, {"target", coord_json(c.target)},
                         {"query", sym.token(c.query)}, {"gold", c.gold}, {"extracted", g.extracted},
                         {"correct", g.correct}, {"unparseable", g.unparseable}, {"response", response}});
  }

  Json variant = {{"representation", format_name(f)}, {"with_indices", !o.no_indices},
                  {"navigation_example", o.nav_example}, {"counting_cot", !o.no_cot}, {"symbols", o.symbols}};
  Json results = {{"variant", variant},
                  {"navigation", task_block(nav_ok, nav_bad, static_cast<int>(n_nav), nav_items)},
                  {"counting", task_block(cnt_ok, cnt_bad, static_cast<int>(n_cnt), cnt_items)}};
  write_file(fs::path(o.out) / "results.json", results.dump(2) + "\n");
  Json run = {{"command", "run-understanding"}, {"suite", o.suite}, {"annotations", o.annotations},
              {"coords", o.coords}, {"seed", o.seed}, {"limit", o.limit}, {"variant", variant},
              {"agent", agent_json(o.agent)}};
  write_file(fs::path(o.out) / "run_config.json", run.dump(2) + "\n");

  std::printf("| Task | %s%s |\n|---|---|\n| Board navigation | %.1f |\n| Neighbor counting | %.1f |\n",
              format_name(f), o.no_indices ? " - ids" : "", results["navigation"]["accuracy"].get<double>(),
              results["counting"]["accuracy"].get<double>());
  return kOk;
}

// ---------------------------------------------------------------------------
// run-gameplay

struct GameplayOptions {
  std::string suite, out;
  std::string mode = "NC";
  std::string repr = "table";
  bool no_indices = false;
  std::string symbols = "default";
  bool obfuscate = false;
  std::vector<int> drop_examples;
  int max_actions = 10;
  bool free_invalid = false;
  int sample = 0;
  std::uint64_t seed = 7;
  int parallel = 1;
  AgentOptions agent;
};

int cmd_run_gameplay(const GameplayOptions& o) {
  std::optional<RemoteAgentConfig> rc;
  if (is_remote(o.agent)) rc = remote_config(o.agent);
  else if (o.agent.agent != "builtin:single-point")
    config_error("run-gameplay agents: builtin:single-point, remote (got " + o.agent.agent + ")");
  if (o.max_actions < 1) config_error("--max-actions must be at least 1");
  if (o.parallel < 1) config_error("--parallel must be at least 1");

  SessionConfig cfg;
  try {
    cfg.mode = mode_from_name(o.mode);
  } catch (const std::invalid_argument& e) {
    config_error(e.what());
  }
  cfg.representation = format_or_fail(o.repr);
  cfg.with_indices = !o.no_indices;
  cfg.symbols = symbols_or_fail(o.symbols);
  cfg.obfuscate_prose = o.obfuscate;
  for (int e : o.drop_examples) {
    if (e < 1 || e > 3) config_error("--drop-example takes 1, 2 or 3");
    cfg.examples[e - 1] = false;
  }
  cfg.max_actions = o.max_actions;
  cfg.free_invalid_retries = o.free_invalid;

  const auto boards = subsample(load_suite_or_fail(o.suite), o.sample, o.seed);
  fs::create_directories(o.out);

  std::atomic<std::size_t> next{0};
  std::atomic<int> transport_failures{0};
  std::mutex print_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < boards.size();) {
      std::unique_ptr<Agent> agent;
      if (rc) agent = std::make_unique<RemoteAgent>(*rc);
      else agent = std::make_unique<SinglePointAgent>();
      const auto log = run_session(boards[i].field, *agent, cfg, boards[i].id);
      save_session(fs::path(o.out) / (boards[i].id + ".json"), log);
      if (log.outcome == SessionOutcome::TransportFailed) ++transport_failures;
      std::lock_guard g(print_mu);
      std::cerr << boards[i].id << ": " << outcome_name(log.outcome) << " after " << log.turns.size() << " turns"
                << (log.error.empty() ? "" : " (" + log.error + ")") << "\n";
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min<int>(o.parallel, static_cast<int>(boards.size())); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Json run = {{"command", "run-gameplay"}, {"suite", o.suite}, {"boards", boards.size()},
              {"sample", o.sample}, {"seed", o.seed}, {"parallel", o.parallel},
              {"session", config_json(cfg)}, {"agent", agent_json(o.agent)}};
  write_file(fs::path(o.out) / "run_config.json", run.dump(2) + "\n");

  std::vector<BoardStats> stats;
  for (const auto& b : boards) stats.push_back(score_session(load_session(fs::path(o.out) / (b.id + ".json"))));
  const auto report = aggregate(stats);
  std::cout << report_markdown(report, o.agent.agent);
  if (transport_failures > 0)
    throw ExitError(kTransport, std::to_string(transport_failures.load()) + " sessions failed on agent transport");
  return kOk;
}

// ---------------------------------------------------------------------------
// evaluate / replay / serve

int cmd_evaluate(const std::string& dir, const std::string& out, int review, const std::string& column) {
  if (!fs::is_directory(dir)) config_error("no log directory at " + dir);
  std::vector<SessionLog> logs;
  try {
    logs = load_sessions(dir);
  } catch (const FormatError& e) {
    throw ExitError(kConsistency, e.what());
  }
  if (logs.empty()) config_error("no session logs in " + dir);
  std::vector<BoardStats> stats;
  try {
    for (const auto& l : logs) stats.push_back(score_session(l));
  } catch (const ReplayMismatch& e) {
    throw ExitError(kConsistency, e.what());
  }
  const auto report = aggregate(stats);
  const auto md = report_markdown(report, column);
  const fs::path target = out.empty() ? fs::path(dir) : fs::path(out);
  write_file(target / "report.json", report_json(report).dump(2) + "\n");
  write_file(target / "report.md", md);
  if (review > 0) write_file(target / "review.md", review_markdown(select_reasoning_chains(logs, review)));
  std::cout << md;
  return kOk;
}

int cmd_replay(const std::string& file, const std::string& repr) {
  SessionLog log;
  try {
    log = load_session(file);
  } catch (const std::exception& e) {
    config_error(e.what());
  }
  const auto opts = format_or_fail(repr) == BoardFormat::Table ? table_options(log.config.symbols)
                                                                : coordinate_options(log.config.symbols);
  std::cout << "Board " << log.board_id << " (" << log.field.rows() << "x" << log.field.cols() << ", "
            << log.field.mines().size() << " mines), agent " << log.agent << ", mode " << mode_name(log.config.mode)
            << "\n\nFirst action " << to_string(log.first_action) << " (issued by the harness)\n"
            << render(log.initial_view, opts) << "\n";
  for (std::size_t i = 0; i < log.turns.size(); ++i) {
    const auto& t = log.turns[i];
    std::cout << "\n--- Turn " << i + 1 << " ---\n" << t.raw_response << "\n";
    if (!t.parsed) {
      std::cout << ">> unrecognized response\n";
      continue;
    }
    std::cout << ">> " << to_string(*t.parsed) << ": " << feedback_text(*t.parsed, *t.feedback, t.view_after) << "\n"
              << render(t.view_after, opts) << "\n";
  }
  std::cout << "\nOutcome: " << outcome_name(log.outcome) << (log.error.empty() ? "" : " (" + log.error + ")") << "\n";
  if (const auto diff = replay_diff(log); !diff.empty()) throw ExitError(kConsistency, "log is not replay-consistent:\n" + diff);
  return kOk;
}

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> suites;
  std::string sessions, data, web;
};

int cmd_serve(const ServeOptions& o) {
  GameStore store(o.data.empty() ? fs::path{} : fs::path(o.data));
  for (const auto& s : o.suites) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) config_error("--suite takes name=dir, got " + s);
    store.add_suite(s.substr(0, eq), load_suite_or_fail(s.substr(eq + 1)));
  }
  if (!o.sessions.empty()) store.set_sessions_dir(o.sessions);
  httplib::Server srv;
  mount_api(srv, store, o.web.empty() ? fs::path{} : fs::path(o.web));
  std::cerr << "listening on http://" << o.host << ":" << o.port << "\n";
  if (!srv.listen(o.host, o.port)) config_error("cannot listen on " + o.host + ":" + std::to_string(o.port));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minesweeper benchmark harness"};
  app.set_config("--config", "", "TOML or INI file with option values");
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen-boards", "generate a qualifying board suite");
  g->add_option("--rows", gen.rows)->capture_default_str();
  g->add_option("--cols", gen.cols)->capture_default_str();
  g->add_option("--mines", gen.mines)->capture_default_str();
  g->add_option("--pool", gen.pool, "candidate boards to draw")->capture_default_str();
  g->add_option("--keep", gen.keep, "qualifying boards to keep")->capture_default_str();
  g->add_option("--min-reveal", gen.min_reveal, "cells the first click must open")->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str()->envname("MSWEEP_SEED");
  g->add_option("--out", gen.out, "suite directory")->required();

  std::string ann_suite, ann_out;
  auto* a = app.add_subcommand("annotate", "write synthetic annotated games for a suite");
  a->add_option("--suite", ann_suite)->required();
  a->add_option("--out", ann_out)->required();

  UnderstandingOptions und;
  auto* u = app.add_subcommand("run-understanding", "board navigation and neighbor counting tasks");
  u->add_option("--suite", und.suite, "suite directory (boards, and annotations when none are given)");
  u->add_option("--annotations", und.annotations, "directory of <id>.history.txt files");
  u->add_option("--coords", und.coords, "cells sampled per board")->capture_default_str();
  u->add_option("--seed", und.seed)->capture_default_str()->envname("MSWEEP_SEED");
  u->add_option("--repr", und.repr, "table or coordinate")->capture_default_str();
  u->add_flag("--no-indices", und.no_indices, "drop row and column labels from tables");
  u->add_flag("--nav-example", und.nav_example, "add a worked example to navigation prompts");
  u->add_flag("--no-cot", und.no_cot, "omit the step-by-step block from counting prompts");
  u->add_option("--symbols", und.symbols, "default or roman")->capture_default_str();
  u->add_option("--limit", und.limit, "grade only the first N instances of each task");
  u->add_option("--out", und.out)->required();
  add_agent_options(u, und.agent, "builtin:oracle");

  GameplayOptions gp;
  auto* r = app.add_subcommand("run-gameplay", "play suite boards with an agent");
  r->add_option("--suite", gp.suite)->required();
  r->add_option("--out", gp.out, "log directory")->required();
  r->add_option("--mode", gp.mode, "NC or CH")->capture_default_str();
  r->add_option("--repr", gp.repr, "table or coordinate")->capture_default_str();
  r->add_flag("--no-indices", gp.no_indices);
  r->add_option("--symbols", gp.symbols, "default or roman")->capture_default_str();
  r->add_flag("--obfuscate", gp.obfuscate, "describe the game as a generic puzzle");
  r->add_option("--drop-example", gp.drop_examples, "leave out prompt example 1, 2 or 3");
  r->add_option("--max-actions", gp.max_actions)->capture_default_str();
  r->add_flag("--free-invalid-retries", gp.free_invalid, "invalid actions do not use up the budget");
  r->add_option("--sample", gp.sample, "play a seeded subsample of N boards");
  r->add_option("--seed", gp.seed)->capture_default_str()->envname("MSWEEP_SEED");
  r->add_option("--parallel", gp.parallel, "concurrent sessions")->capture_default_str();
  add_agent_options(r, gp.agent, "builtin:single-point");

  std::string ev_dir, ev_out, ev_column = "Agent";
  int ev_review = 0;
  auto* e = app.add_subcommand("evaluate", "score session logs");
  e->add_option("logs", ev_dir, "log directory")->required();
  e->add_option("--out", ev_out, "report directory (defaults to the log directory)");
  e->add_option("--review", ev_review, "export the N best reasoning chains to review.md");
  e->add_option("--column", ev_column, "column title in report.md")->capture_default_str();

  std::string rp_file, rp_repr = "table";
  auto* p = app.add_subcommand("replay", "print a stored session turn by turn");
  p->add_option("log", rp_file)->required();
  p->add_option("--repr", rp_repr)->capture_default_str();

  ServeOptions sv;
  auto* s = app.add_subcommand("serve", "run the HTTP API");
  s->add_option("--host", sv.host)->capture_default_str()->envname("MSWEEP_HOST");
  s->add_option("--port", sv.port)->capture_default_str()->envname("MSWEEP_PORT");
  s->add_option("--suite", sv.suites, "name=dir, repeatable");
  s->add_option("--sessions", sv.sessions, "directory of session logs");
  s->add_option("--data", sv.data, "directory for game journals");
  s->add_option("--web", sv.web, "static files served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kConfig;
  }

  try {
    if (*g) return cmd_gen_boards(gen);
    if (*a) return cmd_annotate(ann_suite, ann_out);
    if (*u) return cmd_run_understanding(und);
    if (*r) return cmd_run_gameplay(gp);
    if (*e) return cmd_evaluate(ev_dir, ev_out, ev_review, ev_column);
    if (*p) return cmd_replay(rp_file, rp_repr);
    if (*s) return cmd_serve(sv);
  } catch (const ExitError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return ex.code;
  } catch (const ReplayMismatch& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kConsistency;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kOther;
  }
  return kOther;
}
