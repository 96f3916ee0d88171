#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "msweep/boardgen.hpp"
#include "msweep/session.hpp"

using namespace msweep;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

SessionConfig fast_config() {
  SessionConfig cfg;
  cfg.backoff_base = std::chrono::milliseconds(0);
  return cfg;
}

MineField winning_field() { return read_minefield(slurp(MSWEEP_FIXTURES "/session/winning_5x5_board.txt")); }
std::vector<Action> winning_history() {
  return parse_action_history(slurp(MSWEEP_FIXTURES "/session/winning_5x5_history.txt"));
}

// Every logged feedback must equal a fresh engine run over the logged actions.
void expect_replay_consistent(const SessionLog& log) {
  GameState s = new_game(log.field, log.first_action);
  EXPECT_EQ(apply_action(s, log.first_action), log.first_feedback);
  EXPECT_EQ(s.view, log.initial_view);
  for (const auto& t : log.turns) {
    if (!t.parsed) {
      EXPECT_EQ(t.view_after, s.view);
      continue;
    }
    EXPECT_EQ(apply_action(s, *t.parsed), *t.feedback);
    EXPECT_EQ(s.view, t.view_after);
  }
}

class RecordingAgent : public Agent {
 public:
  explicit RecordingAgent(std::vector<std::string> replies) : inner_(std::move(replies)) {}
  AgentReply respond(const AgentRequest& req) override {
    seen.push_back(req);
    return inner_.respond(req);
  }
  std::string name() const override { return "recording"; }
  std::vector<AgentRequest> seen;

 private:
  ScriptedAgent inner_;
};

}  // namespace

TEST(ExtractAction, Examples) {
  EXPECT_EQ(extract_action("blah\nACTION: R(1,2)"), Action::right(1, 2));
  EXPECT_EQ(extract_action("F(3,1)"), std::nullopt);
  EXPECT_EQ(extract_action("I will click L(2,3) then maybe L(4,4). ACTION: L(4,4)"), Action::left(4, 4));
  EXPECT_EQ(extract_action("hello"), std::nullopt);
  EXPECT_EQ(extract_action(""), std::nullopt);
}

TEST(ExtractAction, MarkerAndWhitespaceRules) {
  EXPECT_EQ(extract_action("ACTION: L(1,1)\nreconsidering... action : M( 2 , 3 ) or R(1,1)"), Action::middle(2, 3));
  EXPECT_EQ(extract_action("L(1,1) looks good but R(2,2) is safer"), Action::right(2, 2));
  EXPECT_EQ(extract_action("ACTION: F(3,1)"), std::nullopt);
  EXPECT_EQ(extract_action("ACTION: nothing here"), std::nullopt);
  EXPECT_EQ(extract_action("**ACTION: L(0,10)**"), Action::left(0, 10));
  EXPECT_EQ(extract_action("ACTION:L(5,5)"), Action::left(5, 5));
  EXPECT_EQ(extract_action("CALL(2,2)"), std::nullopt);
}

TEST(InitialPrompt, FiveByFiveMentionsCenter) {
  const auto f = winning_field();
  auto s = new_game(f);
  apply_action(s, Action::left(3, 3));
  const auto p = build_initial_prompt(f, s.view, fast_config());
  EXPECT_NE(p.find("L(3,3)"), std::string::npos);
  EXPECT_NE(p.find("ACTION: "), std::string::npos);
  EXPECT_NE(p.find("Do not repeat actions"), std::string::npos);
  EXPECT_NE(p.find("Example 1:"), std::string::npos);
  EXPECT_NE(p.find("ACTION: L(2,3)"), std::string::npos);
  EXPECT_NE(p.find(render(s.view, table_options())), std::string::npos);
  EXPECT_NE(p.find("Minesweeper"), std::string::npos);
}

TEST(InitialPrompt, ObfuscationRemovesGameWords) {
  const auto f = winning_field();
  auto s = new_game(f);
  apply_action(s, Action::left(3, 3));
  for (auto repr : {BoardFormat::Table, BoardFormat::Coordinate}) {
    auto cfg = fast_config();
    cfg.obfuscate_prose = true;
    cfg.representation = repr;
    const auto p = lower(build_initial_prompt(f, s.view, cfg));
    EXPECT_EQ(p.find("minesweeper"), std::string::npos);
    EXPECT_EQ(p.find("mine"), std::string::npos);
    EXPECT_NE(p.find("thorn"), std::string::npos);
    EXPECT_EQ(p.find("click"), std::string::npos);
  }
  // Relayed feedback is obfuscated too.
  auto cfg = fast_config();
  cfg.obfuscate_prose = true;
  GameState g = new_game(f);
  const auto fb = apply_action(g, Action::middle(1, 1));
  const auto msg = lower(build_turn_message(Action::middle(1, 1), fb, g.view, cfg));
  EXPECT_EQ(msg.find("mine"), std::string::npos);
  EXPECT_NE(msg.find("please begin by using action l on the center cell."), std::string::npos);
}

TEST(InitialPrompt, ExampleToggle) {
  const auto f = winning_field();
  BoardView v(5, 5);
  auto cfg = fast_config();
  cfg.examples[0] = false;
  const auto p = build_initial_prompt(f, v, cfg);
  EXPECT_EQ(p.find("ACTION: L(2,3)"), std::string::npos);
  EXPECT_NE(p.find("ACTION: R(1,1)"), std::string::npos);
  EXPECT_NE(p.find("ACTION: M(1,2)"), std::string::npos);
  EXPECT_NE(p.find("Example 1:"), std::string::npos);
  EXPECT_EQ(p.find("Example 3:"), std::string::npos);
  cfg.examples = {false, false, false};
  EXPECT_EQ(build_initial_prompt(f, v, cfg).find("Example"), std::string::npos);
}

TEST(Context, NcGrowsByTwoPerTurn) {
  RecordingAgent agent({"ACTION: R(1,1)", "ACTION: R(1,1)", "ACTION: L(5,5)", "ACTION: R(5,1)"});
  auto cfg = fast_config();
  cfg.max_actions = 4;
  const auto log = run_session(winning_field(), agent, cfg);
  ASSERT_EQ(agent.seen.size(), 4u);
  for (std::size_t i = 0; i < agent.seen.size(); ++i) {
    EXPECT_EQ(agent.seen[i].messages.size(), 1 + 2 * i);
    EXPECT_EQ(agent.seen[i].messages.back().role, "user");
    EXPECT_EQ(agent.seen[i].mode, PromptMode::NC);
  }
  EXPECT_EQ(agent.seen[3].messages[1].content, "ACTION: R(1,1)");
  EXPECT_EQ(log.outcome, SessionOutcome::Exhausted);
}

TEST(Context, ChOnePromptWithHistoryLines) {
  RecordingAgent agent({"ACTION: R(1,4)", "ACTION: M(4,4)", "ACTION: L(1,5)", "ACTION: R(5,1)"});
  auto cfg = fast_config();
  cfg.mode = PromptMode::CH;
  const auto log = run_session(winning_field(), agent, cfg);
  ASSERT_EQ(agent.seen.size(), 5u);  // the fifth reply is empty and aborts
  EXPECT_EQ(log.outcome, SessionOutcome::AbortedUnrecognizable);
  const auto& last = agent.seen[3];
  ASSERT_EQ(last.messages.size(), 1u);
  EXPECT_EQ(last.prompt, last.messages[0].content);
  const std::string history =
      "Action history:\n"
      "1. R(1,4) → Flag placed at (1,4).\n"
      "2. M(4,4) → Error: No flagged cells detected nearby. Flag adjacent mines before middle-clicking.\n"
      "3. L(1,5) → Board updated. 1 cell was opened.\n"
      "\nCurrent board:\n";
  EXPECT_NE(last.prompt.find(history), std::string::npos) << last.prompt;
  EXPECT_NE(agent.seen[0].prompt.find("Action history: no actions taken yet."), std::string::npos);
}

TEST(Context, ModesDriveIdenticalTrajectories) {
  const std::vector<std::string> replies = {"ACTION: R(1,4)", "ACTION: L(3,3)", "ACTION: M(2,4)", "ACTION: L(1,5)",
                                            "ACTION: R(5,4)"};
  auto cfg = fast_config();
  ScriptedAgent nc(replies);
  const auto a = run_session(winning_field(), nc, cfg);
  cfg.mode = PromptMode::CH;
  ScriptedAgent ch(replies);
  const auto b = run_session(winning_field(), ch, cfg);
  ASSERT_EQ(a.turns.size(), b.turns.size());
  for (std::size_t i = 0; i < a.turns.size(); ++i) {
    EXPECT_EQ(a.turns[i].feedback, b.turns[i].feedback);
    EXPECT_EQ(a.turns[i].view_after, b.turns[i].view_after);
  }
  EXPECT_EQ(a.outcome, b.outcome);
}

TEST(RunSession, ScriptedWinningHistorySolves) {
  const auto history = winning_history();
  ScriptedAgent agent = ScriptedAgent::from_actions({history.begin() + 1, history.end()});
  const auto log = run_session(winning_field(), agent, fast_config(), "win");
  EXPECT_EQ(log.outcome, SessionOutcome::Solved);
  EXPECT_EQ(all_actions(log), history);
  expect_replay_consistent(log);
  EXPECT_TRUE(is_solved(log.turns.back().view_after, log.field));
}

TEST(RunSession, HelloAbortsAfterOneTurn) {
  FunctionAgent agent("hello", [](const AgentRequest&) { return std::string("hello"); });
  const auto log = run_session(winning_field(), agent, fast_config());
  EXPECT_EQ(log.outcome, SessionOutcome::AbortedUnrecognizable);
  ASSERT_EQ(log.turns.size(), 1u);
  EXPECT_FALSE(log.turns[0].parsed);
  EXPECT_FALSE(log.turns[0].feedback);
}

TEST(RunSession, RepeaterExhaustsAtCap) {
  FunctionAgent agent("repeat", [](const AgentRequest&) { return std::string("ACTION: L(3,3)"); });
  const auto log = run_session(winning_field(), agent, fast_config());
  EXPECT_EQ(log.outcome, SessionOutcome::Exhausted);
  ASSERT_EQ(log.turns.size(), 10u);
  for (const auto& t : log.turns) {
    ASSERT_TRUE(t.feedback);
    EXPECT_EQ(t.feedback->kind, Feedback::Kind::Invalid);
  }
  expect_replay_consistent(log);
}

TEST(RunSession, InvalidFeedbackIsRelayed) {
  RecordingAgent agent({"ACTION: L(9,9)", "ACTION: R(9,9)"});
  auto cfg = fast_config();
  cfg.max_actions = 2;
  run_session(winning_field(), agent, cfg);
  ASSERT_EQ(agent.seen.size(), 2u);
  EXPECT_EQ(agent.seen[1].messages.back().content.rfind(
                "Invalid Coordinates! Please make sure your coordinate are within [1, 5] for rows and [1, 5] for "
                "columns.\n\nThe board is unchanged:\n",
                0),
            0u);
}

TEST(RunSession, FreeInvalidRetries) {
  FunctionAgent agent("repeat", [](const AgentRequest&) { return std::string("ACTION: L(3,3)"); });
  auto cfg = fast_config();
  cfg.free_invalid_retries = true;
  const auto log = run_session(winning_field(), agent, cfg);
  EXPECT_EQ(log.outcome, SessionOutcome::Exhausted);
  EXPECT_EQ(log.turns.size(), 50u);  // hard cap
  cfg.max_actions = 0;
  EXPECT_THROW(run_session(winning_field(), agent, cfg), std::invalid_argument);
}

TEST(RunSession, FirstMoveEndsGame) {
  // Single mine in a corner: the center click opens everything.
  const MineField f(5, 5, {{1, 1}});
  ScriptedAgent agent({});
  const auto log = run_session(f, agent, fast_config());
  EXPECT_EQ(log.outcome, SessionOutcome::Solved);
  EXPECT_TRUE(log.turns.empty());
}

namespace {

class FlakyAgent : public Agent {
 public:
  explicit FlakyAgent(int failures) : failures_(failures) {}
  AgentReply respond(const AgentRequest&) override {
    ++calls;
    if (failures_-- > 0) throw TransportError("connection refused");
    return {"ACTION: R(1,1)"};
  }
  std::string name() const override { return "flaky"; }
  bool remote() const override { return true; }
  int calls = 0;

 private:
  int failures_;
};

}  // namespace

TEST(RunSession, TransportRetries) {
  auto cfg = fast_config();
  cfg.max_actions = 1;
  FlakyAgent recovers(2);
  const auto ok = run_session(winning_field(), recovers, cfg);
  EXPECT_EQ(recovers.calls, 3);
  EXPECT_EQ(ok.outcome, SessionOutcome::Exhausted);
  ASSERT_EQ(ok.turns.size(), 1u);
  EXPECT_TRUE(ok.turns[0].latency_ms);

  cfg.max_actions = 10;
  FlakyAgent dead(100);
  const auto failed = run_session(winning_field(), dead, cfg);
  EXPECT_EQ(dead.calls, 3);
  EXPECT_EQ(failed.outcome, SessionOutcome::TransportFailed);
  EXPECT_NE(failed.error.find("connection refused"), std::string::npos);
  EXPECT_TRUE(failed.turns.empty());
}

TEST(SinglePoint, RuleMovesNeverInvalid) {
  const auto fields = build_suite(default_suite_spec(9, 9, 10, 7));
  ASSERT_EQ(fields.size(), 100u);
  for (const auto& f : fields) {
    SinglePointAgent agent;
    auto cfg = fast_config();
    const auto log = run_session(f, agent, cfg);
    expect_replay_consistent(log);
    BoardView before = log.initial_view;
    for (const auto& t : log.turns) {
      ASSERT_TRUE(t.parsed);
      if (single_point_move(before)) EXPECT_NE(t.feedback->kind, Feedback::Kind::Invalid) << to_string(*t.parsed);
      before = t.view_after;
    }
  }
}

TEST(SinglePoint, Examples) {
  BoardView w(2, 2);
  w.at({1, 1}) = Cell::numbered(1);
  w.at({1, 2}) = Cell::numbered(1);
  w.at({2, 1}) = Cell::numbered(1);
  EXPECT_EQ(single_point_agent(w), Action::right(2, 2));
  BoardView x(2, 3);
  x.at({1, 1}) = Cell::flagged();
  x.at({1, 2}) = Cell::numbered(1);
  EXPECT_EQ(single_point_agent(x), Action::middle(1, 2));
  EXPECT_EQ(single_point_agent(BoardView(2, 2)), Action::right(1, 1));
}
