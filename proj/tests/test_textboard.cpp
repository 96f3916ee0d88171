#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "msweep/boardgen.hpp"
#include "msweep/rng.hpp"
#include "msweep/textboard.hpp"

using namespace msweep;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BoardView random_view(Rng& rng) {
  BoardView v(uniform_int(rng, 1, 9), uniform_int(rng, 1, 9));
  for (int r = 1; r <= v.rows(); ++r)
    for (int c = 1; c <= v.cols(); ++c) {
      const int k = uniform_int(rng, 0, 10);
      v.at({r, c}) = k == 0 ? Cell::unopened() : k == 1 ? Cell::flagged() : k == 2 ? Cell::blank() : Cell::numbered(k - 2);
    }
  return v;
}

BoardView seed1_midgame() {
  auto field = read_minefield(slurp(MSWEEP_FIXTURES "/boardgen/seed1_9x9_10.txt"));
  auto s = new_game(field);
  apply_action(s, Action::left(5, 5));
  apply_action(s, Action::left(4, 8));
  apply_action(s, Action::right(6, 5));
  return s.view;
}

}  // namespace

TEST(RenderTable, OneByOne) {
  BoardView v(1, 1);
  EXPECT_EQ(render_table(v, table_options()), "1\n1, `?'");
  auto opts = table_options();
  opts.with_indices = false;
  EXPECT_EQ(render_table(v, opts), "`?'");
}

TEST(RenderTable, SmallGrid) {
  BoardView v(2, 3);
  v.at({1, 2}) = Cell::flagged();
  v.at({2, 1}) = Cell::blank();
  v.at({2, 3}) = Cell::numbered(3);
  EXPECT_EQ(render_table(v, table_options()), "1, 2, 3\n1, `?', `F', `?'\n2, `.', `?', `3'");
  auto plain = table_options();
  plain.quote_style = QuoteStyle::None;
  plain.with_indices = false;
  EXPECT_EQ(render_table(v, plain), "?, F, ?\n., ?, 3");
}

TEST(RenderTable, NineByNineGolden) {
  const auto text = render_table(seed1_midgame(), table_options());
  EXPECT_EQ(text + "\n", slurp(MSWEEP_FIXTURES "/textboard/seed1_midgame_table.txt"));
  EXPECT_NE(text.find("`.'"), std::string::npos);
  EXPECT_NE(text.find("`F'"), std::string::npos);
  EXPECT_NE(text.find("`?'"), std::string::npos);
}

TEST(RenderCoordinate, Basics) {
  EXPECT_EQ(render_coordinate(BoardView(1, 1), coordinate_options()), "(1,1): ?");
  BoardView v(1, 2);
  v.at({1, 1}) = Cell::blank();
  v.at({1, 2}) = Cell::numbered(1);
  EXPECT_EQ(render_coordinate(v, coordinate_options()), "(1,1): .\n(1,2): 1");
  const auto full = render_coordinate(seed1_midgame(), coordinate_options());
  EXPECT_EQ(std::count(full.begin(), full.end(), '\n') + 1, 81);
  EXPECT_EQ(full + "\n", slurp(MSWEEP_FIXTURES "/textboard/seed1_midgame_coordinate.txt"));
}

TEST(ParseBoard, Errors) {
  try {
    parse_board("1, 2\n1, `?', `Z'", table_options());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("\"Z\""), std::string::npos);
  }
  EXPECT_THROW(parse_board("1, 2\n1, `?'", table_options()), ParseError);
  EXPECT_THROW(parse_board("1, 2\n2, `?', `?'", table_options()), ParseError);
  EXPECT_THROW(parse_board("", table_options()), ParseError);
  // 3x3 listing missing (2,2).
  BoardView v(3, 3);
  auto text = render_coordinate(v, coordinate_options());
  text.erase(text.find("(2,2): ?\n"), 9);
  try {
    parse_board(text, coordinate_options());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("dimension"), std::string::npos);
  }
  EXPECT_THROW(parse_board("(1,1): ?\n(1,1): ?", coordinate_options()), ParseError);
  EXPECT_THROW(parse_board("(1,1) ?", coordinate_options()), ParseError);
}

TEST(ParseBoard, AcceptsTrailingNewlineAndCrLf) {
  BoardView v(2, 2);
  v.at({2, 2}) = Cell::numbered(2);
  EXPECT_EQ(parse_board(render_table(v, table_options()) + "\n", table_options()), v);
  auto crlf = render_coordinate(v, coordinate_options());
  for (std::size_t p = crlf.find('\n'); p != std::string::npos; p = crlf.find('\n', p + 2)) crlf.insert(p, "\r");
  EXPECT_EQ(parse_board(crlf, coordinate_options()), v);
}

// Round trip over formats x symbol maps x index/quote settings.
TEST(ParseBoard, FuzzRoundTrip) {
  Rng rng = make_rng(77);
  for (int i = 0; i < 2000; ++i) {
    const auto v = random_view(rng);
    for (const auto& [name, symbols] : variant_symbol_maps()) {
      for (bool indices : {true, false}) {
        auto t = table_options(symbols);
        t.with_indices = indices;
        t.quote_style = i % 2 ? QuoteStyle::LatexQuotes : QuoteStyle::None;
        ASSERT_EQ(parse_board(render(v, t), t), v) << name;
      }
      const auto c = coordinate_options(symbols);
      const auto text = render(v, c);
      ASSERT_EQ(parse_board(text, c), v);
      ASSERT_EQ(std::count(text.begin(), text.end(), '\n') + 1, v.rows() * v.cols());
    }
  }
}

TEST(SymbolMaps, Roman) {
  const auto roman = roman_symbols();
  EXPECT_EQ(roman.token(Cell::numbered(1)), "I");
  EXPECT_EQ(roman.token(Cell::numbered(4)), "IV");
  EXPECT_EQ(roman.token(Cell::numbered(8)), "VIII");
  EXPECT_EQ(roman.token(Cell::unopened()), "?");
  EXPECT_EQ(default_symbols().token(Cell::numbered(7)), "7");
  EXPECT_NO_THROW(roman.validate());
  EXPECT_NO_THROW(default_symbols().validate());

  SymbolMap clash;
  clash.flagged = "1";
  EXPECT_THROW(clash.validate(), std::invalid_argument);
  SymbolMap sep;
  sep.blank = ",";
  EXPECT_THROW(sep.validate(), std::invalid_argument);
}

TEST(SymbolMaps, RomanIsSemanticallyIdentical) {
  const auto v = seed1_midgame();
  const auto roman_table = table_options(roman_symbols());
  EXPECT_EQ(parse_board(render(v, roman_table), roman_table), v);
  EXPECT_NE(render(v, roman_table), render(v, table_options()));
}

TEST(ActionHistory, Format) {
  EXPECT_EQ(render_action_history({Action::left(5, 5)}), "1. L(5,5)");
  EXPECT_EQ(render_action_history({}), "");
  const std::vector<Action> two = {Action::left(3, 3), Action::right(2, 2)};
  EXPECT_EQ(render_action_history(two), "1. L(3,3)\n2. R(2,2)");
  EXPECT_EQ(parse_action_history(render_action_history(two) + "\n"), two);
  EXPECT_THROW(parse_action_history("2. L(3,3)"), ParseError);
  EXPECT_THROW(parse_action_history("1. F(3,3)"), ParseError);
}
