#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "msweep/engine.hpp"

namespace msweep {

/// Tokens used for each cell state when a board is written as text.
struct SymbolMap {
  std::string unopened = "?";
  std::string blank = ".";
  std::string flagged = "F";
  std::array<std::string, 8> numbers = {"1", "2", "3", "4", "5", "6", "7", "8"};

  const std::string& token(const Cell& c) const {
    switch (c.kind) {
      case Cell::Kind::Unopened: return unopened;
      case Cell::Kind::Flagged: return flagged;
      case Cell::Kind::Blank: return blank;
      case Cell::Kind::Numbered: return numbers.at(static_cast<std::size_t>(c.number - 1));
    }
    return unopened;
  }

  std::optional<Cell> cell(std::string_view tok) const {
    if (tok == unopened) return Cell::unopened();
    if (tok == blank) return Cell::blank();
    if (tok == flagged) return Cell::flagged();
    for (int n = 1; n <= 8; ++n)
      if (tok == numbers[n - 1]) return Cell::numbered(n);
    return std::nullopt;
  }

  /// Throws std::invalid_argument unless all nine tokens are distinct and separator-free.
  void validate() const {
    std::vector<std::string> all = {unopened, blank, flagged};
    all.insert(all.end(), numbers.begin(), numbers.end());
    for (const auto& t : all) {
      if (t.empty()) throw std::invalid_argument("symbol map contains an empty token");
      if (t.find_first_of(",\n\r:()`' \t") != std::string::npos)
        throw std::invalid_argument("symbol map token \"" + t + "\" contains a separator character");
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
      throw std::invalid_argument("symbol map tokens are not pairwise distinct");
  }

  friend bool operator==(const SymbolMap&, const SymbolMap&) = default;
};

inline SymbolMap default_symbols() { return {}; }

/// Numbers as Roman numerals, everything else unchanged.
inline SymbolMap roman_symbols() {
  SymbolMap m;
  m.numbers = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};
  return m;
}

inline std::map<std::string, SymbolMap> variant_symbol_maps() {
  return {{"default", default_symbols()}, {"roman", roman_symbols()}};
}

inline SymbolMap symbol_map_named(const std::string& name) {
  auto maps = variant_symbol_maps();
  auto it = maps.find(name);
  if (it == maps.end()) throw std::invalid_argument("unknown symbol map \"" + name + "\"");
  return it->second;
}

enum class BoardFormat { Table, Coordinate };
enum class QuoteStyle { LatexQuotes, None };

inline const char* format_name(BoardFormat f) { return f == BoardFormat::Table ? "table" : "coordinate"; }

inline BoardFormat format_from_name(const std::string& s) {
  if (s == "table") return BoardFormat::Table;
  if (s == "coordinate" || s == "coord") return BoardFormat::Coordinate;
  throw std::invalid_argument("unknown board format \"" + s + "\"");
}

struct RenderOptions {
  BoardFormat format = BoardFormat::Table;
  bool with_indices = true;  // table only
  QuoteStyle quote_style = QuoteStyle::LatexQuotes;
  SymbolMap symbols;
};

inline RenderOptions table_options(SymbolMap symbols = {}) { return {BoardFormat::Table, true, QuoteStyle::LatexQuotes, std::move(symbols)}; }
inline RenderOptions coordinate_options(SymbolMap symbols = {}) { return {BoardFormat::Coordinate, true, QuoteStyle::None, std::move(symbols)}; }

/// Parse failure with the offending 1-based line number (0 when not line-specific).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string quoted(const std::string& tok, QuoteStyle q) {
  return q == QuoteStyle::LatexQuotes ? "`" + tok + "'" : tok;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur)) {
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = line.find(", ", pos);
    if (next == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 2;
  }
}

}  // namespace detail

/// Table grammar (with indices):
///   header = "1" { ", " col }
///   row    = rowidx { ", " cell }      cell = "`" token "'" | token
/// Rows are separated by "\n"; there is no trailing newline.
inline std::string render_table(const BoardView& view, const RenderOptions& opts) {
  std::string out;
  if (opts.with_indices) {
    for (int c = 1; c <= view.cols(); ++c) {
      if (c > 1) out += ", ";
      out += std::to_string(c);
    }
  }
  for (int r = 1; r <= view.rows(); ++r) {
    if (!out.empty() || r > 1) out += '\n';
    if (opts.with_indices) out += std::to_string(r);
    for (int c = 1; c <= view.cols(); ++c) {
      if (opts.with_indices || c > 1) out += ", ";
      out += detail::quoted(opts.symbols.token(view.at({r, c})), opts.quote_style);
    }
  }
  return out;
}

/// One "(row,col): token" line per cell, row-major, tokens unquoted.
inline std::string render_coordinate(const BoardView& view, const RenderOptions& opts) {
  std::string out;
  for (int r = 1; r <= view.rows(); ++r) {
    for (int c = 1; c <= view.cols(); ++c) {
      if (!out.empty()) out += '\n';
      out += to_string(Coord{r, c}) + ": " + opts.symbols.token(view.at({r, c}));
    }
  }
  return out;
}

inline std::string render(const BoardView& view, const RenderOptions& opts) {
  return opts.format == BoardFormat::Table ? render_table(view, opts) : render_coordinate(view, opts);
}

namespace detail {

inline Cell parse_token(const std::string& field, const RenderOptions& opts, int line) {
  std::string tok = field;
  if (opts.quote_style == QuoteStyle::LatexQuotes) {
    if (tok.size() < 2 || tok.front() != '`' || tok.back() != '\'')
      throw ParseError(line, "expected a `quoted' cell, got \"" + field + "\"");
    tok = tok.substr(1, tok.size() - 2);
  }
  auto cell = opts.symbols.cell(tok);
  if (!cell) throw ParseError(line, "unknown token \"" + tok + "\"");
  return *cell;
}

inline BoardView parse_table(const std::vector<std::string>& lines, const RenderOptions& opts) {
  std::size_t first_row = 0;
  int cols = 0;
  if (opts.with_indices) {
    const auto header = split_fields(lines[0]);
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] != std::to_string(i + 1))
        throw ParseError(1, "header field " + std::to_string(i + 1) + " is \"" + header[i] + "\"");
    cols = static_cast<int>(header.size());
    first_row = 1;
  } else {
    cols = static_cast<int>(split_fields(lines[0]).size());
  }
  const int rows = static_cast<int>(lines.size() - first_row);
  if (rows < 1) throw ParseError(0, "table has no rows");

  BoardView view(rows, cols);
  for (int r = 1; r <= rows; ++r) {
    const int line_no = static_cast<int>(first_row) + r;
    auto fields = split_fields(lines[first_row + r - 1]);
    if (opts.with_indices) {
      if (fields.front() != std::to_string(r))
        throw ParseError(line_no, "expected row index " + std::to_string(r) + ", got \"" + fields.front() + "\"");
      fields.erase(fields.begin());
    }
    if (static_cast<int>(fields.size()) != cols)
      throw ParseError(line_no, "dimension mismatch: expected " + std::to_string(cols) + " cells, got " +
                                    std::to_string(fields.size()));
    for (int c = 1; c <= cols; ++c) view.at({r, c}) = parse_token(fields[c - 1], opts, line_no);
  }
  return view;
}

inline BoardView parse_coordinate(const std::vector<std::string>& lines, const RenderOptions& opts) {
  static const std::regex line_re(R"(^\((\d+),(\d+)\): (\S+)$)");
  std::vector<std::pair<Coord, Cell>> cells;
  int rows = 0, cols = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    std::smatch m;
    if (!std::regex_match(lines[i], m, line_re)) throw ParseError(line_no, "malformed line \"" + lines[i] + "\"");
    const Coord at{std::stoi(m[1]), std::stoi(m[2])};
    if (at.row < 1 || at.col < 1) throw ParseError(line_no, "coordinates are 1-indexed");
    cells.emplace_back(at, parse_token(m[3], opts, line_no));
    rows = std::max(rows, at.row);
    cols = std::max(cols, at.col);
  }
  if (static_cast<long>(cells.size()) != static_cast<long>(rows) * cols)
    throw ParseError(0, "dimension mismatch: " + std::to_string(cells.size()) + " cells listed for a " +
                            std::to_string(rows) + "x" + std::to_string(cols) + " board");
  BoardView view(rows, cols);
  std::vector<bool> seen(cells.size(), false);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& [at, cell] = cells[i];
    const auto idx = static_cast<std::size_t>(at.row - 1) * cols + (at.col - 1);
    if (seen[idx]) throw ParseError(static_cast<int>(i) + 1, "duplicate cell " + to_string(at));
    seen[idx] = true;
    view.at(at) = cell;
  }
  return view;
}

}  // namespace detail

/// Inverse of render() for the same options.
inline BoardView parse_board(const std::string& text, const RenderOptions& opts) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError(0, "empty board text");
  return opts.format == BoardFormat::Table ? detail::parse_table(lines, opts) : detail::parse_coordinate(lines, opts);
}

/// "1. L(5,5)" per line, no trailing newline.
inline std::string render_action_history(const std::vector<Action>& actions) {
  std::string out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i) out += '\n';
    out += std::to_string(i + 1) + ". " + to_string(actions[i]);
  }
  return out;
}

inline std::vector<Action> parse_action_history(const std::string& text) {
  std::vector<Action> out;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const auto dot = lines[i].find(". ");
    if (dot == std::string::npos) throw ParseError(line_no, "expected \"N. K(r,c)\"");
    if (lines[i].substr(0, dot) != std::to_string(out.size() + 1))
      throw ParseError(line_no, "action counter out of sequence");
    try {
      out.push_back(parse_action(lines[i].substr(dot + 2)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

}  // namespace msweep
