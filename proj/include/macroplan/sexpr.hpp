#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace macroplan {

// Raised for malformed input; carries a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

// A node of a parsed s-expression. Atoms are lowercased on read since PDDL
// identifiers are case-insensitive.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 0;
  int column = 0;

  bool is_atom() const noexcept { return !is_list; }
  bool is_atom(std::string_view s) const noexcept { return !is_list && atom == s; }
  std::size_t size() const noexcept { return items.size(); }
  const SExpr& operator[](std::size_t i) const { return items.at(i); }

  // Head keyword of a list, or empty.
  std::string_view head() const noexcept {
    if (!is_list || items.empty() || items.front().is_list) return {};
    return items.front().atom;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line, column); }
};

namespace detail {

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr node;
    node.line = line_;
    node.column = column_;
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", line_, column_);
    if (c == '(') {
      advance();
      node.is_list = true;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unterminated list", node.line, node.column);
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        node.items.push_back(read());
      }
      return node;
    }
    while (pos_ < text_.size()) {
      char ch = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')' || ch == ';') break;
      node.atom.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(advance()))));
    }
    return node;
  }
};

}  // namespace detail

// Parses every top-level expression in `text`.
inline std::vector<SExpr> read_sexprs(std::string_view text) {
  return detail::SExprReader(text).read_all();
}

// Parses exactly one top-level expression.
inline SExpr read_sexpr(std::string_view text) {
  auto all = read_sexprs(text);
  if (all.empty()) throw ParseError("empty input", 1, 1);
  if (all.size() > 1) throw ParseError("trailing content after expression", all[1].line, all[1].column);
  return std::move(all.front());
}

}  // namespace macroplan
