#include "labelvar/query/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

#include "labelvar/core/errors.hpp"

namespace labelvar::query {

namespace {

enum class Tok { ident, number, text, cmpop, lparen, rparen, lbracket, rbracket, comma, kw_and, kw_or, kw_not, kw_in, end, invalid };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;  // raw spelling, or the decoded value for text literals
  double number = 0.0;
  CompareOp op = CompareOp::eq;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::end, start, ""};
    const char c = src_[pos_];

    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
      std::string word(src_.substr(start, pos_ - start));
      const std::string kw = lower(word);
      if (kw == "and") return {Tok::kw_and, start, word};
      if (kw == "or") return {Tok::kw_or, start, word};
      if (kw == "not") return {Tok::kw_not, start, word};
      if (kw == "in") return {Tok::kw_in, start, word};
      return {Tok::ident, start, word};
    }
    if (digit(c) || (c == '-' && pos_ + 1 < src_.size() && digit(src_[pos_ + 1]))) return lex_number(start);
    if (c == '"') return lex_text(start);

    auto single = [&](Tok kind) {
      ++pos_;
      return Token{kind, start, std::string(1, c)};
    };
    switch (c) {
      case '(': return single(Tok::lparen);
      case ')': return single(Tok::rparen);
      case '[': return single(Tok::lbracket);
      case ']': return single(Tok::rbracket);
      case ',': return single(Tok::comma);
      default: break;
    }
    if (auto op = lex_operator(start)) return *op;
    ++pos_;
    return {Tok::invalid, start, std::string(1, c)};
  }

 private:
  Token lex_number(std::size_t start) {
    if (src_[pos_] == '-') ++pos_;
    while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && digit(src_[p])) {
        pos_ = p;
        while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
      }
    }
    const std::string_view spelling = src_.substr(start, pos_ - start);
    Token tok{Tok::number, start, std::string(spelling)};
    auto [ptr, ec] = std::from_chars(spelling.data(), spelling.data() + spelling.size(), tok.number);
    if (ec != std::errc{} || ptr != spelling.data() + spelling.size() || !std::isfinite(tok.number))
      tok.kind = Tok::invalid;
    return tok;
  }

  Token lex_text(std::size_t start) {
    ++pos_;
    std::string value;
    while (pos_ < src_.size()) {
      const char c = src_[pos_++];
      if (c == '"') return {Tok::text, start, std::move(value)};
      if (c == '\\' && pos_ < src_.size()) {
        value += src_[pos_++];
        continue;
      }
      value += c;
    }
    return {Tok::invalid, start, std::string(src_.substr(start))};
  }

  std::optional<Token> lex_operator(std::size_t start) {
    auto two = src_.substr(pos_, 2);
    struct Spelling {
      std::string_view text;
      CompareOp op;
    };
    static constexpr Spelling kOps[] = {{"==", CompareOp::eq}, {"!=", CompareOp::ne}, {"<=", CompareOp::le},
                                        {">=", CompareOp::ge}, {"<", CompareOp::lt},  {">", CompareOp::gt}};
    for (const auto& s : kOps) {
      if (two.substr(0, s.text.size()) == s.text) {
        pos_ += s.text.size();
        Token tok{Tok::cmpop, start, std::string(s.text)};
        tok.op = s.op;
        return tok;
      }
    }
    return std::nullopt;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  Query parse_all() {
    Query q = parse_or();
    if (cur_.kind != Tok::end) fail({"\"and\"", "\"or\"", "end of input"});
    return q;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string found;
    switch (cur_.kind) {
      case Tok::end: found = "end of input"; break;
      case Tok::text: found = "text literal"; break;
      case Tok::invalid: found = "invalid token '" + cur_.text + "'"; break;
      default: found = "'" + cur_.text + "'"; break;
    }
    throw SyntaxError(cur_.offset, std::move(expected), std::move(found));
  }

  Query parse_or() {
    std::vector<Query> parts{parse_and()};
    while (cur_.kind == Tok::kw_or) {
      advance();
      parts.push_back(parse_and());
    }
    return parts.size() == 1 ? parts.front() : Query::any_of(std::move(parts));
  }

  Query parse_and() {
    std::vector<Query> parts{parse_unary()};
    while (cur_.kind == Tok::kw_and) {
      advance();
      parts.push_back(parse_unary());
    }
    return parts.size() == 1 ? parts.front() : Query::all_of(std::move(parts));
  }

  Query parse_unary() {
    switch (cur_.kind) {
      case Tok::kw_not:
        advance();
        return Query::negate(parse_unary());
      case Tok::lparen: {
        advance();
        Query inner = parse_or();
        if (cur_.kind != Tok::rparen) fail({"\")\"", "\"and\"", "\"or\""});
        advance();
        return inner;
      }
      case Tok::ident:
        return parse_comparison();
      default:
        fail({"identifier", "\"not\"", "\"(\""});
    }
  }

  Literal parse_literal() {
    if (cur_.kind == Tok::number) {
      Literal lit = cur_.number;
      advance();
      return lit;
    }
    if (cur_.kind == Tok::text) {
      Literal lit = cur_.text;
      advance();
      return lit;
    }
    fail({"number", "text literal"});
  }

  Query parse_comparison() {
    std::string column = cur_.text;
    advance();
    if (cur_.kind == Tok::cmpop) {
      const CompareOp op = cur_.op;
      advance();
      return Query::compare(std::move(column), op, parse_literal());
    }
    if (cur_.kind != Tok::kw_in) fail({"comparison operator", "\"in\""});
    advance();
    if (cur_.kind != Tok::lbracket) fail({"\"[\""});
    advance();
    std::vector<Literal> values{parse_literal()};
    while (cur_.kind == Tok::comma) {
      advance();
      values.push_back(parse_literal());
    }
    if (cur_.kind != Tok::rbracket) fail({"\",\"", "\"]\""});
    advance();
    return Query::in(std::move(column), std::move(values));
  }

  Lexer lexer_;
  Token cur_{Tok::end, 0, ""};
};

}  // namespace

Query parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace labelvar::query
