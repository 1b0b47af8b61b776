// Copyright 2026 The Metriq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "metriq/frontend/lexer.hpp"

#include <charconv>
#include <cmath>
#include <unordered_map>

namespace metriq::mdl {

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::String: return "string";
    case TokenKind::KwUnit: return "'unit'";
    case TokenKind::KwMetric: return "'metric'";
    case TokenKind::KwSegment: return "'segment'";
    case TokenKind::KwGroup: return "'group'";
    case TokenKind::KwIn: return "'in'";
    case TokenKind::KwIf: return "'if'";
    case TokenKind::KwThen: return "'then'";
    case TokenKind::KwElse: return "'else'";
    case TokenKind::KwAnd: return "'and'";
    case TokenKind::KwOr: return "'or'";
    case TokenKind::KwNot: return "'not'";
    case TokenKind::KwNull: return "'null'";
    case TokenKind::KwTrue: return "'true'";
    case TokenKind::KwFalse: return "'false'";
    case TokenKind::Aggregate: return "aggregation";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::EqEq: return "'=='";
    case TokenKind::BangEq: return "'!='";
    case TokenKind::Less: return "'<'";
    case TokenKind::LessEq: return "'<='";
    case TokenKind::Greater: return "'>'";
    case TokenKind::GreaterEq: return "'>='";
    case TokenKind::Assign: return "'='";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::EndOfInput: return "end of input";
    case TokenKind::Invalid: return "invalid token";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string_view, TokenKind>& keywords() {
  static const std::unordered_map<std::string_view, TokenKind> table = {
      {"unit", TokenKind::KwUnit},       {"metric", TokenKind::KwMetric}, {"segment", TokenKind::KwSegment},
      {"group", TokenKind::KwGroup},     {"in", TokenKind::KwIn},         {"if", TokenKind::KwIf},
      {"then", TokenKind::KwThen},       {"else", TokenKind::KwElse},     {"and", TokenKind::KwAnd},
      {"or", TokenKind::KwOr},           {"not", TokenKind::KwNot},       {"null", TokenKind::KwNull},
      {"true", TokenKind::KwTrue},       {"false", TokenKind::KwFalse},   {"Sum", TokenKind::Aggregate},
      {"Avg", TokenKind::Aggregate},     {"Count", TokenKind::Aggregate}, {"Min", TokenKind::Aggregate},
      {"Max", TokenKind::Aggregate},     {"Percentile", TokenKind::Aggregate},
  };
  return table;
}

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Lexer {
 public:
  Lexer(std::string_view src, std::vector<Diagnostic>& diags) : src_(src), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::string doc;
    for (;;) {
      skip_space_and_comments(doc);
      Token t = next();
      t.doc = std::move(doc);
      doc.clear();
      bool end = t.kind == TokenKind::EndOfInput;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }
  bool at_end() const { return pos_ >= src_.size(); }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
      ++col_;  // columns count code points, not UTF-8 continuation bytes
    }
    ++pos_;
  }

  void skip_space_and_comments(std::string& doc) {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        bool is_doc = peek(2) == '/' && peek(3) != '/';
        std::size_t start = pos_ + (is_doc ? 3 : 2);
        while (!at_end() && peek() != '\n') advance();
        if (is_doc) {
          std::string_view line = src_.substr(start, pos_ - start);
          while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
          while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.remove_suffix(1);
          if (!doc.empty()) doc += ' ';
          doc += line;
        }
      } else {
        break;
      }
    }
  }

  Token make(TokenKind kind, SourceLocation loc, std::string text) {
    Token t;
    t.kind = kind;
    t.location = loc;
    t.text = std::move(text);
    return t;
  }

  Token error(SourceLocation loc, std::string message, std::string text) {
    diags_.push_back({Severity::Error, std::move(message), loc});
    return make(TokenKind::Invalid, loc, std::move(text));
  }

  Token next() {
    SourceLocation loc{line_, col_};
    if (at_end()) return make(TokenKind::EndOfInput, loc, "");
    char c = peek();

    if (is_ident_start(c)) {
      std::size_t start = pos_;
      while (!at_end() && is_ident_char(peek())) advance();
      std::string word(src_.substr(start, pos_ - start));
      auto it = keywords().find(word);
      return make(it == keywords().end() ? TokenKind::Identifier : it->second, loc, std::move(word));
    }
    if (is_digit(c) || (c == '.' && is_digit(peek(1)))) return number(loc);
    if (c == '"') return string(loc);

    auto single = [&](TokenKind k) {
      std::string s(1, c);
      advance();
      return make(k, loc, std::move(s));
    };
    auto pair = [&](TokenKind k) {
      std::string s(src_.substr(pos_, 2));
      advance();
      advance();
      return make(k, loc, std::move(s));
    };
    switch (c) {
      case '+': return single(TokenKind::Plus);
      case '-': return single(TokenKind::Minus);
      case '*': return single(TokenKind::Star);
      case '/': return single(TokenKind::Slash);
      case '(': return single(TokenKind::LParen);
      case ')': return single(TokenKind::RParen);
      case '{': return single(TokenKind::LBrace);
      case '}': return single(TokenKind::RBrace);
      case ',': return single(TokenKind::Comma);
      case ';': return single(TokenKind::Semicolon);
      case '=': return peek(1) == '=' ? pair(TokenKind::EqEq) : single(TokenKind::Assign);
      case '!':
        if (peek(1) == '=') return pair(TokenKind::BangEq);
        break;
      case '<': return peek(1) == '=' ? pair(TokenKind::LessEq) : single(TokenKind::Less);
      case '>': return peek(1) == '=' ? pair(TokenKind::GreaterEq) : single(TokenKind::Greater);
      default: break;
    }
    std::size_t start = pos_;
    advance();
    while (!at_end() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) advance();
    std::string bad(src_.substr(start, pos_ - start));
    return error(loc, "unexpected character '" + bad + "'", bad);
  }

  Token number(SourceLocation loc) {
    std::size_t start = pos_;
    while (is_digit(peek())) advance();
    if (peek() == '.') {
      advance();
      while (is_digit(peek())) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save_pos = pos_;
      std::uint32_t save_col = col_;
      advance();
      if (peek() == '+' || peek() == '-') advance();
      if (!is_digit(peek())) {
        pos_ = save_pos;
        col_ = save_col;
      } else {
        while (is_digit(peek())) advance();
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
      return error(loc, "number literal '" + text + "' is out of range", text);
    Token t = make(TokenKind::Number, loc, text);
    t.number = value;
    return t;
  }

  Token string(SourceLocation loc) {
    advance();  // opening quote
    std::string value;
    while (!at_end() && peek() != '"') {
      char c = peek();
      if (c == '\n') break;
      if (c == '\\') {
        advance();
        char e = peek();
        switch (e) {
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default: {
            SourceLocation at{line_, col_};
            if (!at_end()) advance();
            return error(at, std::string("unknown escape sequence '\\") + e + "'", value);
          }
        }
        advance();
        continue;
      }
      value += c;
      advance();
    }
    if (at_end() || peek() != '"') return error(loc, "unterminated string literal", value);
    advance();
    return make(TokenKind::String, loc, std::move(value));
  }

  std::string_view src_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, std::vector<Diagnostic>& diagnostics) {
  return Lexer(source, diagnostics).run();
}

}  // namespace metriq::mdl
