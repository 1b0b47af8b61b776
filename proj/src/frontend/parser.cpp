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

#include "metriq/frontend/parser.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "metriq/frontend/lexer.hpp"

namespace metriq::mdl {

namespace {

// Binding powers, loosest first.
enum Prec : int {
  kPrecLowest = 0,
  kPrecOr = 1,
  kPrecAnd = 2,
  kPrecNot = 3,
  kPrecCompare = 4,
  kPrecTerm = 5,
  kPrecFactor = 6,
  kPrecUnary = 7,
};

struct SyntaxError {};

std::optional<BinaryOp> infix_op(TokenKind k) {
  switch (k) {
    case TokenKind::Plus: return BinaryOp::Add;
    case TokenKind::Minus: return BinaryOp::Sub;
    case TokenKind::Star: return BinaryOp::Mul;
    case TokenKind::Slash: return BinaryOp::Div;
    case TokenKind::EqEq: return BinaryOp::Eq;
    case TokenKind::BangEq: return BinaryOp::Ne;
    case TokenKind::Less: return BinaryOp::Lt;
    case TokenKind::LessEq: return BinaryOp::Le;
    case TokenKind::Greater: return BinaryOp::Gt;
    case TokenKind::GreaterEq: return BinaryOp::Ge;
    case TokenKind::KwAnd: return BinaryOp::And;
    case TokenKind::KwOr: return BinaryOp::Or;
    default: return std::nullopt;
  }
}

int precedence(BinaryOp op) {
  if (op == BinaryOp::Or) return kPrecOr;
  if (op == BinaryOp::And) return kPrecAnd;
  if (is_comparison(op)) return kPrecCompare;
  if (op == BinaryOp::Add || op == BinaryOp::Sub) return kPrecTerm;
  return kPrecFactor;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags) : toks_(std::move(tokens)), diags_(diags) {}

  MetricSet parse_file(std::string name) {
    MetricSet ms;
    ms.name = std::move(name);
    while (!check(TokenKind::EndOfInput)) {
      try {
        statement(ms);
      } catch (const SyntaxError&) {
        synchronize();
      }
    }
    return ms;
  }

  ExprPtr parse_single_expression() {
    try {
      ExprPtr e = expression(kPrecLowest);
      if (!check(TokenKind::EndOfInput)) fail(peek(), "expected end of input");
      return e;
    } catch (const SyntaxError&) {
      return nullptr;
    }
  }

  struct Tag {
    std::string group;
    SourceLocation location;
  };

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool check(TokenKind k) const { return peek().kind == k; }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool match(TokenKind k) {
    if (!check(k)) return false;
    advance();
    return true;
  }

  [[noreturn]] void fail(const Token& at, const std::string& message) {
    // lexical errors were reported already
    if (at.kind != TokenKind::Invalid) diags_.push_back({Severity::Error, message, at.location});
    throw SyntaxError{};
  }

  const Token& expect(TokenKind k, std::string_view what) {
    if (!check(k)) {
      const Token& t = peek();
      std::string found = t.kind == TokenKind::EndOfInput ? "end of input" : "'" + t.text + "'";
      fail(t, "expected " + std::string(describe(k)) + " " + std::string(what) + ", found " + found);
    }
    return advance();
  }

  void synchronize() {
    while (!check(TokenKind::EndOfInput)) {
      if (advance().kind == TokenKind::Semicolon) return;
      TokenKind k = peek().kind;
      if (k == TokenKind::KwMetric || k == TokenKind::KwSegment || k == TokenKind::KwGroup || k == TokenKind::KwUnit)
        return;
    }
  }

  void statement(MetricSet& ms) {
    const Token& head = peek();
    switch (head.kind) {
      case TokenKind::KwUnit: {
        advance();
        const Token& name = expect(TokenKind::Identifier, "after 'unit'");
        expect(TokenKind::Assign, "after unit name");
        const Token& key = expect(TokenKind::Identifier, "naming the unit key column");
        expect(TokenKind::Semicolon, "after unit declaration");
        if (auto* prev = ms.find_unit(name.text)) {
          report(name.location, "duplicate unit '" + name.text + "' (first declared at " + where(prev->location) + ")");
          return;
        }
        ms.units.push_back({name.text, key.text, name.location});
        return;
      }
      case TokenKind::KwMetric: {
        std::string doc = head.doc;
        advance();
        const Token& name = expect(TokenKind::Identifier, "after 'metric'");
        std::vector<Tag> groups;
        if (match(TokenKind::KwIn)) {
          do {
            const Token& g = expect(TokenKind::Identifier, "naming a metric group");
            groups.push_back({g.text, g.location});
          } while (match(TokenKind::Comma));
        }
        expect(TokenKind::Assign, "after metric name");
        ExprPtr e = expression(kPrecLowest);
        expect(TokenKind::Semicolon, "after metric definition");
        if (auto* prev = ms.find_metric(name.text)) {
          report(name.location,
                 "duplicate metric '" + name.text + "': defined at " + where(prev->location) + " and " +
                     where(name.location));
          return;
        }
        MetricDefinition def;
        def.name = name.text;
        def.expr = std::move(e);
        def.location = name.location;
        if (!doc.empty()) def.description = doc;
        std::set<std::string> seen;
        for (auto& g : groups) {
          if (!seen.insert(g.group).second) {
            report(g.location, "metric '" + def.name + "' lists group '" + g.group + "' twice");
            continue;
          }
          def.groups.push_back(g.group);
          tag_order_.push_back({g.group, g.location});
        }
        ms.metrics.push_back(std::move(def));
        return;
      }
      case TokenKind::KwSegment: {
        advance();
        const Token& name = expect(TokenKind::Identifier, "after 'segment'");
        expect(TokenKind::Assign, "after segment name");
        ExprPtr e = expression(kPrecLowest);
        expect(TokenKind::Semicolon, "after segment definition");
        if (auto* prev = ms.find_segment(name.text)) {
          report(name.location,
                 "duplicate segment '" + name.text + "' (first defined at " + where(prev->location) + ")");
          return;
        }
        ms.segments.push_back({name.text, std::move(e), name.location});
        return;
      }
      case TokenKind::KwGroup: {
        advance();
        const Token& name = expect(TokenKind::Identifier, "after 'group'");
        expect(TokenKind::Assign, "after group name");
        expect(TokenKind::LBrace, "to open the member list");
        MetricGroup g{name.text, {}, name.location};
        do {
          const Token& m = expect(TokenKind::Identifier, "naming a group member");
          member_locations_[name.text][m.text] = m.location;
          g.members.push_back(m.text);
        } while (match(TokenKind::Comma));
        expect(TokenKind::RBrace, "to close the member list");
        expect(TokenKind::Semicolon, "after group definition");
        if (auto* prev = ms.find_group(name.text)) {
          report(name.location, "duplicate group '" + name.text + "' (first defined at " + where(prev->location) + ")");
          return;
        }
        ms.groups.push_back(std::move(g));
        return;
      }
      default:
        fail(head, head.kind == TokenKind::EndOfInput
                       ? "unexpected end of input"
                       : "expected 'unit', 'metric', 'segment' or 'group', found '" + head.text + "'");
    }
  }

 public:
  void resolve_groups(MetricSet& ms) {
    for (auto& g : ms.groups) {
      std::vector<std::string> unique;
      std::set<std::string> seen;
      for (const auto& m : g.members) {
        if (!ms.find_metric(m))
          report(member_locations_[g.name][m], "group '" + g.name + "' references unknown metric '" + m + "'");
        if (seen.insert(m).second) unique.push_back(m);
      }
      g.members = std::move(unique);
    }
    // Implicit groups in order of first `in` appearance.
    for (const auto& tag : tag_order_)
      if (!ms.find_group(tag.group)) ms.groups.push_back({tag.group, {}, tag.location});
    for (const auto& def : ms.metrics) {
      for (const auto& gname : def.groups) {
        for (auto& g : ms.groups) {
          if (g.name != gname) continue;
          if (std::find(g.members.begin(), g.members.end(), def.name) == g.members.end()) g.members.push_back(def.name);
        }
      }
    }
  }

 private:
  void report(SourceLocation loc, std::string message) { diags_.push_back({Severity::Error, std::move(message), loc}); }
  static std::string where(SourceLocation l) { return std::to_string(l.line) + ":" + std::to_string(l.column); }

  ExprPtr expression(int min_prec) {
    ExprPtr lhs = prefix();
    for (;;) {
      auto op = infix_op(peek().kind);
      if (!op) break;
      int prec = precedence(*op);
      if (prec < min_prec) break;
      const Token& op_tok = advance();
      // comparisons do not associate; everything else is left-associative
      ExprPtr rhs = expression(prec + 1);
      lhs = make_binary(*op, std::move(lhs), std::move(rhs), op_tok.location);
      if (prec == kPrecCompare) {
        auto next = infix_op(peek().kind);
        if (next && is_comparison(*next) && min_prec <= kPrecCompare)
          fail(peek(), "comparison operators cannot be chained; add parentheses");
      }
    }
    return lhs;
  }

  ExprPtr prefix() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number: advance(); return make_literal(Value::number(t.number), t.location);
      case TokenKind::String: advance(); return make_literal(Value::string(t.text), t.location);
      case TokenKind::KwTrue: advance(); return make_literal(Value::boolean(true), t.location);
      case TokenKind::KwFalse: advance(); return make_literal(Value::boolean(false), t.location);
      case TokenKind::KwNull: advance(); return make_literal(Value::null(), t.location);
      case TokenKind::Identifier: advance(); return make_column(t.text, t.location);
      case TokenKind::Minus: {
        advance();
        if (check(TokenKind::Number)) {
          const Token& n = advance();
          return make_literal(Value::number(-n.number), t.location);
        }
        return make_unary(UnaryOp::Neg, expression(kPrecUnary), t.location);
      }
      case TokenKind::KwNot: advance(); return make_unary(UnaryOp::Not, expression(kPrecNot), t.location);
      case TokenKind::LParen: {
        advance();
        ExprPtr inner = expression(kPrecLowest);
        expect(TokenKind::RParen, "to close parenthesized expression");
        return inner;
      }
      case TokenKind::KwIf: {
        advance();
        ExprPtr c = expression(kPrecLowest);
        return conditional_tail(std::move(c), t.location);
      }
      case TokenKind::Aggregate: return aggregation();
      default: {
        std::string found = t.kind == TokenKind::EndOfInput ? "end of input" : "'" + t.text + "'";
        fail(t, "expected an expression, found " + found);
      }
    }
  }

  ExprPtr conditional_tail(ExprPtr cond, SourceLocation loc) {
    expect(TokenKind::KwThen, "in conditional expression");
    ExprPtr then_branch = expression(kPrecLowest);
    expect(TokenKind::KwElse, "in conditional expression");
    ExprPtr else_branch = expression(kPrecLowest);
    return make_conditional(std::move(cond), std::move(then_branch), std::move(else_branch), loc);
  }

  ExprPtr aggregation() {
    const Token& head = advance();
    Aggregation agg;
    agg.kind = *parse_agg_kind(head.text);
    if (match(TokenKind::Less)) {
      agg.level = expect(TokenKind::Identifier, "naming the aggregation unit").text;
      expect(TokenKind::Greater, "to close the aggregation unit");
    }
    expect(TokenKind::LParen, "after aggregation name");
    if (check(TokenKind::KwIf)) {
      // Either a conditional argument or a filter on an argument-less call.
      const Token& if_tok = advance();
      ExprPtr c = expression(kPrecLowest);
      if (check(TokenKind::KwThen)) {
        agg.arg = conditional_tail(std::move(c), if_tok.location);
      } else {
        agg.filter = std::move(c);
        expect(TokenKind::RParen, "to close aggregation");
        return make_aggregation(std::move(agg), head.location);
      }
    } else if (!check(TokenKind::RParen) && !check(TokenKind::Comma)) {
      agg.arg = expression(kPrecLowest);
    }
    if (match(TokenKind::Comma)) {
      bool negative = match(TokenKind::Minus);
      const Token& n = expect(TokenKind::Number, "as the rank parameter");
      agg.rank = negative ? -n.number : n.number;
    }
    if (match(TokenKind::KwIf)) agg.filter = expression(kPrecLowest);
    expect(TokenKind::RParen, "to close aggregation");
    return make_aggregation(std::move(agg), head.location);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
  std::vector<Tag> tag_order_;
  std::map<std::string, std::map<std::string, SourceLocation>> member_locations_;
};

}  // namespace

ParseResult parse_metric_set(std::string_view source, std::string name) {
  ParseResult result;
  auto tokens = tokenize(source, result.diagnostics);
  Parser parser(std::move(tokens), result.diagnostics);
  MetricSet ms = parser.parse_file(std::move(name));
  parser.resolve_groups(ms);
  if (!has_errors(result.diagnostics)) result.metric_set = std::move(ms);
  return result;
}

ExprParseResult parse_expression(std::string_view source) {
  ExprParseResult result;
  auto tokens = tokenize(source, result.diagnostics);
  Parser parser(std::move(tokens), result.diagnostics);
  ExprPtr e = parser.parse_single_expression();
  if (!has_errors(result.diagnostics)) result.expr = std::move(e);
  return result;
}

}  // namespace metriq::mdl
