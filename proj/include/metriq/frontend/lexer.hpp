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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "metriq/frontend/ast.hpp"

namespace metriq::mdl {

enum class TokenKind {
  Identifier,
  Number,
  String,
  // keywords
  KwUnit,
  KwMetric,
  KwSegment,
  KwGroup,
  KwIn,
  KwIf,
  KwThen,
  KwElse,
  KwAnd,
  KwOr,
  KwNot,
  KwNull,
  KwTrue,
  KwFalse,
  Aggregate,  // Sum, Avg, Count, Min, Max, Percentile
  // punctuation
  Plus,
  Minus,
  Star,
  Slash,
  EqEq,
  BangEq,
  Less,
  LessEq,
  Greater,
  GreaterEq,
  Assign,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semicolon,
  EndOfInput,
  Invalid,
};

std::string_view describe(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::Invalid;
  std::string text;    // identifier name, string contents, or raw lexeme
  double number = 0;   // TokenKind::Number
  SourceLocation location;
  std::string doc;     // text of `///` lines directly preceding the token
};

/// Tokenizes the whole input. Lexical errors are reported as diagnostics
/// and produce Invalid tokens; the stream always ends with EndOfInput.
std::vector<Token> tokenize(std::string_view source, std::vector<Diagnostic>& diagnostics);

}  // namespace metriq::mdl
