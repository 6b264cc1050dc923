#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mockingbird/subscript/script.hpp"

namespace mockingbird::subscript {

enum class TokenKind {
  identifier,
  number,
  string,
  keyword,
  punct,
  end,
};

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  Json value;  // numbers and strings
  SourceLocation location;
};

/// Tokenizes the whole source; lexical errors are appended to `diagnostics`.
std::vector<Token> tokenize(std::string_view source, std::vector<Diagnostic>& diagnostics);

struct Builtin;

enum class ExprKind {
  literal,
  variable,
  member,
  index,
  call,
  unary,
  binary,
  logical_and,
  logical_or,
  conditional,
  array_literal,
  object_literal,
};

struct Expr {
  ExprKind kind = ExprKind::literal;
  SourceLocation location;
  Json value;
  std::string name;  // variable, member, operator
  int slot = -1;
  const Builtin* builtin = nullptr;
  std::vector<std::unique_ptr<Expr>> children;
  std::vector<std::string> keys;  // object literal keys, parallel to children
};

using ExprPtr = std::unique_ptr<Expr>;

enum class StmtKind { let, assign, expression, if_else, while_loop, for_in, return_value, block, break_loop, continue_loop };

struct Stmt {
  StmtKind kind = StmtKind::expression;
  SourceLocation location;
  int slot = -1;
  ExprPtr expr;
  std::vector<std::unique_ptr<Stmt>> body;
  std::vector<std::unique_ptr<Stmt>> else_body;
};

using StmtPtr = std::unique_ptr<Stmt>;

class Program {
 public:
  std::vector<StmtPtr> statements;
  int slot_count = 0;
  int args_slot = 0;
};

using BuiltinFn = Json (*)(std::vector<Json>& args, SourceLocation where);

struct Builtin {
  const char* name;
  int min_arity;
  int max_arity;  // -1: variadic
  BuiltinFn fn;
};

const Builtin* find_builtin(std::string_view name);

[[noreturn]] void type_fault(SourceLocation where, const std::string& message);
std::string value_kind(const Json& v);

}  // namespace mockingbird::subscript
