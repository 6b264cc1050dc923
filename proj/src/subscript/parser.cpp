#include <algorithm>
#include <map>

#include "ast.hpp"

namespace mockingbird::subscript {

namespace {

constexpr int kMaxNesting = 200;

struct ParseAbort {};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags) : toks_(std::move(tokens)), diags_(diags) {}

  std::unique_ptr<Program> run() {
    auto program = std::make_unique<Program>();
    scopes_.emplace_back();
    program->args_slot = declare("args", {1, 1});
    while (!at_end()) {
      if (auto s = statement_with_recovery()) program->statements.push_back(std::move(s));
    }
    if (!saw_return_) diags_.push_back({peek().location, "script has no return statement"});
    program->slot_count = next_slot_;
    return program;
  }

 private:
  // --- token helpers -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    auto i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_end() const { return peek().kind == TokenKind::end; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::punct && peek(ahead).text == p;
  }
  bool is_keyword(std::string_view k) const { return peek().kind == TokenKind::keyword && peek().text == k; }
  bool accept_punct(std::string_view p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& message) {
    diags_.push_back({peek().location, message});
    throw ParseAbort{};
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail("expected '" + std::string(p) + "' but found " + describe(peek()));
  }
  std::string expect_identifier(const char* what) {
    if (peek().kind != TokenKind::identifier) fail(std::string("expected ") + what + " but found " + describe(peek()));
    return next().text;
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::end: return "end of script";
      case TokenKind::string: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }

  // --- scopes ---------------------------------------------------------------

  int declare(const std::string& name, SourceLocation where) {
    auto& scope = scopes_.back();
    if (scope.contains(name)) {
      diags_.push_back({where, "variable '" + name + "' is already declared in this scope"});
      return scope[name];
    }
    int slot = next_slot_++;
    scope[name] = slot;
    return slot;
  }
  int lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (auto f = it->find(name); f != it->end()) return f->second;
    }
    return -1;
  }

  struct ScopeGuard {
    Parser& p;
    explicit ScopeGuard(Parser& parser) : p(parser) { p.scopes_.emplace_back(); }
    ~ScopeGuard() { p.scopes_.pop_back(); }
  };

  // --- statements -----------------------------------------------------------

  StmtPtr statement_with_recovery() {
    auto start = pos_;
    try {
      return statement();
    } catch (const ParseAbort&) {
      synchronize(start);
      return nullptr;
    }
  }

  void synchronize(std::size_t start) {
    if (pos_ == start) next();
    while (!at_end()) {
      if (accept_punct(";")) return;
      if (is_punct("}")) {
        next();
        return;
      }
      next();
    }
  }

  StmtPtr make(StmtKind kind, SourceLocation loc) {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->location = loc;
    return s;
  }

  StmtPtr statement() {
    auto loc = peek().location;
    if (is_keyword("let")) {
      next();
      auto name = expect_identifier("a variable name after 'let'");
      expect_punct("=");
      auto s = make(StmtKind::let, loc);
      s->expr = expression();
      expect_punct(";");
      s->slot = declare(name, loc);
      return s;
    }
    if (is_keyword("if")) return if_statement();
    if (is_keyword("while")) {
      next();
      auto s = make(StmtKind::while_loop, loc);
      expect_punct("(");
      s->expr = expression();
      expect_punct(")");
      ++loop_depth_;
      s->body = body();
      --loop_depth_;
      return s;
    }
    if (is_keyword("for")) {
      next();
      auto s = make(StmtKind::for_in, loc);
      expect_punct("(");
      if (is_keyword("let")) next();
      auto name = expect_identifier("a loop variable");
      if (!is_keyword("in")) fail("expected 'in' in for loop");
      next();
      s->expr = expression();
      expect_punct(")");
      ScopeGuard guard(*this);
      s->slot = declare(name, loc);
      ++loop_depth_;
      s->body = body();
      --loop_depth_;
      return s;
    }
    if (is_keyword("return")) {
      next();
      auto s = make(StmtKind::return_value, loc);
      s->expr = expression();
      expect_punct(";");
      saw_return_ = true;
      return s;
    }
    if (is_keyword("break") || is_keyword("continue")) {
      bool is_break = peek().text == "break";
      if (loop_depth_ == 0) diags_.push_back({loc, "'" + peek().text + "' outside of a loop"});
      next();
      expect_punct(";");
      return make(is_break ? StmtKind::break_loop : StmtKind::continue_loop, loc);
    }
    if (is_punct("{")) {
      auto s = make(StmtKind::block, loc);
      s->body = block();
      return s;
    }
    if (peek().kind == TokenKind::identifier && is_punct("=", 1)) {
      auto name = next().text;
      next();
      auto s = make(StmtKind::assign, loc);
      s->slot = lookup(name);
      if (s->slot < 0) diags_.push_back({loc, "assignment to undeclared variable '" + name + "'"});
      s->expr = expression();
      expect_punct(";");
      return s;
    }
    auto s = make(StmtKind::expression, loc);
    s->expr = expression();
    expect_punct(";");
    return s;
  }

  StmtPtr if_statement() {
    auto loc = next().location;
    auto s = make(StmtKind::if_else, loc);
    expect_punct("(");
    s->expr = expression();
    expect_punct(")");
    s->body = body();
    if (is_keyword("else")) {
      next();
      if (is_keyword("if")) {
        s->else_body.push_back(if_statement());
      } else {
        s->else_body = body();
      }
    }
    return s;
  }

  std::vector<StmtPtr> body() {
    if (is_punct("{")) return block();
    DepthGuard depth(*this);
    ScopeGuard guard(*this);
    std::vector<StmtPtr> out;
    out.push_back(statement());
    return out;
  }

  std::vector<StmtPtr> block() {
    DepthGuard depth(*this);
    expect_punct("{");
    ScopeGuard guard(*this);
    std::vector<StmtPtr> out;
    while (!is_punct("}")) {
      if (at_end()) fail("expected '}' before end of script");
      if (auto s = statement_with_recovery()) out.push_back(std::move(s));
    }
    next();
    return out;
  }

  // --- expressions ----------------------------------------------------------

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxNesting) {
        --p.depth_;
        p.fail("nesting is too deep");
      }
    }
    ~DepthGuard() { --p.depth_; }
  };

  ExprPtr node(ExprKind kind, SourceLocation loc) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->location = loc;
    return e;
  }

  ExprPtr expression() {
    DepthGuard guard(*this);
    return conditional();
  }

  ExprPtr conditional() {
    auto cond = logical_or();
    if (!is_punct("?")) return cond;
    auto loc = next().location;
    auto e = node(ExprKind::conditional, loc);
    e->children.push_back(std::move(cond));
    e->children.push_back(expression());
    expect_punct(":");
    e->children.push_back(expression());
    return e;
  }

  ExprPtr logical_or() {
    auto lhs = logical_and();
    while (is_punct("||")) {
      auto loc = next().location;
      auto e = node(ExprKind::logical_or, loc);
      e->children.push_back(std::move(lhs));
      e->children.push_back(logical_and());
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr logical_and() {
    auto lhs = binary_level(0);
    while (is_punct("&&")) {
      auto loc = next().location;
      auto e = node(ExprKind::logical_and, loc);
      e->children.push_back(std::move(lhs));
      e->children.push_back(binary_level(0));
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr binary_level(int level) {
    static const std::vector<std::vector<std::string_view>> kLevels = {
        {"==", "!="}, {"<", "<=", ">", ">="}, {"+", "-"}, {"*", "/", "%"}};
    if (level == static_cast<int>(kLevels.size())) return unary();
    auto lhs = binary_level(level + 1);
    while (true) {
      const auto& ops = kLevels[level];
      auto match = std::find_if(ops.begin(), ops.end(), [&](std::string_view op) { return is_punct(op); });
      if (match == ops.end()) return lhs;
      const auto& tok = next();
      auto e = node(ExprKind::binary, tok.location);
      e->name = tok.text;
      e->children.push_back(std::move(lhs));
      e->children.push_back(binary_level(level + 1));
      lhs = std::move(e);
    }
  }

  ExprPtr unary() {
    if (is_punct("!") || is_punct("-")) {
      DepthGuard guard(*this);
      const auto& tok = next();
      auto e = node(ExprKind::unary, tok.location);
      e->name = tok.text;
      e->children.push_back(unary());
      return e;
    }
    return postfix();
  }

  ExprPtr postfix() {
    auto e = primary();
    while (true) {
      if (is_punct(".")) {
        auto loc = next().location;
        auto m = node(ExprKind::member, loc);
        m->name = expect_identifier("a member name after '.'");
        m->children.push_back(std::move(e));
        e = std::move(m);
      } else if (is_punct("[")) {
        auto loc = next().location;
        auto ix = node(ExprKind::index, loc);
        ix->children.push_back(std::move(e));
        ix->children.push_back(expression());
        expect_punct("]");
        e = std::move(ix);
      } else if (is_punct("(")) {
        fail("only built-in functions can be called");
      } else {
        return e;
      }
    }
  }

  ExprPtr primary() {
    const auto& tok = peek();
    auto loc = tok.location;
    if (tok.kind == TokenKind::number || tok.kind == TokenKind::string) {
      auto e = node(ExprKind::literal, loc);
      e->value = next().value;
      return e;
    }
    if (tok.kind == TokenKind::keyword) {
      if (tok.text == "true" || tok.text == "false" || tok.text == "null") {
        auto e = node(ExprKind::literal, loc);
        e->value = tok.text == "null" ? Json() : Json(tok.text == "true");
        next();
        return e;
      }
      fail("unexpected keyword '" + tok.text + "' in expression");
    }
    if (tok.kind == TokenKind::identifier) {
      auto name = next().text;
      if (is_punct("(")) return call(name, loc);
      auto e = node(ExprKind::variable, loc);
      e->name = name;
      e->slot = lookup(name);
      if (e->slot < 0) diags_.push_back({loc, "undefined variable '" + name + "'"});
      return e;
    }
    if (accept_punct("(")) {
      auto e = expression();
      expect_punct(")");
      return e;
    }
    if (accept_punct("[")) {
      auto e = node(ExprKind::array_literal, loc);
      if (!accept_punct("]")) {
        do {
          e->children.push_back(expression());
        } while (accept_punct(","));
        expect_punct("]");
      }
      return e;
    }
    if (accept_punct("{")) {
      auto e = node(ExprKind::object_literal, loc);
      if (!accept_punct("}")) {
        do {
          if (is_punct("}")) break;
          std::string key;
          if (peek().kind == TokenKind::string || peek().kind == TokenKind::identifier) {
            key = next().text;
          } else {
            fail("expected an object key but found " + describe(peek()));
          }
          expect_punct(":");
          e->keys.push_back(std::move(key));
          e->children.push_back(expression());
        } while (accept_punct(","));
        expect_punct("}");
      }
      return e;
    }
    fail("expected an expression but found " + describe(tok));
  }

  ExprPtr call(const std::string& name, SourceLocation loc) {
    expect_punct("(");
    auto e = node(ExprKind::call, loc);
    e->name = name;
    if (!accept_punct(")")) {
      do {
        e->children.push_back(expression());
      } while (accept_punct(","));
      expect_punct(")");
    }
    e->builtin = find_builtin(name);
    if (!e->builtin) {
      diags_.push_back({loc, "unknown function '" + name + "'"});
      return e;
    }
    int n = static_cast<int>(e->children.size());
    if (n < e->builtin->min_arity || (e->builtin->max_arity >= 0 && n > e->builtin->max_arity)) {
      std::string expected = std::to_string(e->builtin->min_arity);
      if (e->builtin->max_arity != e->builtin->min_arity) {
        expected += e->builtin->max_arity < 0 ? " or more" : " to " + std::to_string(e->builtin->max_arity);
      }
      diags_.push_back({loc, "function '" + name + "' takes " + expected + " argument(s), got " + std::to_string(n)});
    }
    return e;
  }

  std::vector<Token> toks_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  std::vector<std::map<std::string, int>> scopes_;
  int next_slot_ = 0;
  int loop_depth_ = 0;
  int depth_ = 0;
  bool saw_return_ = false;
};

}  // namespace

std::shared_ptr<const Program> compile(std::string_view source) {
  std::vector<Diagnostic> diags;
  auto tokens = tokenize(source, diags);
  auto program = Parser(std::move(tokens), diags).run();
  if (!diags.empty()) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
      return a.location.line != b.location.line ? a.location.line < b.location.line
                                                : a.location.column < b.location.column;
    });
    throw CompileError(std::move(diags));
  }
  return std::shared_ptr<const Program>(std::move(program));
}

}  // namespace mockingbird::subscript
