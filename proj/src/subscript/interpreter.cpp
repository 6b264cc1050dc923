#include <cmath>
#include <limits>

#include "ast.hpp"

namespace mockingbird::subscript {

namespace {

thread_local std::uint64_t g_last_steps = 0;

enum class Flow { normal, break_loop, continue_loop, returned };

class Interpreter {
 public:
  Interpreter(const Program& program, ExecutionLimits limits) : limits_(limits), slots_(program.slot_count) {}

  Json run(const Program& program, const Json& args) {
    slots_[program.args_slot] = args;
    struct Record {
      Interpreter& self;
      ~Record() { g_last_steps = self.steps_; }
    } record{*this};
    if (exec_all(program.statements) == Flow::returned) return std::move(result_);
    throw ScriptFault(FaultKind::no_return, {}, "script finished without returning a value");
  }

 private:
  void tick(SourceLocation at) {
    if (++steps_ > limits_.max_steps) {
      throw ScriptFault(FaultKind::budget_exceeded, at,
                        "step budget of " + std::to_string(limits_.max_steps) + " exceeded");
    }
  }

  Flow exec_all(const std::vector<StmtPtr>& stmts) {
    for (const auto& s : stmts) {
      Flow f = exec(*s);
      if (f != Flow::normal) return f;
    }
    return Flow::normal;
  }

  bool condition(const Expr& e) {
    Json v = eval(e);
    if (!v.is_boolean()) type_fault(e.location, "condition must be a boolean, got " + value_kind(v));
    return v.get<bool>();
  }

  Flow exec(const Stmt& s) {
    tick(s.location);
    switch (s.kind) {
      case StmtKind::let:
      case StmtKind::assign:
        slots_[s.slot] = eval(*s.expr);
        return Flow::normal;
      case StmtKind::expression:
        eval(*s.expr);
        return Flow::normal;
      case StmtKind::if_else:
        return condition(*s.expr) ? exec_all(s.body) : exec_all(s.else_body);
      case StmtKind::while_loop:
        while (condition(*s.expr)) {
          Flow f = exec_all(s.body);
          if (f == Flow::break_loop) break;
          if (f == Flow::returned) return f;
          tick(s.location);
        }
        return Flow::normal;
      case StmtKind::for_in: {
        Json seq = eval(*s.expr);
        std::vector<Json> items;
        if (seq.is_array()) {
          items.assign(seq.begin(), seq.end());
        } else if (seq.is_object()) {
          for (const auto& [k, _] : seq.items()) items.emplace_back(k);
        } else {
          type_fault(s.expr->location, "for-in expects an array or object, got " + value_kind(seq));
        }
        for (auto& item : items) {
          slots_[s.slot] = std::move(item);
          Flow f = exec_all(s.body);
          if (f == Flow::break_loop) break;
          if (f == Flow::returned) return f;
          tick(s.location);
        }
        return Flow::normal;
      }
      case StmtKind::return_value:
        result_ = eval(*s.expr);
        return Flow::returned;
      case StmtKind::block:
        return exec_all(s.body);
      case StmtKind::break_loop:
        return Flow::break_loop;
      case StmtKind::continue_loop:
        return Flow::continue_loop;
    }
    return Flow::normal;
  }

  Json eval(const Expr& e) {
    tick(e.location);
    switch (e.kind) {
      case ExprKind::literal:
        return e.value;
      case ExprKind::variable:
        return slots_[e.slot];
      case ExprKind::member: {
        Json base = eval(*e.children[0]);
        if (!base.is_object()) type_fault(e.location, "cannot read field '" + e.name + "' of " + value_kind(base));
        auto it = base.find(e.name);
        if (it == base.end()) throw ScriptFault(FaultKind::missing_field, e.location, "missing field '" + e.name + "'");
        return *it;
      }
      case ExprKind::index:
        return index(eval(*e.children[0]), eval(*e.children[1]), e.location);
      case ExprKind::call: {
        std::vector<Json> args;
        args.reserve(e.children.size());
        for (const auto& c : e.children) args.push_back(eval(*c));
        return e.builtin->fn(args, e.location);
      }
      case ExprKind::unary:
        return unary(e.name, eval(*e.children[0]), e.location);
      case ExprKind::binary:
        return binary(e.name, eval(*e.children[0]), eval(*e.children[1]), e.location);
      case ExprKind::logical_and:
        return condition(*e.children[0]) && condition(*e.children[1]);
      case ExprKind::logical_or:
        return condition(*e.children[0]) || condition(*e.children[1]);
      case ExprKind::conditional:
        return condition(*e.children[0]) ? eval(*e.children[1]) : eval(*e.children[2]);
      case ExprKind::array_literal: {
        Json out = Json::array();
        for (const auto& c : e.children) out.push_back(eval(*c));
        return out;
      }
      case ExprKind::object_literal: {
        Json out = Json::object();
        for (std::size_t i = 0; i < e.children.size(); ++i) out[e.keys[i]] = eval(*e.children[i]);
        return out;
      }
    }
    return Json();
  }

  static Json index(const Json& base, const Json& key, SourceLocation at) {
    if (base.is_array()) {
      if (!key.is_number_integer()) type_fault(at, "array index must be an integer, got " + value_kind(key));
      auto i = key.get<std::int64_t>();
      if (i < 0 || i >= static_cast<std::int64_t>(base.size())) {
        throw ScriptFault(FaultKind::missing_field, at, "index " + std::to_string(i) + " is out of range");
      }
      return base[static_cast<std::size_t>(i)];
    }
    if (base.is_object()) {
      if (!key.is_string()) type_fault(at, "object key must be a string, got " + value_kind(key));
      const auto& name = key.get_ref<const std::string&>();
      auto it = base.find(name);
      if (it == base.end()) throw ScriptFault(FaultKind::missing_field, at, "missing field '" + name + "'");
      return *it;
    }
    type_fault(at, "cannot index into " + value_kind(base));
  }

  static Json unary(const std::string& op, const Json& v, SourceLocation at) {
    if (op == "!") {
      if (!v.is_boolean()) type_fault(at, "'!' expects a boolean, got " + value_kind(v));
      return !v.get<bool>();
    }
    if (v.is_number_integer()) {
      auto i = v.get<std::int64_t>();
      if (i == std::numeric_limits<std::int64_t>::min()) throw ScriptFault(FaultKind::arithmetic, at, "integer overflow");
      return -i;
    }
    if (v.is_number()) return -v.get<double>();
    type_fault(at, "'-' expects a number, got " + value_kind(v));
  }

  static Json checked(double x, SourceLocation at) {
    if (!std::isfinite(x)) throw ScriptFault(FaultKind::arithmetic, at, "non-finite result");
    return x;
  }

  static Json binary(const std::string& op, const Json& a, const Json& b, SourceLocation at) {
    if (op == "==") return a == b;
    if (op == "!=") return a != b;
    if (op == "+") {
      if (a.is_string() && b.is_string()) return a.get<std::string>() + b.get<std::string>();
      if (a.is_array() && b.is_array()) {
        Json out = a;
        for (const auto& x : b) out.push_back(x);
        return out;
      }
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      int cmp;
      if (a.is_string() && b.is_string()) {
        cmp = a.get_ref<const std::string&>().compare(b.get_ref<const std::string&>());
      } else if (a.is_number_integer() && b.is_number_integer()) {
        auto x = a.get<std::int64_t>(), y = b.get<std::int64_t>();
        cmp = x < y ? -1 : (x > y ? 1 : 0);
      } else if (a.is_number() && b.is_number()) {
        auto x = a.get<double>(), y = b.get<double>();
        cmp = x < y ? -1 : (x > y ? 1 : 0);
      } else {
        type_fault(at, "cannot compare " + value_kind(a) + " with " + value_kind(b));
      }
      if (op == "<") return cmp < 0;
      if (op == "<=") return cmp <= 0;
      if (op == ">") return cmp > 0;
      return cmp >= 0;
    }
    if (!a.is_number() || !b.is_number()) {
      type_fault(at, "operator '" + op + "' cannot combine " + value_kind(a) + " and " + value_kind(b));
    }
    if (op == "/") {
      double d = b.get<double>();
      if (d == 0) throw ScriptFault(FaultKind::arithmetic, at, "division by zero");
      return checked(a.get<double>() / d, at);
    }
    if (a.is_number_integer() && b.is_number_integer()) {
      auto x = a.get<std::int64_t>(), y = b.get<std::int64_t>();
      std::int64_t r = 0;
      bool overflow = false;
      if (op == "+") {
        overflow = __builtin_add_overflow(x, y, &r);
      } else if (op == "-") {
        overflow = __builtin_sub_overflow(x, y, &r);
      } else if (op == "*") {
        overflow = __builtin_mul_overflow(x, y, &r);
      } else {
        if (y == 0) throw ScriptFault(FaultKind::arithmetic, at, "modulo by zero");
        r = y == -1 ? 0 : x % y;
      }
      if (overflow) throw ScriptFault(FaultKind::arithmetic, at, "integer overflow");
      return r;
    }
    double x = a.get<double>(), y = b.get<double>();
    if (op == "+") return checked(x + y, at);
    if (op == "-") return checked(x - y, at);
    if (op == "*") return checked(x * y, at);
    if (y == 0) throw ScriptFault(FaultKind::arithmetic, at, "modulo by zero");
    return checked(std::fmod(x, y), at);
  }

  ExecutionLimits limits_;
  std::vector<Json> slots_;
  Json result_;
  std::uint64_t steps_ = 0;
};

}  // namespace

Json run(const Program& program, const Json& args, ExecutionLimits limits) {
  return Interpreter(program, limits).run(program, args);
}

std::uint64_t last_step_count() { return g_last_steps; }

}  // namespace mockingbird::subscript
