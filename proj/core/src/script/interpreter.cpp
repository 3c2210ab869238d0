#include "wpsenv/script/interpreter.hpp"

#include <cmath>
#include <future>
#include <algorithm>
#include <limits>

#include "wpsenv/error.hpp"

namespace wpsenv::script {

const std::map<std::string, std::size_t, std::less<>>& builtin_arities() {
  static const std::map<std::string, std::size_t, std::less<>> table{
      {"log", 1},    {"str", 1},  {"len", 1},  {"push", 2}, {"keys", 1},  {"CallWPS", 3}, {"spawn", 2},
      {"join", 1},   {"matrix", 2}, {"mget", 3}, {"mset", 4}, {"madd", 2}, {"mmul", 2},    {"msum", 1},
  };
  return table;
}

namespace {

constexpr std::size_t kMaxMatrixCells = 10'000'000;

void check_expr(const Expr& e, const Program& p, ScenarioHost* host);

void check_block(const Block& b, const Program& p, ScenarioHost* host);

void check_stmt(const Stmt& s, const Program& p, ScenarioHost* host) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) check_expr(*n.init, p, host);
        else if constexpr (std::is_same_v<T, Assign>) {
          check_expr(*n.target, p, host);
          check_expr(*n.value, p, host);
        } else if constexpr (std::is_same_v<T, If>) {
          check_expr(*n.cond, p, host);
          check_block(n.then_block, p, host);
          if (n.else_block) check_block(*n.else_block, p, host);
        } else if constexpr (std::is_same_v<T, While>) {
          check_expr(*n.cond, p, host);
          check_block(n.body, p, host);
        } else if constexpr (std::is_same_v<T, For>) {
          if (n.init) check_stmt(*n.init, p, host);
          if (n.cond) check_expr(*n.cond, p, host);
          if (n.step) check_stmt(*n.step, p, host);
          check_block(n.body, p, host);
        } else if constexpr (std::is_same_v<T, Return>) {
          if (n.value) check_expr(*n.value, p, host);
        } else {
          check_expr(*n.expr, p, host);
        }
      },
      s.node);
}

void check_block(const Block& b, const Program& p, ScenarioHost* host) {
  for (const auto& s : b) check_stmt(*s, p, host);
}

void check_arity(const std::string& what, std::size_t want, std::size_t got, Pos pos) {
  if (want != got)
    throw ScriptError(pos, what + " expects " + std::to_string(want) + " argument" + (want == 1 ? "" : "s") +
                               ", got " + std::to_string(got));
}

void check_expr(const Expr& e, const Program& p, ScenarioHost* host) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Member>) check_expr(*n.object, p, host);
        else if constexpr (std::is_same_v<T, Index>) {
          check_expr(*n.object, p, host);
          check_expr(*n.index, p, host);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& a : n.args) check_expr(*a, p, host);
          const auto* id = std::get_if<Ident>(&n.callee->node);
          if (!id) throw ScriptError(e.pos, "only named functions can be called");
          if (const auto* fn = p.find(id->name)) {
            check_arity("function '" + id->name + "'", fn->params.size(), n.args.size(), e.pos);
          } else if (auto b = builtin_arities().find(id->name); b != builtin_arities().end()) {
            check_arity("builtin '" + id->name + "'", b->second, n.args.size(), e.pos);
          } else if (auto arity = host ? host->wrapper_arity(id->name) : std::nullopt) {
            check_arity("wrapper '" + id->name + "'", *arity, n.args.size(), e.pos);
          } else {
            throw ScriptError(e.pos, "undefined function '" + id->name + "'");
          }
        } else if constexpr (std::is_same_v<T, Unary>) check_expr(*n.operand, p, host);
        else if constexpr (std::is_same_v<T, Binary>) {
          check_expr(*n.lhs, p, host);
          check_expr(*n.rhs, p, host);
        } else if constexpr (std::is_same_v<T, ObjectLit>) {
          for (const auto& f : n.fields) check_expr(*f.second, p, host);
        } else if constexpr (std::is_same_v<T, ArrayLit>) {
          for (const auto& i : n.items) check_expr(*i, p, host);
        }
      },
      e.node);
}

bool integral(double d) { return std::isfinite(d) && std::floor(d) == d; }

std::size_t as_index(const Value& v, std::size_t limit, Pos pos, const char* what) {
  const double* n = v.number();
  if (!n || !integral(*n)) throw ScriptError(pos, std::string(what) + " must be an integer");
  if (*n < 0 || *n >= static_cast<double>(limit))
    throw ScriptError(pos, std::string(what) + " " + to_display(v) + " out of range");
  return static_cast<std::size_t>(*n);
}

double as_number(const Value& v, Pos pos, const char* what) {
  const double* n = v.number();
  if (!n) throw ScriptError(pos, std::string(what) + " must be a number, got " + kind_name(v));
  return *n;
}

Matrix& as_matrix(const Value& v, Pos pos, const char* what) {
  Matrix* m = v.matrix();
  if (!m) throw ScriptError(pos, std::string(what) + " must be a matrix, got " + kind_name(v));
  return *m;
}

}  // namespace

void check_calls(const Program& program, ScenarioHost* host) {
  for (const auto& fn : program.functions) check_block(fn.body, program, host);
}

struct Interpreter::Frame {
  std::map<std::string, Value, std::less<>> vars;
  Value ret;
};

Interpreter::Interpreter(std::shared_ptr<const Program> program, ScenarioHost* host, RunBudget budget,
                         const std::atomic<bool>* cancelled)
    : program_(std::move(program)), host_(host), budget_(budget), cancelled_(cancelled) {}

RunResult Interpreter::run(const std::string& entry, std::vector<Value> args) {
  const FunctionDecl* fn = program_->find(entry);
  if (!fn) throw ScriptError({0, 0}, "entry function '" + entry + "' not found");
  if (fn->params.size() != args.size())
    throw ScriptError(fn->pos, "entry function '" + entry + "' takes " + std::to_string(fn->params.size()) +
                                   " arguments, got " + std::to_string(args.size()));
  steps_ = 0;
  depth_ = 0;
  log_.clear();
  started_ = std::chrono::steady_clock::now();
  Value v = call_function(*fn, std::move(args), fn->pos);
  return RunResult{std::move(v), std::move(log_), steps_};
}

void Interpreter::charge(std::uint64_t n) {
  // bulk work (matrix ops) costs one step per cell touched
  if (n > budget_.max_steps - std::min(steps_, budget_.max_steps)) throw BudgetExceeded(BudgetKind::Steps);
  steps_ += n;
  step();
}

void Interpreter::step() {
  if (++steps_ > budget_.max_steps) throw BudgetExceeded(BudgetKind::Steps);
  if ((steps_ & 255) == 0) {
    if (cancelled_ && cancelled_->load()) throw CancelledError();
    if (std::chrono::steady_clock::now() - started_ > budget_.max_wall) throw BudgetExceeded(BudgetKind::Wall);
  }
}

Value Interpreter::call_function(const FunctionDecl& fn, std::vector<Value> args, Pos pos) {
  if (fn.params.size() != args.size())
    throw ScriptError(pos, "function '" + fn.name + "' expects " + std::to_string(fn.params.size()) +
                               " arguments, got " + std::to_string(args.size()));
  if (depth_ + 1 > budget_.max_call_depth) throw BudgetExceeded(BudgetKind::Depth);
  ++depth_;
  struct Unwind {
    unsigned& d;
    ~Unwind() { --d; }
  } unwind{depth_};
  Frame frame;
  for (std::size_t i = 0; i < args.size(); ++i) frame.vars[fn.params[i]] = std::move(args[i]);
  exec_block(fn.body, frame);
  return std::move(frame.ret);
}

Interpreter::Flow Interpreter::exec_block(const Block& b, Frame& f) {
  for (const auto& s : b)
    if (exec(*s, f) == Flow::Return) return Flow::Return;
  return Flow::Normal;
}

Interpreter::Flow Interpreter::exec(const Stmt& s, Frame& f) {
  step();
  return std::visit(
      [&](const auto& n) -> Flow {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) {
          Value v = eval(*n.init, f);
          f.vars[n.name] = std::move(v);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, Assign>) {
          Value v = eval(*n.value, f);
          assign(*n.target, std::move(v), f);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, If>) {
          if (truthy(eval(*n.cond, f))) return exec_block(n.then_block, f);
          if (n.else_block) return exec_block(*n.else_block, f);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, While>) {
          while (truthy(eval(*n.cond, f))) {
            if (exec_block(n.body, f) == Flow::Return) return Flow::Return;
            step();
          }
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, For>) {
          if (n.init && exec(*n.init, f) == Flow::Return) return Flow::Return;
          while (!n.cond || truthy(eval(*n.cond, f))) {
            if (exec_block(n.body, f) == Flow::Return) return Flow::Return;
            if (n.step) exec(*n.step, f);
            step();
          }
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, Return>) {
          f.ret = n.value ? eval(*n.value, f) : Value();
          return Flow::Return;
        } else {
          eval(*n.expr, f);
          return Flow::Normal;
        }
      },
      s.node);
}

void Interpreter::assign(const Expr& target, Value v, Frame& f) {
  if (const auto* id = std::get_if<Ident>(&target.node)) {
    auto it = f.vars.find(id->name);
    if (it == f.vars.end()) throw ScriptError(target.pos, "assignment to undeclared variable '" + id->name + "'");
    it->second = std::move(v);
    return;
  }
  if (const auto* m = std::get_if<Member>(&target.node)) {
    Value obj = eval(*m->object, f);
    Object* o = obj.object();
    if (!o) throw ScriptError(target.pos, "cannot set member '" + m->name + "' on " + kind_name(obj));
    o->set(m->name, std::move(v));
    return;
  }
  const auto& ix = std::get<Index>(target.node);
  Value container = eval(*ix.object, f);
  Value key = eval(*ix.index, f);
  if (Array* a = container.array()) {
    std::size_t i = as_index(key, a->size() + 1, target.pos, "array index");
    if (i == a->size())
      a->push_back(std::move(v));
    else
      (*a)[i] = std::move(v);
  } else if (Object* o = container.object()) {
    const std::string* k = key.text();
    if (!k) throw ScriptError(target.pos, "object keys must be text");
    o->set(*k, std::move(v));
  } else {
    throw ScriptError(target.pos, std::string("cannot index into ") + kind_name(container));
  }
}

Value Interpreter::eval(const Expr& e, Frame& f) {
  step();
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NumberLit>) return Value(n.value);
        else if constexpr (std::is_same_v<T, StringLit>) return Value(n.value);
        else if constexpr (std::is_same_v<T, BoolLit>) return Value(n.value);
        else if constexpr (std::is_same_v<T, NullLit>) return Value();
        else if constexpr (std::is_same_v<T, Ident>) {
          auto it = f.vars.find(n.name);
          if (it != f.vars.end()) return it->second;
          if (n.name == kLocalConstant) return Value(kLocalConstant);
          throw ScriptError(e.pos, "undefined identifier '" + n.name + "'");
        } else if constexpr (std::is_same_v<T, Member>) {
          Value obj = eval(*n.object, f);
          const Object* o = obj.object();
          if (!o) throw ScriptError(e.pos, "cannot read member '" + n.name + "' of " + kind_name(obj));
          const Value* v = o->find(n.name);
          return v ? *v : Value();
        } else if constexpr (std::is_same_v<T, Index>) {
          Value container = eval(*n.object, f);
          Value key = eval(*n.index, f);
          if (const Array* a = container.array()) return (*a)[as_index(key, a->size(), e.pos, "array index")];
          if (const std::string* t = container.text())
            return Value(std::string(1, (*t)[as_index(key, t->size(), e.pos, "text index")]));
          if (const Object* o = container.object()) {
            const std::string* k = key.text();
            if (!k) throw ScriptError(e.pos, "object keys must be text");
            const Value* v = o->find(*k);
            return v ? *v : Value();
          }
          throw ScriptError(e.pos, std::string("cannot index into ") + kind_name(container));
        } else if constexpr (std::is_same_v<T, Call>) {
          const auto* id = std::get_if<Ident>(&n.callee->node);
          if (!id) throw ScriptError(e.pos, "not callable: only named functions can be called");
          std::vector<Value> args;
          args.reserve(n.args.size());
          for (const auto& a : n.args) args.push_back(eval(*a, f));
          if (const FunctionDecl* fn = program_->find(id->name)) return call_function(*fn, std::move(args), e.pos);
          if (builtin_arities().count(id->name)) return call_builtin(id->name, args, e.pos);
          auto arity = host_ ? host_->wrapper_arity(id->name) : std::nullopt;
          if (!arity) throw ScriptError(e.pos, "not callable: '" + id->name + "' is not defined");
          if (*arity != args.size())
            throw ScriptError(e.pos, "wrapper '" + id->name + "' expects " + std::to_string(*arity) +
                                         " arguments, got " + std::to_string(args.size()));
          return deep_copy(host_->call_wrapper(id->name, args));
        } else if constexpr (std::is_same_v<T, Unary>) {
          Value v = eval(*n.operand, f);
          if (n.op == UnOp::Not) return Value(!truthy(v));
          return Value(-as_number(v, e.pos, "operand of unary '-'"));
        } else if constexpr (std::is_same_v<T, Binary>) {
          return eval_binary(n, e.pos, f);
        } else if constexpr (std::is_same_v<T, ObjectLit>) {
          Object o;
          for (const auto& [k, x] : n.fields) o.set(k, eval(*x, f));
          return make_object(std::move(o));
        } else {
          Array a;
          a.reserve(n.items.size());
          for (const auto& x : n.items) a.push_back(eval(*x, f));
          return make_array(std::move(a));
        }
      },
      e.node);
}

Value Interpreter::eval_binary(const Binary& b, Pos pos, Frame& f) {
  if (b.op == BinOp::And) {
    if (!truthy(eval(*b.lhs, f))) return Value(false);
    return Value(truthy(eval(*b.rhs, f)));
  }
  if (b.op == BinOp::Or) {
    if (truthy(eval(*b.lhs, f))) return Value(true);
    return Value(truthy(eval(*b.rhs, f)));
  }
  Value l = eval(*b.lhs, f);
  Value r = eval(*b.rhs, f);
  auto mismatch = [&]() {
    return ScriptError(pos, std::string("cannot apply '") + to_string(b.op) + "' to " + kind_name(l) + " and " +
                                kind_name(r));
  };
  switch (b.op) {
    case BinOp::Eq: return Value(equals(l, r));
    case BinOp::Ne: return Value(!equals(l, r));
    case BinOp::Add:
      if (l.text() || r.text()) return Value(to_display(l) + to_display(r));
      if (l.number() && r.number()) return Value(*l.number() + *r.number());
      throw mismatch();
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: {
      int cmp;
      if (l.number() && r.number()) {
        double x = *l.number(), y = *r.number();
        if (std::isnan(x) || std::isnan(y)) return Value(false);
        cmp = x < y ? -1 : (x > y ? 1 : 0);
      } else if (l.text() && r.text()) {
        cmp = l.text()->compare(*r.text());
      } else {
        throw mismatch();
      }
      switch (b.op) {
        case BinOp::Lt: return Value(cmp < 0);
        case BinOp::Le: return Value(cmp <= 0);
        case BinOp::Gt: return Value(cmp > 0);
        default: return Value(cmp >= 0);
      }
    }
    default: break;
  }
  if (!l.number() || !r.number()) throw mismatch();
  double x = *l.number(), y = *r.number();
  switch (b.op) {
    case BinOp::Sub: return Value(x - y);
    case BinOp::Mul: return Value(x * y);
    case BinOp::Div: return Value(x / y);
    default: return Value(std::fmod(x, y));
  }
}

Value Interpreter::call_builtin(const std::string& name, std::vector<Value>& args, Pos pos) {
  auto want = builtin_arities().at(name);
  if (args.size() != want)
    throw ScriptError(pos, "builtin '" + name + "' expects " + std::to_string(want) + " arguments, got " +
                               std::to_string(args.size()));
  if (name == "log") {
    std::string line = to_display(args[0]);
    log_.push_back(line);
    if (log_sink_) log_sink_(line);
    return Value();
  }
  if (name == "str") return Value(to_display(args[0]));
  if (name == "len") {
    if (auto a = args[0].array()) return Value(static_cast<double>(a->size()));
    if (auto t = args[0].text()) return Value(static_cast<double>(t->size()));
    if (auto o = args[0].object()) return Value(static_cast<double>(o->entries.size()));
    throw ScriptError(pos, std::string("len of ") + kind_name(args[0]));
  }
  if (name == "push") {
    Array* a = args[0].array();
    if (!a) throw ScriptError(pos, std::string("push needs an array, got ") + kind_name(args[0]));
    a->push_back(std::move(args[1]));
    return Value(static_cast<double>(a->size()));
  }
  if (name == "keys") {
    Object* o = args[0].object();
    if (!o) throw ScriptError(pos, std::string("keys needs an object, got ") + kind_name(args[0]));
    Array out;
    for (const auto& [k, v] : o->entries) out.emplace_back(k);
    return make_array(std::move(out));
  }
  if (name == "CallWPS") {
    const std::string* endpoint = args[0].text();
    const std::string* pid = args[1].text();
    const Object* inputs = args[2].object();
    if (!endpoint || !pid || !inputs) throw ScriptError(pos, "CallWPS(endpoint: text, process: text, inputs: object)");
    if (!host_) throw ScriptError(pos, "CallWPS is not available in this environment");
    return deep_copy(host_->call_wps(*endpoint, *pid, *inputs));
  }
  if (name == "spawn") {
    const std::string* wrapper = args[0].text();
    const Array* wargs = args[1].array();
    if (!wrapper || !wargs) throw ScriptError(pos, "spawn(wrapper: text, args: array)");
    auto arity = host_ ? host_->wrapper_arity(*wrapper) : std::nullopt;
    if (!arity) throw ScriptError(pos, "spawn: no wrapper named '" + *wrapper + "'");
    if (*arity != wargs->size())
      throw ScriptError(pos, "wrapper '" + *wrapper + "' expects " + std::to_string(*arity) + " arguments, got " +
                                 std::to_string(wargs->size()));
    std::vector<Value> copied;
    for (const auto& v : *wargs) copied.push_back(deep_copy(v));
    auto state = std::make_shared<HandleState>();
    state->wrapper = *wrapper;
    ScenarioHost* host = host_;
    state->result = std::async(std::launch::async, [host, name = *wrapper, copied = std::move(copied)] {
                      return host->call_wrapper(name, copied);
                    }).share();
    return Value(std::move(state));
  }
  if (name == "join") {
    HandlePtr h = args[0].handle();
    if (!h) throw ScriptError(pos, std::string("join needs a handle, got ") + kind_name(args[0]));
    return deep_copy(h->result.get());
  }
  if (name == "matrix") {
    double r = as_number(args[0], pos, "rows"), c = as_number(args[1], pos, "cols");
    if (!integral(r) || !integral(c) || r < 1 || c < 1) throw ScriptError(pos, "matrix dimensions must be positive integers");
    if (r * c > static_cast<double>(kMaxMatrixCells)) throw ScriptError(pos, "matrix too large");
    charge(static_cast<std::uint64_t>(r * c));
    return Value(std::make_shared<Matrix>(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
  }
  if (name == "mget") {
    Matrix& m = as_matrix(args[0], pos, "mget target");
    return Value(m.at(as_index(args[1], m.rows, pos, "row"), as_index(args[2], m.cols, pos, "column")));
  }
  if (name == "mset") {
    Matrix& m = as_matrix(args[0], pos, "mset target");
    std::size_t r = as_index(args[1], m.rows, pos, "row"), c = as_index(args[2], m.cols, pos, "column");
    m.at(r, c) = as_number(args[3], pos, "mset value");
    return Value();
  }
  if (name == "madd") {
    Matrix& a = as_matrix(args[0], pos, "madd operand");
    Matrix& b = as_matrix(args[1], pos, "madd operand");
    if (a.rows != b.rows || a.cols != b.cols) throw ScriptError(pos, "madd shape mismatch");
    charge(a.cells.size());
    auto out = std::make_shared<Matrix>(a.rows, a.cols);
    for (std::size_t i = 0; i < a.cells.size(); ++i) out->cells[i] = a.cells[i] + b.cells[i];
    return Value(std::move(out));
  }
  if (name == "mmul") {
    Matrix& a = as_matrix(args[0], pos, "mmul operand");
    Matrix& b = as_matrix(args[1], pos, "mmul operand");
    if (a.cols != b.rows) throw ScriptError(pos, "mmul shape mismatch");
    charge(static_cast<std::uint64_t>(a.rows) * a.cols * b.cols);
    auto out = std::make_shared<Matrix>(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t k = 0; k < a.cols; ++k)
        for (std::size_t j = 0; j < b.cols; ++j) out->at(i, j) += a.at(i, k) * b.at(k, j);
    return Value(std::move(out));
  }
  // msum
  Matrix& m = as_matrix(args[0], pos, "msum operand");
  charge(m.cells.size());
  double s = 0;
  for (double c : m.cells) s += c;
  return Value(s);
}

}  // namespace wpsenv::script
