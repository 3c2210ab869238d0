#include <set>

#include "wpsenv/numfmt.hpp"
#include "wpsenv/script/ast.hpp"

namespace wpsenv::script {

const char* to_string(BinOp op) {
  switch (op) {
    case BinOp::Or: return "||";
    case BinOp::And: return "&&";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
  }
  return "?";
}

const FunctionDecl* Program::find(std::string_view name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

namespace {

template <typename T>
ExprPtr make_expr(Pos pos, T node) {
  auto e = std::make_unique<Expr>();
  e->pos = pos;
  e->node = std::move(node);
  return e;
}

template <typename T>
StmtPtr make_stmt(Pos pos, T node) {
  auto s = std::make_unique<Stmt>();
  s->pos = pos;
  s->node = std::move(node);
  return s;
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& toks) : toks_(toks) {
    if (toks_.empty() || toks_.back().kind != Tok::End) throw ScriptError({}, "token list must end with end of input");
  }

  Program program() {
    Program p;
    std::set<std::string> names;
    while (!check(Tok::End)) {
      auto fn = function();
      if (!names.insert(fn.name).second) throw ScriptError(fn.pos, "function '" + fn.name + "' defined twice");
      p.functions.push_back(std::move(fn));
    }
    return p;
  }

 private:
  struct Nest {
    explicit Nest(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxNesting) throw ScriptError(p_.peek().pos, "nesting too deep");
    }
    ~Nest() { --p_.depth_; }
    Parser& p_;
  };

  const Token& peek(size_t ahead = 0) const { return toks_[std::min(i_ + ahead, toks_.size() - 1)]; }
  bool check(Tok k) const { return peek().kind == k; }
  const Token& advance() {
    const Token& t = toks_[i_];
    if (i_ + 1 < toks_.size()) ++i_;
    return t;
  }
  bool match(Tok k) {
    if (!check(k)) return false;
    advance();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (!check(k))
      throw ScriptError(peek().pos, std::string("expected ") + what + ", found " + describe(peek()));
    return advance();
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::Ident: return "identifier '" + t.text + "'";
      case Tok::Number: return "number " + t.text;
      case Tok::String: return "string";
      default: return to_string(t.kind);
    }
  }

  FunctionDecl function() {
    FunctionDecl fn;
    fn.pos = expect(Tok::KwFunction, "'function'").pos;
    fn.name = expect(Tok::Ident, "function name").text;
    expect(Tok::LParen, "'('");
    std::set<std::string> seen;
    if (!check(Tok::RParen)) {
      do {
        const Token& p = expect(Tok::Ident, "parameter name");
        if (!seen.insert(p.text).second) throw ScriptError(p.pos, "duplicate parameter '" + p.text + "'");
        fn.params.push_back(p.text);
      } while (match(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    fn.body = block();
    return fn;
  }

  Block block() {
    Nest guard(*this);
    expect(Tok::LBrace, "'{'");
    Block b;
    while (!check(Tok::RBrace)) {
      if (check(Tok::End)) throw ScriptError(peek().pos, "expected '}', found end of input");
      b.push_back(statement());
    }
    advance();
    return b;
  }

  StmtPtr statement() {
    Pos pos = peek().pos;
    switch (peek().kind) {
      case Tok::KwIf: {
        advance();
        expect(Tok::LParen, "'('");
        If node;
        node.cond = expr();
        expect(Tok::RParen, "')'");
        node.then_block = block();
        if (match(Tok::KwElse)) node.else_block = block();
        return make_stmt(pos, std::move(node));
      }
      case Tok::KwWhile: {
        advance();
        expect(Tok::LParen, "'('");
        While node;
        node.cond = expr();
        expect(Tok::RParen, "')'");
        node.body = block();
        return make_stmt(pos, std::move(node));
      }
      case Tok::KwFor: {
        advance();
        expect(Tok::LParen, "'('");
        For node;
        if (!check(Tok::Semi)) node.init = simple_statement();
        expect(Tok::Semi, "';'");
        if (!check(Tok::Semi)) node.cond = expr();
        expect(Tok::Semi, "';'");
        if (!check(Tok::RParen)) node.step = simple_statement();
        expect(Tok::RParen, "')'");
        node.body = block();
        return make_stmt(pos, std::move(node));
      }
      case Tok::KwReturn: {
        advance();
        Return node;
        if (!check(Tok::Semi)) node.value = expr();
        expect(Tok::Semi, "';'");
        return make_stmt(pos, std::move(node));
      }
      default: {
        auto s = simple_statement();
        expect(Tok::Semi, "';'");
        return s;
      }
    }
  }

  // var declaration, assignment or expression, without the trailing ';'
  StmtPtr simple_statement() {
    Pos pos = peek().pos;
    if (match(Tok::KwVar)) {
      VarDecl node;
      node.name = expect(Tok::Ident, "variable name").text;
      expect(Tok::Assign, "'='");
      node.init = expr();
      return make_stmt(pos, std::move(node));
    }
    auto e = expr();
    if (check(Tok::Assign)) {
      if (!std::holds_alternative<Ident>(e->node) && !std::holds_alternative<Member>(e->node) &&
          !std::holds_alternative<Index>(e->node))
        throw ScriptError(peek().pos, "invalid assignment target");
      advance();
      Assign node;
      node.target = std::move(e);
      node.value = expr();
      return make_stmt(pos, std::move(node));
    }
    return make_stmt(pos, ExprStmt{std::move(e)});
  }

  ExprPtr expr() {
    Nest guard(*this);
    return or_expr();
  }

  template <typename Next>
  ExprPtr binary_level(Next next, std::initializer_list<std::pair<Tok, BinOp>> ops) {
    auto lhs = (this->*next)();
    // each link of a left-deep chain adds one level to the tree
    struct Chain {
      Parser& p;
      int links = 0;
      ~Chain() { p.depth_ -= links; }
    } chain{*this};
    for (;;) {
      const std::pair<Tok, BinOp>* hit = nullptr;
      for (const auto& op : ops)
        if (check(op.first)) hit = &op;
      if (!hit) return lhs;
      Pos pos = advance().pos;
      ++chain.links;
      if (++depth_ > kMaxNesting) throw ScriptError(pos, "nesting too deep");
      auto rhs = (this->*next)();
      lhs = make_expr(pos, Binary{hit->second, std::move(lhs), std::move(rhs)});
    }
  }

  ExprPtr or_expr() { return binary_level(&Parser::and_expr, {{Tok::OrOr, BinOp::Or}}); }
  ExprPtr and_expr() { return binary_level(&Parser::eq_expr, {{Tok::AndAnd, BinOp::And}}); }
  ExprPtr eq_expr() { return binary_level(&Parser::rel_expr, {{Tok::Eq, BinOp::Eq}, {Tok::Ne, BinOp::Ne}}); }
  ExprPtr rel_expr() {
    return binary_level(&Parser::add_expr,
                        {{Tok::Lt, BinOp::Lt}, {Tok::Le, BinOp::Le}, {Tok::Gt, BinOp::Gt}, {Tok::Ge, BinOp::Ge}});
  }
  ExprPtr add_expr() { return binary_level(&Parser::mul_expr, {{Tok::Plus, BinOp::Add}, {Tok::Minus, BinOp::Sub}}); }
  ExprPtr mul_expr() {
    return binary_level(&Parser::unary_expr,
                        {{Tok::Star, BinOp::Mul}, {Tok::Slash, BinOp::Div}, {Tok::Percent, BinOp::Mod}});
  }

  ExprPtr unary_expr() {
    Pos pos = peek().pos;
    if (check(Tok::Not) || check(Tok::Minus)) {
      Nest guard(*this);
      UnOp op = advance().kind == Tok::Not ? UnOp::Not : UnOp::Neg;
      return make_expr(pos, Unary{op, unary_expr()});
    }
    return postfix_expr();
  }

  ExprPtr postfix_expr() {
    auto e = primary();
    struct Chain {
      Parser& p;
      int links = 0;
      ~Chain() { p.depth_ -= links; }
    } chain{*this};
    for (;;) {
      Pos pos = peek().pos;
      if (check(Tok::Dot) || check(Tok::LBracket) || check(Tok::LParen)) {
        ++chain.links;
        if (++depth_ > kMaxNesting) throw ScriptError(pos, "nesting too deep");
      }
      if (match(Tok::Dot)) {
        std::string name = expect(Tok::Ident, "member name").text;
        e = make_expr(pos, Member{std::move(e), std::move(name)});
      } else if (match(Tok::LBracket)) {
        auto idx = expr();
        expect(Tok::RBracket, "']'");
        e = make_expr(pos, Index{std::move(e), std::move(idx)});
      } else if (match(Tok::LParen)) {
        Call c{std::move(e), {}};
        if (!check(Tok::RParen)) {
          do c.args.push_back(expr());
          while (match(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        e = make_expr(pos, std::move(c));
      } else {
        return e;
      }
    }
  }

  ExprPtr primary() {
    const Token& t = peek();
    Pos pos = t.pos;
    switch (t.kind) {
      case Tok::Number: advance(); return make_expr(pos, NumberLit{t.number});
      case Tok::String: advance(); return make_expr(pos, StringLit{t.text});
      case Tok::KwTrue: advance(); return make_expr(pos, BoolLit{true});
      case Tok::KwFalse: advance(); return make_expr(pos, BoolLit{false});
      case Tok::KwNull: advance(); return make_expr(pos, NullLit{});
      case Tok::Ident: advance(); return make_expr(pos, Ident{t.text});
      case Tok::LParen: {
        advance();
        auto e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::LBrace: {
        advance();
        ObjectLit obj;
        std::set<std::string> keys;
        if (!check(Tok::RBrace)) {
          do {
            const Token& k = expect(Tok::Ident, "object key");
            if (!keys.insert(k.text).second) throw ScriptError(k.pos, "duplicate key '" + k.text + "'");
            expect(Tok::Colon, "':'");
            obj.fields.emplace_back(k.text, expr());
          } while (match(Tok::Comma));
        }
        expect(Tok::RBrace, "'}'");
        return make_expr(pos, std::move(obj));
      }
      case Tok::LBracket: {
        advance();
        ArrayLit arr;
        if (!check(Tok::RBracket)) {
          do arr.items.push_back(expr());
          while (match(Tok::Comma));
        }
        expect(Tok::RBracket, "']'");
        return make_expr(pos, std::move(arr));
      }
      default: throw ScriptError(pos, "expected expression, found " + describe(t));
    }
  }

  const std::vector<Token>& toks_;
  size_t i_ = 0;
  int depth_ = 0;
};

// ---------------------------------------------------------------------------
// dump

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string dump_block(const Block& b) {
  std::string out = "(block";
  for (const auto& s : b) out += " " + dump(*s);
  return out + ")";
}

}  // namespace

Program parse(const std::vector<Token>& tokens) { return Parser(tokens).program(); }

Program parse_source(std::string_view source) { return parse(tokenize(source)); }

std::string dump(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NumberLit>) return format_number(n.value);
        else if constexpr (std::is_same_v<T, StringLit>) return quote(n.value);
        else if constexpr (std::is_same_v<T, BoolLit>) return n.value ? "true" : "false";
        else if constexpr (std::is_same_v<T, NullLit>) return "null";
        else if constexpr (std::is_same_v<T, Ident>) return n.name;
        else if constexpr (std::is_same_v<T, Member>) return "(. " + dump(*n.object) + " " + n.name + ")";
        else if constexpr (std::is_same_v<T, Index>) return "([] " + dump(*n.object) + " " + dump(*n.index) + ")";
        else if constexpr (std::is_same_v<T, Call>) {
          std::string out = "(call " + dump(*n.callee);
          for (const auto& a : n.args) out += " " + dump(*a);
          return out + ")";
        } else if constexpr (std::is_same_v<T, Unary>)
          return std::string("(") + (n.op == UnOp::Not ? "!" : "neg") + " " + dump(*n.operand) + ")";
        else if constexpr (std::is_same_v<T, Binary>)
          return std::string("(") + to_string(n.op) + " " + dump(*n.lhs) + " " + dump(*n.rhs) + ")";
        else if constexpr (std::is_same_v<T, ObjectLit>) {
          std::string out = "(object";
          for (const auto& [k, v] : n.fields) out += " (" + k + " " + dump(*v) + ")";
          return out + ")";
        } else {
          std::string out = "(array";
          for (const auto& v : n.items) out += " " + dump(*v);
          return out + ")";
        }
      },
      e.node);
}

std::string dump(const Stmt& s) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) return "(var " + n.name + " " + dump(*n.init) + ")";
        else if constexpr (std::is_same_v<T, Assign>) return "(= " + dump(*n.target) + " " + dump(*n.value) + ")";
        else if constexpr (std::is_same_v<T, If>) {
          std::string out = "(if " + dump(*n.cond) + " " + dump_block(n.then_block);
          if (n.else_block) out += " " + dump_block(*n.else_block);
          return out + ")";
        } else if constexpr (std::is_same_v<T, While>)
          return "(while " + dump(*n.cond) + " " + dump_block(n.body) + ")";
        else if constexpr (std::is_same_v<T, For>) {
          return "(for " + (n.init ? dump(*n.init) : "_") + " " + (n.cond ? dump(*n.cond) : "_") + " " +
                 (n.step ? dump(*n.step) : "_") + " " + dump_block(n.body) + ")";
        } else if constexpr (std::is_same_v<T, Return>)
          return n.value ? "(return " + dump(*n.value) + ")" : "(return)";
        else
          return "(expr " + dump(*n.expr) + ")";
      },
      s.node);
}

std::string dump(const Program& p) {
  std::string out;
  for (const auto& f : p.functions) {
    out += "(function " + f.name + " (";
    for (size_t i = 0; i < f.params.size(); ++i) out += (i ? " " : "") + f.params[i];
    out += ") " + dump_block(f.body) + ")\n";
  }
  return out;
}

}  // namespace wpsenv::script
