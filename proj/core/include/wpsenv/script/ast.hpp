#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wpsenv/error.hpp"

namespace wpsenv::script {

struct Pos {
  int line = 1;
  int col = 1;
  bool operator==(const Pos&) const = default;
};

/// Lexing, parsing and runtime errors inside a scenario. Position is 1-based;
/// 0/0 when no source location applies.
class ScriptError : public Error {
 public:
  ScriptError(Pos pos, const std::string& message)
      : Error(ErrorCode::Script, "line " + std::to_string(pos.line) + ", col " + std::to_string(pos.col) + ": " + message),
        pos_(pos),
        message_(message) {}
  Pos pos() const noexcept { return pos_; }
  const std::string& message() const noexcept { return message_; }

 private:
  Pos pos_;
  std::string message_;
};

enum class BudgetKind { Steps, Wall, Depth };

const char* to_string(BudgetKind k);

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(BudgetKind kind)
      : Error(ErrorCode::BudgetExceeded, std::string("budget exceeded: ") + to_string(kind)), kind_(kind) {}
  BudgetKind kind() const noexcept { return kind_; }

 private:
  BudgetKind kind_;
};

// ---------------------------------------------------------------------------
// Tokens

enum class Tok {
  Number, String, Ident,
  KwFunction, KwVar, KwIf, KwElse, KwWhile, KwFor, KwReturn, KwTrue, KwFalse, KwNull,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket, Comma, Semi, Colon, Dot,
  Assign, Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, Percent, Not, AndAnd, OrOr,
  End,
};

const char* to_string(Tok t);

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier name, decoded string payload, or number spelling
  double number = 0;
  Pos pos;
  bool operator==(const Token&) const = default;
};

std::vector<Token> tokenize(std::string_view source);

// ---------------------------------------------------------------------------
// Syntax tree

struct Expr;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;
using Block = std::vector<StmtPtr>;

enum class BinOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div, Mod };
enum class UnOp { Not, Neg };

const char* to_string(BinOp op);

struct NumberLit { double value = 0; };
struct StringLit { std::string value; };
struct BoolLit { bool value = false; };
struct NullLit {};
struct Ident { std::string name; };
struct Member { ExprPtr object; std::string name; };
struct Index { ExprPtr object; ExprPtr index; };
struct Call { ExprPtr callee; std::vector<ExprPtr> args; };
struct Unary { UnOp op; ExprPtr operand; };
struct Binary { BinOp op; ExprPtr lhs; ExprPtr rhs; };
struct ObjectLit { std::vector<std::pair<std::string, ExprPtr>> fields; };
struct ArrayLit { std::vector<ExprPtr> items; };

struct Expr {
  Pos pos;
  std::variant<NumberLit, StringLit, BoolLit, NullLit, Ident, Member, Index, Call, Unary, Binary, ObjectLit, ArrayLit>
      node;
};

struct VarDecl { std::string name; ExprPtr init; };
struct Assign { ExprPtr target; ExprPtr value; };
struct If { ExprPtr cond; Block then_block; std::optional<Block> else_block; };
struct While { ExprPtr cond; Block body; };
struct For { StmtPtr init; ExprPtr cond; StmtPtr step; Block body; };
struct Return { ExprPtr value; };  // may be null
struct ExprStmt { ExprPtr expr; };

struct Stmt {
  Pos pos;
  std::variant<VarDecl, Assign, If, While, For, Return, ExprStmt> node;
};

struct FunctionDecl {
  Pos pos;
  std::string name;
  std::vector<std::string> params;
  Block body;
};

struct Program {
  std::vector<FunctionDecl> functions;

  const FunctionDecl* find(std::string_view name) const;
};

inline constexpr int kMaxNesting = 200;

/// Recursive descent over the token list. Never aborts: malformed input and
/// nesting deeper than kMaxNesting both yield ScriptError.
Program parse(const std::vector<Token>& tokens);
Program parse_source(std::string_view source);

/// S-expression rendering; stable, used by tests.
std::string dump(const Program& p);
std::string dump(const Expr& e);
std::string dump(const Stmt& s);

}  // namespace wpsenv::script
