#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "wpsenv/script/ast.hpp"

namespace wpsenv::script {

const char* to_string(BudgetKind k) {
  switch (k) {
    case BudgetKind::Steps: return "steps";
    case BudgetKind::Wall: return "wall";
    case BudgetKind::Depth: return "depth";
  }
  return "?";
}

const char* to_string(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::Ident: return "identifier";
    case Tok::KwFunction: return "'function'";
    case Tok::KwVar: return "'var'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwFor: return "'for'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwNull: return "'null'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Assign: return "'='";
    case Tok::Eq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Not: return "'!'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::End: return "end of input";
  }
  return "?";
}

namespace {

const std::map<std::string_view, Tok>& keywords() {
  static const std::map<std::string_view, Tok> kw{
      {"function", Tok::KwFunction}, {"var", Tok::KwVar},       {"if", Tok::KwIf},
      {"else", Tok::KwElse},         {"while", Tok::KwWhile},   {"for", Tok::KwFor},
      {"return", Tok::KwReturn},     {"true", Tok::KwTrue},     {"false", Tok::KwFalse},
      {"null", Tok::KwNull},
  };
  return kw;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.pos = pos_;
      if (at_end()) {
        t.kind = Tok::End;
        out.push_back(std::move(t));
        return out;
      }
      char c = peek();
      if (digit(c)) {
        lex_number(t);
      } else if (ident_start(c)) {
        size_t start = i_;
        while (!at_end() && ident_char(peek())) advance();
        t.text = std::string(src_.substr(start, i_ - start));
        auto kw = keywords().find(t.text);
        t.kind = kw == keywords().end() ? Tok::Ident : kw->second;
      } else if (c == '"' || c == '\'') {
        lex_string(t);
      } else {
        lex_punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool at_end() const { return i_ >= src_.size(); }
  char peek(size_t ahead = 0) const { return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0'; }
  char advance() {
    char c = src_[i_++];
    if (c == '\n') {
      ++pos_.line;
      pos_.col = 1;
    } else {
      ++pos_.col;
    }
    return c;
  }

  void skip_trivia() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        Pos start = pos_;
        advance();
        advance();
        for (;;) {
          if (at_end()) throw ScriptError(start, "unterminated comment");
          if (peek() == '*' && peek(1) == '/') {
            advance();
            advance();
            break;
          }
          advance();
        }
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    size_t start = i_;
    while (digit(peek())) advance();
    if (peek() == '.') {
      advance();
      if (!digit(peek())) throw ScriptError(pos_, "malformed number: digit expected after '.'");
      while (digit(peek())) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      advance();
      if (peek() == '+' || peek() == '-') advance();
      if (!digit(peek())) throw ScriptError(pos_, "malformed number: digit expected in exponent");
      while (digit(peek())) advance();
    }
    if (ident_char(peek())) throw ScriptError(pos_, "malformed number");
    t.kind = Tok::Number;
    t.text = std::string(src_.substr(start, i_ - start));
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (res.ec == std::errc::result_out_of_range) {
      // from_chars refuses overflow; fall back to strtod which yields inf/0
      t.number = std::strtod(t.text.c_str(), nullptr);
    } else if (res.ec != std::errc{}) {
      throw ScriptError(t.pos, "malformed number");
    }
  }

  void lex_string(Token& t) {
    char quote = advance();
    t.kind = Tok::String;
    for (;;) {
      if (at_end() || peek() == '\n') throw ScriptError(t.pos, "unterminated string");
      char c = advance();
      if (c == quote) return;
      if (c != '\\') {
        t.text += c;
        continue;
      }
      if (at_end()) throw ScriptError(t.pos, "unterminated string");
      Pos esc = pos_;
      char e = advance();
      switch (e) {
        case '\\': t.text += '\\'; break;
        case '"': t.text += '"'; break;
        case '\'': t.text += '\''; break;
        case 'n': t.text += '\n'; break;
        case 't': t.text += '\t'; break;
        default: throw ScriptError(esc, std::string("unknown escape \\") + e);
      }
    }
  }

  void lex_punct(Token& t) {
    char c = advance();
    char n = peek();
    auto two = [&](Tok k) {
      advance();
      t.kind = k;
    };
    switch (c) {
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case '{': t.kind = Tok::LBrace; break;
      case '}': t.kind = Tok::RBrace; break;
      case '[': t.kind = Tok::LBracket; break;
      case ']': t.kind = Tok::RBracket; break;
      case ',': t.kind = Tok::Comma; break;
      case ';': t.kind = Tok::Semi; break;
      case ':': t.kind = Tok::Colon; break;
      case '.': t.kind = Tok::Dot; break;
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '*': t.kind = Tok::Star; break;
      case '/': t.kind = Tok::Slash; break;
      case '%': t.kind = Tok::Percent; break;
      case '=': n == '=' ? two(Tok::Eq) : void(t.kind = Tok::Assign); break;
      case '!': n == '=' ? two(Tok::Ne) : void(t.kind = Tok::Not); break;
      case '<': n == '=' ? two(Tok::Le) : void(t.kind = Tok::Lt); break;
      case '>': n == '=' ? two(Tok::Ge) : void(t.kind = Tok::Gt); break;
      case '&':
        if (n != '&') throw ScriptError(t.pos, "unexpected character '&'");
        two(Tok::AndAnd);
        break;
      case '|':
        if (n != '|') throw ScriptError(t.pos, "unexpected character '|'");
        two(Tok::OrOr);
        break;
      default: {
        char shown[8];
        if (std::isprint(static_cast<unsigned char>(c)))
          std::snprintf(shown, sizeof shown, "%c", c);
        else
          std::snprintf(shown, sizeof shown, "\\x%02x", static_cast<unsigned char>(c));
        throw ScriptError(t.pos, std::string("unexpected character '") + shown + "'");
      }
    }
  }

  std::string_view src_;
  size_t i_ = 0;
  Pos pos_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace wpsenv::script
