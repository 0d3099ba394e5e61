#include <optional>
#include <cctype>
#include <charconv>
#include <limits>
#include <sstream>

#include "mdl/syntax.hpp"

namespace mdl {

ParseError::ParseError(Kind kind, SourcePos pos, std::string message,
                       std::vector<std::string> expected)
    : std::runtime_error(std::move(message)),
      kind_(kind),
      pos_(pos),
      expected_(std::move(expected)) {}

std::string ParseError::render(std::string_view source_name) const {
  std::ostringstream os;
  os << source_name << ':' << pos_.line << ':' << pos_.column << ": " << what();
  if (!expected_.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < expected_.size(); ++i) {
      if (i) os << (i + 1 == expected_.size() ? " or " : ", ");
      os << expected_[i];
    }
    os << ')';
  }
  return os.str();
}

namespace {

enum class Tok {
  Int, Ident, Wild, End,
  LParen, RParen, Comma, Semi, Arrow, Equals,
  ParOpen, ParClose, RunOpen, RunClose,
  EqEq, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, OrOr, AndAnd,
  // keywords
  Let, In, If, Then, Else, Fun, Mu, Par, Alloc, Length, Assert, Cas, Load, Store,
  Fst, Snd, True, False, Mod,
};

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  SourcePos pos;
};

const std::unordered_map<std::string_view, Tok>& keywords() {
  static const std::unordered_map<std::string_view, Tok> table = {
      {"let", Tok::Let},       {"in", Tok::In},         {"if", Tok::If},
      {"then", Tok::Then},     {"else", Tok::Else},     {"fun", Tok::Fun},
      {"mu", Tok::Mu},         {"par", Tok::Par},       {"alloc", Tok::Alloc},
      {"length", Tok::Length}, {"assert", Tok::Assert}, {"cas", Tok::Cas},
      {"load", Tok::Load},     {"store", Tok::Store},   {"fst", Tok::Fst},
      {"snd", Tok::Snd},       {"true", Tok::True},     {"false", Tok::False},
      {"mod", Tok::Mod},
  };
  return table;
}

std::string describe(Tok t) {
  switch (t) {
    case Tok::Int: return "integer";
    case Tok::Ident: return "identifier";
    case Tok::Wild: return "'_'";
    case Tok::End: return "end of input";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Arrow: return "'->'";
    case Tok::Equals: return "'='";
    case Tok::ParOpen: return "'(|'";
    case Tok::ParClose: return "'|)'";
    case Tok::RunOpen: return "'(||'";
    case Tok::RunClose: return "'||)'";
    case Tok::EqEq: return "'=='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::OrOr: return "'||'";
    case Tok::AndAnd: return "'&&'";
    default: break;
  }
  for (const auto& [word, tok] : keywords()) {
    if (tok == t) return "'" + std::string(word) + "'";
  }
  return "token";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = SourcePos{line_, col_};
      if (i_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      std::size_t start = i_;
      char c = src_[i_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
        t.kind = Tok::Int;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                    src_[i_] == '_' || src_[i_] == '\'')) {
          advance();
        }
        std::string_view word = src_.substr(start, i_ - start);
        if (word == "_") t.kind = Tok::Wild;
        else if (auto it = keywords().find(word); it != keywords().end()) t.kind = it->second;
        else t.kind = Tok::Ident;
      } else {
        t.kind = symbol(t.pos);
      }
      t.text = src_.substr(start, i_ - start);
      out.push_back(t);
    }
  }

 private:
  bool at(std::string_view s) const { return src_.substr(i_, s.size()) == s; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void advance(std::size_t n) {
    while (n--) advance();
  }

  void skip_space() {
    for (;;) {
      while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) advance();
      if (at("--")) {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
        continue;
      }
      return;
    }
  }

  Tok symbol(SourcePos pos) {
    static const std::pair<std::string_view, Tok> table[] = {
        {"(||", Tok::RunOpen}, {"||)", Tok::RunClose}, {"(|", Tok::ParOpen},
        {"|)", Tok::ParClose}, {"||", Tok::OrOr},      {"&&", Tok::AndAnd},
        {"->", Tok::Arrow},    {"==", Tok::EqEq},      {"<=", Tok::Le},
        {">=", Tok::Ge},       {"(", Tok::LParen},     {")", Tok::RParen},
        {",", Tok::Comma},     {";", Tok::Semi},       {"=", Tok::Equals},
        {"<", Tok::Lt},        {">", Tok::Gt},         {"+", Tok::Plus},
        {"-", Tok::Minus},     {"*", Tok::Star},       {"/", Tok::Slash},
    };
    for (const auto& [text, tok] : table) {
      if (at(text)) {
        advance(text.size());
        return tok;
      }
    }
    throw ParseError(ParseError::Kind::Syntax, pos,
                     "unexpected character '" + std::string(1, src_[i_]) + "'");
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, ParseOptions opts, SourceMap& positions)
      : toks_(std::move(toks)), opts_(opts), positions_(positions) {}

  ExprPtr program() {
    ExprPtr e = expr();
    expect(Tok::End);
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool is(Tok t) const { return peek().kind == t; }

  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool accept(Tok t) {
    if (!is(t)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(std::vector<Tok> expected) {
    std::vector<std::string> names;
    for (Tok t : expected) names.push_back(describe(t));
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + std::string(t.text) + "'";
    throw ParseError(ParseError::Kind::Syntax, t.pos, "unexpected " + found, std::move(names));
  }

  Token expect(Tok t) {
    if (!is(t)) fail({t});
    return next();
  }

  ExprPtr at(SourcePos p, ExprPtr e) {
    positions_.emplace(e.get(), p);
    return e;
  }

  Symbol binder() {
    if (accept(Tok::Wild)) return Symbol("_");
    return Symbol(expect(Tok::Ident).text);
  }

  bool starts_atom() const {
    switch (peek().kind) {
      case Tok::Int:
      case Tok::Ident:
      case Tok::Wild:
      case Tok::True:
      case Tok::False:
      case Tok::LParen:
      case Tok::ParOpen:
      case Tok::RunOpen:
        return true;
      default:
        return false;
    }
  }

  ExprPtr expr() {
    SourcePos p = peek().pos;
    switch (peek().kind) {
      case Tok::Let: {
        next();
        Symbol x = binder();
        expect(Tok::Equals);
        ExprPtr bound = expr();
        expect(Tok::In);
        ExprPtr body = expr();
        return at(p, Expr::let(x, std::move(bound), std::move(body)));
      }
      case Tok::If: {
        next();
        ExprPtr c = expr();
        expect(Tok::Then);
        ExprPtr t = expr();
        expect(Tok::Else);
        ExprPtr f = expr();
        return at(p, Expr::if_(std::move(c), std::move(t), std::move(f)));
      }
      case Tok::Fun:
        next();
        return lambda(p, Symbol("_"));
      case Tok::Mu: {
        next();
        Symbol f = binder();
        return lambda(p, f);
      }
      default:
        return seq();
    }
  }

  ExprPtr lambda(SourcePos p, Symbol self) {
    std::vector<Symbol> params;
    params.push_back(binder());
    while (is(Tok::Ident) || is(Tok::Wild)) params.push_back(binder());
    expect(Tok::Arrow);
    ExprPtr body = expr();
    for (std::size_t i = params.size(); i-- > 1;) {
      body = at(p, Expr::fun(Symbol("_"), params[i], std::move(body)));
    }
    return at(p, Expr::fun(self, params[0], std::move(body)));
  }

  ExprPtr seq() {
    SourcePos p = peek().pos;
    ExprPtr first = binary(0);
    if (accept(Tok::Semi)) {
      ExprPtr rest = expr();
      return at(p, Expr::let(Symbol("_"), std::move(first), std::move(rest)));
    }
    return first;
  }

  struct OpInfo {
    int level;
    PrimOp op;
  };

  std::optional<OpInfo> binop(Tok t) const {
    switch (t) {
      case Tok::OrOr: return OpInfo{0, PrimOp::Or};
      case Tok::AndAnd: return OpInfo{1, PrimOp::And};
      case Tok::EqEq: return OpInfo{2, PrimOp::Eq};
      case Tok::Lt: return OpInfo{2, PrimOp::Lt};
      case Tok::Le: return OpInfo{2, PrimOp::Le};
      case Tok::Gt: return OpInfo{2, PrimOp::Gt};
      case Tok::Ge: return OpInfo{2, PrimOp::Ge};
      case Tok::Plus: return OpInfo{3, PrimOp::Add};
      case Tok::Minus: return OpInfo{3, PrimOp::Sub};
      case Tok::Star: return OpInfo{4, PrimOp::Mul};
      case Tok::Slash: return OpInfo{4, PrimOp::Div};
      case Tok::Mod: return OpInfo{4, PrimOp::Mod};
      default: return std::nullopt;
    }
  }

  // Levels: 0 ||, 1 &&, 2 comparisons (non-associative), 3 + -, 4 * / mod.
  ExprPtr binary(int level) {
    if (level > 4) return unary();
    SourcePos p = peek().pos;
    ExprPtr lhs = binary(level + 1);
    for (;;) {
      auto info = binop(peek().kind);
      if (!info || info->level != level) return lhs;
      next();
      ExprPtr rhs = binary(level + 1);
      lhs = at(p, Expr::prim(info->op, std::move(lhs), std::move(rhs)));
      if (level == 2) {
        if (auto again = binop(peek().kind); again && again->level == 2) {
          throw ParseError(ParseError::Kind::Syntax, peek().pos,
                           "comparison operators do not associate; add parentheses");
        }
        return lhs;
      }
    }
  }

  ExprPtr unary() {
    if (is(Tok::Minus)) {
      Token minus = next();
      Token lit = expect(Tok::Int);
      return at(minus.pos, Expr::integer(integer(lit, true)));
    }
    return application();
  }

  std::int64_t integer(const Token& t, bool negative) {
    std::uint64_t mag = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), mag);
    std::uint64_t limit = negative ? std::uint64_t{1} << 63
                                   : static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
    if (ec != std::errc{} || mag > limit) {
      throw ParseError(ParseError::Kind::IntegerOverflow, t.pos,
                       "integer literal out of 64-bit range");
    }
    if (negative) return mag == limit ? std::numeric_limits<std::int64_t>::min()
                                      : -static_cast<std::int64_t>(mag);
    return static_cast<std::int64_t>(mag);
  }

  ExprPtr application() {
    SourcePos p = peek().pos;
    ExprPtr head = builtin_or_atom();
    while (starts_atom()) {
      ExprPtr arg = atom();
      head = at(p, Expr::app(std::move(head), std::move(arg)));
    }
    return head;
  }

  ExprPtr builtin_or_atom() {
    SourcePos p = peek().pos;
    switch (peek().kind) {
      case Tok::Alloc: next(); return at(p, Expr::alloc(atom()));
      case Tok::Length: next(); return at(p, Expr::length(atom()));
      case Tok::Assert: next(); return at(p, Expr::assert_(atom()));
      case Tok::Fst: next(); return at(p, Expr::proj(1, atom()));
      case Tok::Snd: next(); return at(p, Expr::proj(2, atom()));
      case Tok::Load: {
        next();
        ExprPtr a = atom();
        ExprPtr i = atom();
        return at(p, Expr::load(std::move(a), std::move(i)));
      }
      case Tok::Store: {
        next();
        ExprPtr a = atom();
        ExprPtr i = atom();
        ExprPtr v = atom();
        return at(p, Expr::store(std::move(a), std::move(i), std::move(v)));
      }
      case Tok::Cas: {
        next();
        ExprPtr a = atom();
        ExprPtr i = atom();
        ExprPtr o = atom();
        ExprPtr n = atom();
        return at(p, Expr::cas(std::move(a), std::move(i), std::move(o), std::move(n)));
      }
      case Tok::Par: {
        // closure-calling convention: par f g runs (f ()) and (g ()) in parallel
        next();
        ExprPtr f = atom();
        ExprPtr g = atom();
        return at(p, Expr::par(at(p, Expr::app(std::move(f), Expr::unit())),
                               at(p, Expr::app(std::move(g), Expr::unit()))));
      }
      default:
        return atom();
    }
  }

  ExprPtr atom() {
    const Token& t = peek();
    SourcePos p = t.pos;
    switch (t.kind) {
      case Tok::Int: {
        Token lit = next();
        return at(p, Expr::integer(integer(lit, false)));
      }
      case Tok::True: next(); return at(p, Expr::boolean(true));
      case Tok::False: next(); return at(p, Expr::boolean(false));
      case Tok::Ident: {
        Token id = next();
        return at(p, Expr::var(Symbol(id.text)));
      }
      case Tok::Wild:
        throw ParseError(ParseError::Kind::Syntax, p, "'_' can only be used as a binder");
      case Tok::LParen: {
        next();
        if (accept(Tok::RParen)) return at(p, Expr::unit());
        ExprPtr a = expr();
        if (accept(Tok::Comma)) {
          ExprPtr b = expr();
          expect(Tok::RParen);
          return at(p, Expr::pair(std::move(a), std::move(b)));
        }
        if (!is(Tok::RParen)) fail({Tok::RParen, Tok::Comma});
        next();
        return a;
      }
      case Tok::ParOpen: {
        next();
        ExprPtr a = expr();
        expect(Tok::Comma);
        ExprPtr b = expr();
        expect(Tok::ParClose);
        return at(p, Expr::par(std::move(a), std::move(b)));
      }
      case Tok::RunOpen: {
        if (!opts_.allow_run_par) {
          throw ParseError(ParseError::Kind::ReservedForm, p,
                           "the active parallel tuple is a runtime form and cannot appear in programs");
        }
        next();
        ExprPtr a = expr();
        expect(Tok::Comma);
        ExprPtr b = expr();
        expect(Tok::RunClose);
        return at(p, Expr::run_par(std::move(a), std::move(b)));
      }
      default:
        fail({Tok::Int, Tok::Ident, Tok::True, Tok::False, Tok::LParen, Tok::ParOpen});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOptions opts_;
  SourceMap& positions_;
};

}  // namespace

ParsedProgram parse_program(std::string_view text, ParseOptions opts) {
  ParsedProgram out;
  Parser parser(Lexer(text).run(), opts, out.positions);
  out.expr = parser.program();
  return out;
}

ExprPtr parse(std::string_view text, ParseOptions opts) { return parse_program(text, opts).expr; }

}  // namespace mdl
