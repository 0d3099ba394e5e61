#include <string>

#include "mdl/syntax.hpp"

namespace mdl {
namespace {

// Precedence levels, loosest first.
enum Level : int {
  kOpen = 0,  // let, if, fun, mu
  kSeq = 1,
  kOr = 2,
  kAnd = 3,
  kCmp = 4,
  kAdd = 5,
  kMul = 6,
  kApp = 8,
  kAtom = 9,
};

int prim_level(PrimOp op) {
  switch (op) {
    case PrimOp::Or: return kOr;
    case PrimOp::And: return kAnd;
    case PrimOp::Eq:
    case PrimOp::Lt:
    case PrimOp::Le:
    case PrimOp::Gt:
    case PrimOp::Ge: return kCmp;
    case PrimOp::Add:
    case PrimOp::Sub: return kAdd;
    default: return kMul;
  }
}

bool is_unit_call(const Expr& e) {
  return e.is(ExprKind::App) && e.kid(1)->is_value() && e.kid(1)->value().is(Value::Kind::Unit);
}

class Printer {
 public:
  std::string out;

  void expr(const Expr& e, int ctx) {
    int own = level(e);
    bool parens = own < ctx;
    if (parens) out += '(';
    body(e);
    if (parens) out += ')';
  }

  void value(const Value& v, int ctx) {
    switch (v.kind()) {
      case Value::Kind::Unit: out += "()"; break;
      case Value::Kind::Bool: out += v.as_bool() ? "true" : "false"; break;
      case Value::Kind::Int:
        if (v.as_int() < 0) out += "(" + std::to_string(v.as_int()) + ")";
        else out += std::to_string(v.as_int());
        break;
      case Value::Kind::Loc: out += "#" + std::to_string(v.as_loc().id); break;
      case Value::Kind::Pair:
        out += '(';
        value(v.first(), kOpen);
        out += ", ";
        value(v.second(), kOpen);
        out += ')';
        break;
      case Value::Kind::Fun:
        if (ctx > kOpen) out += '(';
        lambda(v.fun_self(), v.fun_param(), *v.fun_body());
        if (ctx > kOpen) out += ')';
        break;
    }
  }

 private:
  static int level(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Val:
        return e.value().is(Value::Kind::Fun) ? kOpen : kAtom;
      case ExprKind::Var:
      case ExprKind::Pair:
      case ExprKind::RunPar:
        return kAtom;
      case ExprKind::Let:
        return e.name().is_wildcard() ? kSeq : kOpen;
      case ExprKind::If:
      case ExprKind::Fun:
        return kOpen;
      case ExprKind::Prim:
        return prim_level(e.op());
      case ExprKind::Par:
        return is_unit_call(*e.kid(0)) && is_unit_call(*e.kid(1)) ? kApp : kAtom;
      default:
        return kApp;
    }
  }

  void lambda(Symbol self, Symbol param, const Expr& body) {
    out += self.is_wildcard() ? "fun " : "mu " + self.str() + " ";
    out += param.str();
    const Expr* b = &body;
    while (b->is(ExprKind::Fun) && b->name().is_wildcard()) {
      out += ' ';
      out += b->param().str();
      b = b->kid(0).get();
    }
    out += " -> ";
    expr(*b, kOpen);
  }

  void keyword(std::string_view kw, const Expr& e) {
    out += kw;
    for (const auto& k : e.kids()) {
      out += ' ';
      expr(*k, kAtom);
    }
  }

  void body(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Val: value(e.value(), kOpen); break;
      case ExprKind::Var: out += e.name().str(); break;
      case ExprKind::Let:
        if (e.name().is_wildcard()) {
          expr(*e.kid(0), kOr);
          out += "; ";
          expr(*e.kid(1), kOpen);
        } else {
          out += "let " + e.name().str() + " = ";
          expr(*e.kid(0), kOpen);
          out += " in ";
          expr(*e.kid(1), kOpen);
        }
        break;
      case ExprKind::If:
        out += "if ";
        expr(*e.kid(0), kOpen);
        out += " then ";
        expr(*e.kid(1), kOpen);
        out += " else ";
        expr(*e.kid(2), kOpen);
        break;
      case ExprKind::Fun: lambda(e.name(), e.param(), *e.kid(0)); break;
      case ExprKind::App:
        expr(*e.kid(0), kApp);
        out += ' ';
        expr(*e.kid(1), kAtom);
        break;
      case ExprKind::Prim: {
        int lv = prim_level(e.op());
        bool assoc = lv != kCmp;
        expr(*e.kid(0), assoc ? lv : lv + 1);
        out += ' ';
        out += prim_name(e.op());
        out += ' ';
        expr(*e.kid(1), lv + 1);
        break;
      }
      case ExprKind::Pair:
        out += '(';
        expr(*e.kid(0), kOpen);
        out += ", ";
        expr(*e.kid(1), kOpen);
        out += ')';
        break;
      case ExprKind::Proj:
        out += e.proj_index() == 1 ? "fst " : "snd ";
        expr(*e.kid(0), kAtom);
        break;
      case ExprKind::Assert: keyword("assert", e); break;
      case ExprKind::Alloc: keyword("alloc", e); break;
      case ExprKind::Load: keyword("load", e); break;
      case ExprKind::Store: keyword("store", e); break;
      case ExprKind::Length: keyword("length", e); break;
      case ExprKind::Cas: keyword("cas", e); break;
      case ExprKind::Par:
        if (level(e) == kApp) {
          out += "par ";
          expr(*e.kid(0)->kid(0), kAtom);
          out += ' ';
          expr(*e.kid(1)->kid(0), kAtom);
        } else {
          out += "(| ";
          expr(*e.kid(0), kOpen);
          out += ", ";
          expr(*e.kid(1), kOpen);
          out += " |)";
        }
        break;
      case ExprKind::RunPar:
        out += "(|| ";
        expr(*e.kid(0), kOpen);
        out += ", ";
        expr(*e.kid(1), kOpen);
        out += " ||)";
        break;
    }
  }
};

}  // namespace

std::string print(const ExprPtr& e) {
  Printer p;
  p.expr(*e, kOpen);
  return p.out;
}

std::string print(const Value& v) {
  Printer p;
  p.value(v, kOpen);
  return p.out;
}

}  // namespace mdl
