#pragma once

// Surface-syntax printer. parse(print(x)) is alpha-equal to x for every
// well-formed node; see parser.hpp for the grammar.

#include "sdpi/subst.hpp"
#include "sdpi/syntax.hpp"

#include <sstream>
#include <string>

namespace sdpi {

std::string print_kind(const KindPtr &k);
std::string print_ftype(const FunTypePtr &t);
std::string print_stype(const SessTypePtr &a);
std::string print_term(const TermPtr &m);
std::string print_proc(const ProcessPtr &p);

namespace printer_detail {

// precedence: 0 binders, 1 arrows (-o), 2 tensor, 3 application, 4 atom
void ftype(std::ostringstream &os, const FunTypePtr &t, int prec);
void stype(std::ostringstream &os, const SessTypePtr &a, int prec);
void term(std::ostringstream &os, const TermPtr &m, int prec);
void proc(std::ostringstream &os, const ProcessPtr &p);
void kind(std::ostringstream &os, const KindPtr &k, bool atom);

inline void kind(std::ostringstream &os, const KindPtr &k, bool atom) {
  std::visit(overloaded{
                 [&](const KType &) { os << "type"; },
                 [&](const KSType &) { os << "stype"; },
                 [&](const KPiTerm &n) {
                   if (atom) os << "(";
                   os << "pi " << n.var << ":";
                   ftype(os, n.dom, 3);
                   os << ". ";
                   kind(os, n.body, false);
                   if (atom) os << ")";
                 },
                 [&](const KPiType &n) {
                   if (atom) os << "(";
                   os << "pi " << n.var << "::";
                   kind(os, n.dom, true);
                   os << ". ";
                   kind(os, n.body, false);
                   if (atom) os << ")";
                 },
             },
             k->v);
}

inline void ftype(std::ostringstream &os, const FunTypePtr &t, int prec) {
  auto paren = [&](int mine, auto fn) {
    if (prec > mine) {
      os << "(";
      fn();
      os << ")";
    } else {
      fn();
    }
  };
  std::visit(
      overloaded{
          [&](const FTPi &n) {
            paren(0, [&] {
              os << "pi " << n.var << ":";
              ftype(os, n.dom, 3);
              os << ". ";
              ftype(os, n.cod, 0);
            });
          },
          [&](const FTLamTerm &n) {
            paren(0, [&] {
              os << "\\" << n.var << ":";
              ftype(os, n.dom, 3);
              os << ". ";
              ftype(os, n.body, 0);
            });
          },
          [&](const FTAppTerm &n) {
            paren(3, [&] {
              ftype(os, n.fn, 3);
              os << " [";
              term(os, n.arg, 0);
              os << "]";
            });
          },
          [&](const FTLamType &n) {
            paren(0, [&] {
              os << "\\" << n.var << "::";
              kind(os, n.dom, true);
              os << ". ";
              ftype(os, n.body, 0);
            });
          },
          [&](const FTAppType &n) {
            paren(3, [&] {
              ftype(os, n.fn, 3);
              os << " ";
              ftype(os, n.arg, 4);
            });
          },
          [&](const FTMonad &n) {
            os << "{ ";
            if (n.shared_ctx.empty() && n.linear_ctx.empty()) {
              stype(os, n.offers, 0);
            } else {
              bool first = true;
              for (auto &[c, a] : n.shared_ctx) {
                if (!first) os << ", ";
                first = false;
                os << c << ":";
                stype(os, a, 1);
              }
              if (!n.shared_ctx.empty()) os << " ; ";
              first = true;
              for (auto &[c, a] : n.linear_ctx) {
                if (!first) os << ", ";
                first = false;
                os << c << ":";
                stype(os, a, 1);
              }
              os << " |- " << n.chan << ":";
              stype(os, n.offers, 0);
            }
            os << " }";
          },
          [&](const FTVar &n) { os << n.name; },
          [&](const FTBase &n) {
            os << (n.base == BaseType::Bool ? "Bool" : "Nat");
          },
      },
      t->v);
}

inline void stype(std::ostringstream &os, const SessTypePtr &a, int prec) {
  auto paren = [&](int mine, auto fn) {
    if (prec > mine) {
      os << "(";
      fn();
      os << ")";
    } else {
      fn();
    }
  };
  std::visit(
      overloaded{
          [&](const STOne &) { os << "1"; },
          [&](const STBang &n) {
            paren(3, [&] {
              os << "!";
              stype(os, n.body, 4);
            });
          },
          [&](const STLolli &n) {
            paren(1, [&] {
              stype(os, n.arg, 2);
              os << " -o ";
              stype(os, n.body, 1);
            });
          },
          [&](const STTensor &n) {
            paren(2, [&] {
              stype(os, n.left, 3);
              os << " * ";
              stype(os, n.right, 2);
            });
          },
          [&](const STForall &n) {
            paren(0, [&] {
              if (!free_names(n.body).count(n.var)) {
                ftype(os, n.dom, 3);
                os << " => ";
                stype(os, n.body, 0);
              } else {
                os << "forall " << n.var << ":";
                ftype(os, n.dom, 3);
                os << ". ";
                stype(os, n.body, 0);
              }
            });
          },
          [&](const STExists &n) {
            paren(0, [&] {
              if (!free_names(n.body).count(n.var)) {
                ftype(os, n.dom, 3);
                os << " /\\ ";
                stype(os, n.body, 0);
              } else {
                os << "exists " << n.var << ":";
                ftype(os, n.dom, 3);
                os << ". ";
                stype(os, n.body, 0);
              }
            });
          },
          [&](const STWith &n) {
            os << "&{";
            bool first = true;
            for (auto &[l, b] : n.branches) {
              if (!first) os << ", ";
              first = false;
              os << l << ": ";
              stype(os, b, 0);
            }
            os << "}";
          },
          [&](const STPlus &n) {
            os << "+{";
            bool first = true;
            for (auto &[l, b] : n.branches) {
              if (!first) os << ", ";
              first = false;
              os << l << ": ";
              stype(os, b, 0);
            }
            os << "}";
          },
          [&](const STLamTerm &n) {
            paren(0, [&] {
              os << "\\" << n.var << ":";
              ftype(os, n.dom, 3);
              os << ". ";
              stype(os, n.body, 0);
            });
          },
          [&](const STAppTerm &n) {
            paren(3, [&] {
              stype(os, n.fn, 3);
              os << " [";
              term(os, n.arg, 0);
              os << "]";
            });
          },
          [&](const STLamType &n) {
            paren(0, [&] {
              os << "\\" << n.var << "::";
              kind(os, n.dom, true);
              os << ". ";
              stype(os, n.body, 0);
            });
          },
          [&](const STAppType &n) {
            paren(3, [&] {
              stype(os, n.fn, 3);
              os << " ";
              stype(os, n.arg, 4);
            });
          },
          [&](const STVar &n) { os << n.name; },
          [&](const STIf &n) {
            paren(3, [&] {
              os << "ifS ";
              term(os, n.cond, 2);
              os << " ";
              stype(os, n.then_branch, 4);
              os << " ";
              stype(os, n.else_branch, 4);
            });
          },
          [&](const STNatRec &n) {
            paren(3, [&] {
              os << "natrecS ";
              term(os, n.target, 2);
              os << " ";
              stype(os, n.zero_case, 4);
              os << " (" << n.pred_var << ", " << n.rec_var << " => ";
              stype(os, n.succ_case, 0);
              os << ")";
            });
          },
      },
      a->v);
}

inline void term(std::ostringstream &os, const TermPtr &m, int prec) {
  uint64_t lit;
  if (nat_literal(m, lit)) {
    if (lit == 0)
      os << "z";
    else
      os << lit;
    return;
  }
  auto paren = [&](int mine, auto fn) {
    if (prec > mine) {
      os << "(";
      fn();
      os << ")";
    } else {
      fn();
    }
  };
  std::visit(
      overloaded{
          [&](const TmVar &n) { os << n.name; },
          [&](const TmLam &n) {
            paren(0, [&] {
              os << "\\" << n.var << ":";
              ftype(os, n.dom, 3);
              os << ". ";
              term(os, n.body, 0);
            });
          },
          [&](const TmApp &n) {
            paren(1, [&] {
              term(os, n.fn, 1);
              os << " ";
              term(os, n.arg, 2);
            });
          },
          [&](const TmMonad &n) {
            os << "{ " << n.chan << " <- ";
            bool lists = !n.shared_chans.empty() || !n.linear_chans.empty();
            if (lists) os << "(";
            proc(os, n.body);
            if (lists) {
              os << ") <- ";
              bool first = true;
              for (auto &u : n.shared_chans) {
                if (!first) os << ", ";
                first = false;
                os << u;
              }
              os << " ; ";
              first = true;
              for (auto &d : n.linear_chans) {
                if (!first) os << ", ";
                first = false;
                os << d;
              }
            }
            os << " }";
          },
          [&](const TmTrue &) { os << "tt"; },
          [&](const TmFalse &) { os << "ff"; },
          [&](const TmZero &) { os << "z"; },
          [&](const TmSucc &n) {
            paren(1, [&] {
              os << "succ ";
              term(os, n.arg, 2);
            });
          },
          [&](const TmIf &n) {
            paren(1, [&] {
              os << "ifT ";
              term(os, n.cond, 2);
              os << " ";
              term(os, n.then_branch, 2);
              os << " ";
              term(os, n.else_branch, 2);
            });
          },
          [&](const TmNatRec &n) {
            paren(1, [&] {
              os << "natrecT ";
              ftype(os, n.motive, 4);
              os << " ";
              term(os, n.target, 2);
              os << " ";
              term(os, n.zero_case, 2);
              os << " (" << n.pred_var << ", " << n.acc_var << " => ";
              term(os, n.succ_case, 0);
              os << ")";
            });
          },
      },
      m->v);
}

inline void proc(std::ostringstream &os, const ProcessPtr &p) {
  std::visit(
      overloaded{
          [&](const PrOutFresh &n) {
            os << "out " << n.chan << " (" << n.bind << "). (";
            proc(os, n.left);
            os << " || ";
            proc(os, n.right);
            os << ")";
          },
          [&](const PrNew &n) {
            os << "nu " << n.bind;
            if (n.anno) {
              os << " : ";
              stype(os, n.anno, 3);
            }
            os << ". (";
            proc(os, n.left);
            os << " || ";
            proc(os, n.right);
            os << ")";
          },
          [&](const PrIn &n) {
            os << "recv " << n.chan << " (" << n.bind << "). ";
            proc(os, n.body);
          },
          [&](const PrOutTerm &n) {
            os << "send " << n.chan << " <";
            term(os, n.payload, 0);
            if (n.anno) {
              os << " : ";
              stype(os, n.anno, 0);
            }
            os << ">. ";
            proc(os, n.body);
          },
          [&](const PrRepl &n) {
            os << "serve " << n.chan << " (" << n.bind << "). ";
            proc(os, n.body);
          },
          [&](const PrCopy &n) {
            os << "out " << n.server << " (" << n.bind << "). ";
            proc(os, n.body);
          },
          [&](const PrCase &n) {
            os << "case " << n.chan << " { ";
            bool first = true;
            for (auto &[l, b] : n.branches) {
              if (!first) os << ", ";
              first = false;
              os << l << " => ";
              proc(os, b);
            }
            os << " }";
          },
          [&](const PrSelect &n) {
            os << n.chan << "." << n.label << "; ";
            proc(os, n.body);
          },
          [&](const PrFwd &n) { os << "fwd " << n.from << " " << n.to; },
          [&](const PrNil &) { os << "end"; },
          [&](const PrSpawn &n) {
            os << n.bind << " <- ";
            term(os, n.monadic, 1);
            if (!n.shared_args.empty() || !n.linear_args.empty()) {
              os << " <- ";
              bool first = true;
              for (auto &u : n.shared_args) {
                if (!first) os << ", ";
                first = false;
                os << u;
              }
              os << " ; ";
              first = true;
              for (auto &d : n.linear_args) {
                if (!first) os << ", ";
                first = false;
                os << d;
              }
            }
            os << " ; ";
            proc(os, n.cont);
          },
          [&](const PrCaseBool &n) {
            os << "case ";
            if (std::holds_alternative<TmVar>(n.cond->v)) {
              os << std::get<TmVar>(n.cond->v).name;
            } else {
              os << "(";
              term(os, n.cond, 0);
              os << ")";
            }
            os << " { tt => ";
            proc(os, n.then_branch);
            os << ", ff => ";
            proc(os, n.else_branch);
            os << " }";
          },
      },
      p->v);
}

} // namespace printer_detail

inline std::string print_kind(const KindPtr &k) {
  std::ostringstream os;
  printer_detail::kind(os, k, false);
  return os.str();
}
inline std::string print_ftype(const FunTypePtr &t) {
  std::ostringstream os;
  printer_detail::ftype(os, t, 0);
  return os.str();
}
inline std::string print_stype(const SessTypePtr &a) {
  std::ostringstream os;
  printer_detail::stype(os, a, 0);
  return os.str();
}
inline std::string print_term(const TermPtr &m) {
  std::ostringstream os;
  printer_detail::term(os, m, 0);
  return os.str();
}
inline std::string print_proc(const ProcessPtr &p) {
  std::ostringstream os;
  printer_detail::proc(os, p);
  return os.str();
}

} // namespace sdpi
