#pragma once

// Source files: named declarations, definition inlining and the load-time
// freshening pass. Definitions are transparent: each body is delta-expanded
// into every later declaration before checking, so recursion is only
// possible through the Nat eliminators.

#include "sdpi/subst.hpp"
#include "sdpi/syntax.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sdpi {

struct TypeDecl {
  Name name;
  KindPtr kind;
  FunTypePtr fbody;  // exactly one of fbody/sbody is set,
  SessTypePtr sbody; // matching the kind's base
  Loc loc;
};

struct TermDecl {
  Name name;
  FunTypePtr type;
  TermPtr body;
  Loc loc;
};

struct ProcDecl {
  Name name;
  Name chan;
  SessTypePtr offers;
  std::vector<std::pair<Name, SessTypePtr>> uses;
  ProcessPtr body;
  Loc loc;
};

using Decl = std::variant<TypeDecl, TermDecl, ProcDecl>;

struct Program {
  std::string filename;
  std::vector<Decl> decls;

  const ProcDecl *find_proc(const Name &n) const {
    for (auto &d : decls)
      if (auto *p = std::get_if<ProcDecl>(&d))
        if (p->name == n) return p;
    return nullptr;
  }
  const TermDecl *find_term(const Name &n) const {
    for (auto &d : decls)
      if (auto *p = std::get_if<TermDecl>(&d))
        if (p->name == n) return p;
    return nullptr;
  }
};

// Expands earlier definitions into later ones, in order, and freshens every
// binder. The result has no definition references left.
inline Program inline_program(const Program &in) {
  Program out;
  out.filename = in.filename;
  Subst acc;
  for (auto &d : in.decls) {
    std::visit(
        overloaded{
            [&](const TypeDecl &td) {
              TypeDecl nd = td;
              nd.kind = freshen(subst(acc, td.kind));
              if (td.fbody) {
                nd.fbody = freshen(subst(acc, td.fbody));
                acc.ftypes[td.name] = nd.fbody;
              } else {
                nd.sbody = freshen(subst(acc, td.sbody));
                acc.stypes[td.name] = nd.sbody;
              }
              acc.recompute_rhs_free();
              out.decls.push_back(nd);
            },
            [&](const TermDecl &td) {
              TermDecl nd = td;
              nd.type = freshen(subst(acc, td.type));
              nd.body = freshen(subst(acc, td.body));
              acc.terms[td.name] = nd.body;
              acc.recompute_rhs_free();
              out.decls.push_back(nd);
            },
            [&](const ProcDecl &pd) {
              ProcDecl nd = pd;
              nd.offers = freshen(subst(acc, pd.offers));
              for (auto &[c, a] : nd.uses) a = freshen(subst(acc, a));
              nd.body = freshen(subst(acc, pd.body));
              out.decls.push_back(nd);
            },
        },
        d);
  }
  return out;
}

} // namespace sdpi
