#pragma once

// Capture-avoiding substitution over all five sorts, free-name queries,
// the binder-freshening pass and alpha-equivalence.
//
// Terms, type variables and channels share one namespace; a binder shadows
// the bound name in every category, which is sound for well-scoped syntax
// and keeps the traversal uniform.

#include "sdpi/syntax.hpp"

#include <map>
#include <set>

namespace sdpi {

// ---------------------------------------------------------------------------
// Free names (all categories pooled).

namespace detail {

struct FreeAcc {
  std::set<Name> bound;
  std::set<Name> out;

  void hit(const Name &n) {
    if (!bound.count(n)) out.insert(n);
  }
  struct Scope {
    FreeAcc &acc;
    Name name;
    bool added;
    Scope(FreeAcc &a, const Name &n) : acc(a), name(n) {
      added = acc.bound.insert(n).second;
    }
    ~Scope() {
      if (added) acc.bound.erase(name);
    }
  };
};

void free_names(const KindPtr &k, FreeAcc &acc);
void free_names(const FunTypePtr &t, FreeAcc &acc);
void free_names(const SessTypePtr &a, FreeAcc &acc);
void free_names(const TermPtr &m, FreeAcc &acc);
void free_names(const ProcessPtr &p, FreeAcc &acc);

inline void free_names(const KindPtr &k, FreeAcc &acc) {
  std::visit(overloaded{
                 [](const KType &) {},
                 [](const KSType &) {},
                 [&](const KPiTerm &n) {
                   free_names(n.dom, acc);
                   FreeAcc::Scope s(acc, n.var);
                   free_names(n.body, acc);
                 },
                 [&](const KPiType &n) {
                   free_names(n.dom, acc);
                   FreeAcc::Scope s(acc, n.var);
                   free_names(n.body, acc);
                 },
             },
             k->v);
}

inline void free_names(const FunTypePtr &t, FreeAcc &acc) {
  std::visit(overloaded{
                 [&](const FTPi &n) {
                   free_names(n.dom, acc);
                   FreeAcc::Scope s(acc, n.var);
                   free_names(n.cod, acc);
                 },
                 [&](const FTLamTerm &n) {
                   free_names(n.dom, acc);
                   FreeAcc::Scope s(acc, n.var);
                   free_names(n.body, acc);
                 },
                 [&](const FTAppTerm &n) {
                   free_names(n.fn, acc);
                   free_names(n.arg, acc);
                 },
                 [&](const FTLamType &n) {
                   free_names(n.dom, acc);
                   FreeAcc::Scope s(acc, n.var);
                   free_names(n.body, acc);
                 },
                 [&](const FTAppType &n) {
                   free_names(n.fn, acc);
                   free_names(n.arg, acc);
                 },
                 [&](const FTMonad &n) {
                   for (auto &[_, a] : n.shared_ctx) free_names(a, acc);
                   for (auto &[_, a] : n.linear_ctx) free_names(a, acc);
                   free_names(n.offers, acc);
                 },
                 [&](const FTVar &n) { acc.hit(n.name); },
                 [](const FTBase &) {},
             },
             t->v);
}

inline void free_names(const SessTypePtr &a, FreeAcc &acc) {
  std::visit(
      overloaded{
          [](const STOne &) {},
          [&](const STBang &n) { free_names(n.body, acc); },
          [&](const STLolli &n) {
            free_names(n.arg, acc);
            free_names(n.body, acc);
          },
          [&](const STTensor &n) {
            free_names(n.left, acc);
            free_names(n.right, acc);
          },
          [&](const STForall &n) {
            free_names(n.dom, acc);
            FreeAcc::Scope s(acc, n.var);
            free_names(n.body, acc);
          },
          [&](const STExists &n) {
            free_names(n.dom, acc);
            FreeAcc::Scope s(acc, n.var);
            free_names(n.body, acc);
          },
          [&](const STWith &n) {
            for (auto &[_, b] : n.branches) free_names(b, acc);
          },
          [&](const STPlus &n) {
            for (auto &[_, b] : n.branches) free_names(b, acc);
          },
          [&](const STLamTerm &n) {
            free_names(n.dom, acc);
            FreeAcc::Scope s(acc, n.var);
            free_names(n.body, acc);
          },
          [&](const STAppTerm &n) {
            free_names(n.fn, acc);
            free_names(n.arg, acc);
          },
          [&](const STLamType &n) {
            free_names(n.dom, acc);
            FreeAcc::Scope s(acc, n.var);
            free_names(n.body, acc);
          },
          [&](const STAppType &n) {
            free_names(n.fn, acc);
            free_names(n.arg, acc);
          },
          [&](const STVar &n) { acc.hit(n.name); },
          [&](const STIf &n) {
            free_names(n.cond, acc);
            free_names(n.then_branch, acc);
            free_names(n.else_branch, acc);
          },
          [&](const STNatRec &n) {
            free_names(n.target, acc);
            free_names(n.zero_case, acc);
            FreeAcc::Scope s1(acc, n.pred_var);
            FreeAcc::Scope s2(acc, n.rec_var);
            free_names(n.succ_case, acc);
          },
      },
      a->v);
}

inline void free_names(const TermPtr &m, FreeAcc &acc) {
  std::visit(overloaded{
                 [&](const TmVar &n) { acc.hit(n.name); },
                 [&](const TmLam &n) {
                   free_names(n.dom, acc);
                   FreeAcc::Scope s(acc, n.var);
                   free_names(n.body, acc);
                 },
                 [&](const TmApp &n) {
                   free_names(n.fn, acc);
                   free_names(n.arg, acc);
                 },
                 [&](const TmMonad &n) {
                   // every listed channel is a binder into the body
                   std::set<Name> saved = acc.bound;
                   acc.bound.insert(n.chan);
                   for (auto &u : n.shared_chans) acc.bound.insert(u);
                   for (auto &d : n.linear_chans) acc.bound.insert(d);
                   free_names(n.body, acc);
                   acc.bound = std::move(saved);
                 },
                 [](const TmTrue &) {},
                 [](const TmFalse &) {},
                 [](const TmZero &) {},
                 [&](const TmSucc &n) { free_names(n.arg, acc); },
                 [&](const TmIf &n) {
                   free_names(n.cond, acc);
                   free_names(n.then_branch, acc);
                   free_names(n.else_branch, acc);
                 },
                 [&](const TmNatRec &n) {
                   free_names(n.motive, acc);
                   free_names(n.target, acc);
                   free_names(n.zero_case, acc);
                   FreeAcc::Scope s1(acc, n.pred_var);
                   FreeAcc::Scope s2(acc, n.acc_var);
                   free_names(n.succ_case, acc);
                 },
             },
             m->v);
}

inline void free_names(const ProcessPtr &p, FreeAcc &acc) {
  std::visit(
      overloaded{
          [&](const PrOutFresh &n) {
            acc.hit(n.chan);
            if (n.bind_anno) free_names(n.bind_anno, acc);
            FreeAcc::Scope s(acc, n.bind);
            free_names(n.left, acc);
            free_names(n.right, acc);
          },
          [&](const PrNew &n) {
            if (n.anno) free_names(n.anno, acc);
            FreeAcc::Scope s(acc, n.bind);
            free_names(n.left, acc);
            free_names(n.right, acc);
          },
          [&](const PrIn &n) {
            acc.hit(n.chan);
            FreeAcc::Scope s(acc, n.bind);
            free_names(n.body, acc);
          },
          [&](const PrOutTerm &n) {
            acc.hit(n.chan);
            free_names(n.payload, acc);
            if (n.anno) free_names(n.anno, acc);
            free_names(n.body, acc);
          },
          [&](const PrRepl &n) {
            acc.hit(n.chan);
            FreeAcc::Scope s(acc, n.bind);
            free_names(n.body, acc);
          },
          [&](const PrCopy &n) {
            acc.hit(n.server);
            if (n.bind_anno) free_names(n.bind_anno, acc);
            FreeAcc::Scope s(acc, n.bind);
            free_names(n.body, acc);
          },
          [&](const PrCase &n) {
            acc.hit(n.chan);
            for (auto &[_, b] : n.branches) free_names(b, acc);
          },
          [&](const PrSelect &n) {
            acc.hit(n.chan);
            free_names(n.body, acc);
          },
          [&](const PrFwd &n) {
            acc.hit(n.from);
            acc.hit(n.to);
          },
          [](const PrNil &) {},
          [&](const PrSpawn &n) {
            free_names(n.monadic, acc);
            for (auto &u : n.shared_args) acc.hit(u);
            for (auto &d : n.linear_args) acc.hit(d);
            FreeAcc::Scope s(acc, n.bind);
            free_names(n.cont, acc);
          },
          [&](const PrCaseBool &n) {
            free_names(n.cond, acc);
            free_names(n.then_branch, acc);
            free_names(n.else_branch, acc);
          },
      },
      p->v);
}

} // namespace detail

template <class NodePtr> std::set<Name> free_names(const NodePtr &x) {
  detail::FreeAcc acc;
  detail::free_names(x, acc);
  return acc.out;
}

// Channel-position occurrences only (subjects of prefixes, forwarder ends,
// spawn/monad channel arguments).
inline void free_chan_names(const ProcessPtr &p, std::set<Name> &bound,
                            std::set<Name> &out);
inline void free_chan_names_term(const TermPtr &m, std::set<Name> &bound,
                                 std::set<Name> &out) {
  std::visit(overloaded{
                 [](const TmVar &) {},
                 [&](const TmLam &n) { free_chan_names_term(n.body, bound, out); },
                 [&](const TmApp &n) {
                   free_chan_names_term(n.fn, bound, out);
                   free_chan_names_term(n.arg, bound, out);
                 },
                 [&](const TmMonad &n) {
                   std::set<Name> inner = bound;
                   inner.insert(n.chan);
                   for (auto &u : n.shared_chans) inner.insert(u);
                   for (auto &d : n.linear_chans) inner.insert(d);
                   free_chan_names(n.body, inner, out);
                 },
                 [](const TmTrue &) {},
                 [](const TmFalse &) {},
                 [](const TmZero &) {},
                 [&](const TmSucc &n) { free_chan_names_term(n.arg, bound, out); },
                 [&](const TmIf &n) {
                   free_chan_names_term(n.cond, bound, out);
                   free_chan_names_term(n.then_branch, bound, out);
                   free_chan_names_term(n.else_branch, bound, out);
                 },
                 [&](const TmNatRec &n) {
                   free_chan_names_term(n.target, bound, out);
                   free_chan_names_term(n.zero_case, bound, out);
                   free_chan_names_term(n.succ_case, bound, out);
                 },
             },
             m->v);
}

inline void free_chan_names(const ProcessPtr &p, std::set<Name> &bound,
                            std::set<Name> &out) {
  auto hit = [&](const Name &c) {
    if (!bound.count(c)) out.insert(c);
  };
  std::visit(overloaded{
                 [&](const PrOutFresh &n) {
                   hit(n.chan);
                   std::set<Name> inner = bound;
                   inner.insert(n.bind);
                   free_chan_names(n.left, inner, out);
                   free_chan_names(n.right, inner, out);
                 },
                 [&](const PrNew &n) {
                   std::set<Name> inner = bound;
                   inner.insert(n.bind);
                   free_chan_names(n.left, inner, out);
                   free_chan_names(n.right, inner, out);
                 },
                 [&](const PrIn &n) {
                   hit(n.chan);
                   std::set<Name> inner = bound;
                   inner.insert(n.bind);
                   free_chan_names(n.body, inner, out);
                 },
                 [&](const PrOutTerm &n) {
                   hit(n.chan);
                   free_chan_names_term(n.payload, bound, out);
                   free_chan_names(n.body, bound, out);
                 },
                 [&](const PrRepl &n) {
                   hit(n.chan);
                   std::set<Name> inner = bound;
                   inner.insert(n.bind);
                   free_chan_names(n.body, inner, out);
                 },
                 [&](const PrCopy &n) {
                   hit(n.server);
                   std::set<Name> inner = bound;
                   inner.insert(n.bind);
                   free_chan_names(n.body, inner, out);
                 },
                 [&](const PrCase &n) {
                   hit(n.chan);
                   for (auto &[_, b] : n.branches) free_chan_names(b, bound, out);
                 },
                 [&](const PrSelect &n) {
                   hit(n.chan);
                   free_chan_names(n.body, bound, out);
                 },
                 [&](const PrFwd &n) {
                   hit(n.from);
                   hit(n.to);
                 },
                 [](const PrNil &) {},
                 [&](const PrSpawn &n) {
                   free_chan_names_term(n.monadic, bound, out);
                   for (auto &u : n.shared_args) hit(u);
                   for (auto &d : n.linear_args) hit(d);
                   std::set<Name> inner = bound;
                   inner.insert(n.bind);
                   free_chan_names(n.cont, inner, out);
                 },
                 [&](const PrCaseBool &n) {
                   free_chan_names_term(n.cond, bound, out);
                   free_chan_names(n.then_branch, bound, out);
                   free_chan_names(n.else_branch, bound, out);
                 },
             },
             p->v);
}

inline std::set<Name> free_chans(const ProcessPtr &p) {
  std::set<Name> bound, out;
  free_chan_names(p, bound, out);
  return out;
}

// ---------------------------------------------------------------------------
// Simultaneous substitution.

struct Subst {
  std::map<Name, TermPtr> terms;
  std::map<Name, FunTypePtr> ftypes;
  std::map<Name, SessTypePtr> stypes;
  std::map<Name, Name> chans;
  std::set<Name> rhs_free; // union of free names of every replacement

  bool empty() const {
    return terms.empty() && ftypes.empty() && stypes.empty() && chans.empty();
  }

  void recompute_rhs_free() {
    rhs_free.clear();
    for (auto &[_, m] : terms) {
      auto f = free_names(m);
      rhs_free.insert(f.begin(), f.end());
    }
    for (auto &[_, t] : ftypes) {
      auto f = free_names(t);
      rhs_free.insert(f.begin(), f.end());
    }
    for (auto &[_, a] : stypes) {
      auto f = free_names(a);
      rhs_free.insert(f.begin(), f.end());
    }
    for (auto &[_, c] : chans) rhs_free.insert(c);
  }

  static Subst term(Name x, TermPtr m) {
    Subst s;
    s.terms.emplace(std::move(x), std::move(m));
    s.recompute_rhs_free();
    return s;
  }
  static Subst ftype(Name t, FunTypePtr ty) {
    Subst s;
    s.ftypes.emplace(std::move(t), std::move(ty));
    s.recompute_rhs_free();
    return s;
  }
  static Subst stype(Name t, SessTypePtr a) {
    Subst s;
    s.stypes.emplace(std::move(t), std::move(a));
    s.recompute_rhs_free();
    return s;
  }
  static Subst chan(Name from, Name to) {
    Subst s;
    s.chans.emplace(std::move(from), to);
    s.rhs_free.insert(to);
    return s;
  }

  // Handle one binder: drop shadowed entries; rename the binder when any
  // replacement could capture it. Returns the (possibly renamed) binder and
  // mutates *this into the substitution for the body.
  Name binder(const Name &n) {
    terms.erase(n);
    ftypes.erase(n);
    stypes.erase(n);
    chans.erase(n);
    if (rhs_free.count(n)) {
      Name f = fresh_name(n);
      terms.emplace(n, tm_var(f));
      ftypes.emplace(n, ft_var(f));
      stypes.emplace(n, st_var(f));
      chans.emplace(n, f);
      rhs_free.insert(f);
      return f;
    }
    return n;
  }

  Name chan_name(const Name &c) const {
    auto it = chans.find(c);
    return it == chans.end() ? c : it->second;
  }
};

KindPtr subst(const Subst &s, const KindPtr &k);
FunTypePtr subst(const Subst &s, const FunTypePtr &t);
SessTypePtr subst(const Subst &s, const SessTypePtr &a);
TermPtr subst(const Subst &s, const TermPtr &m);
ProcessPtr subst(const Subst &s, const ProcessPtr &p);

inline KindPtr subst(const Subst &s, const KindPtr &k) {
  if (s.empty()) return k;
  return std::visit(
      overloaded{
          [&](const KType &) { return k; },
          [&](const KSType &) { return k; },
          [&](const KPiTerm &n) {
            auto dom = subst(s, n.dom);
            Subst body_s = s;
            Name x = body_s.binder(n.var);
            return k_pi_term(x, dom, subst(body_s, n.body), k->loc);
          },
          [&](const KPiType &n) {
            auto dom = subst(s, n.dom);
            Subst body_s = s;
            Name t = body_s.binder(n.var);
            return k_pi_type(t, dom, subst(body_s, n.body), k->loc);
          },
      },
      k->v);
}

inline FunTypePtr subst(const Subst &s, const FunTypePtr &t) {
  if (s.empty()) return t;
  return std::visit(
      overloaded{
          [&](const FTPi &n) {
            auto dom = subst(s, n.dom);
            Subst body_s = s;
            Name x = body_s.binder(n.var);
            return ft_pi(x, dom, subst(body_s, n.cod), t->loc);
          },
          [&](const FTLamTerm &n) {
            auto dom = subst(s, n.dom);
            Subst body_s = s;
            Name x = body_s.binder(n.var);
            return ft_lam_term(x, dom, subst(body_s, n.body), t->loc);
          },
          [&](const FTAppTerm &n) {
            return ft_app_term(subst(s, n.fn), subst(s, n.arg), t->loc);
          },
          [&](const FTLamType &n) {
            auto dom = subst(s, n.dom);
            Subst body_s = s;
            Name x = body_s.binder(n.var);
            return ft_lam_type(x, dom, subst(body_s, n.body), t->loc);
          },
          [&](const FTAppType &n) {
            return ft_app_type(subst(s, n.fn), subst(s, n.arg), t->loc);
          },
          [&](const FTMonad &n) {
            std::vector<std::pair<Name, SessTypePtr>> sh, li;
            sh.reserve(n.shared_ctx.size());
            li.reserve(n.linear_ctx.size());
            for (auto &[c, a] : n.shared_ctx) sh.emplace_back(c, subst(s, a));
            for (auto &[c, a] : n.linear_ctx) li.emplace_back(c, subst(s, a));
            return ft_monad(std::move(sh), std::move(li), n.chan,
                            subst(s, n.offers), t->loc);
          },
          [&](const FTVar &n) {
            auto it = s.ftypes.find(n.name);
            return it == s.ftypes.end() ? t : it->second;
          },
          [&](const FTBase &) { return t; },
      },
      t->v);
}

inline SessTypePtr subst(const Subst &s, const SessTypePtr &a) {
  if (s.empty()) return a;
  return std::visit(
      overloaded{
          [&](const STOne &) { return a; },
          [&](const STBang &n) { return st_bang(subst(s, n.body), a->loc); },
          [&](const STLolli &n) {
            return st_lolli(subst(s, n.arg), subst(s, n.body), a->loc);
          },
          [&](const STTensor &n) {
            return st_tensor(subst(s, n.left), subst(s, n.right), a->loc);
          },
          [&](const STForall &n) {
            auto dom = subst(s, n.dom);
            Subst body_s = s;
            Name x = body_s.binder(n.var);
            return st_forall(x, dom, subst(body_s, n.body), a->loc);
          },
          [&](const STExists &n) {
            auto dom = subst(s, n.dom);
            Subst body_s = s;
            Name x = body_s.binder(n.var);
            return st_exists(x, dom, subst(body_s, n.body), a->loc);
          },
          [&](const STWith &n) {
            std::vector<std::pair<std::string, SessTypePtr>> bs;
            bs.reserve(n.branches.size());
            for (auto &[l, b] : n.branches) bs.emplace_back(l, subst(s, b));
            return st_with(std::move(bs), a->loc);
          },
          [&](const STPlus &n) {
            std::vector<std::pair<std::string, SessTypePtr>> bs;
            bs.reserve(n.branches.size());
            for (auto &[l, b] : n.branches) bs.emplace_back(l, subst(s, b));
            return st_plus(std::move(bs), a->loc);
          },
          [&](const STLamTerm &n) {
            auto dom = subst(s, n.dom);
            Subst body_s = s;
            Name x = body_s.binder(n.var);
            return st_lam_term(x, dom, subst(body_s, n.body), a->loc);
          },
          [&](const STAppTerm &n) {
            return st_app_term(subst(s, n.fn), subst(s, n.arg), a->loc);
          },
          [&](const STLamType &n) {
            auto dom = subst(s, n.dom);
            Subst body_s = s;
            Name x = body_s.binder(n.var);
            return st_lam_type(x, dom, subst(body_s, n.body), a->loc);
          },
          [&](const STAppType &n) {
            return st_app_type(subst(s, n.fn), subst(s, n.arg), a->loc);
          },
          [&](const STVar &n) {
            auto it = s.stypes.find(n.name);
            return it == s.stypes.end() ? a : it->second;
          },
          [&](const STIf &n) {
            return st_if(subst(s, n.cond), subst(s, n.then_branch),
                         subst(s, n.else_branch), a->loc);
          },
          [&](const STNatRec &n) {
            auto target = subst(s, n.target);
            auto zero = subst(s, n.zero_case);
            Subst body_s = s;
            Name pred = body_s.binder(n.pred_var);
            Name rec = body_s.binder(n.rec_var);
            return st_natrec(target, zero, pred, rec,
                             subst(body_s, n.succ_case), a->loc);
          },
      },
      a->v);
}

inline TermPtr subst(const Subst &s, const TermPtr &m) {
  if (s.empty()) return m;
  return std::visit(
      overloaded{
          [&](const TmVar &n) {
            auto it = s.terms.find(n.name);
            return it == s.terms.end() ? m : it->second;
          },
          [&](const TmLam &n) {
            auto dom = subst(s, n.dom);
            Subst body_s = s;
            Name x = body_s.binder(n.var);
            return tm_lam(x, dom, subst(body_s, n.body), m->loc);
          },
          [&](const TmApp &n) {
            return tm_app(subst(s, n.fn), subst(s, n.arg), m->loc);
          },
          [&](const TmMonad &n) {
            auto anno = n.anno ? subst(s, n.anno) : nullptr;
            Subst body_s = s;
            Name c = body_s.binder(n.chan);
            std::vector<Name> sh_b, li_b;
            sh_b.reserve(n.shared_chans.size());
            li_b.reserve(n.linear_chans.size());
            for (auto &u : n.shared_chans) sh_b.push_back(body_s.binder(u));
            for (auto &d : n.linear_chans) li_b.push_back(body_s.binder(d));
            return tm_monad(c, subst(body_s, n.body), std::move(sh_b),
                            std::move(li_b), anno, m->loc);
          },
          [&](const TmTrue &) { return m; },
          [&](const TmFalse &) { return m; },
          [&](const TmZero &) { return m; },
          [&](const TmSucc &n) { return tm_succ(subst(s, n.arg), m->loc); },
          [&](const TmIf &n) {
            return tm_if(subst(s, n.cond), subst(s, n.then_branch),
                         subst(s, n.else_branch), m->loc);
          },
          [&](const TmNatRec &n) {
            auto motive = subst(s, n.motive);
            auto target = subst(s, n.target);
            auto zero = subst(s, n.zero_case);
            Subst body_s = s;
            Name pred = body_s.binder(n.pred_var);
            Name acc = body_s.binder(n.acc_var);
            return tm_natrec(motive, target, zero, pred, acc,
                             subst(body_s, n.succ_case), m->loc);
          },
      },
      m->v);
}

inline ProcessPtr subst(const Subst &s, const ProcessPtr &p) {
  if (s.empty()) return p;
  return std::visit(
      overloaded{
          [&](const PrOutFresh &n) {
            Name chan = s.chan_name(n.chan);
            auto anno = n.bind_anno ? subst(s, n.bind_anno) : nullptr;
            Subst body_s = s;
            Name bind = body_s.binder(n.bind);
            return pr_out_fresh(chan, bind, subst(body_s, n.left),
                                subst(body_s, n.right), anno, p->loc);
          },
          [&](const PrNew &n) {
            auto anno = n.anno ? subst(s, n.anno) : nullptr;
            Subst body_s = s;
            Name bind = body_s.binder(n.bind);
            return pr_new(bind, subst(body_s, n.left), subst(body_s, n.right),
                          anno, p->loc);
          },
          [&](const PrIn &n) {
            Name chan = s.chan_name(n.chan);
            Subst body_s = s;
            Name bind = body_s.binder(n.bind);
            return pr_in(chan, bind, subst(body_s, n.body), p->loc);
          },
          [&](const PrOutTerm &n) {
            return pr_out_term(s.chan_name(n.chan), subst(s, n.payload),
                               n.anno ? subst(s, n.anno) : nullptr,
                               subst(s, n.body), p->loc);
          },
          [&](const PrRepl &n) {
            Name chan = s.chan_name(n.chan);
            Subst body_s = s;
            Name bind = body_s.binder(n.bind);
            return pr_repl(chan, bind, subst(body_s, n.body), p->loc);
          },
          [&](const PrCopy &n) {
            Name server = s.chan_name(n.server);
            auto anno = n.bind_anno ? subst(s, n.bind_anno) : nullptr;
            Subst body_s = s;
            Name bind = body_s.binder(n.bind);
            return pr_copy(server, bind, subst(body_s, n.body), anno, p->loc);
          },
          [&](const PrCase &n) {
            std::vector<std::pair<std::string, ProcessPtr>> bs;
            bs.reserve(n.branches.size());
            for (auto &[l, b] : n.branches) bs.emplace_back(l, subst(s, b));
            return pr_case(s.chan_name(n.chan), std::move(bs), p->loc);
          },
          [&](const PrSelect &n) {
            return pr_select(s.chan_name(n.chan), n.label, subst(s, n.body),
                             p->loc);
          },
          [&](const PrFwd &n) {
            return pr_fwd(s.chan_name(n.from), s.chan_name(n.to), p->loc);
          },
          [&](const PrNil &) { return p; },
          [&](const PrSpawn &n) {
            auto monadic = subst(s, n.monadic);
            std::vector<Name> sh, li;
            sh.reserve(n.shared_args.size());
            li.reserve(n.linear_args.size());
            for (auto &u : n.shared_args) sh.push_back(s.chan_name(u));
            for (auto &d : n.linear_args) li.push_back(s.chan_name(d));
            Subst body_s = s;
            Name bind = body_s.binder(n.bind);
            return pr_spawn(bind, monadic, std::move(sh), std::move(li),
                            subst(body_s, n.cont), p->loc);
          },
          [&](const PrCaseBool &n) {
            return pr_case_bool(subst(s, n.cond), subst(s, n.then_branch),
                                subst(s, n.else_branch), p->loc);
          },
      },
      p->v);
}

// Convenience wrappers.
template <class NodePtr>
NodePtr subst_term(const NodePtr &target, const Name &x, const TermPtr &m) {
  return subst(Subst::term(x, m), target);
}
template <class NodePtr>
NodePtr subst_stype(const NodePtr &target, const Name &t, const SessTypePtr &a) {
  return subst(Subst::stype(t, a), target);
}
template <class NodePtr>
NodePtr subst_ftype(const NodePtr &target, const Name &t, const FunTypePtr &ty) {
  return subst(Subst::ftype(t, ty), target);
}
inline ProcessPtr rename_chan(const ProcessPtr &p, const Name &from,
                              const Name &to) {
  return subst(Subst::chan(from, to), p);
}

// ---------------------------------------------------------------------------
// Global binder freshening: renames every binder to a globally fresh name.
// Applied once after load so binders are locally unique.

namespace detail {

inline Subst fresh_binder(Subst s, const Name &n, Name &out) {
  out = fresh_name(n);
  s.terms[n] = tm_var(out);
  s.ftypes[n] = ft_var(out);
  s.stypes[n] = st_var(out);
  s.chans[n] = out;
  s.rhs_free.insert(out);
  return s;
}

} // namespace detail

KindPtr freshen(const KindPtr &k, const Subst &env);
FunTypePtr freshen(const FunTypePtr &t, const Subst &env);
SessTypePtr freshen(const SessTypePtr &a, const Subst &env);
TermPtr freshen(const TermPtr &m, const Subst &env);
ProcessPtr freshen(const ProcessPtr &p, const Subst &env);

inline KindPtr freshen(const KindPtr &k, const Subst &env) {
  return std::visit(
      overloaded{
          [&](const KType &) { return k; },
          [&](const KSType &) { return k; },
          [&](const KPiTerm &n) {
            auto dom = freshen(n.dom, env);
            Name x;
            auto inner = detail::fresh_binder(env, n.var, x);
            return k_pi_term(x, dom, freshen(n.body, inner), k->loc);
          },
          [&](const KPiType &n) {
            auto dom = freshen(n.dom, env);
            Name t;
            auto inner = detail::fresh_binder(env, n.var, t);
            return k_pi_type(t, dom, freshen(n.body, inner), k->loc);
          },
      },
      k->v);
}

inline FunTypePtr freshen(const FunTypePtr &t, const Subst &env) {
  return std::visit(
      overloaded{
          [&](const FTPi &n) {
            auto dom = freshen(n.dom, env);
            Name x;
            auto inner = detail::fresh_binder(env, n.var, x);
            return ft_pi(x, dom, freshen(n.cod, inner), t->loc);
          },
          [&](const FTLamTerm &n) {
            auto dom = freshen(n.dom, env);
            Name x;
            auto inner = detail::fresh_binder(env, n.var, x);
            return ft_lam_term(x, dom, freshen(n.body, inner), t->loc);
          },
          [&](const FTAppTerm &n) {
            return ft_app_term(freshen(n.fn, env), freshen(n.arg, env), t->loc);
          },
          [&](const FTLamType &n) {
            auto dom = freshen(n.dom, env);
            Name x;
            auto inner = detail::fresh_binder(env, n.var, x);
            return ft_lam_type(x, dom, freshen(n.body, inner), t->loc);
          },
          [&](const FTAppType &n) {
            return ft_app_type(freshen(n.fn, env), freshen(n.arg, env), t->loc);
          },
          [&](const FTMonad &n) {
            std::vector<std::pair<Name, SessTypePtr>> sh, li;
            for (auto &[c, a] : n.shared_ctx) sh.emplace_back(c, freshen(a, env));
            for (auto &[c, a] : n.linear_ctx) li.emplace_back(c, freshen(a, env));
            return ft_monad(std::move(sh), std::move(li), n.chan,
                            freshen(n.offers, env), t->loc);
          },
          [&](const FTVar &) { return subst(env, t); },
          [&](const FTBase &) { return t; },
      },
      t->v);
}

inline SessTypePtr freshen(const SessTypePtr &a, const Subst &env) {
  return std::visit(
      overloaded{
          [&](const STOne &) { return a; },
          [&](const STBang &n) { return st_bang(freshen(n.body, env), a->loc); },
          [&](const STLolli &n) {
            return st_lolli(freshen(n.arg, env), freshen(n.body, env), a->loc);
          },
          [&](const STTensor &n) {
            return st_tensor(freshen(n.left, env), freshen(n.right, env),
                             a->loc);
          },
          [&](const STForall &n) {
            auto dom = freshen(n.dom, env);
            Name x;
            auto inner = detail::fresh_binder(env, n.var, x);
            return st_forall(x, dom, freshen(n.body, inner), a->loc);
          },
          [&](const STExists &n) {
            auto dom = freshen(n.dom, env);
            Name x;
            auto inner = detail::fresh_binder(env, n.var, x);
            return st_exists(x, dom, freshen(n.body, inner), a->loc);
          },
          [&](const STWith &n) {
            std::vector<std::pair<std::string, SessTypePtr>> bs;
            for (auto &[l, b] : n.branches) bs.emplace_back(l, freshen(b, env));
            return st_with(std::move(bs), a->loc);
          },
          [&](const STPlus &n) {
            std::vector<std::pair<std::string, SessTypePtr>> bs;
            for (auto &[l, b] : n.branches) bs.emplace_back(l, freshen(b, env));
            return st_plus(std::move(bs), a->loc);
          },
          [&](const STLamTerm &n) {
            auto dom = freshen(n.dom, env);
            Name x;
            auto inner = detail::fresh_binder(env, n.var, x);
            return st_lam_term(x, dom, freshen(n.body, inner), a->loc);
          },
          [&](const STAppTerm &n) {
            return st_app_term(freshen(n.fn, env), freshen(n.arg, env), a->loc);
          },
          [&](const STLamType &n) {
            auto dom = freshen(n.dom, env);
            Name x;
            auto inner = detail::fresh_binder(env, n.var, x);
            return st_lam_type(x, dom, freshen(n.body, inner), a->loc);
          },
          [&](const STAppType &n) {
            return st_app_type(freshen(n.fn, env), freshen(n.arg, env), a->loc);
          },
          [&](const STVar &) { return subst(env, a); },
          [&](const STIf &n) {
            return st_if(freshen(n.cond, env), freshen(n.then_branch, env),
                         freshen(n.else_branch, env), a->loc);
          },
          [&](const STNatRec &n) {
            auto target = freshen(n.target, env);
            auto zero = freshen(n.zero_case, env);
            Name pred, rec;
            auto inner = detail::fresh_binder(env, n.pred_var, pred);
            inner = detail::fresh_binder(inner, n.rec_var, rec);
            return st_natrec(target, zero, pred, rec,
                             freshen(n.succ_case, inner), a->loc);
          },
      },
      a->v);
}

inline TermPtr freshen(const TermPtr &m, const Subst &env) {
  return std::visit(
      overloaded{
          [&](const TmVar &) { return subst(env, m); },
          [&](const TmLam &n) {
            auto dom = freshen(n.dom, env);
            Name x;
            auto inner = detail::fresh_binder(env, n.var, x);
            return tm_lam(x, dom, freshen(n.body, inner), m->loc);
          },
          [&](const TmApp &n) {
            return tm_app(freshen(n.fn, env), freshen(n.arg, env), m->loc);
          },
          [&](const TmMonad &n) {
            auto anno = n.anno ? freshen(n.anno, env) : nullptr;
            Name c;
            auto inner = detail::fresh_binder(env, n.chan, c);
            std::vector<Name> sh, li;
            for (auto &u : n.shared_chans) {
              Name f;
              inner = detail::fresh_binder(inner, u, f);
              sh.push_back(f);
            }
            for (auto &d : n.linear_chans) {
              Name f;
              inner = detail::fresh_binder(inner, d, f);
              li.push_back(f);
            }
            return tm_monad(c, freshen(n.body, inner), std::move(sh),
                            std::move(li), anno, m->loc);
          },
          [&](const TmTrue &) { return m; },
          [&](const TmFalse &) { return m; },
          [&](const TmZero &) { return m; },
          [&](const TmSucc &n) { return tm_succ(freshen(n.arg, env), m->loc); },
          [&](const TmIf &n) {
            return tm_if(freshen(n.cond, env), freshen(n.then_branch, env),
                         freshen(n.else_branch, env), m->loc);
          },
          [&](const TmNatRec &n) {
            auto motive = freshen(n.motive, env);
            auto target = freshen(n.target, env);
            auto zero = freshen(n.zero_case, env);
            Name pred, acc;
            auto inner = detail::fresh_binder(env, n.pred_var, pred);
            inner = detail::fresh_binder(inner, n.acc_var, acc);
            return tm_natrec(motive, target, zero, pred, acc,
                             freshen(n.succ_case, inner), m->loc);
          },
      },
      m->v);
}

inline ProcessPtr freshen(const ProcessPtr &p, const Subst &env) {
  auto chan = [&](const Name &c) { return env.chan_name(c); };
  return std::visit(
      overloaded{
          [&](const PrOutFresh &n) {
            auto anno = n.bind_anno ? freshen(n.bind_anno, env) : nullptr;
            Name b;
            auto inner = detail::fresh_binder(env, n.bind, b);
            return pr_out_fresh(chan(n.chan), b, freshen(n.left, inner),
                                freshen(n.right, inner), anno, p->loc);
          },
          [&](const PrNew &n) {
            auto anno = n.anno ? freshen(n.anno, env) : nullptr;
            Name b;
            auto inner = detail::fresh_binder(env, n.bind, b);
            return pr_new(b, freshen(n.left, inner), freshen(n.right, inner),
                          anno, p->loc);
          },
          [&](const PrIn &n) {
            Name b;
            auto inner = detail::fresh_binder(env, n.bind, b);
            return pr_in(chan(n.chan), b, freshen(n.body, inner), p->loc);
          },
          [&](const PrOutTerm &n) {
            return pr_out_term(chan(n.chan), freshen(n.payload, env),
                               n.anno ? freshen(n.anno, env) : nullptr,
                               freshen(n.body, env), p->loc);
          },
          [&](const PrRepl &n) {
            Name b;
            auto inner = detail::fresh_binder(env, n.bind, b);
            return pr_repl(chan(n.chan), b, freshen(n.body, inner), p->loc);
          },
          [&](const PrCopy &n) {
            auto anno = n.bind_anno ? freshen(n.bind_anno, env) : nullptr;
            Name b;
            auto inner = detail::fresh_binder(env, n.bind, b);
            return pr_copy(chan(n.server), b, freshen(n.body, inner), anno,
                           p->loc);
          },
          [&](const PrCase &n) {
            std::vector<std::pair<std::string, ProcessPtr>> bs;
            for (auto &[l, b] : n.branches) bs.emplace_back(l, freshen(b, env));
            return pr_case(chan(n.chan), std::move(bs), p->loc);
          },
          [&](const PrSelect &n) {
            return pr_select(chan(n.chan), n.label, freshen(n.body, env),
                             p->loc);
          },
          [&](const PrFwd &n) {
            return pr_fwd(chan(n.from), chan(n.to), p->loc);
          },
          [&](const PrNil &) { return p; },
          [&](const PrSpawn &n) {
            auto monadic = freshen(n.monadic, env);
            std::vector<Name> sh, li;
            for (auto &u : n.shared_args) sh.push_back(chan(u));
            for (auto &d : n.linear_args) li.push_back(chan(d));
            Name b;
            auto inner = detail::fresh_binder(env, n.bind, b);
            return pr_spawn(b, monadic, std::move(sh), std::move(li),
                            freshen(n.cont, inner), p->loc);
          },
          [&](const PrCaseBool &n) {
            return pr_case_bool(freshen(n.cond, env),
                                freshen(n.then_branch, env),
                                freshen(n.else_branch, env), p->loc);
          },
      },
      p->v);
}

template <class NodePtr> NodePtr freshen(const NodePtr &x) {
  return freshen(x, Subst{});
}

// ---------------------------------------------------------------------------
// Alpha-equivalence.

namespace detail {

struct AlphaEnv {
  std::map<Name, Name> l2r;
  std::map<Name, Name> r2l;

  bool names(const Name &a, const Name &b) const {
    auto it = l2r.find(a);
    auto jt = r2l.find(b);
    if (it != l2r.end() || jt != r2l.end())
      return it != l2r.end() && jt != r2l.end() && it->second == b &&
             jt->second == a;
    return a == b;
  }
  AlphaEnv bind(const Name &a, const Name &b) const {
    AlphaEnv e = *this;
    e.l2r[a] = b;
    e.r2l[b] = a;
    return e;
  }
};

bool alpha(const KindPtr &a, const KindPtr &b, const AlphaEnv &env);
bool alpha(const FunTypePtr &a, const FunTypePtr &b, const AlphaEnv &env);
bool alpha(const SessTypePtr &a, const SessTypePtr &b, const AlphaEnv &env);
bool alpha(const TermPtr &a, const TermPtr &b, const AlphaEnv &env);
bool alpha(const ProcessPtr &a, const ProcessPtr &b, const AlphaEnv &env);

inline bool alpha(const KindPtr &a, const KindPtr &b, const AlphaEnv &env) {
  if (a->v.index() != b->v.index()) return false;
  return std::visit(
      overloaded{
          [](const KType &) { return true; },
          [](const KSType &) { return true; },
          [&](const KPiTerm &x) {
            auto &y = std::get<KPiTerm>(b->v);
            return alpha(x.dom, y.dom, env) &&
                   alpha(x.body, y.body, env.bind(x.var, y.var));
          },
          [&](const KPiType &x) {
            auto &y = std::get<KPiType>(b->v);
            return alpha(x.dom, y.dom, env) &&
                   alpha(x.body, y.body, env.bind(x.var, y.var));
          },
      },
      a->v);
}

inline bool alpha(const FunTypePtr &a, const FunTypePtr &b,
                  const AlphaEnv &env) {
  if (a->v.index() != b->v.index()) return false;
  return std::visit(
      overloaded{
          [&](const FTPi &x) {
            auto &y = std::get<FTPi>(b->v);
            return alpha(x.dom, y.dom, env) &&
                   alpha(x.cod, y.cod, env.bind(x.var, y.var));
          },
          [&](const FTLamTerm &x) {
            auto &y = std::get<FTLamTerm>(b->v);
            return alpha(x.dom, y.dom, env) &&
                   alpha(x.body, y.body, env.bind(x.var, y.var));
          },
          [&](const FTAppTerm &x) {
            auto &y = std::get<FTAppTerm>(b->v);
            return alpha(x.fn, y.fn, env) && alpha(x.arg, y.arg, env);
          },
          [&](const FTLamType &x) {
            auto &y = std::get<FTLamType>(b->v);
            return alpha(x.dom, y.dom, env) &&
                   alpha(x.body, y.body, env.bind(x.var, y.var));
          },
          [&](const FTAppType &x) {
            auto &y = std::get<FTAppType>(b->v);
            return alpha(x.fn, y.fn, env) && alpha(x.arg, y.arg, env);
          },
          [&](const FTMonad &x) {
            auto &y = std::get<FTMonad>(b->v);
            if (x.shared_ctx.size() != y.shared_ctx.size() ||
                x.linear_ctx.size() != y.linear_ctx.size())
              return false;
            // channel names in a monad type are positional labels
            for (size_t i = 0; i < x.shared_ctx.size(); i++)
              if (!alpha(x.shared_ctx[i].second, y.shared_ctx[i].second, env))
                return false;
            for (size_t i = 0; i < x.linear_ctx.size(); i++)
              if (!alpha(x.linear_ctx[i].second, y.linear_ctx[i].second, env))
                return false;
            return alpha(x.offers, y.offers, env);
          },
          [&](const FTVar &x) {
            return env.names(x.name, std::get<FTVar>(b->v).name);
          },
          [&](const FTBase &x) {
            return x.base == std::get<FTBase>(b->v).base;
          },
      },
      a->v);
}

inline bool alpha(const SessTypePtr &a, const SessTypePtr &b,
                  const AlphaEnv &env) {
  if (a->v.index() != b->v.index()) return false;
  return std::visit(
      overloaded{
          [](const STOne &) { return true; },
          [&](const STBang &x) {
            return alpha(x.body, std::get<STBang>(b->v).body, env);
          },
          [&](const STLolli &x) {
            auto &y = std::get<STLolli>(b->v);
            return alpha(x.arg, y.arg, env) && alpha(x.body, y.body, env);
          },
          [&](const STTensor &x) {
            auto &y = std::get<STTensor>(b->v);
            return alpha(x.left, y.left, env) && alpha(x.right, y.right, env);
          },
          [&](const STForall &x) {
            auto &y = std::get<STForall>(b->v);
            return alpha(x.dom, y.dom, env) &&
                   alpha(x.body, y.body, env.bind(x.var, y.var));
          },
          [&](const STExists &x) {
            auto &y = std::get<STExists>(b->v);
            return alpha(x.dom, y.dom, env) &&
                   alpha(x.body, y.body, env.bind(x.var, y.var));
          },
          [&](const STWith &x) {
            auto &y = std::get<STWith>(b->v);
            if (x.branches.size() != y.branches.size()) return false;
            for (auto &[l, bodyA] : x.branches) {
              const SessTypePtr *bodyB = nullptr;
              for (auto &[l2, b2] : y.branches)
                if (l2 == l) bodyB = &b2;
              if (!bodyB || !alpha(bodyA, *bodyB, env)) return false;
            }
            return true;
          },
          [&](const STPlus &x) {
            auto &y = std::get<STPlus>(b->v);
            if (x.branches.size() != y.branches.size()) return false;
            for (auto &[l, bodyA] : x.branches) {
              const SessTypePtr *bodyB = nullptr;
              for (auto &[l2, b2] : y.branches)
                if (l2 == l) bodyB = &b2;
              if (!bodyB || !alpha(bodyA, *bodyB, env)) return false;
            }
            return true;
          },
          [&](const STLamTerm &x) {
            auto &y = std::get<STLamTerm>(b->v);
            return alpha(x.dom, y.dom, env) &&
                   alpha(x.body, y.body, env.bind(x.var, y.var));
          },
          [&](const STAppTerm &x) {
            auto &y = std::get<STAppTerm>(b->v);
            return alpha(x.fn, y.fn, env) && alpha(x.arg, y.arg, env);
          },
          [&](const STLamType &x) {
            auto &y = std::get<STLamType>(b->v);
            return alpha(x.dom, y.dom, env) &&
                   alpha(x.body, y.body, env.bind(x.var, y.var));
          },
          [&](const STAppType &x) {
            auto &y = std::get<STAppType>(b->v);
            return alpha(x.fn, y.fn, env) && alpha(x.arg, y.arg, env);
          },
          [&](const STVar &x) {
            return env.names(x.name, std::get<STVar>(b->v).name);
          },
          [&](const STIf &x) {
            auto &y = std::get<STIf>(b->v);
            return alpha(x.cond, y.cond, env) &&
                   alpha(x.then_branch, y.then_branch, env) &&
                   alpha(x.else_branch, y.else_branch, env);
          },
          [&](const STNatRec &x) {
            auto &y = std::get<STNatRec>(b->v);
            return alpha(x.target, y.target, env) &&
                   alpha(x.zero_case, y.zero_case, env) &&
                   alpha(x.succ_case, y.succ_case,
                         env.bind(x.pred_var, y.pred_var)
                             .bind(x.rec_var, y.rec_var));
          },
      },
      a->v);
}

inline bool alpha(const TermPtr &a, const TermPtr &b, const AlphaEnv &env) {
  if (a->v.index() != b->v.index()) return false;
  return std::visit(
      overloaded{
          [&](const TmVar &x) {
            return env.names(x.name, std::get<TmVar>(b->v).name);
          },
          [&](const TmLam &x) {
            auto &y = std::get<TmLam>(b->v);
            return alpha(x.dom, y.dom, env) &&
                   alpha(x.body, y.body, env.bind(x.var, y.var));
          },
          [&](const TmApp &x) {
            auto &y = std::get<TmApp>(b->v);
            return alpha(x.fn, y.fn, env) && alpha(x.arg, y.arg, env);
          },
          [&](const TmMonad &x) {
            auto &y = std::get<TmMonad>(b->v);
            if (x.shared_chans.size() != y.shared_chans.size() ||
                x.linear_chans.size() != y.linear_chans.size())
              return false;
            AlphaEnv inner = env.bind(x.chan, y.chan);
            for (size_t i = 0; i < x.shared_chans.size(); i++)
              inner = inner.bind(x.shared_chans[i], y.shared_chans[i]);
            for (size_t i = 0; i < x.linear_chans.size(); i++)
              inner = inner.bind(x.linear_chans[i], y.linear_chans[i]);
            return alpha(x.body, y.body, inner);
          },
          [](const TmTrue &) { return true; },
          [](const TmFalse &) { return true; },
          [](const TmZero &) { return true; },
          [&](const TmSucc &x) {
            return alpha(x.arg, std::get<TmSucc>(b->v).arg, env);
          },
          [&](const TmIf &x) {
            auto &y = std::get<TmIf>(b->v);
            return alpha(x.cond, y.cond, env) &&
                   alpha(x.then_branch, y.then_branch, env) &&
                   alpha(x.else_branch, y.else_branch, env);
          },
          [&](const TmNatRec &x) {
            auto &y = std::get<TmNatRec>(b->v);
            return alpha(x.motive, y.motive, env) &&
                   alpha(x.target, y.target, env) &&
                   alpha(x.zero_case, y.zero_case, env) &&
                   alpha(x.succ_case, y.succ_case,
                         env.bind(x.pred_var, y.pred_var)
                             .bind(x.acc_var, y.acc_var));
          },
      },
      a->v);
}

inline bool alpha(const ProcessPtr &a, const ProcessPtr &b,
                  const AlphaEnv &env) {
  if (a->v.index() != b->v.index()) return false;
  return std::visit(
      overloaded{
          [&](const PrOutFresh &x) {
            auto &y = std::get<PrOutFresh>(b->v);
            if (!env.names(x.chan, y.chan)) return false;
            auto inner = env.bind(x.bind, y.bind);
            return alpha(x.left, y.left, inner) &&
                   alpha(x.right, y.right, inner);
          },
          [&](const PrNew &x) {
            auto &y = std::get<PrNew>(b->v);
            if (x.anno && y.anno && !alpha(x.anno, y.anno, env)) return false;
            auto inner = env.bind(x.bind, y.bind);
            return alpha(x.left, y.left, inner) &&
                   alpha(x.right, y.right, inner);
          },
          [&](const PrIn &x) {
            auto &y = std::get<PrIn>(b->v);
            return env.names(x.chan, y.chan) &&
                   alpha(x.body, y.body, env.bind(x.bind, y.bind));
          },
          [&](const PrOutTerm &x) {
            auto &y = std::get<PrOutTerm>(b->v);
            if (!env.names(x.chan, y.chan)) return false;
            if (x.anno && y.anno && !alpha(x.anno, y.anno, env)) return false;
            return alpha(x.payload, y.payload, env) &&
                   alpha(x.body, y.body, env);
          },
          [&](const PrRepl &x) {
            auto &y = std::get<PrRepl>(b->v);
            return env.names(x.chan, y.chan) &&
                   alpha(x.body, y.body, env.bind(x.bind, y.bind));
          },
          [&](const PrCopy &x) {
            auto &y = std::get<PrCopy>(b->v);
            return env.names(x.server, y.server) &&
                   alpha(x.body, y.body, env.bind(x.bind, y.bind));
          },
          [&](const PrCase &x) {
            auto &y = std::get<PrCase>(b->v);
            if (!env.names(x.chan, y.chan) ||
                x.branches.size() != y.branches.size())
              return false;
            for (auto &[l, bodyA] : x.branches) {
              const ProcessPtr *bodyB = nullptr;
              for (auto &[l2, b2] : y.branches)
                if (l2 == l) bodyB = &b2;
              if (!bodyB || !alpha(bodyA, *bodyB, env)) return false;
            }
            return true;
          },
          [&](const PrSelect &x) {
            auto &y = std::get<PrSelect>(b->v);
            return env.names(x.chan, y.chan) && x.label == y.label &&
                   alpha(x.body, y.body, env);
          },
          [&](const PrFwd &x) {
            auto &y = std::get<PrFwd>(b->v);
            return env.names(x.from, y.from) && env.names(x.to, y.to);
          },
          [](const PrNil &) { return true; },
          [&](const PrSpawn &x) {
            auto &y = std::get<PrSpawn>(b->v);
            if (x.shared_args.size() != y.shared_args.size() ||
                x.linear_args.size() != y.linear_args.size())
              return false;
            if (!alpha(x.monadic, y.monadic, env)) return false;
            for (size_t i = 0; i < x.shared_args.size(); i++)
              if (!env.names(x.shared_args[i], y.shared_args[i])) return false;
            for (size_t i = 0; i < x.linear_args.size(); i++)
              if (!env.names(x.linear_args[i], y.linear_args[i])) return false;
            return alpha(x.cont, y.cont, env.bind(x.bind, y.bind));
          },
          [&](const PrCaseBool &x) {
            auto &y = std::get<PrCaseBool>(b->v);
            return alpha(x.cond, y.cond, env) &&
                   alpha(x.then_branch, y.then_branch, env) &&
                   alpha(x.else_branch, y.else_branch, env);
          },
      },
      a->v);
}

} // namespace detail

template <class NodePtr> bool alpha_eq(const NodePtr &a, const NodePtr &b) {
  return detail::alpha(a, b, detail::AlphaEnv{});
}

// Strips checker-filled annotations (cut types, monad stamps, fresh-output
// and send annotations) so a translation can be compared against untyped
// reference syntax.
inline TermPtr strip_annotations(const TermPtr &m);
inline ProcessPtr strip_annotations(const ProcessPtr &p) {
  return std::visit(
      overloaded{
          [&](const PrOutFresh &n) {
            return pr_out_fresh(n.chan, n.bind, strip_annotations(n.left),
                                strip_annotations(n.right), nullptr, p->loc);
          },
          [&](const PrNew &n) {
            return pr_new(n.bind, strip_annotations(n.left),
                          strip_annotations(n.right), nullptr, p->loc);
          },
          [&](const PrIn &n) {
            return pr_in(n.chan, n.bind, strip_annotations(n.body), p->loc);
          },
          [&](const PrOutTerm &n) {
            return pr_out_term(n.chan, strip_annotations(n.payload), nullptr,
                               strip_annotations(n.body), p->loc);
          },
          [&](const PrRepl &n) {
            return pr_repl(n.chan, n.bind, strip_annotations(n.body), p->loc);
          },
          [&](const PrCopy &n) {
            return pr_copy(n.server, n.bind, strip_annotations(n.body), nullptr,
                           p->loc);
          },
          [&](const PrCase &n) {
            std::vector<std::pair<std::string, ProcessPtr>> bs;
            for (auto &[l, b] : n.branches)
              bs.emplace_back(l, strip_annotations(b));
            return pr_case(n.chan, std::move(bs), p->loc);
          },
          [&](const PrSelect &n) {
            return pr_select(n.chan, n.label, strip_annotations(n.body),
                             p->loc);
          },
          [&](const PrFwd &) { return p; },
          [&](const PrNil &) { return p; },
          [&](const PrSpawn &n) {
            return pr_spawn(n.bind, strip_annotations(n.monadic),
                            n.shared_args, n.linear_args,
                            strip_annotations(n.cont), p->loc);
          },
          [&](const PrCaseBool &n) {
            return pr_case_bool(strip_annotations(n.cond),
                                strip_annotations(n.then_branch),
                                strip_annotations(n.else_branch), p->loc);
          },
      },
      p->v);
}

inline TermPtr strip_annotations(const TermPtr &m) {
  return std::visit(
      overloaded{
          [&](const TmLam &n) {
            return tm_lam(n.var, n.dom, strip_annotations(n.body), m->loc);
          },
          [&](const TmApp &n) {
            return tm_app(strip_annotations(n.fn), strip_annotations(n.arg),
                          m->loc);
          },
          [&](const TmMonad &n) {
            return tm_monad(n.chan, strip_annotations(n.body), n.shared_chans,
                            n.linear_chans, nullptr, m->loc);
          },
          [&](const TmSucc &n) {
            return tm_succ(strip_annotations(n.arg), m->loc);
          },
          [&](const TmIf &n) {
            return tm_if(strip_annotations(n.cond),
                         strip_annotations(n.then_branch),
                         strip_annotations(n.else_branch), m->loc);
          },
          [&](const TmNatRec &n) {
            return tm_natrec(n.motive, strip_annotations(n.target),
                             strip_annotations(n.zero_case), n.pred_var,
                             n.acc_var, strip_annotations(n.succ_case), m->loc);
          },
          [&](const auto &) { return m; },
      },
      m->v);
}

} // namespace sdpi
