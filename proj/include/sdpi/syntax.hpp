#pragma once

// Abstract syntax for the five mutually recursive sorts: kinds, functional
// types, session types, terms and processes. Nodes are immutable and shared;
// all operations build fresh nodes.

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sdpi {

using Name = std::string;

struct Loc {
  int line = 0;
  int col = 0;
  bool known() const { return line > 0; }
};

struct Kind;
struct FunType;
struct SessType;
struct Term;
struct Process;

using KindPtr = std::shared_ptr<const Kind>;
using FunTypePtr = std::shared_ptr<const FunType>;
using SessTypePtr = std::shared_ptr<const SessType>;
using TermPtr = std::shared_ptr<const Term>;
using ProcessPtr = std::shared_ptr<const Process>;

// ---------------------------------------------------------------------------
// Kinds:  type | stype | pi x:tau. K | pi t::K. K'

struct KType {};
struct KSType {};
struct KPiTerm {
  Name var;
  FunTypePtr dom;
  KindPtr body;
};
struct KPiType {
  Name var;
  KindPtr dom;
  KindPtr body;
};

struct Kind {
  std::variant<KType, KSType, KPiTerm, KPiType> v;
  Loc loc;
};

// ---------------------------------------------------------------------------
// Functional types.

enum class BaseType { Bool, Nat };

struct FTPi {            // pi x:dom. cod
  Name var;
  FunTypePtr dom;
  FunTypePtr cod;
};
struct FTLamTerm {       // \x:dom. body       (type-level lambda over terms)
  Name var;
  FunTypePtr dom;
  FunTypePtr body;
};
struct FTAppTerm {       // fn [arg]
  FunTypePtr fn;
  TermPtr arg;
};
struct FTLamType {       // \t::dom. body      (type-level lambda over types)
  Name var;
  KindPtr dom;
  FunTypePtr body;
};
struct FTAppType {       // fn arg
  FunTypePtr fn;
  FunTypePtr arg;
};
struct FTMonad {         // { u:B,... ; d:A,... |- chan:offers }
  std::vector<std::pair<Name, SessTypePtr>> shared_ctx;
  std::vector<std::pair<Name, SessTypePtr>> linear_ctx;
  Name chan;
  SessTypePtr offers;
};
struct FTVar {
  Name name;
};
struct FTBase {
  BaseType base;
};

struct FunType {
  std::variant<FTPi, FTLamTerm, FTAppTerm, FTLamType, FTAppType, FTMonad,
               FTVar, FTBase>
      v;
  Loc loc;
};

// ---------------------------------------------------------------------------
// Session types.

struct STOne {};
struct STBang {
  SessTypePtr body;
};
struct STLolli {         // arg -o body
  SessTypePtr arg;
  SessTypePtr body;
};
struct STTensor {        // left * right
  SessTypePtr left;
  SessTypePtr right;
};
struct STForall {
  Name var;
  FunTypePtr dom;
  SessTypePtr body;
};
struct STExists {
  Name var;
  FunTypePtr dom;
  SessTypePtr body;
};
struct STWith {          // &{ l:A, ... }
  std::vector<std::pair<std::string, SessTypePtr>> branches;
};
struct STPlus {          // +{ l:A, ... }
  std::vector<std::pair<std::string, SessTypePtr>> branches;
};
struct STLamTerm {       // \x:dom. body
  Name var;
  FunTypePtr dom;
  SessTypePtr body;
};
struct STAppTerm {       // fn [arg]
  SessTypePtr fn;
  TermPtr arg;
};
struct STLamType {       // \t::dom. body
  Name var;
  KindPtr dom;
  SessTypePtr body;
};
struct STAppType {       // fn arg
  SessTypePtr fn;
  SessTypePtr arg;
};
struct STVar {
  Name name;
};
struct STIf {            // ifS cond then else
  TermPtr cond;
  SessTypePtr then_branch;
  SessTypePtr else_branch;
};
struct STNatRec {        // natrecS target zero (pred, rec => succ)
  TermPtr target;
  SessTypePtr zero_case;
  Name pred_var;         // term variable: predecessor
  Name rec_var;          // session-type variable: recursive result
  SessTypePtr succ_case;
};

struct SessType {
  std::variant<STOne, STBang, STLolli, STTensor, STForall, STExists, STWith,
               STPlus, STLamTerm, STAppTerm, STLamType, STAppType, STVar, STIf,
               STNatRec>
      v;
  Loc loc;
};

// ---------------------------------------------------------------------------
// Terms.

struct TmVar {
  Name name;
};
struct TmLam {
  Name var;
  FunTypePtr dom;
  TermPtr body;
};
struct TmApp {
  TermPtr fn;
  TermPtr arg;
};
struct TmMonad {         // { chan <- body <- shared ; linear }
  Name chan;
  ProcessPtr body;
  std::vector<Name> shared_chans;
  std::vector<Name> linear_chans;
  FunTypePtr anno;       // monad type stamped by the checker; may be null
};
struct TmTrue {};
struct TmFalse {};
struct TmZero {};
struct TmSucc {
  TermPtr arg;
};
struct TmIf {            // ifT cond then else
  TermPtr cond;
  TermPtr then_branch;
  TermPtr else_branch;
};
struct TmNatRec {        // natrecT motive target zero (pred, acc => succ)
  FunTypePtr motive;
  TermPtr target;
  TermPtr zero_case;
  Name pred_var;
  Name acc_var;
  TermPtr succ_case;
};

struct Term {
  std::variant<TmVar, TmLam, TmApp, TmMonad, TmTrue, TmFalse, TmZero, TmSucc,
               TmIf, TmNatRec>
      v;
  Loc loc;
};

// ---------------------------------------------------------------------------
// Processes. Parallel composition only occurs under a binder (New/OutFresh).

struct PrOutFresh {      // out chan (bind). (left || right)   -- (tensor-R)/(lolli-L)
  Name chan;
  Name bind;
  ProcessPtr left;       // offers bind
  ProcessPtr right;      // continues on chan
  SessTypePtr bind_anno; // may be null; filled by elaboration
};
struct PrNew {           // nu bind [: anno]. (left || right)  -- (cut)/(cut!)
  Name bind;
  ProcessPtr left;       // offers bind
  ProcessPtr right;
  SessTypePtr anno;      // cut type; may be null
};
struct PrIn {            // recv chan (bind). body
  Name chan;
  Name bind;
  ProcessPtr body;
};
struct PrOutTerm {       // send chan <payload : anno>. body
  Name chan;
  TermPtr payload;
  SessTypePtr anno;      // the forall/exists type; required
  ProcessPtr body;
};
struct PrRepl {          // serve chan (bind). body            -- (!R)
  Name chan;
  Name bind;
  ProcessPtr body;
};
struct PrCopy {          // out server (bind). body            -- (copy)
  Name server;
  Name bind;
  ProcessPtr body;
  SessTypePtr bind_anno; // may be null; filled by elaboration
};
struct PrCase {          // case chan { l => P, ... }
  Name chan;
  std::vector<std::pair<std::string, ProcessPtr>> branches;
};
struct PrSelect {        // chan.label; body
  Name chan;
  std::string label;
  ProcessPtr body;
};
struct PrFwd {           // fwd from to   -- uses `from`, offers `to`
  Name from;
  Name to;
};
struct PrNil {};
struct PrSpawn {         // bind <- monadic <- shared ; linear ; cont
  Name bind;
  TermPtr monadic;
  std::vector<Name> shared_args;
  std::vector<Name> linear_args;
  ProcessPtr cont;
};
struct PrCaseBool {      // case cond { tt => then, ff => else }
  TermPtr cond;
  ProcessPtr then_branch;
  ProcessPtr else_branch;
};

struct Process {
  std::variant<PrOutFresh, PrNew, PrIn, PrOutTerm, PrRepl, PrCopy, PrCase,
               PrSelect, PrFwd, PrNil, PrSpawn, PrCaseBool>
      v;
  Loc loc;
};

// ---------------------------------------------------------------------------
// Constructors.

template <class... Fs> struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs> overloaded(Fs...) -> overloaded<Fs...>;

inline KindPtr mk_kind(Kind k) { return std::make_shared<Kind>(std::move(k)); }
inline FunTypePtr mk_ftype(FunType t) {
  return std::make_shared<FunType>(std::move(t));
}
inline SessTypePtr mk_stype(SessType t) {
  return std::make_shared<SessType>(std::move(t));
}
inline TermPtr mk_term(Term t) { return std::make_shared<Term>(std::move(t)); }
inline ProcessPtr mk_proc(Process p) {
  return std::make_shared<Process>(std::move(p));
}

inline KindPtr k_type(Loc l = {}) { return mk_kind({KType{}, l}); }
inline KindPtr k_stype(Loc l = {}) { return mk_kind({KSType{}, l}); }
inline KindPtr k_pi_term(Name x, FunTypePtr dom, KindPtr body, Loc l = {}) {
  return mk_kind({KPiTerm{std::move(x), std::move(dom), std::move(body)}, l});
}
inline KindPtr k_pi_type(Name t, KindPtr dom, KindPtr body, Loc l = {}) {
  return mk_kind({KPiType{std::move(t), std::move(dom), std::move(body)}, l});
}

inline FunTypePtr ft_pi(Name x, FunTypePtr dom, FunTypePtr cod, Loc l = {}) {
  return mk_ftype({FTPi{std::move(x), std::move(dom), std::move(cod)}, l});
}
inline FunTypePtr ft_lam_term(Name x, FunTypePtr dom, FunTypePtr body,
                              Loc l = {}) {
  return mk_ftype(
      {FTLamTerm{std::move(x), std::move(dom), std::move(body)}, l});
}
inline FunTypePtr ft_app_term(FunTypePtr fn, TermPtr arg, Loc l = {}) {
  return mk_ftype({FTAppTerm{std::move(fn), std::move(arg)}, l});
}
inline FunTypePtr ft_lam_type(Name t, KindPtr dom, FunTypePtr body,
                              Loc l = {}) {
  return mk_ftype(
      {FTLamType{std::move(t), std::move(dom), std::move(body)}, l});
}
inline FunTypePtr ft_app_type(FunTypePtr fn, FunTypePtr arg, Loc l = {}) {
  return mk_ftype({FTAppType{std::move(fn), std::move(arg)}, l});
}
inline FunTypePtr ft_monad(std::vector<std::pair<Name, SessTypePtr>> shared_ctx,
                           std::vector<std::pair<Name, SessTypePtr>> linear_ctx,
                           Name chan, SessTypePtr offers, Loc l = {}) {
  return mk_ftype({FTMonad{std::move(shared_ctx), std::move(linear_ctx),
                           std::move(chan), std::move(offers)},
                   l});
}
inline FunTypePtr ft_monad1(SessTypePtr offers, Loc l = {}) {
  return ft_monad({}, {}, "c", std::move(offers), l);
}
inline FunTypePtr ft_var(Name t, Loc l = {}) {
  return mk_ftype({FTVar{std::move(t)}, l});
}
inline FunTypePtr ft_bool(Loc l = {}) {
  return mk_ftype({FTBase{BaseType::Bool}, l});
}
inline FunTypePtr ft_nat(Loc l = {}) {
  return mk_ftype({FTBase{BaseType::Nat}, l});
}

inline SessTypePtr st_one(Loc l = {}) { return mk_stype({STOne{}, l}); }
inline SessTypePtr st_bang(SessTypePtr a, Loc l = {}) {
  return mk_stype({STBang{std::move(a)}, l});
}
inline SessTypePtr st_lolli(SessTypePtr a, SessTypePtr b, Loc l = {}) {
  return mk_stype({STLolli{std::move(a), std::move(b)}, l});
}
inline SessTypePtr st_tensor(SessTypePtr a, SessTypePtr b, Loc l = {}) {
  return mk_stype({STTensor{std::move(a), std::move(b)}, l});
}
inline SessTypePtr st_forall(Name x, FunTypePtr dom, SessTypePtr body,
                             Loc l = {}) {
  return mk_stype({STForall{std::move(x), std::move(dom), std::move(body)}, l});
}
inline SessTypePtr st_exists(Name x, FunTypePtr dom, SessTypePtr body,
                             Loc l = {}) {
  return mk_stype({STExists{std::move(x), std::move(dom), std::move(body)}, l});
}
inline SessTypePtr
st_with(std::vector<std::pair<std::string, SessTypePtr>> bs, Loc l = {}) {
  return mk_stype({STWith{std::move(bs)}, l});
}
inline SessTypePtr
st_plus(std::vector<std::pair<std::string, SessTypePtr>> bs, Loc l = {}) {
  return mk_stype({STPlus{std::move(bs)}, l});
}
inline SessTypePtr st_lam_term(Name x, FunTypePtr dom, SessTypePtr body,
                               Loc l = {}) {
  return mk_stype(
      {STLamTerm{std::move(x), std::move(dom), std::move(body)}, l});
}
inline SessTypePtr st_app_term(SessTypePtr fn, TermPtr arg, Loc l = {}) {
  return mk_stype({STAppTerm{std::move(fn), std::move(arg)}, l});
}
inline SessTypePtr st_lam_type(Name t, KindPtr dom, SessTypePtr body,
                               Loc l = {}) {
  return mk_stype(
      {STLamType{std::move(t), std::move(dom), std::move(body)}, l});
}
inline SessTypePtr st_app_type(SessTypePtr fn, SessTypePtr arg, Loc l = {}) {
  return mk_stype({STAppType{std::move(fn), std::move(arg)}, l});
}
inline SessTypePtr st_var(Name t, Loc l = {}) {
  return mk_stype({STVar{std::move(t)}, l});
}
inline SessTypePtr st_if(TermPtr c, SessTypePtr a, SessTypePtr b, Loc l = {}) {
  return mk_stype({STIf{std::move(c), std::move(a), std::move(b)}, l});
}
inline SessTypePtr st_natrec(TermPtr target, SessTypePtr zero, Name pred,
                             Name rec, SessTypePtr succ, Loc l = {}) {
  return mk_stype({STNatRec{std::move(target), std::move(zero),
                            std::move(pred), std::move(rec), std::move(succ)},
                   l});
}
// tau /\ A  and  tau => A  (non-dependent exists/forall)
inline SessTypePtr st_wedge(FunTypePtr tau, SessTypePtr a, Loc l = {}) {
  return st_exists("_", std::move(tau), std::move(a), l);
}
inline SessTypePtr st_impl(FunTypePtr tau, SessTypePtr a, Loc l = {}) {
  return st_forall("_", std::move(tau), std::move(a), l);
}

inline TermPtr tm_var(Name x, Loc l = {}) {
  return mk_term({TmVar{std::move(x)}, l});
}
inline TermPtr tm_lam(Name x, FunTypePtr dom, TermPtr body, Loc l = {}) {
  return mk_term({TmLam{std::move(x), std::move(dom), std::move(body)}, l});
}
inline TermPtr tm_app(TermPtr fn, TermPtr arg, Loc l = {}) {
  return mk_term({TmApp{std::move(fn), std::move(arg)}, l});
}
inline TermPtr tm_monad(Name chan, ProcessPtr body,
                        std::vector<Name> shared_chans = {},
                        std::vector<Name> linear_chans = {},
                        FunTypePtr anno = nullptr, Loc l = {}) {
  return mk_term({TmMonad{std::move(chan), std::move(body),
                          std::move(shared_chans), std::move(linear_chans),
                          std::move(anno)},
                  l});
}
inline TermPtr tm_true(Loc l = {}) { return mk_term({TmTrue{}, l}); }
inline TermPtr tm_false(Loc l = {}) { return mk_term({TmFalse{}, l}); }
inline TermPtr tm_zero(Loc l = {}) { return mk_term({TmZero{}, l}); }
inline TermPtr tm_succ(TermPtr n, Loc l = {}) {
  return mk_term({TmSucc{std::move(n)}, l});
}
inline TermPtr tm_nat(uint64_t n, Loc l = {}) {
  TermPtr t = tm_zero(l);
  for (uint64_t i = 0; i < n; i++) t = tm_succ(t, l);
  return t;
}
inline TermPtr tm_if(TermPtr c, TermPtr a, TermPtr b, Loc l = {}) {
  return mk_term({TmIf{std::move(c), std::move(a), std::move(b)}, l});
}
inline TermPtr tm_natrec(FunTypePtr motive, TermPtr target, TermPtr zero,
                         Name pred, Name acc, TermPtr succ, Loc l = {}) {
  return mk_term({TmNatRec{std::move(motive), std::move(target),
                           std::move(zero), std::move(pred), std::move(acc),
                           std::move(succ)},
                  l});
}

inline ProcessPtr pr_out_fresh(Name chan, Name bind, ProcessPtr left,
                               ProcessPtr right, SessTypePtr anno = nullptr,
                               Loc l = {}) {
  return mk_proc({PrOutFresh{std::move(chan), std::move(bind), std::move(left),
                             std::move(right), std::move(anno)},
                  l});
}
inline ProcessPtr pr_new(Name bind, ProcessPtr left, ProcessPtr right,
                         SessTypePtr anno = nullptr, Loc l = {}) {
  return mk_proc({PrNew{std::move(bind), std::move(left), std::move(right),
                        std::move(anno)},
                  l});
}
inline ProcessPtr pr_in(Name chan, Name bind, ProcessPtr body, Loc l = {}) {
  return mk_proc({PrIn{std::move(chan), std::move(bind), std::move(body)}, l});
}
inline ProcessPtr pr_out_term(Name chan, TermPtr payload, SessTypePtr anno,
                              ProcessPtr body, Loc l = {}) {
  return mk_proc({PrOutTerm{std::move(chan), std::move(payload),
                            std::move(anno), std::move(body)},
                  l});
}
inline ProcessPtr pr_repl(Name chan, Name bind, ProcessPtr body, Loc l = {}) {
  return mk_proc(
      {PrRepl{std::move(chan), std::move(bind), std::move(body)}, l});
}
inline ProcessPtr pr_copy(Name server, Name bind, ProcessPtr body,
                          SessTypePtr anno = nullptr, Loc l = {}) {
  return mk_proc({PrCopy{std::move(server), std::move(bind), std::move(body),
                         std::move(anno)},
                  l});
}
inline ProcessPtr pr_case(Name chan,
                          std::vector<std::pair<std::string, ProcessPtr>> bs,
                          Loc l = {}) {
  return mk_proc({PrCase{std::move(chan), std::move(bs)}, l});
}
inline ProcessPtr pr_select(Name chan, std::string label, ProcessPtr body,
                            Loc l = {}) {
  return mk_proc(
      {PrSelect{std::move(chan), std::move(label), std::move(body)}, l});
}
inline ProcessPtr pr_fwd(Name from, Name to, Loc l = {}) {
  return mk_proc({PrFwd{std::move(from), std::move(to)}, l});
}
inline ProcessPtr pr_nil(Loc l = {}) { return mk_proc({PrNil{}, l}); }
inline ProcessPtr pr_spawn(Name bind, TermPtr monadic,
                           std::vector<Name> shared_args,
                           std::vector<Name> linear_args, ProcessPtr cont,
                           Loc l = {}) {
  return mk_proc({PrSpawn{std::move(bind), std::move(monadic),
                          std::move(shared_args), std::move(linear_args),
                          std::move(cont)},
                  l});
}
inline ProcessPtr pr_case_bool(TermPtr cond, ProcessPtr then_branch,
                               ProcessPtr else_branch, Loc l = {}) {
  return mk_proc({PrCaseBool{std::move(cond), std::move(then_branch),
                             std::move(else_branch)},
                  l});
}

// ---------------------------------------------------------------------------
// Fresh name supply. A single process-wide counter keeps freshened binders
// unique across every loaded program and every rewrite.

inline std::atomic<uint64_t> &fresh_counter() {
  static std::atomic<uint64_t> counter{0};
  return counter;
}

inline Name base_name(const Name &n) {
  auto pos = n.find('\'');
  return pos == Name::npos ? n : n.substr(0, pos);
}

inline Name fresh_name(const Name &hint) {
  uint64_t id = ++fresh_counter();
  return base_name(hint.empty() ? "x" : hint) + "'" + std::to_string(id);
}

// Closed unary numeral inspection: returns count if t is succ^n z.
inline bool nat_literal(const TermPtr &t, uint64_t &out) {
  const Term *cur = t.get();
  uint64_t n = 0;
  for (;;) {
    if (std::holds_alternative<TmZero>(cur->v)) {
      out = n;
      return true;
    }
    if (auto *s = std::get_if<TmSucc>(&cur->v)) {
      n++;
      cur = s->arg.get();
      continue;
    }
    return false;
  }
}

} // namespace sdpi
