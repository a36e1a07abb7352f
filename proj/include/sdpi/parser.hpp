#pragma once

// Recursive-descent parser for the .sdp surface syntax.
//
//   file  := decl*
//   decl  := "type" NAME "::" kind "=" (sess | ftype)   -- body sort from kind
//          | "def" NAME ":" ftype "=" term
//          | "proc" NAME "(" NAME ":" sess ")" ["uses" "(" NAME ":" sess, ... ")"] "=" proc
//   kind  := "type" | "stype" | "pi" x ":" ftype "." kind | "pi" t "::" kind "." kind
//   ftype := "pi" x ":" ftype "." ftype | "\" x ":" ftype "." ftype
//          | "\" t "::" kind "." ftype | fapp
//   fapp  := fatom (fatom | "[" term "]")*
//   fatom := "Bool" | "Nat" | NAME | "(" ftype ")"
//          | "{" sess "}" | "{" [chans ";"] chans "|-" NAME ":" sess "}"
//   sess  := "forall" x ":" ftype "." sess | "exists" x ":" ftype "." sess
//          | "\" x ":" ftype "." sess | "\" t "::" kind "." sess
//          | fapp "/\" sess | fapp "=>" sess | lolli
//   lolli := tensor ["-o" lolli]
//   tensor:= sapp ["*" tensor]
//   sapp  := satom (satom | "[" term "]")*
//   satom := "1" | "!" satom | NAME | "(" sess ")" | "&{" l ":" sess, ... "}"
//          | "+{" l ":" sess, ... "}" | "ifS" tatom satom satom
//          | "natrecS" tatom satom "(" x "," t "=>" sess ")"
//   term  := "\" x ":" ftype "." term | tapp
//   tapp  := tatom tatom*
//   tatom := NAME | "tt" | "ff" | "z" | NUMBER | "(" term ")" | monadval
//          | "succ" tatom | "ifT" tatom tatom tatom
//          | "natrecT" fatom tatom tatom "(" x "," y "=>" term ")"
//   monadval := "{" NAME "<-" proc ["<-" [names] ";" [names]] "}"
//   proc  := "recv" c "(" x ")" "." proc
//          | "send" c "<" term [":" sess] ">" "." proc
//          | "out" c "(" x ")" "." ("(" proc "||" proc ")" | proc)
//          | "nu" x [":" sess] "." "(" proc "||" proc ")"
//          | "serve" c "(" x ")" "." proc
//          | "case" (NAME | "(" term ")") "{" l "=>" proc, ... "}"
//          | NAME "." l ";" proc | "fwd" NAME NAME | "end" | "(" proc ")"
//          | NAME "<-" term ["<-" [names] ";" [names]] ";" proc
//
// `case x { tt => P, ff => Q }` with exactly the labels tt/ff is the boolean
// term case; any other label set selects on a channel. `--` starts a line
// comment. Application arguments given as bare names are sorted by their
// binder; bracket term arguments ([M]) when in doubt.

#include "sdpi/program.hpp"
#include "sdpi/syntax.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdpi {

struct ParseError : std::runtime_error {
  Loc loc;
  ParseError(Loc l, const std::string &msg)
      : std::runtime_error(std::to_string(l.line) + ":" +
                           std::to_string(l.col) + ": " + msg),
        loc(l) {}
};

namespace parser_detail {

enum class Tok {
  Ident,
  Number,
  Sym,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  Loc loc;
};

inline bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum((unsigned char)c) || c == '_' || c == '\'';
}

inline std::vector<Token> tokenize(const std::string &src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto loc = [&]() { return Loc{line, col}; };
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; k++, i++) {
      if (src[i] == '\n') {
        line++;
        col = 1;
      } else {
        col++;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Loc l = loc();
    if (ident_start(c)) {
      size_t j = i;
      while (j < src.size() && ident_char(src[j])) j++;
      out.push_back({Tok::Ident, src.substr(i, j - i), l});
      advance(j - i);
      continue;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < src.size() && std::isdigit((unsigned char)src[j])) j++;
      out.push_back({Tok::Number, src.substr(i, j - i), l});
      advance(j - i);
      continue;
    }
    auto two = i + 1 < src.size() ? src.substr(i, 2) : "";
    if (two == "|-" || two == "||" || two == "::" || two == "=>" ||
        two == "<-" || two == "-o" || two == "/\\") {
      out.push_back({Tok::Sym, two, l});
      advance(2);
      continue;
    }
    static const std::string singles = "{}()[]<>,;.:=\\!&+*";
    if (singles.find(c) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, c), l});
      advance(1);
      continue;
    }
    throw ParseError(l, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::Eof, "", loc()});
  return out;
}

enum class NameSort { TermVar, TypeFun, TypeSess, Chan };

inline bool is_keyword(const std::string &s) {
  static const std::set<std::string> kws = {
      "type", "stype",   "def",     "proc", "uses", "pi",   "forall",
      "exists", "ifS",   "natrecS", "ifT",  "natrecT", "tt", "ff",
      "succ", "recv",    "send",    "out",  "nu",   "serve", "case",
      "fwd",  "end",     "Bool",    "Nat"};
  return kws.count(s) > 0;
}

class Parser {
public:
  Parser(const std::string &src, std::string filename)
      : toks_(tokenize(src)), filename_(std::move(filename)) {
    scopes_.emplace_back();
  }

  Program parse_file() {
    Program prog;
    prog.filename = filename_;
    while (!at_eof()) {
      prog.decls.push_back(parse_decl());
    }
    return prog;
  }

  // Entry points for fragments (CLI `eq`, tests). `seed_scope` installs the
  // declaration names of an already-parsed program.
  void seed_scope(const Program &prog) {
    for (auto &d : prog.decls) {
      std::visit(overloaded{
                     [&](const TypeDecl &td) {
                       declare(td.name, kind_base_is_stype(td.kind)
                                            ? NameSort::TypeSess
                                            : NameSort::TypeFun);
                     },
                     [&](const TermDecl &td) {
                       declare(td.name, NameSort::TermVar);
                     },
                     [&](const ProcDecl &) {},
                 },
                 d);
    }
  }

  TermPtr parse_term_all() {
    auto t = parse_term();
    expect_eof();
    return t;
  }
  SessTypePtr parse_stype_all() {
    auto t = parse_stype();
    expect_eof();
    return t;
  }
  FunTypePtr parse_ftype_all() {
    auto t = parse_ftype();
    expect_eof();
    return t;
  }
  ProcessPtr parse_proc_all() {
    auto t = parse_proc();
    expect_eof();
    return t;
  }
  KindPtr parse_kind_all() {
    auto t = parse_kind();
    expect_eof();
    return t;
  }

private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::string filename_;
  std::vector<std::map<Name, NameSort>> scopes_;

  // --- token helpers ------------------------------------------------------

  const Token &peek(size_t ahead = 0) const {
    size_t k = pos_ + ahead;
    return k < toks_.size() ? toks_[k] : toks_.back();
  }
  const Token &next() {
    const Token &t = peek();
    if (t.kind != Tok::Eof) pos_++;
    return t;
  }
  bool at_eof() const { return peek().kind == Tok::Eof; }
  bool is_sym(const std::string &s, size_t ahead = 0) const {
    const Token &t = peek(ahead);
    return t.kind == Tok::Sym && t.text == s;
  }
  bool is_kw(const std::string &s, size_t ahead = 0) const {
    const Token &t = peek(ahead);
    return t.kind == Tok::Ident && t.text == s;
  }
  bool accept_sym(const std::string &s) {
    if (is_sym(s)) {
      pos_++;
      return true;
    }
    return false;
  }
  bool accept_kw(const std::string &s) {
    if (is_kw(s)) {
      pos_++;
      return true;
    }
    return false;
  }
  void expect_sym(const std::string &s, const std::string &what) {
    if (!accept_sym(s))
      throw ParseError(peek().loc, "expected '" + s + "' " + what +
                                       ", found '" + peek().text + "'");
  }
  void expect_kw(const std::string &s) {
    if (!accept_kw(s))
      throw ParseError(peek().loc, "expected '" + s + "', found '" +
                                       peek().text + "'");
  }
  void expect_eof() {
    if (!at_eof())
      throw ParseError(peek().loc, "expected end of input, found '" +
                                       peek().text + "'");
  }
  Name expect_name(const std::string &what) {
    const Token &t = peek();
    if (t.kind != Tok::Ident || is_keyword(t.text))
      throw ParseError(t.loc, "expected " + what + ", found '" + t.text + "'");
    pos_++;
    return t.text;
  }
  std::string expect_label() {
    const Token &t = peek();
    if (t.kind != Tok::Ident)
      throw ParseError(t.loc, "expected label, found '" + t.text + "'");
    pos_++;
    return t.text;
  }

  // --- scopes -------------------------------------------------------------

  struct ScopeGuard {
    Parser &p;
    explicit ScopeGuard(Parser &p_) : p(p_) { p.scopes_.emplace_back(); }
    ~ScopeGuard() { p.scopes_.pop_back(); }
  };

  void declare(const Name &n, NameSort s) { scopes_.back()[n] = s; }
  std::optional<NameSort> lookup(const Name &n) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto jt = it->find(n);
      if (jt != it->end()) return jt->second;
    }
    return std::nullopt;
  }

  static bool kind_base_is_stype(const KindPtr &k) {
    const Kind *cur = k.get();
    for (;;) {
      if (std::holds_alternative<KSType>(cur->v)) return true;
      if (std::holds_alternative<KType>(cur->v)) return false;
      if (auto *p = std::get_if<KPiTerm>(&cur->v)) {
        cur = p->body.get();
        continue;
      }
      cur = std::get<KPiType>(cur->v).body.get();
    }
  }

  // --- declarations -------------------------------------------------------

  Decl parse_decl() {
    Loc l = peek().loc;
    if (accept_kw("type")) {
      Name n = expect_name("type name");
      expect_sym("::", "after type name");
      auto kind = parse_kind();
      expect_sym("=", "in type declaration");
      TypeDecl td;
      td.name = n;
      td.kind = kind;
      td.loc = l;
      if (kind_base_is_stype(kind)) {
        td.sbody = parse_stype();
        declare(n, NameSort::TypeSess);
      } else {
        td.fbody = parse_ftype();
        declare(n, NameSort::TypeFun);
      }
      return td;
    }
    if (accept_kw("def")) {
      Name n = expect_name("definition name");
      expect_sym(":", "after definition name");
      auto ty = parse_ftype();
      expect_sym("=", "in definition");
      auto body = parse_term();
      declare(n, NameSort::TermVar);
      return TermDecl{n, ty, body, l};
    }
    if (accept_kw("proc")) {
      Name n = expect_name("process name");
      ScopeGuard sg(*this);
      expect_sym("(", "after process name");
      Name chan = expect_name("offered channel");
      declare(chan, NameSort::Chan);
      expect_sym(":", "after offered channel");
      auto offers = parse_stype();
      expect_sym(")", "after offered session type");
      std::vector<std::pair<Name, SessTypePtr>> uses;
      if (accept_kw("uses")) {
        expect_sym("(", "after 'uses'");
        for (;;) {
          Name c = expect_name("used channel");
          declare(c, NameSort::Chan);
          expect_sym(":", "after used channel");
          uses.emplace_back(c, parse_stype());
          if (!accept_sym(",")) break;
        }
        expect_sym(")", "after used channels");
      }
      expect_sym("=", "in process declaration");
      auto body = parse_proc();
      return ProcDecl{n, chan, offers, std::move(uses), body, l};
    }
    throw ParseError(l, "expected 'type', 'def' or 'proc', found '" +
                            peek().text + "'");
  }

  // --- kinds --------------------------------------------------------------

  KindPtr parse_kind() {
    Loc l = peek().loc;
    if (accept_kw("type")) return k_type(l);
    if (accept_kw("stype")) return k_stype(l);
    if (accept_sym("(")) {
      auto k = parse_kind();
      expect_sym(")", "after kind");
      return k;
    }
    if (accept_kw("pi")) {
      Name x = expect_name("bound variable");
      if (accept_sym("::")) {
        auto dom = parse_kind();
        expect_sym(".", "after kind domain");
        ScopeGuard sg(*this);
        declare(x, kind_base_is_stype(dom) ? NameSort::TypeSess
                                           : NameSort::TypeFun);
        return k_pi_type(x, dom, parse_kind(), l);
      }
      expect_sym(":", "after bound variable");
      auto dom = parse_ftype_app();
      expect_sym(".", "after domain");
      ScopeGuard sg(*this);
      declare(x, NameSort::TermVar);
      return k_pi_term(x, dom, parse_kind(), l);
    }
    throw ParseError(l, "expected kind, found '" + peek().text + "'");
  }

  // --- functional types ---------------------------------------------------

  FunTypePtr parse_ftype() {
    Loc l = peek().loc;
    if (accept_kw("pi")) {
      Name x = expect_name("bound variable");
      expect_sym(":", "after bound variable");
      auto dom = parse_ftype_app();
      expect_sym(".", "after domain");
      ScopeGuard sg(*this);
      declare(x, NameSort::TermVar);
      return ft_pi(x, dom, parse_ftype(), l);
    }
    if (is_sym("\\")) {
      next();
      Name x = expect_name("bound variable");
      if (accept_sym("::")) {
        auto dom = parse_kind();
        expect_sym(".", "after kind annotation");
        ScopeGuard sg(*this);
        declare(x, kind_base_is_stype(dom) ? NameSort::TypeSess
                                           : NameSort::TypeFun);
        return ft_lam_type(x, dom, parse_ftype(), l);
      }
      expect_sym(":", "after bound variable");
      auto dom = parse_ftype_app();
      expect_sym(".", "after domain");
      ScopeGuard sg(*this);
      declare(x, NameSort::TermVar);
      return ft_lam_term(x, dom, parse_ftype(), l);
    }
    return parse_ftype_app();
  }

  FunTypePtr parse_ftype_app() {
    auto head = parse_ftype_atom();
    for (;;) {
      Loc l = peek().loc;
      if (accept_sym("[")) {
        auto arg = parse_term();
        expect_sym("]", "after term argument");
        head = ft_app_term(head, arg, l);
        continue;
      }
      if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
        auto sort = lookup(peek().text);
        if (sort == NameSort::TypeFun) {
          head = ft_app_type(head, ft_var(next().text, l), l);
          continue;
        }
        if (sort == NameSort::TermVar || sort == NameSort::Chan) {
          head = ft_app_term(head, tm_var(next().text, l), l);
          continue;
        }
        if (!sort) break; // unknown bare name: ambiguous, leave to caller
        break;
      }
      if (is_kw("Bool") || is_kw("Nat")) {
        head = ft_app_type(head, parse_ftype_atom(), l);
        continue;
      }
      if (peek().kind == Tok::Number || is_kw("tt") || is_kw("ff") ||
          is_kw("z")) {
        head = ft_app_term(head, parse_term_atom(), l);
        continue;
      }
      if (is_sym("(")) {
        size_t save = pos_;
        try {
          head = ft_app_type(head, parse_ftype_atom(), l);
          continue;
        } catch (ParseError &) {
          pos_ = save;
        }
        try {
          head = ft_app_term(head, parse_term_atom(), l);
          continue;
        } catch (ParseError &) {
          pos_ = save;
        }
        break;
      }
      if (is_sym("{")) {
        // monad type (atom) or monad value (term argument)
        if (peek(1).kind == Tok::Ident && is_sym("<-", 2)) {
          head = ft_app_term(head, parse_term_atom(), l);
        } else {
          head = ft_app_type(head, parse_ftype_atom(), l);
        }
        continue;
      }
      break;
    }
    return head;
  }

  FunTypePtr parse_ftype_atom() {
    Loc l = peek().loc;
    if (accept_kw("Bool")) return ft_bool(l);
    if (accept_kw("Nat")) return ft_nat(l);
    if (accept_sym("(")) {
      auto t = parse_ftype();
      expect_sym(")", "after type");
      return t;
    }
    if (is_sym("{")) return parse_monad_type();
    if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
      auto sort = lookup(peek().text);
      if (sort == NameSort::TypeSess)
        throw ParseError(l, "'" + peek().text +
                                "' is a session type, not a functional type");
      if (sort == NameSort::TermVar || sort == NameSort::Chan)
        throw ParseError(l, "'" + peek().text +
                                "' is a term variable, not a type");
      return ft_var(next().text, l);
    }
    throw ParseError(l, "expected functional type, found '" + peek().text + "'");
  }

  FunTypePtr parse_monad_type() {
    Loc l = peek().loc;
    expect_sym("{", "at monad type");
    // Scan ahead for a |- at this brace depth to pick the full form.
    bool full = false;
    {
      int depth = 0;
      for (size_t k = pos_; k < toks_.size(); k++) {
        const Token &t = toks_[k];
        if (t.kind == Tok::Sym) {
          if (t.text == "{" || t.text == "(" || t.text == "[") depth++;
          if (t.text == "}" || t.text == ")" || t.text == "]") {
            if (t.text == "}" && depth == 0) break;
            depth--;
          }
          if (t.text == "|-" && depth == 0) {
            full = true;
            break;
          }
        }
        if (t.kind == Tok::Eof) break;
      }
    }
    if (!full) {
      auto a = parse_stype();
      expect_sym("}", "after monad type");
      return ft_monad1(a, l);
    }
    std::vector<std::pair<Name, SessTypePtr>> first, second;
    bool two_lists = false;
    auto parse_list = [&](std::vector<std::pair<Name, SessTypePtr>> &out) {
      while (peek().kind == Tok::Ident && !is_keyword(peek().text) &&
             is_sym(":", 1)) {
        Name c = expect_name("channel");
        expect_sym(":", "after channel");
        out.emplace_back(c, parse_stype());
        if (!accept_sym(",")) break;
      }
    };
    parse_list(first);
    if (accept_sym(";")) {
      two_lists = true;
      parse_list(second);
    }
    expect_sym("|-", "in monad type");
    Name chan = expect_name("offered channel");
    expect_sym(":", "after offered channel");
    auto offers = parse_stype();
    expect_sym("}", "after monad type");
    if (two_lists)
      return ft_monad(std::move(first), std::move(second), chan, offers, l);
    return ft_monad({}, std::move(first), chan, offers, l);
  }

  // --- session types ------------------------------------------------------

  SessTypePtr parse_stype() {
    Loc l = peek().loc;
    if (accept_kw("forall")) return parse_quantifier(true, l);
    if (accept_kw("exists")) return parse_quantifier(false, l);
    if (is_sym("\\")) {
      next();
      Name x = expect_name("bound variable");
      if (accept_sym("::")) {
        auto dom = parse_kind();
        expect_sym(".", "after kind annotation");
        ScopeGuard sg(*this);
        declare(x, kind_base_is_stype(dom) ? NameSort::TypeSess
                                           : NameSort::TypeFun);
        return st_lam_type(x, dom, parse_stype(), l);
      }
      expect_sym(":", "after bound variable");
      auto dom = parse_ftype_app();
      expect_sym(".", "after domain");
      ScopeGuard sg(*this);
      declare(x, NameSort::TermVar);
      return st_lam_term(x, dom, parse_stype(), l);
    }
    // Try a functional operand followed by /\ or =>.
    {
      size_t save = pos_;
      try {
        auto tau = parse_ftype_app();
        if (accept_sym("/\\")) return st_wedge(tau, parse_stype(), l);
        if (accept_sym("=>")) return st_impl(tau, parse_stype(), l);
        pos_ = save;
      } catch (ParseError &) {
        pos_ = save;
      }
    }
    return parse_stype_lolli();
  }

  SessTypePtr parse_quantifier(bool universal, Loc l) {
    Name x = expect_name("bound variable");
    expect_sym(":", "after bound variable");
    auto dom = parse_ftype_app();
    expect_sym(".", "after domain");
    ScopeGuard sg(*this);
    declare(x, NameSort::TermVar);
    auto body = parse_stype();
    return universal ? st_forall(x, dom, body, l) : st_exists(x, dom, body, l);
  }

  SessTypePtr parse_stype_lolli() {
    Loc l = peek().loc;
    auto lhs = parse_stype_tensor();
    if (accept_sym("-o")) return st_lolli(lhs, parse_stype(), l);
    return lhs;
  }

  SessTypePtr parse_stype_tensor() {
    Loc l = peek().loc;
    auto lhs = parse_stype_app();
    if (accept_sym("*")) return st_tensor(lhs, parse_stype_tensor(), l);
    return lhs;
  }

  SessTypePtr parse_stype_app() {
    auto head = parse_stype_atom();
    for (;;) {
      Loc l = peek().loc;
      if (accept_sym("[")) {
        auto arg = parse_term();
        expect_sym("]", "after term argument");
        head = st_app_term(head, arg, l);
        continue;
      }
      if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
        auto sort = lookup(peek().text);
        if (sort == NameSort::TypeSess) {
          head = st_app_type(head, st_var(next().text, l), l);
          continue;
        }
        if (sort == NameSort::TermVar || sort == NameSort::Chan) {
          head = st_app_term(head, tm_var(next().text, l), l);
          continue;
        }
        break;
      }
      if (is_sym("(") || is_sym("!") || is_kw("ifS") || is_kw("natrecS")) {
        size_t save = pos_;
        try {
          head = st_app_type(head, parse_stype_atom(), l);
          continue;
        } catch (ParseError &) {
          pos_ = save;
        }
        break;
      }
      break;
    }
    return head;
  }

  SessTypePtr parse_stype_atom() {
    Loc l = peek().loc;
    if (peek().kind == Tok::Number && peek().text == "1") {
      next();
      return st_one(l);
    }
    if (accept_sym("!")) return st_bang(parse_stype_atom(), l);
    if (accept_sym("(")) {
      auto a = parse_stype();
      expect_sym(")", "after session type");
      return a;
    }
    if (is_sym("&") || is_sym("+")) {
      bool with = is_sym("&");
      next();
      expect_sym("{", "after choice operator");
      std::vector<std::pair<std::string, SessTypePtr>> bs;
      for (;;) {
        std::string label = expect_label();
        expect_sym(":", "after label");
        bs.emplace_back(label, parse_stype());
        if (!accept_sym(",")) break;
      }
      expect_sym("}", "after branches");
      for (size_t i = 0; i < bs.size(); i++)
        for (size_t j = i + 1; j < bs.size(); j++)
          if (bs[i].first == bs[j].first)
            throw ParseError(l, "duplicate label '" + bs[i].first + "'");
      return with ? st_with(std::move(bs), l) : st_plus(std::move(bs), l);
    }
    if (accept_kw("ifS")) {
      auto cond = parse_term_atom();
      auto a = parse_stype_atom();
      auto b = parse_stype_atom();
      return st_if(cond, a, b, l);
    }
    if (accept_kw("natrecS")) {
      auto target = parse_term_atom();
      auto zero = parse_stype_atom();
      expect_sym("(", "before natrecS successor branch");
      Name pred = expect_name("predecessor variable");
      expect_sym(",", "in natrecS branch binders");
      Name rec = expect_name("recursive type variable");
      expect_sym("=>", "after natrecS binders");
      ScopeGuard sg(*this);
      declare(pred, NameSort::TermVar);
      declare(rec, NameSort::TypeSess);
      auto succ = parse_stype();
      expect_sym(")", "after natrecS branch");
      return st_natrec(target, zero, pred, rec, succ, l);
    }
    if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
      auto sort = lookup(peek().text);
      if (sort == NameSort::TypeFun)
        throw ParseError(l, "'" + peek().text +
                                "' is a functional type, not a session type");
      if (sort == NameSort::TermVar || sort == NameSort::Chan)
        throw ParseError(l, "'" + peek().text +
                                "' is a term variable, not a session type");
      return st_var(next().text, l);
    }
    throw ParseError(l, "expected session type, found '" + peek().text + "'");
  }

  // --- terms ---------------------------------------------------------------

  TermPtr parse_term() {
    Loc l = peek().loc;
    if (is_sym("\\")) {
      next();
      Name x = expect_name("bound variable");
      expect_sym(":", "after bound variable (annotations are mandatory)");
      auto dom = parse_ftype_app();
      expect_sym(".", "after domain");
      ScopeGuard sg(*this);
      declare(x, NameSort::TermVar);
      return tm_lam(x, dom, parse_term(), l);
    }
    return parse_term_app();
  }

  bool starts_term_atom() const {
    if (peek().kind == Tok::Number) return true;
    if (is_sym("(")) return true;
    if (is_sym("{"))
      return peek(1).kind == Tok::Ident && is_sym("<-", 2);
    if (is_kw("tt") || is_kw("ff") || is_kw("z") || is_kw("succ") ||
        is_kw("ifT") || is_kw("natrecT"))
      return true;
    if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
      auto sort = lookup(peek().text);
      return !sort || sort == NameSort::TermVar || sort == NameSort::Chan;
    }
    return false;
  }

  TermPtr parse_term_app() {
    auto head = parse_term_atom();
    while (starts_term_atom()) {
      Loc l = peek().loc;
      head = tm_app(head, parse_term_atom(), l);
    }
    return head;
  }

  TermPtr parse_term_atom() {
    Loc l = peek().loc;
    if (peek().kind == Tok::Number) {
      uint64_t n = std::stoull(next().text);
      return tm_nat(n, l);
    }
    if (accept_kw("tt")) return tm_true(l);
    if (accept_kw("ff")) return tm_false(l);
    if (is_kw("z")) {
      // `z` is the zero literal unless a binder named z is in scope
      if (!lookup("z")) {
        next();
        return tm_zero(l);
      }
      return tm_var(next().text, l);
    }
    if (accept_kw("succ")) return tm_succ(parse_term_atom(), l);
    if (accept_kw("ifT")) {
      auto c = parse_term_atom();
      auto a = parse_term_atom();
      auto b = parse_term_atom();
      return tm_if(c, a, b, l);
    }
    if (accept_kw("natrecT")) {
      auto motive = parse_ftype_atom();
      auto target = parse_term_atom();
      auto zero = parse_term_atom();
      expect_sym("(", "before natrecT successor branch");
      Name pred = expect_name("predecessor variable");
      expect_sym(",", "in natrecT branch binders");
      Name acc = expect_name("accumulator variable");
      expect_sym("=>", "after natrecT binders");
      ScopeGuard sg(*this);
      declare(pred, NameSort::TermVar);
      declare(acc, NameSort::TermVar);
      auto succ = parse_term();
      expect_sym(")", "after natrecT branch");
      return tm_natrec(motive, target, zero, pred, acc, succ, l);
    }
    if (accept_sym("(")) {
      auto t = parse_term();
      expect_sym(")", "after term");
      return t;
    }
    if (is_sym("{")) return parse_monad_value();
    if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
      auto sort = lookup(peek().text);
      if (sort == NameSort::TypeFun || sort == NameSort::TypeSess)
        throw ParseError(l, "'" + peek().text + "' is a type, not a term");
      return tm_var(next().text, l);
    }
    throw ParseError(l, "expected term, found '" + peek().text + "'");
  }

  // The trailing channel lists of `{ c <- P <- u,... ; d,... }` must be
  // found before the body is parsed, because they bind into the body. A
  // candidate `<-` only counts when everything after it up to the closing
  // brace has the shape `names ; names`.
  TermPtr parse_monad_value() {
    Loc l = peek().loc;
    expect_sym("{", "at monad value");
    ScopeGuard sg(*this);
    Name chan = expect_name("offered channel");
    declare(chan, NameSort::Chan);
    expect_sym("<-", "after offered channel");
    std::vector<Name> shared_chans, linear_chans;
    bool had_lists = false;
    {
      size_t save = pos_;
      int depth = 0;
      size_t list_start = 0;
      size_t close = 0;
      for (size_t k = pos_; k < toks_.size(); k++) {
        const Token &t = toks_[k];
        if (t.kind == Tok::Eof) break;
        if (t.kind != Tok::Sym) continue;
        if (t.text == "{" || t.text == "(" || t.text == "[") {
          depth++;
        } else if (t.text == ")" || t.text == "]") {
          depth--;
        } else if (t.text == "}") {
          if (depth == 0) {
            close = k;
            break;
          }
          depth--;
        } else if (t.text == "<-" && depth == 0) {
          list_start = k;
        }
      }
      auto lists_shape = [&](size_t from, size_t to) {
        int semis = 0;
        bool want_name = true;
        for (size_t k = from; k < to; k++) {
          const Token &t = toks_[k];
          if (t.kind == Tok::Ident && !is_keyword(t.text) && want_name) {
            want_name = false;
          } else if (t.kind == Tok::Sym && t.text == "," && !want_name) {
            want_name = true;
          } else if (t.kind == Tok::Sym && t.text == ";" && semis == 0) {
            semis++;
            want_name = true;
          } else {
            return false;
          }
        }
        return semis == 1;
      };
      if (list_start != 0 && close != 0 &&
          lists_shape(list_start + 1, close)) {
        had_lists = true;
        pos_ = list_start + 1;
        auto parse_names = [&](std::vector<Name> &out) {
          while (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
            out.push_back(next().text);
            if (!accept_sym(",")) break;
          }
        };
        parse_names(shared_chans);
        expect_sym(";", "between shared and linear channels");
        parse_names(linear_chans);
        for (auto &u : shared_chans) declare(u, NameSort::Chan);
        for (auto &d : linear_chans) declare(d, NameSort::Chan);
      }
      pos_ = save;
    }
    auto body = parse_proc();
    if (had_lists) {
      expect_sym("<-", "before channel lists");
      while (!is_sym("}") && peek().kind != Tok::Eof) next();
    }
    expect_sym("}", "after monad value");
    return tm_monad(chan, body, std::move(shared_chans),
                    std::move(linear_chans), nullptr, l);
  }

  // --- processes ------------------------------------------------------------

  ProcessPtr parse_proc() {
    Loc l = peek().loc;
    if (accept_kw("end")) return pr_nil(l);
    if (accept_kw("fwd")) {
      Name from = expect_name("source channel");
      Name to = expect_name("target channel");
      return pr_fwd(from, to, l);
    }
    if (accept_kw("recv")) {
      Name chan = expect_name("channel");
      expect_sym("(", "after channel");
      Name bind = expect_name("bound name");
      expect_sym(")", "after bound name");
      expect_sym(".", "after input prefix");
      ScopeGuard sg(*this);
      declare(bind, NameSort::Chan);
      return pr_in(chan, bind, parse_proc(), l);
    }
    if (accept_kw("send")) {
      Name chan = expect_name("channel");
      expect_sym("<", "after channel");
      auto payload = parse_term();
      SessTypePtr anno;
      if (accept_sym(":")) anno = parse_stype();
      expect_sym(">", "after payload");
      expect_sym(".", "after output prefix");
      return pr_out_term(chan, payload, anno, parse_proc(), l);
    }
    if (accept_kw("out")) {
      Name chan = expect_name("channel");
      expect_sym("(", "after channel");
      Name bind = expect_name("bound channel");
      expect_sym(")", "after bound channel");
      expect_sym(".", "after output prefix");
      ScopeGuard sg(*this);
      declare(bind, NameSort::Chan);
      if (is_sym("(")) {
        size_t save = pos_;
        next();
        auto left = parse_proc();
        if (accept_sym("||")) {
          auto right = parse_proc();
          expect_sym(")", "after parallel components");
          return pr_out_fresh(chan, bind, left, right, nullptr, l);
        }
        pos_ = save; // parenthesised single continuation: copy form
      }
      return pr_copy(chan, bind, parse_proc(), nullptr, l);
    }
    if (accept_kw("nu")) {
      Name bind = expect_name("restricted channel");
      SessTypePtr anno;
      ScopeGuard sg(*this);
      declare(bind, NameSort::Chan);
      if (accept_sym(":")) anno = parse_stype();
      expect_sym(".", "after restriction");
      expect_sym("(", "after restriction");
      auto left = parse_proc();
      expect_sym("||", "between parallel components");
      auto right = parse_proc();
      expect_sym(")", "after parallel components");
      return pr_new(bind, left, right, anno, l);
    }
    if (accept_kw("serve")) {
      Name chan = expect_name("channel");
      expect_sym("(", "after channel");
      Name bind = expect_name("bound channel");
      expect_sym(")", "after bound channel");
      expect_sym(".", "after replication prefix");
      ScopeGuard sg(*this);
      declare(bind, NameSort::Chan);
      return pr_repl(chan, bind, parse_proc(), l);
    }
    if (accept_kw("case")) {
      TermPtr scrut_term;
      Name scrut_name;
      if (accept_sym("(")) {
        scrut_term = parse_term();
        expect_sym(")", "after scrutinee");
      } else {
        scrut_name = expect_name("scrutinee");
      }
      expect_sym("{", "after scrutinee");
      std::vector<std::pair<std::string, ProcessPtr>> branches;
      for (;;) {
        std::string label = expect_label();
        expect_sym("=>", "after label");
        branches.emplace_back(label, parse_proc());
        if (!accept_sym(",")) break;
      }
      expect_sym("}", "after case branches");
      bool boolish = branches.size() == 2 &&
                     ((branches[0].first == "tt" && branches[1].first == "ff") ||
                      (branches[0].first == "ff" && branches[1].first == "tt"));
      bool term_scrut =
          scrut_term || lookup(scrut_name) == NameSort::TermVar;
      if (scrut_term && !boolish)
        throw ParseError(l, "term case requires exactly the labels tt and ff");
      if (boolish && (term_scrut || lookup(scrut_name) == NameSort::Chan ||
                      !lookup(scrut_name))) {
        if (!scrut_term) scrut_term = tm_var(scrut_name, l);
        ProcessPtr then_b, else_b;
        for (auto &[lab, b] : branches) (lab == "tt" ? then_b : else_b) = b;
        return pr_case_bool(scrut_term, then_b, else_b, l);
      }
      for (size_t i = 0; i < branches.size(); i++)
        for (size_t j = i + 1; j < branches.size(); j++)
          if (branches[i].first == branches[j].first)
            throw ParseError(l, "duplicate label '" + branches[i].first + "'");
      return pr_case(scrut_name, std::move(branches), l);
    }
    if (accept_sym("(")) {
      auto p = parse_proc();
      expect_sym(")", "after process");
      return p;
    }
    if (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
      Name n = peek().text;
      if (is_sym(".", 1)) {
        next();
        next();
        std::string label = expect_label();
        expect_sym(";", "after selected label");
        return pr_select(n, label, parse_proc(), l);
      }
      if (is_sym("<-", 1)) {
        next();
        next();
        auto monadic = parse_term();
        std::vector<Name> shared_args, linear_args;
        if (accept_sym("<-")) {
          auto parse_names = [&](std::vector<Name> &out) {
            while (peek().kind == Tok::Ident && !is_keyword(peek().text)) {
              out.push_back(next().text);
              if (!accept_sym(",")) break;
            }
          };
          parse_names(shared_args);
          expect_sym(";", "between shared and linear channels");
          parse_names(linear_args);
        }
        expect_sym(";", "before spawn continuation");
        ScopeGuard sg(*this);
        declare(n, NameSort::Chan);
        return pr_spawn(n, monadic, std::move(shared_args),
                        std::move(linear_args), parse_proc(), l);
      }
    }
    throw ParseError(l, "expected process, found '" + peek().text + "'");
  }
};

} // namespace parser_detail

inline Program parse_file(const std::string &src, const std::string &filename) {
  parser_detail::Parser p(src, filename);
  return p.parse_file();
}

inline TermPtr parse_term_string(const std::string &src,
                                 const Program *scope = nullptr) {
  parser_detail::Parser p(src, "<string>");
  if (scope) p.seed_scope(*scope);
  return p.parse_term_all();
}
inline SessTypePtr parse_stype_string(const std::string &src,
                                      const Program *scope = nullptr) {
  parser_detail::Parser p(src, "<string>");
  if (scope) p.seed_scope(*scope);
  return p.parse_stype_all();
}
inline FunTypePtr parse_ftype_string(const std::string &src,
                                     const Program *scope = nullptr) {
  parser_detail::Parser p(src, "<string>");
  if (scope) p.seed_scope(*scope);
  return p.parse_ftype_all();
}
inline ProcessPtr parse_proc_string(const std::string &src,
                                    const Program *scope = nullptr) {
  parser_detail::Parser p(src, "<string>");
  if (scope) p.seed_scope(*scope);
  return p.parse_proc_all();
}
inline KindPtr parse_kind_string(const std::string &src,
                                 const Program *scope = nullptr) {
  parser_detail::Parser p(src, "<string>");
  if (scope) p.seed_scope(*scope);
  return p.parse_kind_all();
}

} // namespace sdpi
