#include "ctms/parse.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace ctms {

namespace {

enum class Tok {
  Ident,
  Int,
  // reserved words
  KwSkip,
  KwIf,
  KwThen,
  KwElse,
  KwWhile,
  KwFor,
  KwDo,
  KwIn,
  KwOpaque,
  KwRequires,
  KwEnsures,
  KwParam,
  KwTrue,
  KwFalse,
  // punctuation / operators
  Semi,
  Assign,   // :=
  Colon,
  Comma,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Star,
  Plus,
  Minus,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  Ne,
  AndAnd,
  OrOr,
  Bang,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  Int value = 0;
  SourceLoc loc;
};

const std::map<std::string, Tok>& keyword_table() {
  static const std::map<std::string, Tok> tbl = {
      {"skip", Tok::KwSkip},     {"if", Tok::KwIf},           {"then", Tok::KwThen},
      {"else", Tok::KwElse},     {"while", Tok::KwWhile},     {"for", Tok::KwFor},
      {"do", Tok::KwDo},         {"in", Tok::KwIn},           {"opaque", Tok::KwOpaque},
      {"requires", Tok::KwRequires}, {"ensures", Tok::KwEnsures}, {"param", Tok::KwParam},
      {"true", Tok::KwTrue},     {"false", Tok::KwFalse},
  };
  return tbl;
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto here = [&]() { return SourceLoc{line, col}; };
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance();
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    SourceLoc loc = here();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_'))
        ++j;
      std::string word = src.substr(i, j - i);
      advance(j - i);
      auto it = keyword_table().find(word);
      if (it != keyword_table().end()) {
        out.push_back({it->second, word, 0, loc});
      } else {
        out.push_back({Tok::Ident, word, 0, loc});
      }
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      std::string digits = src.substr(i, j - i);
      advance(j - i);
      try {
        out.push_back({Tok::Int, digits, std::stoll(digits), loc});
      } catch (const std::out_of_range&) {
        throw ParseError(loc, "integer literal too large: " + digits);
      }
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (two(':', '=')) { out.push_back({Tok::Assign, ":=", 0, loc}); advance(2); continue; }
    if (two('<', '=')) { out.push_back({Tok::Le, "<=", 0, loc}); advance(2); continue; }
    if (two('>', '=')) { out.push_back({Tok::Ge, ">=", 0, loc}); advance(2); continue; }
    if (two('=', '=')) { out.push_back({Tok::EqEq, "==", 0, loc}); advance(2); continue; }
    if (two('!', '=')) { out.push_back({Tok::Ne, "!=", 0, loc}); advance(2); continue; }
    if (two('&', '&')) { out.push_back({Tok::AndAnd, "&&", 0, loc}); advance(2); continue; }
    if (two('|', '|')) { out.push_back({Tok::OrOr, "||", 0, loc}); advance(2); continue; }
    Tok k;
    switch (c) {
      case ';': k = Tok::Semi; break;
      case ':': k = Tok::Colon; break;
      case ',': k = Tok::Comma; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '*': k = Tok::Star; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '<': k = Tok::Lt; break;
      case '>': k = Tok::Gt; break;
      case '!': k = Tok::Bang; break;
      default:
        throw ParseError(loc, std::string("unexpected character '") + c + "'");
    }
    out.push_back({k, std::string(1, c), 0, loc});
    advance();
  }
  out.push_back({Tok::End, "<eof>", 0, here()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program parse_program() {
    Program p;
    while (at(Tok::KwParam)) {
      next();
      Token name = expect(Tok::Ident, "parameter name");
      if (std::count(p.params.begin(), p.params.end(), Ident{name.text}))
        throw ParseError(name.loc, "duplicate param " + name.text);
      expect(Tok::Semi, "';' after param declaration");
      p.params.push_back(Ident{name.text});
    }
    params_.insert(p.params.begin(), p.params.end());

    expect(Tok::KwRequires, "'requires'");
    p.spec = parse_layout();
    expect(Tok::Semi, "';' after requires clause");
    arrays_.clear();
    for (const auto& d : p.spec.arrays) arrays_.insert(d.array);

    p.body = parse_stmt_list(/*terminator=*/Tok::KwEnsures);
    expect(Tok::KwEnsures, "'ensures'");
    SafetySpec post = parse_layout();
    if (!layouts_match(p.spec, post))
      throw ParseError(peek().loc, "ensures clause differs from requires clause");
    expect(Tok::End, "end of input");
    return p;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<Ident> params_;
  std::set<Ident> arrays_;

  const Token& peek(std::size_t k = 0) const {
    std::size_t j = std::min(pos_ + k, toks_.size() - 1);
    return toks_[j];
  }
  bool at(Tok k) const { return peek().kind == k; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  const Token& expect(Tok k, const std::string& what) {
    if (!at(k)) throw ParseError(peek().loc, "expected " + what + ", got '" + peek().text + "'");
    return next();
  }

  static bool layouts_match(const SafetySpec& a, const SafetySpec& b) {
    auto key = [](const SafetySpec& s) {
      std::vector<std::pair<Ident, Ident>> arr;
      for (const auto& d : s.arrays) arr.emplace_back(d.array, d.size);
      std::sort(arr.begin(), arr.end());
      return std::make_pair(arr, s.frames);  // frames already sorted
    };
    return key(a) == key(b);
  }

  SafetySpec parse_layout() {
    SafetySpec spec;
    while (true) {
      if (at(Tok::Ident) && peek().text == "array" && peek(1).kind == Tok::LParen) {
        next();
        next();
        Token arr = expect(Tok::Ident, "array name");
        expect(Tok::Comma, "',' in array region");
        Token sz = expect(Tok::Ident, "size variable");
        expect(Tok::RParen, "')' after array region");
        spec.arrays.push_back({Ident{arr.text}, Ident{sz.text}});
      } else {
        Token f = expect(Tok::Ident, "memory region ('array(a, s)' or frame name)");
        spec.frames.push_back(Ident{f.text});
      }
      if (at(Tok::Star)) {
        next();
        continue;
      }
      break;
    }
    std::sort(spec.frames.begin(), spec.frames.end());
    if (spec.arrays.empty())
      throw ParseError(peek().loc, "layout declares no array region");
    return spec;
  }

  CmdPtr parse_stmt_list(Tok terminator) {
    std::vector<CmdPtr> cmds;
    SourceLoc loc = peek().loc;
    cmds.push_back(parse_stmt());
    while (at(Tok::Semi)) {
      next();
      if (at(terminator) || at(Tok::RBrace)) break;  // trailing separator
      cmds.push_back(parse_stmt());
    }
    return cmd_seq(std::move(cmds), loc);
  }

  CmdPtr parse_block() {
    SourceLoc loc = expect(Tok::LBrace, "'{'").loc;
    if (at(Tok::RBrace)) {
      next();
      return cmd_skip(loc);
    }
    CmdPtr body = parse_stmt_list(/*terminator=*/Tok::RBrace);
    expect(Tok::RBrace, "'}'");
    return body;
  }

  CmdPtr parse_stmt() {
    SourceLoc loc = peek().loc;
    switch (peek().kind) {
      case Tok::KwSkip:
        next();
        return cmd_skip(loc);
      case Tok::KwIf: {
        next();
        BoolExprPtr guard = parse_bool();
        expect(Tok::KwThen, "'then'");
        CmdPtr then_branch = parse_block();
        CmdPtr else_branch;
        if (at(Tok::KwElse)) {
          next();
          else_branch = parse_block();
        }
        return cmd_if(guard, then_branch, else_branch, loc);
      }
      case Tok::KwWhile: {
        next();
        BoolExprPtr guard = parse_bool();
        expect(Tok::KwDo, "'do'");
        return cmd_while(guard, parse_block(), loc);
      }
      case Tok::KwFor: {
        next();
        Token iter = expect(Tok::Ident, "loop iterator");
        expect(Tok::KwIn, "'in'");
        expect(Tok::LBracket, "'['");
        IntExprPtr lower = parse_int();
        expect(Tok::Colon, "':' in range");
        IntExprPtr upper = parse_int();
        expect(Tok::RBracket, "']'");
        expect(Tok::KwDo, "'do'");
        return cmd_for(Ident{iter.text}, lower, upper, parse_block(), loc);
      }
      case Tok::KwOpaque:
        return parse_opaque();
      case Tok::Ident: {
        if (peek(1).kind == Tok::Assign) {
          Token target = next();
          next();
          return cmd_assign(Ident{target.text}, parse_int(), loc);
        }
        if (peek(1).kind == Tok::LBracket) {
          // Either an array write or an expression statement starting with a
          // read; decide after the closing bracket.
          std::size_t save = pos_;
          Token arr = next();
          next();
          IntExprPtr index = parse_int();
          expect(Tok::RBracket, "']'");
          if (at(Tok::Assign)) {
            next();
            return cmd_array_write(Ident{arr.text}, index, parse_int(), loc);
          }
          pos_ = save;
        }
        return cmd_expr(parse_int(), loc);
      }
      case Tok::Int:
      case Tok::Minus:
      case Tok::LParen:
        return cmd_expr(parse_int(), loc);
      default:
        throw ParseError(loc, "expected statement, got '" + peek().text + "'");
    }
  }

  CmdPtr parse_opaque() {
    SourceLoc loc = expect(Tok::KwOpaque, "'opaque'").loc;
    Token label = expect(Tok::Ident, "opaque label");
    std::vector<Ident> reads, writes, frames;
    std::set<std::string> seen;
    // 'reads', 'writes', 'frames' are contextual keywords, any order, each
    // at most once.
    while (at(Tok::Ident) && peek(1).kind == Tok::LParen &&
           (peek().text == "reads" || peek().text == "writes" || peek().text == "frames")) {
      Token clause = next();
      if (!seen.insert(clause.text).second)
        throw ParseError(clause.loc, "duplicate " + clause.text + " clause");
      next();  // '('
      std::vector<Ident>& dst =
          clause.text == "reads" ? reads : clause.text == "writes" ? writes : frames;
      dst.push_back(Ident{expect(Tok::Ident, "identifier").text});
      while (at(Tok::Comma)) {
        next();
        dst.push_back(Ident{expect(Tok::Ident, "identifier").text});
      }
      expect(Tok::RParen, "')'");
    }
    return cmd_opaque(Ident{label.text}, std::move(reads), std::move(writes),
                      std::move(frames), loc);
  }

  // ---- expressions ----------------------------------------------------------

  IntExprPtr parse_int() { return parse_add(); }

  IntExprPtr parse_add() {
    IntExprPtr lhs = parse_mul();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      Token op = next();
      IntExprPtr rhs = parse_mul();
      lhs = int_bin(op.kind == Tok::Plus ? IntBinOp::Add : IntBinOp::Sub, lhs, rhs, op.loc);
    }
    return lhs;
  }

  IntExprPtr parse_mul() {
    IntExprPtr lhs = parse_int_atom();
    while (at(Tok::Star)) {
      Token op = next();
      lhs = int_bin(IntBinOp::Mul, lhs, parse_int_atom(), op.loc);
    }
    return lhs;
  }

  IntExprPtr parse_int_atom() {
    SourceLoc loc = peek().loc;
    switch (peek().kind) {
      case Tok::Int:
        return int_lit(next().value, loc);
      case Tok::Minus: {
        // Unary minus is only literal negation; general negation is `0 - e`.
        next();
        Token lit = expect(Tok::Int, "integer literal after unary '-'");
        return int_lit(-lit.value, loc);
      }
      case Tok::LParen: {
        next();
        IntExprPtr e = parse_int();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        Token id = next();
        if (at(Tok::LBracket)) {
          next();
          IntExprPtr index = parse_int();
          expect(Tok::RBracket, "']'");
          return int_read(Ident{id.text}, index, loc);
        }
        if (params_.count(Ident{id.text})) return int_param(Ident{id.text}, loc);
        return int_var(Ident{id.text}, loc);
      }
      default:
        throw ParseError(loc, "expected integer expression, got '" + peek().text + "'");
    }
  }

  BoolExprPtr parse_bool() { return parse_or(); }

  BoolExprPtr parse_or() {
    BoolExprPtr lhs = parse_and();
    while (at(Tok::OrOr)) {
      Token op = next();
      lhs = bool_or(lhs, parse_and(), op.loc);
    }
    return lhs;
  }

  BoolExprPtr parse_and() {
    BoolExprPtr lhs = parse_bool_atom();
    while (at(Tok::AndAnd)) {
      Token op = next();
      lhs = bool_and(lhs, parse_bool_atom(), op.loc);
    }
    return lhs;
  }

  BoolExprPtr parse_comparison() {
    IntExprPtr lhs = parse_int();
    CmpOp op;
    switch (peek().kind) {
      case Tok::Lt: op = CmpOp::Lt; break;
      case Tok::Le: op = CmpOp::Le; break;
      case Tok::Gt: op = CmpOp::Gt; break;
      case Tok::Ge: op = CmpOp::Ge; break;
      case Tok::EqEq: op = CmpOp::Eq; break;
      case Tok::Ne: op = CmpOp::Ne; break;
      default:
        throw ParseError(peek().loc,
                         "expected comparison operator, got '" + peek().text + "'");
    }
    Token t = next();
    return bool_cmp(op, lhs, parse_int(), t.loc);
  }

  BoolExprPtr parse_bool_atom() {
    SourceLoc loc = peek().loc;
    switch (peek().kind) {
      case Tok::KwTrue:
        next();
        return bool_lit(true, loc);
      case Tok::KwFalse:
        next();
        return bool_lit(false, loc);
      case Tok::Bang:
        next();
        return bool_not(parse_bool_atom(), loc);
      case Tok::LParen: {
        // '(' may open a parenthesized boolean or the integer lhs of a
        // comparison; try the boolean reading first and fall back.
        std::size_t save = pos_;
        try {
          next();
          BoolExprPtr b = parse_bool();
          expect(Tok::RParen, "')'");
          return b;
        } catch (const ParseError&) {
          pos_ = save;
        }
        return parse_comparison();
      }
      default:
        return parse_comparison();
    }
  }
};

// ---- well-formedness --------------------------------------------------------

struct WfChecker {
  const Program& p;
  std::set<Ident> params, arrays, sizes, frames;
  std::set<Ident> all_iters;
  std::vector<Ident> active_iters;

  explicit WfChecker(const Program& prog) : p(prog) {
    for (const auto& q : p.params) {
      if (!params.insert(q).second)
        fail({}, "duplicate param " + q.name);
    }
    for (const auto& d : p.spec.arrays) {
      if (!arrays.insert(d.array).second)
        fail({}, "duplicate array " + d.array.name + " in layout");
      if (!sizes.insert(d.size).second)
        fail({}, "duplicate size variable " + d.size.name + " in layout");
    }
    for (const auto& f : p.spec.frames) {
      if (!frames.insert(f).second) fail({}, "duplicate frame " + f.name + " in layout");
    }
    check_disjoint(arrays, sizes, "array", "size variable");
    check_disjoint(arrays, frames, "array", "frame");
    check_disjoint(sizes, frames, "size variable", "frame");
    check_disjoint(params, arrays, "param", "array");
    check_disjoint(params, sizes, "param", "size variable");
    check_disjoint(params, frames, "param", "frame");
    for_each_cmd(p.body, [&](const CmdPtr& c) {
      if (const auto* f = std::get_if<Cmd::For>(&c->node)) all_iters.insert(f->iter);
    });
  }

  [[noreturn]] static void fail(SourceLoc loc, const std::string& msg) {
    throw ParseError(loc, msg);
  }

  static void check_disjoint(const std::set<Ident>& a, const std::set<Ident>& b,
                             const std::string& what_a, const std::string& what_b) {
    for (const auto& x : a)
      if (b.count(x)) fail({}, x.name + " declared as both " + what_a + " and " + what_b);
  }

  bool iter_active(const Ident& x) const {
    return std::count(active_iters.begin(), active_iters.end(), x) > 0;
  }

  void check_scalar_use(const Ident& x, SourceLoc loc) const {
    if (arrays.count(x)) fail(loc, "array " + x.name + " used as a scalar");
    if (frames.count(x)) fail(loc, "frame " + x.name + " used as a scalar");
    if (all_iters.count(x) && !iter_active(x))
      fail(loc, "loop iterator " + x.name + " used outside its loop");
  }

  void walk(const IntExpr& e) const {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, IntExpr::Var>) {
            check_scalar_use(x.name, e.loc);
          } else if constexpr (std::is_same_v<T, IntExpr::Read>) {
            if (!arrays.count(x.array))
              fail(e.loc, "access to undeclared array " + x.array.name);
            walk(*x.index);
          } else if constexpr (std::is_same_v<T, IntExpr::Bin>) {
            walk(*x.lhs);
            walk(*x.rhs);
          } else if constexpr (std::is_same_v<T, IntExpr::Param>) {
            if (!params.count(x.name))
              fail(e.loc, "undeclared param " + x.name.name);
          }
        },
        e.node);
  }

  void walk(const BoolExpr& e) const {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
            walk(*x.lhs);
            walk(*x.rhs);
          } else if constexpr (std::is_same_v<T, BoolExpr::And> ||
                               std::is_same_v<T, BoolExpr::Or>) {
            walk(*x.lhs);
            walk(*x.rhs);
          } else if constexpr (std::is_same_v<T, BoolExpr::Not>) {
            walk(*x.arg);
          }
        },
        e.node);
  }

  void check_assign_target(const Ident& x, SourceLoc loc) const {
    if (sizes.count(x)) fail(loc, "size variable " + x.name + " assigned");
    if (arrays.count(x)) fail(loc, "array " + x.name + " assigned as a scalar");
    if (frames.count(x)) fail(loc, "frame " + x.name + " assigned");
    if (params.count(x)) fail(loc, "param " + x.name + " assigned");
    if (all_iters.count(x)) fail(loc, "loop iterator " + x.name + " assigned");
  }

  void walk(const Cmd& c) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Cmd::Assign>) {
            check_assign_target(x.target, c.loc);
            walk(*x.value);
          } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
            if (!arrays.count(x.array))
              fail(c.loc, "write to undeclared array " + x.array.name);
            walk(*x.index);
            walk(*x.value);
          } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
            walk(*x.expr);
          } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
            for (const auto& k : x.cmds) walk(*k);
          } else if constexpr (std::is_same_v<T, Cmd::If>) {
            walk(*x.guard);
            walk(*x.then_branch);
            walk(*x.else_branch);
          } else if constexpr (std::is_same_v<T, Cmd::For>) {
            if (params.count(x.iter)) fail(c.loc, "param " + x.iter.name + " used as iterator");
            if (arrays.count(x.iter) || sizes.count(x.iter) || frames.count(x.iter))
              fail(c.loc, "layout identifier " + x.iter.name + " used as iterator");
            if (iter_active(x.iter))
              fail(c.loc, "iterator " + x.iter.name + " shadows an enclosing iterator");
            walk(*x.lower);
            walk(*x.upper);
            active_iters.push_back(x.iter);
            walk(*x.body);
            active_iters.pop_back();
          } else if constexpr (std::is_same_v<T, Cmd::While>) {
            walk(*x.guard);
            walk(*x.body);
          } else if constexpr (std::is_same_v<T, Cmd::Opaque>) {
            auto check_footprint = [&](const std::vector<Ident>& ids, const char* clause) {
              for (const auto& v : ids) {
                if (arrays.count(v) || sizes.count(v))
                  fail(c.loc, "opaque " + x.label.name + " lists " + v.name + " (" + clause +
                                  "), which belongs to the safety spec");
                if (frames.count(v))
                  fail(c.loc, "opaque " + x.label.name + " lists frame " + v.name + " in " +
                                  clause);
                if (params.count(v))
                  fail(c.loc, "opaque " + x.label.name + " lists param " + v.name + " in " +
                                  clause);
              }
            };
            check_footprint(x.reads, "reads");
            check_footprint(x.writes, "writes");
            for (const auto& w : x.writes)
              if (all_iters.count(w))
                fail(c.loc, "opaque " + x.label.name + " writes loop iterator " + w.name);
            for (const auto& r : x.reads)
              if (all_iters.count(r) && !iter_active(r))
                fail(c.loc, "opaque " + x.label.name + " reads iterator " + r.name +
                                " outside its loop");
            for (const auto& f : x.frames)
              if (!p.spec.has_frame(f))
                fail(c.loc, "opaque " + x.label.name + " frames undeclared region " + f.name);
          }
        },
        c.node);
  }
};

}  // namespace

bool is_reserved_word(const std::string& s) { return keyword_table().count(s) > 0; }

void check_well_formed(const Program& p) {
  for (const auto& d : p.spec.arrays) {
    if (d.array.name.empty() || d.size.name.empty())
      throw ParseError({}, "empty identifier in layout");
  }
  if (p.spec.arrays.empty()) throw ParseError({}, "layout declares no array region");
  if (!p.body) throw ParseError({}, "program has no body");
  WfChecker wf(p);
  wf.walk(*p.body);
}

Program parse(const std::string& source) {
  Parser parser(lex(source));
  Program p = parser.parse_program();
  check_well_formed(p);
  return p;
}

Program parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError({}, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace ctms
