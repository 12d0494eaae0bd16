#include <set>
#include <string>

#include "ctms/params.hpp"
#include "ctms/parse.hpp"
#include "ctms/print.hpp"
#include "ctms/semantics.hpp"
#include "ctms/slice.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace ctms;
using ctms::test::load_corpus;

namespace {

SliceTargets t(const std::string& array, const std::string& size) {
  return SliceTargets{Ident{array}, Ident{size}};
}

Program bind4(Program p, Int B, Int L, Int R, Int Y) {
  ParamBinding b{{Ident{"B"}, B}, {Ident{"L"}, L}, {Ident{"R"}, R}, {Ident{"Y"}, Y}};
  return bind_params(p, b);
}

}  // namespace

TEST_CASE("slice: the sorting example reduces to its published residue") {
  auto fig1 = load_corpus("fig1.ct");
  auto fig2 = load_corpus("fig2.ct");
  auto reduced = reduce_program(fig1, t("a", "s"));
  CAPTURE(pretty_print(reduced));
  CHECK(program_equal(reduced, fig2));
}

TEST_CASE("slice: reduction is idempotent and non-growing on the corpus") {
  for (const char* name : {"fig1.ct", "fig2.ct", "fig1_two.ct", "negoffset.ct"}) {
    CAPTURE(name);
    auto p = load_corpus(name);
    for (const auto& decl : p.spec.arrays) {
      CAPTURE(decl.array.name);
      SliceTargets tg{decl.array, decl.size};
      auto r1 = reduce_program(p, tg);
      auto r2 = reduce_program(r1, tg);
      CHECK(program_equal(r1, r2));
      CHECK(node_count(*r1.body) <= node_count(*p.body));
    }
  }
}

TEST_CASE("slice: statements feeding an index survive") {
  auto p = parse(
      "requires array(a, s);\n"
      "x := 1;\n"
      "a[x] := 0\n"
      "ensures array(a, s)");
  auto r = reduce_program(p, t("a", "s"));
  CHECK(program_equal(r, p));
}

TEST_CASE("slice: loop-carried indices block while collapse") {
  auto p = parse(
      "requires array(a, s);\n"
      "x := 0;\n"
      "while x < 3 do { a[x] := 0; x := x + 1 }\n"
      "ensures array(a, s)");
  auto r = reduce_program(p, t("a", "s"));
  CHECK(program_equal(r, p));
}

TEST_CASE("slice: an empty-bodied while disappears") {
  auto p = parse(
      "requires array(a, s) * F;\n"
      "opaque f writes(b) frames(F);\n"
      "while b > 0 do { skip }\n"
      "ensures array(a, s) * F");
  // Collapse alone turns the loop into its body (skip); the full reduction
  // also discards the opaque that fed the dead guard.
  auto collapsed = collapse_data_independent_loops(p.body, t("a", "s"));
  bool hasWhile = false;
  for_each_cmd(collapsed, [&](const CmdPtr& c) {
    if (std::holds_alternative<Cmd::While>(c->node)) hasWhile = true;
  });
  CHECK(!hasWhile);
  auto r = reduce_program(p, t("a", "s"));
  CHECK(is_skip(*r.body));
  CHECK(r.spec.frames.empty());
}

TEST_CASE("slice: programs of only framed opaque blocks vanish") {
  auto p = parse(
      "requires array(a, s) * F * G;\n"
      "opaque f frames(F);\n"
      "opaque g frames(F, G)\n"
      "ensures array(a, s) * F * G");
  auto r = reduce_program(p, t("a", "s"));
  CHECK(is_skip(*r.body));
  CHECK(r.spec.arrays.size() == 1);
  CHECK(r.spec.frames.empty());
}

TEST_CASE("slice: dead assignment targets drop but their reads remain") {
  auto p = load_corpus("negoffset.ct");
  auto r = reduce_program(p, t("c", "m"));
  auto expect = parse(
      "param M;\n"
      "requires array(c, m);\n"
      "if m > M then { c[3] };\n"
      "for i in [2 : m - 1] do { c[i - 2] := c[i] + 1 }\n"
      "ensures array(c, m)");
  CAPTURE(pretty_print(r));
  CHECK(program_equal(r, expect));
}

TEST_CASE("slice: unrelated arrays and their loops are pruned per target") {
  auto two = load_corpus("fig1_two.ct");

  // With respect to (a, s) the summation over l disappears entirely and the
  // layout loses both l and F: the result is exactly the fig2 program.
  auto ra = reduce_program(two, t("a", "s"));
  CAPTURE(pretty_print(ra));
  CHECK(program_equal(ra, load_corpus("fig2.ct")));

  // With respect to (l, n) only the summation survives, including the
  // accumulator initialisation its reads rely on.
  auto rl = reduce_program(two, t("l", "n"));
  auto expect = parse(
      "param B;\nparam L;\nparam R;\nparam Y;\n"
      "requires array(l, n);\n"
      "acc := 0;\n"
      "for j in [0 : n - 1] do { acc := acc + l[j] }\n"
      "ensures array(l, n)");
  CAPTURE(pretty_print(rl));
  CHECK(program_equal(rl, expect));
}

TEST_CASE("slice: target misuse is rejected") {
  auto p = load_corpus("fig2.ct");
  CHECK_THROWS_AS(reduce_program(p, t("b", "s")), std::invalid_argument);
  CHECK_THROWS_AS(reduce_program(p, t("a", "n")), std::invalid_argument);
}

TEST_CASE("slice: skip stays skip") {
  auto p = parse("requires array(a, s);\nskip\nensures array(a, s)");
  auto r = reduce_program(p, t("a", "s"));
  CHECK(is_skip(*r.body));
}

TEST_CASE("slice: fault behaviour is preserved size by size") {
  struct Scenario {
    std::string label;
    Program bound;
    std::string array, size;
  };
  std::vector<Scenario> scenarios;
  scenarios.push_back({"fig1 safe", bind4(load_corpus("fig1.ct"), 1, 0, 2, 0), "a", "s"});
  scenarios.push_back({"fig1 buggy", bind4(load_corpus("fig1.ct"), 1, 0, 2, 5), "a", "s"});
  scenarios.push_back(
      {"negoffset tight",
       bind_params(load_corpus("negoffset.ct"), ParamBinding{{Ident{"M"}, 3}}), "c", "m"});
  scenarios.push_back(
      {"negoffset loose",
       bind_params(load_corpus("negoffset.ct"), ParamBinding{{Ident{"M"}, 1}}), "c", "m"});

  for (auto& sc : scenarios) {
    CAPTURE(sc.label);
    auto reduced = reduce_program(sc.bound, t(sc.array, sc.size));
    for (Int s = 0; s <= 8; ++s) {
      CAPTURE(s);
      std::map<Ident, Int> szs{{Ident{sc.size}, s}};
      auto orig = check_size_exhaustive(sc.bound.body, sc.bound.spec, szs);
      auto red = check_size_exhaustive(reduced.body, reduced.spec, szs);
      CHECK(orig.kind == red.kind);
      if (orig.is_bug()) {
        REQUIRE(red.is_bug());
        CHECK(orig.trace->fault->array == red.trace->fault->array);
      }
    }
  }

  // Two-array program, sliced per target with the other size pinned: the
  // reduced program must fault exactly when the original faults on the
  // target (the summation side of fig1_two is total, so any fault is on a).
  auto two = bind4(load_corpus("fig1_two.ct"), 1, 0, 2, 5);
  auto ra = reduce_program(two, t("a", "s"));
  for (Int s = 0; s <= 8; ++s) {
    CAPTURE(s);
    auto orig = check_size_exhaustive(two.body, two.spec,
                                      {{Ident{"s"}, s}, {Ident{"n"}, 2}});
    auto red = check_size_exhaustive(ra.body, ra.spec, {{Ident{"s"}, s}});
    CHECK(orig.kind == red.kind);
  }
}
