#include <set>

#include "ctms/ast.hpp"
#include "ctms/params.hpp"
#include "ctms/parse.hpp"
#include "ctms/print.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace ctms;

TEST_CASE("smallest program parses") {
  Program p = parse("requires array(a, s); skip ensures array(a, s)");
  CHECK(is_skip(*p.body));
  REQUIRE(p.spec.arrays.size() == 1);
  CHECK(p.spec.arrays[0].array == Ident{"a"});
  CHECK(p.spec.arrays[0].size == Ident{"s"});
  CHECK(p.spec.frames.empty());
  CHECK(p.params.empty());
}

TEST_CASE("assigning the size variable is rejected") {
  CHECK_THROWS_WITH_AS(parse("requires array(a, s); s := 1 ensures array(a, s)"),
                       doctest::Contains("size variable s assigned"), ParseError);
}

TEST_CASE("fig2 has the expected shape") {
  Program p = test::load_corpus("fig2.ct");
  CHECK(p.params == std::vector<Ident>{{"B"}, {"L"}, {"R"}, {"Y"}});
  // body = if s > B then { for ...; a[Y] }
  const auto* top = std::get_if<Cmd::If>(&p.body->node);
  REQUIRE(top);
  CHECK(to_string(*top->guard) == "s > B");
  const auto* seq = std::get_if<Cmd::Seq>(&top->then_branch->node);
  REQUIRE(seq);
  REQUIRE(seq->cmds.size() == 2);
  const auto* loop = std::get_if<Cmd::For>(&seq->cmds[0]->node);
  REQUIRE(loop);
  CHECK(loop->iter == Ident{"i"});
  CHECK(to_string(*loop->lower) == "L");
  CHECK(to_string(*loop->upper) == "s - R");
  const auto* swap_if = std::get_if<Cmd::If>(&loop->body->node);
  REQUIRE(swap_if);
  CHECK(to_string(*swap_if->guard) == "a[i + 1] < a[i]");
  const auto* read = std::get_if<Cmd::ExprStmt>(&seq->cmds[1]->node);
  REQUIRE(read);
  CHECK(to_string(*read->expr) == "a[Y]");
}

TEST_CASE("corpus files round-trip through the pretty printer") {
  for (const char* name : {"fig1.ct", "fig2.ct", "fig1_two.ct", "negoffset.ct"}) {
    CAPTURE(name);
    Program p = test::load_corpus(name);
    std::string text = pretty_print(p);
    Program back = parse(text);
    CHECK(program_equal(p, back));
    // printing is a fixpoint
    CHECK(pretty_print(back) == text);
  }
}

TEST_CASE("sequencing prints flat regardless of construction order") {
  auto c1 = cmd_assign({"x"}, int_lit(1));
  auto c2 = cmd_assign({"y"}, int_lit(2));
  auto c3 = cmd_assign({"z"}, int_lit(3));
  auto left = cmd_seq({cmd_seq({c1, c2}), c3});
  auto right = cmd_seq({c1, cmd_seq({c2, c3})});
  CHECK(ast_equal(left, right));
  SafetySpec spec{{{{"a"}, {"s"}}}, {}};
  Program pl{left, spec, {}};
  Program pr{right, spec, {}};
  CHECK(pretty_print(pl) == pretty_print(pr));
}

TEST_CASE("pretty printer emits skip") {
  Program p = parse("requires array(a, s); skip ensures array(a, s)");
  CHECK(pretty_print(p).find("skip") != std::string::npos);
}

TEST_CASE("bind_params instantiates the running example") {
  Program fig2 = test::load_corpus("fig2.ct");
  Program bound = bind_params(fig2, {{{"B"}, 1}, {{"L"}, 0}, {{"R"}, 2}, {{"Y"}, 0}});
  CHECK(collect_params(*bound.body).empty());
  const auto* top = std::get_if<Cmd::If>(&bound.body->node);
  REQUIRE(top);
  CHECK(to_string(*top->guard) == "s > 1");
  const auto* seq = std::get_if<Cmd::Seq>(&top->then_branch->node);
  REQUIRE(seq);
  const auto* loop = std::get_if<Cmd::For>(&seq->cmds[0]->node);
  REQUIRE(loop);
  CHECK(to_string(*loop->lower) == "0");
  CHECK(to_string(*loop->upper) == "s - 2");
  CHECK(to_string(*std::get_if<Cmd::ExprStmt>(&seq->cmds[1]->node)->expr) == "a[0]");
}

TEST_CASE("bind_params rejects missing and bad bindings") {
  Program fig2 = test::load_corpus("fig2.ct");
  CHECK_THROWS_WITH_AS(bind_params(fig2, {{{"B"}, 1}, {{"L"}, 0}, {{"R"}, 2}}),
                       doctest::Contains("unbound param Y"), BindError);
  CHECK_THROWS_WITH_AS(
      bind_params(fig2, {{{"B"}, 1}, {{"L"}, 0}, {{"R"}, 2}, {{"Y"}, -1}}),
      doctest::Contains("negative"), BindError);
  CHECK_THROWS_WITH_AS(
      bind_params(fig2, {{{"B"}, 1}, {{"L"}, 0}, {{"R"}, 2}, {{"Y"}, 0}, {{"Q"}, 5}}),
      doctest::Contains("unknown param Q"), BindError);
}

TEST_CASE("bind_params on skip is the identity") {
  Program p = parse("param B;\nrequires array(a, s); skip ensures array(a, s)");
  Program bound = bind_params(p, {{{"B"}, 7}});
  CHECK(is_skip(*bound.body));
}

TEST_CASE("reserved words cannot be identifiers") {
  CHECK(is_reserved_word("while"));
  CHECK(!is_reserved_word("array"));  // contextual, usable as a name
  CHECK_THROWS_AS(parse("requires array(a, s); do := 1 ensures array(a, s)"), ParseError);
  CHECK_THROWS_AS(parse("param if;\nrequires array(a, s); skip ensures array(a, s)"),
                  ParseError);
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse("requires array(a, s);\n  x := ensures array(a, s)");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.loc.line == 2);
    CHECK(e.loc.col > 0);
  }
}

TEST_CASE("well-formedness violations are rejected") {
  auto bad = [](const std::string& src, const char* needle) {
    CAPTURE(src);
    CHECK_THROWS_WITH_AS(parse(src), doctest::Contains(needle), ParseError);
  };
  bad("param B;\nparam B;\nrequires array(a, s); skip ensures array(a, s)",
      "duplicate param");
  bad("requires array(a, s); a := 1 ensures array(a, s)", "array a assigned");
  bad("requires array(a, s); r := b[0] ensures array(a, s)", "undeclared array b");
  bad("requires array(a, s); opaque f writes(s) ensures array(a, s)",
      "belongs to the safety spec");
  bad("requires array(a, s); opaque f frames(F) ensures array(a, s)",
      "undeclared region F");
  bad("requires array(a, s); for i in [0 : s - 1] do { i := 0 } ensures array(a, s)",
      "iterator i assigned");
  bad("requires array(a, s); for i in [0 : s - 1] do { skip }; r := i "
      "ensures array(a, s)",
      "outside its loop");
  bad("requires array(a, s); for i in [0 : s - 1] do { for i in [0 : 1] do { skip } } "
      "ensures array(a, s)",
      "shadows");
  bad("requires array(a, s); skip ensures array(a, q)", "ensures clause differs");
  bad("requires array(a, s) * array(b, s); skip ensures array(a, s) * array(b, s)",
      "duplicate size");
  bad("param s;\nrequires array(a, s); skip ensures array(a, s)", "both param and size");
  bad("requires F; skip ensures F", "no array region");
}

TEST_CASE("iterator may be reused by sibling loops") {
  Program p = parse(
      "requires array(a, s);\n"
      "  for i in [0 : s - 1] do { r := a[i] };\n"
      "  for i in [0 : s - 1] do { q := a[i] }\n"
      "ensures array(a, s)");
  CHECK(node_count(*p.body) > 1);
}

TEST_CASE("parenthesized comparisons and booleans disambiguate") {
  Program p = parse(
      "requires array(a, s);\n"
      "  if (s - 1) > 0 && (s < 5 || s > 7) then { r := a[0] }\n"
      "ensures array(a, s)");
  const auto* top = std::get_if<Cmd::If>(&p.body->node);
  REQUIRE(top);
  CHECK(to_string(*top->guard) == "s - 1 > 0 && (s < 5 || s > 7)");
  Program back = parse(pretty_print(p));
  CHECK(program_equal(p, back));
}

TEST_CASE("subtraction prints with necessary parentheses only") {
  auto x = int_var({"x"});
  auto y = int_var({"y"});
  auto z = int_var({"z"});
  CHECK(to_string(*int_bin(IntBinOp::Sub, int_bin(IntBinOp::Sub, x, y), z)) == "x - y - z");
  CHECK(to_string(*int_bin(IntBinOp::Sub, x, int_bin(IntBinOp::Sub, y, z))) ==
        "x - (y - z)");
  CHECK(to_string(*int_bin(IntBinOp::Mul, int_bin(IntBinOp::Add, x, y), z)) ==
        "(x + y) * z");
  CHECK(to_string(*int_bin(IntBinOp::Add, x, int_bin(IntBinOp::Mul, y, z))) == "x + y * z");
}

TEST_CASE("negative literals parse and print") {
  Program p = parse(
      "requires array(a, s);\n  x := -3 + a[0] ensures array(a, s)");
  const auto* asn = std::get_if<Cmd::Assign>(&p.body->node);
  REQUIRE(asn);
  CHECK(to_string(*asn->value) == "-3 + a[0]");
  CHECK(program_equal(p, parse(pretty_print(p))));
}

TEST_CASE("line comments are ignored") {
  Program p = parse(
      "// header\nrequires array(a, s); // layout\n  skip // nothing\nensures array(a, s)");
  CHECK(is_skip(*p.body));
}

TEST_CASE("opaque clauses accept any order but print canonically") {
  Program p = parse(
      "requires array(a, s) * F;\n"
      "  opaque f frames(F) reads(x, y) writes(z);\n"
      "  z := z + 1;\n"
      "  r := a[0]\n"
      "ensures array(a, s) * F");
  std::string text = pretty_print(p);
  CHECK(text.find("opaque f reads(x, y) writes(z) frames(F)") != std::string::npos);
  CHECK(program_equal(p, parse(text)));
}
