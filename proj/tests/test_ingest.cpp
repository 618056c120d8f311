#include <catch2/catch_amalgamated.hpp>

#include "fixtures_common.hpp"
#include "mbp/ingest.hpp"
#include "mbp/layer.hpp"

using namespace mbp;
using R = Rat;

TEST_CASE("monomial quiver tables") {
  // one vertex, loop a, relation a^2: basis {a, e}
  QuiverSpec q1;
  q1.vertices = {"1"};
  q1.arrows.push_back({"a", 0, 0});
  q1.relations = {{0, 0}};
  auto t1 = table_from_monomial_quiver<R>(q1);
  CHECK(t1.basis == std::vector<std::string>{"a", "e_1"});
  CHECK(t1.product(0, 0).empty());  // a*a = 0

  // A2 quiver 1 -> 2, no relations: basis {alpha, e_1, e_2}
  QuiverSpec q2;
  q2.vertices = {"1", "2"};
  q2.arrows.push_back({"alpha", 0, 1});
  auto t2 = table_from_monomial_quiver<R>(q2);
  CHECK(t2.basis == std::vector<std::string>{"alpha", "e_1", "e_2"});
  CHECK(t2.num_idempotents == 2);

  // one vertex, loops a,b, relations {a^2, ab, ba, b^3}: basis {b^2, a, b, e}
  QuiverSpec q3;
  q3.vertices = {"1"};
  q3.arrows.push_back({"a", 0, 0});
  q3.arrows.push_back({"b", 0, 0});
  q3.relations = {{0, 0}, {0, 1}, {1, 0}, {1, 1, 1}};
  auto t3 = table_from_monomial_quiver<R>(q3);
  CHECK(t3.basis == std::vector<std::string>{"bb", "a", "b", "e_1"});

  // a loop with no relations is infinite-dimensional
  QuiverSpec q4;
  q4.vertices = {"1"};
  q4.arrows.push_back({"a", 0, 0});
  CHECK_THROWS_AS(table_from_monomial_quiver<R>(q4), InfiniteDimensional);

  // a 2-cycle with no relations as well
  QuiverSpec q5;
  q5.vertices = {"1", "2"};
  q5.arrows.push_back({"f", 0, 1});
  q5.arrows.push_back({"g", 1, 0});
  CHECK_THROWS_AS(table_from_monomial_quiver<R>(q5), InfiniteDimensional);
}

TEST_CASE("table validation") {
  auto tab = fixtures::example_145_table<R>();
  CHECK_NOTHROW(validate_table(tab));
  // breaking associativity is caught: set b*b = a instead of c
  auto bad = tab;
  bad.mul[{2, 2}] = {{3, R(1)}};
  CHECK_THROWS_AS(validate_table(bad), InvalidTable);
}

TEST_CASE("bipartite problem from Example 1.4.5") {
  auto tab = fixtures::example_145_table<R>();
  auto prob = bipartite_problem(tab);
  CHECK(prob.t == 10);
  CHECK(prob.num_classes() == 2);
  CHECK(prob.M1.size() == 4);
  CHECK(prob.K1.size() == 8);
  CHECK(prob.H.empty());
  CHECK(prob.solid_names == std::vector<std::string>{"a", "b", "c", "d"});
  // column-side copies come first in the order
  CHECK(prob.dotted_names ==
        std::vector<std::string>{"v_a", "v_b", "v_c", "v_d", "u_a", "u_b", "u_c", "u_d"});
  CHECK_NOTHROW(validate(prob));
  CHECK(rdcc_check(prob));

  // dim K0 + K1 span = 2 dim Lambda; M1 span = dim J
  CHECK(prob.K1.size() + prob.num_classes() == 2 * tab.size());
  CHECK(static_cast<int>(prob.M1.size()) == tab.num_radical());
}

TEST_CASE("semisimple and k[t]/(t^2) cases") {
  // semisimple k: basis {e} only
  AlgebraTable<R> k;
  k.basis = {"e"};
  k.num_idempotents = 1;
  k.st = {{0, 0}};
  k.mul[{0, 0}] = {{0, R(1)}};
  auto pk = bipartite_problem(k);
  CHECK(pk.M1.empty());
  CHECK(pk.K1.empty());
  CHECK(pk.t == 2);

  // k[t]/(t^2): one M1 base and two K1 bases (one per side)
  QuiverSpec q;
  q.vertices = {"1"};
  q.arrows.push_back({"t", 0, 0});
  q.relations = {{0, 0}};
  auto tt = table_from_monomial_quiver<R>(q);
  auto pt = bipartite_problem(tt);
  CHECK(pt.M1.size() == 1);
  CHECK(pt.K1.size() == 2);
  CHECK(rdcc_check(pt));
}

TEST_CASE("rdcc violations") {
  // two M1 bases sharing a leading row
  ProblemSpec<R> p;
  p.t = 4;
  p.classes.resize(3);
  p.classes[0].strips = {0};
  p.classes[1].strips = {1, 2};
  p.classes[2].strips = {3};
  p.class_of = {0, 1, 1, 2};
  BaseMatrix<R> a1, a2;
  a1.src = 0;
  a1.tgt = 1;
  a1.entries[Pos{0, 2}] = BiPoly<R>::one();
  a2.src = 0;
  a2.tgt = 2;
  a2.entries[Pos{0, 3}] = BiPoly<R>::one();
  p.M1 = {a1, a2};
  p.default_names();
  validate(p);
  CHECK_FALSE(rdcc_check(p));  // shared leading row 0

  // leading in a non-main column of its class
  ProblemSpec<R> p2;
  p2.t = 3;
  p2.classes.resize(2);
  p2.classes[0].strips = {0};
  p2.classes[1].strips = {1, 2};
  p2.class_of = {0, 1, 1};
  BaseMatrix<R> b;
  b.src = 0;
  b.tgt = 1;
  b.entries[Pos{0, 1}] = BiPoly<R>::one();  // main column of class 1 is strip 2
  p2.M1 = {b};
  p2.default_names();
  validate(p2);
  CHECK_FALSE(rdcc_check(p2));

  // H nonzero is not bipartite
  auto p3 = fixtures::similarity_problem<R>();
  p3.H[Pos{0, 0}] = UniPoly<R>::constant(R(1));
  CHECK_THROWS_AS(rdcc_check(p3), NotBipartite);
}

TEST_CASE("round trip: differentials of the produced problem match the paper") {
  auto prob = bipartite_problem(fixtures::example_145_table<R>());
  auto L = build_layer(prob);
  // delta(a) = delta(b) = 0; delta(c) and delta(d) have 2 and 4 terms
  CHECK(L.delta_solid[0].is_zero());
  CHECK(L.delta_solid[1].is_zero());
  CHECK(L.delta_solid[2].terms.size() == 2);
  CHECK(L.delta_solid[3].terms.size() == 4);
}
