#include <catch2/catch_amalgamated.hpp>

#include "fixtures_common.hpp"
#include "mbp/canonical.hpp"
#include "mbp/ingest.hpp"

#include <random>

using namespace mbp;
using R = Rat;
using BP = BiPoly<R>;
using TS = TermSum<R>;

namespace {

int solid_idx(const ProblemSpec<R>& p, const std::string& name) {
  for (size_t i = 0; i < p.M1.size(); ++i)
    if (p.solid_name(i) == name) return static_cast<int>(i);
  FAIL("no solid named " + name);
  return -1;
}
int dotted_idx(const ProblemSpec<R>& p, const std::string& name) {
  for (size_t j = 0; j < p.K1.size(); ++j)
    if (p.dotted_name(j) == name) return static_cast<int>(j);
  FAIL("no dotted named " + name);
  return -1;
}

Matrix<R> jordan_block(size_t n, R lambda) {
  Matrix<R> j(n, n);
  for (size_t i = 0; i < n; ++i) {
    j(i, i) = lambda;
    if (i + 1 < n) j(i, i + 1) = R(1);
  }
  return j;
}

} // namespace

TEST_CASE("Example 2.4.5 replay") {
  auto prob = bipartite_problem(fixtures::example_145_table<R>());

  // (i) edge reduction a -> (1_Z): case 2 merges the two classes
  ReductionStep<R> e;
  e.kind = StepKind::Edge;
  e.edge_case = 2;
  auto p1 = apply_reduction(prob, e);
  CHECK(p1.t == 10);
  CHECK(p1.num_classes() == 1);
  CHECK(p1.M1.size() == 3);
  CHECK(p1.solid_names == std::vector<std::string>{"b", "c", "d"});
  // H^1 = (1_Z) * A: ones exactly at the entries of A
  CHECK(p1.H.size() == 2);
  CHECK(!p1.h_at(0, 7).is_zero());
  CHECK(!p1.h_at(3, 9).is_zero());
  CHECK(solid_differential(p1, solid_idx(p1, "b")).is_zero());

  // (ii) loop reduction b -> J_2(0): mutation followed by unraveling
  ReductionStep<R> mu;
  mu.kind = StepKind::LoopMutation;
  auto p1m = apply_reduction(p1, mu);
  CHECK(p1m.classes[0].parametric);
  CHECK(p1m.h_at(0, 8) == UniPoly<R>::variable(Var::X));

  ReductionStep<R> un;
  un.kind = StepKind::UnravelingLoop;
  un.weyr.blocks.push_back({R(0), {1, 1}});
  un.keep_z0 = false;
  auto p2 = apply_reduction(p1m, un);
  CHECK(p2.t == 20);
  CHECK(p2.num_classes() == 1);
  CHECK_FALSE(p2.classes[0].parametric);
  // H^2 = I_2 * A + J_2(0)-Weyr * B
  CHECK(!p2.h_at(0, 14).is_zero());  // A block identity
  CHECK(!p2.h_at(1, 15).is_zero());
  CHECK(!p2.h_at(0, 17).is_zero());  // B block nilpotent
  CHECK(p2.h_at(1, 16).is_zero());
  // the fresh dotted arrow w1 = (0 1; 0 0) * E on every strip
  int w1 = dotted_idx(p2, "w1");
  CHECK(p2.K1[w1].at(0, 1).is_one());
  CHECK(p2.K1[w1].at(18, 19).is_one());
  // its dotted differential vanishes (V^2 = 0)
  CHECK(dotted_differential(p2, w1).empty());
  // solids split with positional names; the first arrow is c_2_1
  CHECK(p2.solid_name(0) == "c_2_1");
  CHECK(solid_differential(p2, 0).is_zero());

  // (iii) loop mutation c_2_1 -> (x), then three regularizations
  auto p2m = apply_reduction(p2, mu);
  CHECK(p2m.classes[0].parametric);
  CHECK(p2m.h_at(3, 18) == UniPoly<R>::variable(Var::X));

  CHECK(p2m.solid_name(0) == "c_2_2");
  RegularizationInfo<R> info1;
  auto p3a = regularize(p2m, &info1);
  CHECK(info1.eliminated_name == "u_b_2_1");
  CHECK(info1.relation == "u_b_2_1 = (x)w1");

  CHECK(p3a.solid_name(0) == "c_1_1");
  RegularizationInfo<R> info2;
  auto p3b = regularize(p3a, &info2);
  CHECK(info2.eliminated_name == "v_b_2_1");
  CHECK(info2.relation == "v_b_2_1 = (y)w1");

  CHECK(p3b.solid_name(0) == "c_1_2");
  RegularizationInfo<R> info3;
  auto p3 = regularize(p3b, &info3);
  CHECK(info3.eliminated_name == "v_b_2_2");
  CHECK(info3.relation == "v_b_2_2 = u_b_1_1");

  // differentials of B^3 (with v_b_2_2 expressed through u_b_1_1):
  // delta(d_2_1) = x w1 - w1 x
  int w1i = dotted_idx(p3, "w1");
  {
    TS expect;
    expect.add(Term<R>::V, BP::variable(Var::X) - BP::variable(Var::Y), w1i);
    CHECK(solid_differential(p3, solid_idx(p3, "d_2_1")) == expect);
  }
  // delta(d_2_2) = u_a_2_1 + u_b_2_2 - u_b_1_1 - d_2_1 w1
  {
    TS expect;
    expect.add(Term<R>::V, BP::one(), dotted_idx(p3, "u_a_2_1"));
    expect.add(Term<R>::V, BP::one(), dotted_idx(p3, "u_b_2_2"));
    expect.add(Term<R>::V, -BP::one(), dotted_idx(p3, "u_b_1_1"));
    expect.add(Term<R>::AV, -BP::one(), solid_idx(p3, "d_2_1"), w1i);
    CHECK(solid_differential(p3, solid_idx(p3, "d_2_2")) == expect);
  }
  // delta(d_1_1) = u_b_1_1 - v_b_1_1 - v_a_2_1 + w1 d_2_1
  {
    TS expect;
    expect.add(Term<R>::V, BP::one(), dotted_idx(p3, "u_b_1_1"));
    expect.add(Term<R>::V, -BP::one(), dotted_idx(p3, "v_b_1_1"));
    expect.add(Term<R>::V, -BP::one(), dotted_idx(p3, "v_a_2_1"));
    expect.add(Term<R>::VA, BP::one(), w1i, solid_idx(p3, "d_2_1"));
    CHECK(solid_differential(p3, solid_idx(p3, "d_1_1")) == expect);
  }
  // delta(d_1_2) = u_a_1_1 + u_b_1_2 - v_b_1_2 - v_a_2_2 - d_1_1 w1 + w1 d_2_2
  {
    TS expect;
    expect.add(Term<R>::V, BP::one(), dotted_idx(p3, "u_a_1_1"));
    expect.add(Term<R>::V, BP::one(), dotted_idx(p3, "u_b_1_2"));
    expect.add(Term<R>::V, -BP::one(), dotted_idx(p3, "v_b_1_2"));
    expect.add(Term<R>::V, -BP::one(), dotted_idx(p3, "v_a_2_2"));
    expect.add(Term<R>::AV, -BP::one(), solid_idx(p3, "d_1_1"), w1i);
    expect.add(Term<R>::VA, BP::one(), w1i, solid_idx(p3, "d_2_2"));
    CHECK(solid_differential(p3, solid_idx(p3, "d_1_2")) == expect);
  }
}

TEST_CASE("deletion and localization steps") {
  auto prob = bipartite_problem(fixtures::example_145_table<R>());
  ReductionStep<R> del;
  del.kind = StepKind::Deletion;
  del.delete_classes = {1};
  auto pd = apply_reduction(prob, del);
  CHECK(pd.t == 5);
  CHECK(pd.M1.empty());      // all M1 bases touched the deleted side
  CHECK(pd.K1.size() == 4);  // the row-side copies survive

  ProblemSpec<R> pp;
  pp.t = 1;
  pp.classes.resize(1);
  pp.classes[0].strips = {0};
  pp.classes[0].parametric = true;
  pp.class_of = {0};
  ReductionStep<R> loc;
  loc.kind = StepKind::Localization;
  loc.cls = 0;
  loc.localize = UniPoly<R>(Var::X, {R(-1), R(1)});
  auto pl = apply_reduction(pp, loc);
  REQUIRE(pl.classes[0].phi_factors.size() == 1);
  CHECK(pl.classes[0].phi().eval(R(1)).is_zero());
}

TEST_CASE("to_zero and to_identity steps") {
  auto prob = fixtures::equivalence_problem<R>();
  ReductionStep<R> z;
  z.kind = StepKind::ToZero226;
  auto pz = apply_reduction(prob, z);
  CHECK(pz.M1.empty());
  CHECK(pz.t == 2);

  ReductionStep<R> id;
  id.kind = StepKind::ToIdentity227;
  auto pi = apply_reduction(prob, id);
  CHECK(pi.num_classes() == 1);
  CHECK(pi.t == 2);
  CHECK(!pi.h_at(0, 1).is_zero());  // H' = 1 * A_1
}

TEST_CASE("canonical anchor: one matrix under equivalence") {
  auto prob = fixtures::equivalence_problem<R>();
  std::mt19937_64 rng(71);
  for (int iter = 0; iter < 20; ++iter) {
    Representation<R> rep;
    int mr = 1 + rng() % 4, mc = 1 + rng() % 4;
    rep.sizes = {mr, mc};
    Matrix<R> A(mr, mc);
    for (int i = 0; i < mr; ++i)
      for (int j = 0; j < mc; ++j) A(i, j) = R(static_cast<long>(rng() % 5) - 2);
    rep.arrows.push_back(A);
    auto [cf, trace] = canonical_form(prob, rep);
    size_t r = rank(A);
    Matrix<R> expect(mr + mc, mr + mc);
    for (size_t k = 0; k < r; ++k) expect(k, mr + mc - r + k) = R(1);
    CHECK(cf.matrix == expect);
    CHECK(cf.links == r);
  }
}

TEST_CASE("canonical anchor: one matrix under similarity") {
  auto prob = fixtures::similarity_problem<R>();
  std::mt19937_64 rng(73);
  for (int iter = 0; iter < 20; ++iter) {
    size_t n = 1 + rng() % 5;
    std::vector<Matrix<R>> blocks;
    size_t left = n;
    while (left > 0) {
      size_t sz = 1 + rng() % left;
      blocks.push_back(jordan_block(sz, R(static_cast<long>(rng() % 3) - 1)));
      left -= sz;
    }
    Matrix<R> J(n, n);
    size_t off = 0;
    for (auto& b : blocks) {
      J.set_block(off, off, b);
      off += b.rows();
    }
    Matrix<R> g;
    while (true) {
      Matrix<R> cand(n, n);
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) cand(i, j) = R(static_cast<long>(rng() % 5) - 2);
      if (try_inverse(cand)) {
        g = cand;
        break;
      }
    }
    Matrix<R> A = inverse(g) * J * g;
    Representation<R> rep;
    rep.sizes = {static_cast<int>(n)};
    rep.arrows.push_back(A);
    auto [cf, trace] = canonical_form(prob, rep);
    auto [w, f] = weyr_of(A);
    CHECK(cf.matrix == w.assembled());
    CHECK(cf.links == w.link_count());
  }
}

TEST_CASE("canonical form: zero representation") {
  auto prob = fixtures::equivalence_problem<R>();
  Representation<R> rep;
  rep.sizes = {2, 3};
  rep.arrows.push_back(Matrix<R>(2, 3));
  auto [cf, trace] = canonical_form(prob, rep);
  CHECK(cf.matrix.is_zero());
  CHECK(cf.links == 0);
}

TEST_CASE("idempotence on a minimal problem") {
  ProblemSpec<R> p;
  p.t = 2;
  p.classes.resize(2);
  p.classes[0].strips = {0};
  p.classes[1].strips = {1};
  p.class_of = {0, 1};
  p.H[Pos{0, 0}] = UniPoly<R>::constant(R(1));
  Representation<R> rep;
  rep.sizes = {2, 1};
  auto [cf, trace] = canonical_form(p, rep);
  CHECK(cf.matrix == assemble_h(p, rep.sizes));
  CHECK(trace.steps.empty());
}

TEST_CASE("invariance under admissible conjugation") {
  std::mt19937_64 rng(79);
  auto prob = bipartite_problem(fixtures::example_145_table<R>());
  for (int iter = 0; iter < 10; ++iter) {
    auto rep = fixtures::random_representation(prob, rng, 2, 3);
    auto [cf, tr] = canonical_form(prob, rep);
    auto g = fixtures::random_admissible(prob, rep, rng);
    auto conj = conjugate_representation(prob, rep, g);
    auto [cf2, tr2] = canonical_form(prob, conj);
    CHECK(cf.matrix == cf2.matrix);
    CHECK(cf.links == cf2.links);
  }
}

TEST_CASE("trace uniqueness and determinism") {
  std::mt19937_64 rng(83);
  auto prob = bipartite_problem(fixtures::example_145_table<R>());
  auto rep = fixtures::random_representation(prob, rng, 2, 3);
  auto [c1, t1] = canonical_form(prob, rep);
  auto [c2, t2] = canonical_form(prob, rep);
  CHECK(c1.matrix == c2.matrix);
  REQUIRE(t1.steps.size() == t2.steps.size());
  for (size_t i = 0; i < t1.steps.size(); ++i) {
    CHECK(t1.steps[i].kind == t2.steps[i].kind);
    CHECK(t1.steps[i].arrow == t2.steps[i].arrow);
    CHECK(t1.steps[i].G == t2.steps[i].G);
    CHECK(t1.steps[i].sizes_after == t2.steps[i].sizes_after);
  }
}

TEST_CASE("iso and indecomposable examples") {
  auto sim = fixtures::similarity_problem<R>();
  Representation<R> j3;
  j3.sizes = {3};
  j3.arrows.push_back(jordan_block(3, R(0)));
  CHECK(indecomposable(sim, j3));
  Representation<R> d12;
  d12.sizes = {2};
  Matrix<R> d{{R(1), R(0)}, {R(0), R(2)}};
  d12.arrows.push_back(d);
  CHECK_FALSE(indecomposable(sim, d12));

  auto eq = fixtures::equivalence_problem<R>();
  Representation<R> one;
  one.sizes = {1, 1};
  Matrix<R> m1(1, 1);
  m1(0, 0) = R(1);
  one.arrows.push_back(m1);
  CHECK(indecomposable(eq, one));

  Representation<R> p;
  p.sizes = {2, 2};
  Matrix<R> pm{{R(1), R(0)}, {R(0), R(0)}};
  p.arrows = {pm};
  CHECK(iso(eq, p, p));
  Representation<R> q = p;
  q.arrows[0] = Matrix<R>{{R(0), R(1)}, {R(0), R(0)}};
  CHECK(iso(eq, p, q));  // same rank
  Representation<R> z = p;
  z.arrows[0] = Matrix<R>(2, 2);
  CHECK_FALSE(iso(eq, p, z));  // rank 1 vs 0
}

TEST_CASE("defining system matches Corollary 2.4.2 along a run") {
  auto prob = bipartite_problem(fixtures::example_145_table<R>());
  Representation<R> rep;
  rep.sizes.assign(10, 1);
  for (size_t i = 0; i < prob.M1.size(); ++i) {
    Matrix<R> one(1, 1);
    one(0, 0) = R(1);
    rep.arrows.push_back(one);
  }
  std::vector<std::pair<std::string, bool>> decisions;
  DriverObserver<R> obs;
  obs.on_arrow = [&](const ProblemSpec<R>& cur, const Representation<R>& r,
                     DefiningSystem<R>& ds, const Rect& frontier, bool delta_zero) {
    CHECK(ds.group_dependent(frontier) == delta_zero);
    decisions.push_back({cur.solid_name(0), delta_zero});
    int expect_dim = 0;
    for (auto& cl : cur.classes) {
      int m = cl.strips.empty() ? 0 : r.sizes[cl.strips[0]];
      expect_dim += m * m;
    }
    for (auto& V : cur.K1) {
      int mr = r.sizes[cur.classes[V.src].strips[0]];
      int mc = r.sizes[cur.classes[V.tgt].strips[0]];
      expect_dim += mr * mc;
    }
    CHECK(ds.num_vars - ds.rank() == expect_dim);
    auto dense = ds.dense_equations();
    CHECK(static_cast<int>(rank(dense)) == ds.rank());
  };
  auto [cf, trace] = canonical_form(prob, rep, &obs);
  REQUIRE(!decisions.empty());
  CHECK(decisions[0] == std::pair<std::string, bool>{"a", true});
  bool c_false = false;
  for (auto& [n, z] : decisions)
    if (n.rfind("c", 0) == 0 && !z) c_false = true;
  CHECK(c_false);
}

TEST_CASE("canonical form of Example 1.4.5 all-ones representation") {
  auto prob = bipartite_problem(fixtures::example_145_table<R>());
  Representation<R> rep;
  rep.sizes.assign(10, 1);
  for (size_t i = 0; i < prob.M1.size(); ++i) {
    Matrix<R> one(1, 1);
    one(0, 0) = R(1);
    rep.arrows.push_back(one);
  }
  auto [cf, trace] = canonical_form(prob, rep);
  auto [cf2, trace2] = canonical_form(prob, rep);
  CHECK(cf.matrix == cf2.matrix);
  std::mt19937_64 rng(97);
  auto g = fixtures::random_admissible(prob, rep, rng);
  auto conj = conjugate_representation(prob, rep, g);
  auto [cf3, trace3] = canonical_form(prob, conj);
  CHECK(cf.matrix == cf3.matrix);
}
