#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rw/weights.hh"

using namespace rw;
using namespace rw::weights;
using graphs::FeynmanGraph;
using graphs::VertexKind;

namespace {

FeynmanGraph loop_graph() {
  FeynmanGraph g;
  g.vertices = {{"v", VertexKind::bulk_black}};
  g.edges = {{"v", "v"}};
  return g;
}

FeynmanGraph dumbbell_graph() {
  FeynmanGraph g;
  g.vertices = {{"a", VertexKind::bulk_black}, {"b", VertexKind::bulk_black}};
  g.edges = {{"a", "a"}, {"a", "b"}, {"b", "b"}};
  return g;
}

FeynmanGraph theta_graph(bool swapped = false) {
  FeynmanGraph g;
  if (swapped)
    g.vertices = {{"v1", VertexKind::bulk_black}, {"v0", VertexKind::bulk_black}};
  else
    g.vertices = {{"v0", VertexKind::bulk_black}, {"v1", VertexKind::bulk_black}};
  g.edges = {{"v0", "v1"}, {"v0", "v1"}, {"v0", "v1"}};
  return g;
}

}  // namespace

TEST_CASE("lowered curvature: symmetry and pairing trace per geometry mode") {
  auto flat = make_geometry<ratc>(2, 3, 5, GeoMode::flat);
  auto f = as_symmetry_check(flat);
  CHECK(f.symmetry_violation == 0.0);
  CHECK(f.trace_violation == 0.0);

  for (std::uint64_t seed : {11, 12, 13}) {
    auto g = make_geometry<ratc>(2, 3, seed, GeoMode::compatible);
    auto rep = as_symmetry_check(g);
    CHECK(rep.symmetry_violation == 0.0);
    CHECK(rep.trace_violation == 0.0);
    CHECK(rep.pass(0.0));
  }
  auto gf = make_geometry<complexd>(2, 3, 11, GeoMode::compatible);
  auto repf = as_symmetry_check(gf);
  CHECK(repf.symmetry_violation < 1e-12);
  CHECK(repf.trace_violation < 1e-12);

  // incompatible jets: the report carries the violation magnitude
  auto bad = make_geometry<complexd>(2, 3, 11, GeoMode::generic);
  CHECK(as_symmetry_check(bad).symmetry_violation > 1e-3);
}

TEST_CASE("tadpole contractions vanish identically") {
  for (std::uint64_t seed : {31, 32, 33}) {
    auto g = make_geometry<ratc>(2, 3, seed, GeoMode::compatible);
    for (const FeynmanGraph& fg : {loop_graph(), dumbbell_graph()}) {
      auto w = contract_graph(fg, g);
      for (const ratc& c : w.comp) CHECK(scalar<ratc>::is_zero(c, 0.0));
      CHECK(w.max_abs() == 0.0);
    }
    // embedded loop: trivalent vertex with a self-loop plus one real edge
    FeynmanGraph e;
    e.vertices = {{"a", VertexKind::bulk_black}, {"b", VertexKind::bulk_black}};
    e.edges = {{"a", "a"}, {"a", "b"}};
    CHECK(contract_graph(e, g).max_abs() == 0.0);
  }
  auto gf = make_geometry<complexd>(2, 3, 31, GeoMode::compatible);
  CHECK(contract_graph(loop_graph(), gf).max_abs() < 1e-12);
}

TEST_CASE("theta weight: engine equals the direct oracle, antisymmetric, nonzero") {
  bool some_nonzero = false;
  for (std::uint64_t seed : {21, 22, 23, 24, 25}) {
    auto g = make_geometry<ratc>(2, 3, seed, GeoMode::compatible);
    auto we = contract_graph(theta_graph(), g);
    auto wd = theta_weight_direct(g);
    REQUIRE(we.comp.size() == wd.comp.size());
    for (std::size_t i = 0; i < we.comp.size(); ++i) CHECK(we.comp[i] == wd.comp[i]);
    CHECK(we.rank == 2);
    CHECK(we.free_rank == 0);
    for (int l = 0; l < 2; ++l) {
      CHECK(scalar<ratc>::is_zero(we.at({l, l}), 0.0));
      for (int m = 0; m < 2; ++m) CHECK(we.at({l, m}) == -(we.at({m, l})));
    }
    if (we.max_abs() > 0.0) some_nonzero = true;

    // relabeling: listing the vertices in the other order permutes the slots
    auto ws = contract_graph(theta_graph(true), g);
    CHECK(ws.graph_id == we.graph_id);
    for (int l = 0; l < 2; ++l)
      for (int m = 0; m < 2; ++m) CHECK(ws.at({l, m}) == we.at({m, l}));
  }
  CHECK(some_nonzero);
}

TEST_CASE("antisymmetrization saturates above the fiber dimension") {
  VertexTensor<ratc> R(1);
  R.at(0, 0, 0, 0) = ratc(3);
  SqMat<ratc> oi(1);
  oi.at(0, 0) = ratc(1);
  auto w = contract_graph(dumbbell_graph(), R, oi);
  CHECK(w.saturated);
  CHECK(w.max_abs() == 0.0);
  CHECK(w.note.find("saturation") != std::string::npos);
}

TEST_CASE("collapsed-edge residual: zero for parallel pairings, controls fail") {
  for (std::uint64_t seed : {41, 42, 43}) {
    auto g = make_geometry<ratc>(2, 3, seed, GeoMode::compatible);
    CHECK(ihx_residual(g) == 0.0);
  }
  CHECK(ihx_residual(make_geometry<ratc>(2, 3, 44, GeoMode::flat)) == 0.0);
  CHECK(ihx_residual(make_geometry<complexd>(2, 3, 45, GeoMode::compatible)) < 1e-9);
  CHECK(ihx_residual(make_geometry<complexd>(2, 2, 46, GeoMode::hyper)) < 1e-9);
  CHECK(ihx_residual(make_geometry<complexd>(4, 2, 47, GeoMode::compatible)) < 1e-9);

  // an antisymmetric nondegenerate pairing needs even fiber dimension
  CHECK_THROWS_AS(make_geometry<complexd>(3, 3, 48, GeoMode::compatible), std::invalid_argument);

  // negative controls
  auto base = make_geometry<complexd>(2, 3, 49, GeoMode::compatible);
  CHECK(ihx_residual(perturb_geometry(base, 0.1, 50)) > 1e-3);
  auto R = basepoint_curvature(base);
  CHECK(ihx_residual(perturb_vertex_tensor(R, 0.1), base.Oi) > 1e-3);
}

TEST_CASE("collapsed-edge residual scales quadratically in R, linearly in the inverse pairing") {
  auto g = make_geometry<ratc>(2, 3, 51, GeoMode::compatible);
  auto R = perturb_vertex_tensor(basepoint_curvature(g), 0.125);
  double r0 = ihx_residual(R, g.Oi);
  REQUIRE(r0 > 0.0);

  VertexTensor<ratc> R2 = R;
  for (auto& c : R2.c) c = ratc(2) * c;
  CHECK(ihx_residual(R2, g.Oi) == doctest::Approx(4.0 * r0).epsilon(1e-12));

  SqMat<ratc> oi2 = g.Oi;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) oi2.at(i, j) = ratc(2) * oi2.at(i, j);
  CHECK(ihx_residual(R, oi2) == doctest::Approx(2.0 * r0).epsilon(1e-12));
}

TEST_CASE("contraction rejects non-weight graphs") {
  auto g = make_geometry<ratc>(2, 1, 61, GeoMode::compatible);
  FeynmanGraph b;
  b.vertices = {{"v", VertexKind::bulk_black}, {"s", VertexKind::boundary_A}};
  b.edges = {{"v", "s"}};
  CHECK_THROWS_WITH_AS(contract_graph(b, g), doctest::Contains("not a weight-system graph"), std::invalid_argument);

  FeynmanGraph four;
  four.vertices = {{"a", VertexKind::bulk_black}, {"b", VertexKind::bulk_black}};
  four.edges = {{"a", "b"}, {"a", "b"}, {"a", "b"}, {"a", "b"}};
  CHECK_THROWS_WITH_AS(contract_graph(four, g), doctest::Contains("not a weight-system graph"), std::invalid_argument);
}

TEST_CASE("sub-trivalent vertices keep their zero-mode slots free") {
  auto g = make_geometry<ratc>(2, 3, 71, GeoMode::compatible);
  FeynmanGraph biv;  // two bivalent vertices joined by a double edge
  biv.vertices = {{"a", VertexKind::bulk_black}, {"b", VertexKind::bulk_black}};
  biv.edges = {{"a", "b"}, {"a", "b"}};
  auto w = contract_graph(biv, g);
  CHECK(w.rank == 2);
  CHECK(w.free_rank == 2);
  CHECK(w.comp.size() == 16);
  for (int f0 = 0; f0 < 2; ++f0)
    for (int f1 = 0; f1 < 2; ++f1)
      for (int l = 0; l < 2; ++l) {
        CHECK(scalar<ratc>::is_zero(w.at({l, l}, {f0, f1}), 0.0));
        for (int m = 0; m < 2; ++m) CHECK(w.at({l, m}, {f0, f1}) == -(w.at({m, l}, {f0, f1})));
      }
}
