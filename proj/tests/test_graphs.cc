#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "rw/graphs.hh"

using namespace rw::graphs;

namespace {

// Compact edge tokens over bulk vertices 0..n-1 (kinds from the colors
// string, 'B'/'R'): "L<d>" = fresh leaf_b into bulk d, "<d>S" = bulk d into
// the shared boundary_A dot, "<d><d>" = bulk-to-bulk edge.
FeynmanGraph from_tokens(const std::string& colors, const std::string& tokens) {
  FeynmanGraph g;
  for (std::size_t i = 0; i < colors.size(); ++i)
    g.vertices.push_back({std::to_string(i), colors[i] == 'R' ? VertexKind::bulk_red : VertexKind::bulk_black});
  bool have_dot = false;
  int leaf = 0;
  std::string tok;
  std::istringstream in(tokens);
  while (in >> tok) {
    REQUIRE(tok.size() == 2);
    if (tok[0] == 'L') {
      std::string lid = "L" + std::to_string(leaf++);
      g.vertices.push_back({lid, VertexKind::leaf_b});
      g.edges.push_back({lid, std::string(1, tok[1])});
    } else if (tok[1] == 'S') {
      if (!have_dot) {
        g.vertices.push_back({"S", VertexKind::boundary_A});
        have_dot = true;
      }
      g.edges.push_back({std::string(1, tok[0]), "S"});
    } else {
      g.edges.push_back({std::string(1, tok[0]), std::string(1, tok[1])});
    }
  }
  return g;
}

// The one-bulk-vertex operator family: k legs in, k separate dots out.
FeynmanGraph family_graph(int k, bool red, Rep rep) {
  FeynmanGraph g;
  g.vertices.push_back({"v", red ? VertexKind::bulk_red : VertexKind::bulk_black});
  for (int i = 0; i < k; ++i) {
    std::string l = "l" + std::to_string(i), s = "s" + std::to_string(i);
    if (rep == Rep::B_rep) {
      g.vertices.push_back({l, VertexKind::leaf_b});
      g.edges.push_back({l, "v"});
      g.vertices.push_back({s, VertexKind::boundary_A});
      g.edges.push_back({"v", s});
    } else {
      g.vertices.push_back({l, VertexKind::leaf_a});
      g.edges.push_back({"v", l});
      g.vertices.push_back({s, VertexKind::boundary_B});
      g.edges.push_back({s, "v"});
    }
  }
  return g;
}

long long brute_aut(const FeynmanGraph& fg) {
  Adj g = compile(fg);
  std::vector<int> p(g.n);
  std::iota(p.begin(), p.end(), 0);
  long long cnt = 0;
  do {
    bool ok = true;
    for (int v = 0; v < g.n && ok; ++v) ok = g.kind[v] == g.kind[p[v]];
    for (int u = 0; u < g.n && ok; ++u)
      for (int v = 0; v < g.n && ok; ++v) ok = g.mult[u][v] == g.mult[p[u]][p[v]];
    if (ok) ++cnt;
  } while (std::next_permutation(p.begin(), p.end()));
  for (int u = 0; u < g.n; ++u)
    for (int v = 0; v < g.n; ++v)
      for (int m = 2; m <= g.mult[u][v]; ++m) cnt *= m;
  return cnt;
}

bool brute_iso(const FeynmanGraph& fa, const FeynmanGraph& fb) {
  Adj a = compile(fa), b = compile(fb);
  if (a.n != b.n || a.edge_count != b.edge_count) return false;
  std::vector<int> p(a.n);
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (int v = 0; v < a.n && ok; ++v) ok = a.kind[v] == b.kind[p[v]];
    for (int u = 0; u < a.n && ok; ++u)
      for (int v = 0; v < a.n && ok; ++v) ok = a.mult[u][v] == b.mult[p[u]][p[v]];
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

FeynmanGraph relabel(const FeynmanGraph& g, std::mt19937_64& rng) {
  std::vector<int> p(g.vertices.size());
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  std::map<std::string, std::string> ren;
  FeynmanGraph h;
  h.vertices.resize(g.vertices.size());
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    std::string nid = "p" + std::to_string(p[i]);
    ren[g.vertices[i].id] = nid;
    h.vertices[p[i]] = {nid, g.vertices[i].kind};
  }
  for (auto& [t, hd] : g.edges) h.edges.push_back({ren[t], ren[hd]});
  std::shuffle(h.edges.begin(), h.edges.end(), rng);
  return h;
}

struct Fixture {
  const char* name;
  const char* colors;
  const char* tokens;
  const char* verdict;  // "keep" or the drop reason
};

// Transcriptions of the three-bulk-vertex candidate figures (shape only: the
// sources carry no multiplicities or signs). All have one derivative-leg
// family and at most one shared boundary dot.
const Fixture kAppendixFixtures[] = {
    // first black family: one leg, no dots
    {"blk1_a", "BBB", "L0 01 12 12", "double_edge"},
    {"blk1_b", "BBB", "L0 01 12 02", "bivalent_1in1out"},
    {"blk1_c", "BBB", "L0 10 12 20", "bivalent_1in1out"},
    {"blk1_d", "BBB", "L0 01 21 21", "double_edge"},
    {"blk1_e", "BBB", "L0 10 21 21", "double_edge"},
    {"blk1_f", "BBB", "L0 01 21 20", "keep"},
    {"blk1_g", "BBB", "L0 01 12 21", "double_edge"},
    {"blk1_h", "BBB", "L0 01 12 20", "bivalent_1in1out"},
    {"blk1_i", "BBB", "L0 10 12 12", "double_edge"},
    // second black family
    {"blk2_a", "BBB", "L0 01 01 21", "double_edge"},
    {"blk2_b", "BBB", "L0 01 01 12", "double_edge"},
    {"blk2_c", "BBB", "L0 01 10 12", "double_edge"},
    {"blk2_d", "BBB", "L0 10 01 21", "double_edge"},
    {"blk2_e", "BBB", "L0 10 10 12", "double_edge"},
    // two-red variant of the second family
    {"red2_a", "RRB", "L0 01 01 21", "double_edge"},
    {"red2_b", "RRB", "L0 01 01 12", "double_edge"},
    {"red2_c", "RRB", "L0 01 10 12", "double_edge"},
    {"red2_d", "RRB", "L0 10 01 21", "double_edge"},
    {"red2_e", "RRB", "L0 10 10 12", "double_edge"},
    // one-red variant of the first family
    {"red1_a", "BRB", "L0 01 12 12", "double_edge"},
    {"red1_b", "RBB", "L0 01 12 02", "bivalent_1in1out"},
    {"red1_c", "RBB", "L0 10 12 20", "bivalent_1in1out"},
    {"red1_d", "BRB", "L0 01 21 21", "double_edge"},
    {"red1_e", "BRB", "L0 10 21 21", "double_edge"},
    {"red1_f", "RBB", "L0 01 21 20", "keep"},
    {"red1_g", "BRB", "L0 01 12 21", "double_edge"},
    {"red1_h", "RBB", "L0 01 12 20", "bivalent_1in1out"},
    {"red1_i", "BRB", "L0 10 12 12", "double_edge"},
    // dotted black family: one shared boundary dot
    {"dot_a", "BBB", "L0 L0 10 21 21 2S", "double_edge"},
    {"dot_b", "BBB", "L0 L0 10 12 12 2S", "double_edge"},
    {"dot_c", "BBB", "L0 01 01 21 L2 2S", "double_edge"},
    {"dot_d", "BBB", "L0 10 10 21 L2 2S", "double_edge"},
    {"dot_e", "BBB", "L0 01 21 02 L1 2S", "keep"},
    {"dot_f", "BBB", "L0 01 02 L1 L1 2S 2S", "double_edge"},
    {"dot_g", "BBB", "L2 01 20 L1 L1 2S 0S", "keep"},
    {"dot_h", "BBB", "10 20 L0 L1 L2 2S 1S", "keep"},
    // dotted all-red family
    {"dotr_a", "RRR", "L0 L0 10 21 21 2S", "double_edge"},
    {"dotr_b", "RRR", "L0 01 02 L1 L1 2S 2S", "double_edge"},
    {"dotr_c", "RRR", "L0 21 02 L1 L1 2S 0S", "keep"},
    {"dotr_d", "RRR", "10 20 L0 L1 L2 2S 1S", "keep"},
    {"dotr_e", "RRR", "L0 01 2S 2S L1 L1 0S L2", "double_edge"},
};

FeynmanGraph theta_graph(const char* a = "x", const char* b = "y") {
  FeynmanGraph g;
  g.vertices.push_back({a, VertexKind::bulk_black});
  g.vertices.push_back({b, VertexKind::bulk_black});
  for (int i = 0; i < 3; ++i) g.edges.push_back({a, b});
  return g;
}

}  // namespace

TEST_CASE("validation enforces vertex-kind invariants") {
  FeynmanGraph g;
  g.vertices.push_back({"v", VertexKind::bulk_black});
  g.vertices.push_back({"a", VertexKind::boundary_A});
  g.edges.push_back({"v", "a"});
  CHECK_NOTHROW(validate(g));
  g.edges.push_back({"a", "v"});
  CHECK_THROWS_WITH_AS(validate(g), doctest::Contains("boundary_A"), std::invalid_argument);

  FeynmanGraph h;
  h.vertices.push_back({"v", VertexKind::bulk_black});
  h.vertices.push_back({"l", VertexKind::leaf_b});
  h.edges.push_back({"v", "l"});
  CHECK_THROWS_AS(validate(h), std::invalid_argument);  // wrong direction for leaf_b
  h.edges = {{"l", "v"}};
  CHECK_NOTHROW(validate(h));
  h.edges.push_back({"l", "v"});
  CHECK_THROWS_AS(validate(h), std::invalid_argument);  // leaves are univalent

  FeynmanGraph e;
  e.vertices.push_back({"v", VertexKind::bulk_black});
  e.edges.push_back({"v", "w"});
  CHECK_THROWS_WITH_AS(validate(e), doctest::Contains("unknown vertex id"), std::invalid_argument);
  e.edges.clear();
  e.vertices.push_back({"v", VertexKind::bulk_red});
  CHECK_THROWS_WITH_AS(validate(e), doctest::Contains("duplicate"), std::invalid_argument);
}

TEST_CASE("canonical form: fixed minimal encodings and relabeling invariance") {
  FeynmanGraph one;
  one.vertices.push_back({"anything", VertexKind::bulk_black});
  CHECK(canonical_form(one) == "V:b;E:");

  CHECK(canonical_form(theta_graph("x", "y")) == canonical_form(theta_graph("q", "p")));

  FeynmanGraph recolored = theta_graph();
  recolored.vertices[1].kind = VertexKind::bulk_red;
  CHECK(canonical_form(recolored) != canonical_form(theta_graph()));
}

TEST_CASE("automorphism and loop counts on the reference shapes") {
  CHECK(automorphism_count(theta_graph()) == 6);
  CHECK(loops_count(theta_graph()) == 2);

  FeynmanGraph single;
  single.vertices = {{"a", VertexKind::bulk_black}, {"b", VertexKind::bulk_black}};
  single.edges = {{"a", "b"}};
  CHECK(automorphism_count(single) == 1);
  CHECK(loops_count(single) == 0);

  FeynmanGraph pair;
  pair.vertices = {{"a", VertexKind::bulk_black},
                   {"b", VertexKind::bulk_black},
                   {"c", VertexKind::bulk_black},
                   {"d", VertexKind::bulk_black}};
  pair.edges = {{"a", "b"}, {"c", "d"}};
  CHECK(automorphism_count(pair) == 2);

  FeynmanGraph loop;
  loop.vertices = {{"a", VertexKind::bulk_black}};
  loop.edges = {{"a", "a"}};
  CHECK(loops_count(loop) == 1);

  FeynmanGraph tree;
  tree.vertices = {{"a", VertexKind::bulk_black}, {"b", VertexKind::bulk_black}, {"c", VertexKind::bulk_black}};
  tree.edges = {{"a", "b"}, {"a", "c"}};
  CHECK(loops_count(tree) == 0);
}

TEST_CASE("canonical form and |Aut| against brute force on an exhaustive small sweep") {
  std::mt19937_64 rng(901);
  std::map<std::string, FeynmanGraph> seen;
  long long checked = 0;

  auto probe = [&](const FeynmanGraph& g) {
    std::string c = canonical_form(g);
    CHECK(canonical_form(relabel(g, rng)) == c);
    CHECK(automorphism_count(g) == brute_aut(g));
    auto [it, fresh] = seen.emplace(c, g);
    if (!fresh) CHECK(brute_iso(it->second, g));
    ++checked;
  };

  // all bulk-black directed multigraphs, V <= 4 vertices, <= 5 edges
  for (int V = 1; V <= 4; ++V) {
    const int slots = V * V;
    std::vector<int> edges;
    auto rec = [&](auto&& self, int start, int left) -> void {
      FeynmanGraph g;
      for (int v = 0; v < V; ++v) g.vertices.push_back({std::to_string(v), VertexKind::bulk_black});
      for (int s : edges) g.edges.push_back({std::to_string(s / V), std::to_string(s % V)});
      probe(g);
      if (left == 0) return;
      for (int s = start; s < slots; ++s) {
        edges.push_back(s);
        self(self, s, left - 1);
        edges.pop_back();
      }
    };
    rec(rec, 0, 5);
  }

  // red/black colorings exercised on V <= 2, <= 3 edges
  for (int V = 1; V <= 2; ++V) {
    const int slots = V * V;
    for (int mask = 0; mask < (1 << V); ++mask) {
      std::vector<int> edges;
      auto rec = [&](auto&& self, int start, int left) -> void {
        FeynmanGraph g;
        for (int v = 0; v < V; ++v)
          g.vertices.push_back({std::to_string(v), (mask >> v) & 1 ? VertexKind::bulk_red : VertexKind::bulk_black});
        for (int s : edges) g.edges.push_back({std::to_string(s / V), std::to_string(s % V)});
        probe(g);
        if (left == 0) return;
        for (int s = start; s < slots; ++s) {
          edges.push_back(s);
          self(self, s, left - 1);
          edges.pop_back();
        }
      };
      rec(rec, 0, 3);
    }
  }

  // decorated graphs: the operator family and all fixtures through the same checks
  for (int k = 1; k <= 3; ++k)
    for (bool red : {false, true})
      for (Rep rep : {Rep::B_rep, Rep::A_rep}) probe(family_graph(k, red, rep));
  for (const auto& f : kAppendixFixtures) probe(from_tokens(f.colors, f.tokens));

  CHECK(checked > 10000);
}

TEST_CASE("vanishing filter: reference cases and toggles") {
  FeynmanGraph tad;
  tad.vertices = {{"v", VertexKind::bulk_black}};
  tad.edges = {{"v", "v"}};
  CHECK(vanishing_filter(tad).reason == "tadpole");
  CHECK(vanishing_filter(tad, {.tadpole = false}).keep);

  FeynmanGraph dbl;
  dbl.vertices = {{"a", VertexKind::bulk_black}, {"b", VertexKind::bulk_black}};
  dbl.edges = {{"a", "b"}, {"a", "b"}};
  CHECK(vanishing_filter(dbl).reason == "double_edge");
  CHECK(vanishing_filter(dbl, {.double_edge = false}).keep);
  dbl.edges = {{"a", "b"}, {"b", "a"}};  // opposite orientations share the endpoint pair
  CHECK(vanishing_filter(dbl).reason == "double_edge");

  FeynmanGraph biv;
  biv.vertices = {{"a", VertexKind::bulk_black}, {"v", VertexKind::bulk_black}, {"b", VertexKind::bulk_black}};
  biv.edges = {{"a", "v"}, {"v", "b"}};
  CHECK(vanishing_filter(biv).reason == "bivalent_1in1out");
  CHECK(vanishing_filter(biv, {.bivalent_1in1out = false}).keep);

  // the one-vertex operator graph is bivalent but not internal: it survives
  CHECK(vanishing_filter(family_graph(1, false, Rep::B_rep)).keep);
}

TEST_CASE("degree table: catalogued signatures, extension pattern, and the error path") {
  const auto& t = VertexDegreeTable::standard();
  const VertexKind B = VertexKind::bulk_black, R = VertexKind::bulk_red;
  // thirteen catalogued rows
  CHECK(t.require(B, 1, 0) == 2);
  CHECK(t.require(B, 0, 1) == 0);
  CHECK(t.require(B, 2, 0) == 2);
  CHECK(t.require(B, 1, 1) == 0);
  CHECK(t.require(B, 0, 2) == -2);
  CHECK(t.require(B, 3, 0) == 2);
  CHECK(t.require(B, 2, 1) == 0);
  CHECK(t.require(B, 1, 2) == -2);
  CHECK(t.require(B, 0, 3) == -4);
  CHECK(t.require(R, 3, 0) == 2);
  CHECK(t.require(R, 2, 1) == 0);
  CHECK(t.require(R, 1, 2) == -2);
  CHECK(t.require(R, 0, 3) == -4);
  // extension by the pattern
  CHECK(t.require(B, 2, 2) == -2);
  CHECK(t.require(R, 3, 3) == -4);
  CHECK(t.require(B, 0, 5) == -8);
  // existence boundaries
  CHECK(!t.contains(B, 0, 0));
  CHECK(!t.contains(R, 1, 1));
  CHECK(!t.contains(R, 2, 0));
  CHECK_THROWS_WITH_AS(t.require(R, 1, 1), doctest::Contains("extend VertexDegreeTable"), std::out_of_range);
}

TEST_CASE("degree balance: worked example, even-n obstruction, free sector") {
  const auto& t = VertexDegreeTable::standard();

  // one bulk vertex, one in-arrow from the boundary, one out-arrow to a
  // derivative leaf, m = 1: balanced in both representations
  FeynmanGraph g;
  g.vertices = {{"s", VertexKind::boundary_B}, {"v", VertexKind::bulk_black}, {"t", VertexKind::leaf_a}};
  g.edges = {{"s", "v"}, {"v", "t"}};
  for (Rep rep : {Rep::B_rep, Rep::A_rep}) {
    auto r = degree_balance(g, t, rep);
    CHECK(r.balanced);
    CHECK(r.deficit == 0);
  }

  // n = 2: the constraint is odd-valued for every catalogued signature pair
  for (int in1 = 0; in1 <= 3; ++in1)
    for (int out1 = 0; out1 + in1 <= 3; ++out1)
      for (int in2 = 0; in2 <= 3; ++in2)
        for (int out2 = 0; out2 + in2 <= 3; ++out2)
          for (int m = 0; m <= 5; ++m) {
            auto d1 = t.lookup(VertexKind::bulk_black, in1, out1), d2 = t.lookup(VertexKind::bulk_black, in2, out2);
            if (!d1 || !d2) continue;
            CHECK((*d1 + *d2 + 2 + 2 * m - 3) % 2 != 0);
          }
  FeynmanGraph two;
  two.vertices = {{"a", VertexKind::bulk_black}, {"b", VertexKind::bulk_black}, {"l", VertexKind::leaf_b}};
  two.edges = {{"l", "a"}, {"a", "b"}};
  auto r2 = degree_balance(two, t, Rep::B_rep);
  CHECK(!r2.balanced);
  CHECK(r2.deficit % 2 != 0);

  // no bulk vertices: nothing to constrain (constant sector handled separately)
  FeynmanGraph free;
  free.vertices = {{"s", VertexKind::boundary_A}};
  CHECK(degree_balance(free, t, Rep::B_rep).balanced);

  // uncatalogued signature refuses with the extension message
  FeynmanGraph red;
  red.vertices = {{"v", VertexKind::bulk_red}, {"l", VertexKind::leaf_b}};
  red.edges = {{"l", "v"}};
  CHECK_THROWS_WITH_AS(degree_balance(red, t, Rep::B_rep), doctest::Contains("extend VertexDegreeTable"),
                       std::out_of_range);
}

TEST_CASE("reduced all-black constraint 3I+II+3III+IV-V+3VI+VII-VIII-3IX+2m-3") {
  // coefficient per catalogued black signature, keyed (in, out)
  const std::map<std::pair<int, int>, int> coef = {{{1, 0}, 3},  {{0, 1}, 1},  {{2, 0}, 3},
                                                   {{1, 1}, 1},  {{0, 2}, -1}, {{3, 0}, 3},
                                                   {{2, 1}, 1},  {{1, 2}, -1}, {{0, 3}, -3}};
  const auto& t = VertexDegreeTable::standard();
  int tested = 0;
  for (const auto& f : kAppendixFixtures) {
    if (std::string(f.colors).find('R') != std::string::npos) continue;
    auto g = from_tokens(f.colors, f.tokens);
    Adj a = compile(g);
    long long combo = 0, m = 0;
    for (int v = 0; v < a.n; ++v) {
      if (is_boundary(a.kind[v])) ++m;
      if (is_bulk(a.kind[v])) combo += coef.at({a.ind[v], a.outd[v]});
    }
    combo += 2 * m - 3;
    CHECK(combo == 0);
    CHECK(combo == degree_balance(g, t, Rep::B_rep).deficit);
    ++tested;
  }
  CHECK(tested == 22);
}

TEST_CASE("appendix transcriptions: balanced, ghost number one, annotated as drawn") {
  const auto& t = VertexDegreeTable::standard();
  for (const auto& f : kAppendixFixtures) {
    CAPTURE(f.name);
    auto g = from_tokens(f.colors, f.tokens);
    CHECK_NOTHROW(validate(g));
    auto bal = degree_balance(g, t, Rep::B_rep);
    CHECK(bal.balanced);
    CHECK(ghost_number_one(g, Rep::B_rep));
    auto v = vanishing_filter(g);
    std::string verdict = v.keep ? "keep" : v.reason;
    CHECK(verdict == f.verdict);
  }
}

TEST_CASE("enumeration: one bulk vertex gives exactly the k-in/k-out family") {
  auto got = enumerate_bfv(1, 6, Rep::B_rep);
  std::set<std::string> canon;
  for (auto& c : got) {
    CHECK(c.balance.balanced);
    CHECK(c.verdict.keep);
    CHECK(c.loops == 0);
    canon.insert(c.canonical);
  }
  std::set<std::string> want;
  for (int k = 1; k <= 3; ++k) want.insert(canonical_form(family_graph(k, false, Rep::B_rep)));
  for (int k = 2; k <= 3; ++k) want.insert(canonical_form(family_graph(k, true, Rep::B_rep)));
  CHECK(got.size() == 5);
  CHECK(canon == want);
  for (auto& c : got) {
    // family member with k legs: leg and dot permutations only
    int k = (int(c.graph.vertices.size()) - 1) / 2;
    long long kf = 1;
    for (int i = 2; i <= k; ++i) kf *= i;
    CHECK(c.aut == kf * kf);
  }
}

TEST_CASE("enumeration: mirrored family on the A side, empty beyond one vertex") {
  auto got = enumerate_bfv(1, 6, Rep::A_rep);
  std::set<std::string> canon;
  for (auto& c : got) canon.insert(c.canonical);
  std::set<std::string> want;
  for (int k = 1; k <= 3; ++k) want.insert(canonical_form(family_graph(k, false, Rep::A_rep)));
  for (int k = 2; k <= 3; ++k) want.insert(canonical_form(family_graph(k, true, Rep::A_rep)));
  CHECK(canon == want);
  CHECK(enumerate_bfv(2, 6, Rep::A_rep).empty());
  CHECK(enumerate_bfv(3, 6, Rep::A_rep).empty());
}

TEST_CASE("enumeration: even bulk counts are empty, bounds are refused") {
  CHECK(enumerate_bfv(2, 6, Rep::B_rep).empty());
  CHECK(enumerate_bfv(0, 6, Rep::B_rep).empty());
  CHECK_THROWS_WITH_AS(enumerate_bfv(4, 6, Rep::B_rep), doctest::Contains("0..3"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(enumerate_bfv(3, 9, Rep::B_rep), doctest::Contains("1..8"), std::invalid_argument);
}

TEST_CASE("enumeration: three-vertex candidates contain every transcription with its verdict") {
  auto got = enumerate_bfv(3, 3, Rep::B_rep);
  std::map<std::string, const Candidate*> by_canon;
  for (auto& c : got) {
    CHECK(c.balance.balanced);
    CHECK(ghost_number_one(c.graph, Rep::B_rep));
    bool fresh = by_canon.emplace(c.canonical, &c).second;
    CHECK(fresh);  // dedup closure
  }
  for (const auto& f : kAppendixFixtures) {
    CAPTURE(f.name);
    auto g = from_tokens(f.colors, f.tokens);
    auto it = by_canon.find(canonical_form(g));
    REQUIRE(it != by_canon.end());
    std::string verdict = it->second->verdict.keep ? "keep" : it->second->verdict.reason;
    CHECK(verdict == f.verdict);
  }
  // dropped candidates are retained with annotation, not removed
  CHECK(std::any_of(got.begin(), got.end(), [](const Candidate& c) { return !c.verdict.keep; }));
}

TEST_CASE("term report: constant pair always present, family skeletons") {
  auto empty = bfv_term_report({}, Rep::B_rep);
  CHECK(empty.terms.empty());
  CHECK(empty.omega0[0].find("delta/delta A") != std::string::npos);
  CHECK(empty.omega0[1].find("delta/delta B") != std::string::npos);

  auto got = enumerate_bfv(1, 6, Rep::B_rep);
  auto rep = bfv_term_report(got, Rep::B_rep);
  CHECK(rep.terms.size() == 5);
  bool found_k1 = false;
  for (auto& t : rep.terms) {
    if (t.skeleton.find("Rhat1(in=1,out=1)") != std::string::npos) {
      found_k1 = true;
      CHECK(t.skeleton.find("[B x1]") != std::string::npos);
      CHECK(t.skeleton.find("(d/dB)^1") != std::string::npos);
      CHECK(t.hbar_power == 0);
      CHECK(t.aut == 1);
    }
  }
  CHECK(found_k1);
}

TEST_CASE("graph file format round trip and catalog rows") {
  auto g = from_tokens("BRB", "L0 01 21 20");
  auto j = graph_to_json(g);
  auto h = graph_from_json(j);
  CHECK(canonical_form(g) == canonical_form(h));

  auto bad = j;
  bad["vertices"][0]["kind"] = "bulk_green";
  CHECK_THROWS_AS(graph_from_json(bad), std::invalid_argument);

  auto cat = catalog_to_json(enumerate_bfv(1, 4, Rep::B_rep), Rep::B_rep);
  REQUIRE(cat.is_array());
  REQUIRE(!cat.empty());
  for (auto& row : cat) {
    CHECK(row.contains("canonical"));
    CHECK(row.contains("aut"));
    CHECK(row.contains("loops"));
    CHECK(row["balance"]["balanced"].get<bool>());
    CHECK(row.contains("filter_verdict"));
    CHECK(row.contains("term_skeleton"));
  }
}
