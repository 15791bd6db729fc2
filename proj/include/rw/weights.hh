#pragma once
#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rw/geometry.hh"
#include "rw/graphs.hh"

// Weight-system evaluation at the basepoint. Closed low-valence graphs are
// contracted against the pairing inverse (one factor per edge) and the
// lowered dbar-curvature (one factor per vertex); the one-per-vertex
// antiholomorphic slots are antisymmetrized into the output tensor.
namespace rw::weights {

// fully lowered basepoint curvature R_{ijk|lb} = Om_{im} dbar_lb Gamma^m_{jk}(0);
// totally symmetric in (i,j,k) exactly when the pairing is parallel
template <class S>
struct VertexTensor {
  int n = 0;
  std::vector<S> c;
  VertexTensor() = default;
  explicit VertexTensor(int n_) : n(n_), c(std::size_t(n_) * n_ * n_ * n_) {}
  S& at(int i, int j, int k, int lb) { return c[((std::size_t(i) * n + j) * n + k) * n + lb]; }
  const S& at(int i, int j, int k, int lb) const { return c[((std::size_t(i) * n + j) * n + k) * n + lb]; }
};

template <class S>
VertexTensor<S> basepoint_curvature(const GeometryJet<S>& g) {
  VertexTensor<S> R(g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k)
        for (int lb = 0; lb < g.n; ++lb) R.at(i, j, k, lb) = atiyah0_low(g, i, j, k, lb);
  return R;
}

// Asymmetric bump on a single slot position: no pairing-parallel curvature
// admits it, so it serves as the Bianchi-violating control.
template <class S>
VertexTensor<S> perturb_vertex_tensor(const VertexTensor<S>& R, double eps) {
  VertexTensor<S> out = R;
  if (out.n >= 2) out.at(0, 1, 0, 0) = out.at(0, 1, 0, 0) + scalar<S>::from_parts(eps, 0.0);
  return out;
}

template <class S>
struct WeightTensor {
  std::string graph_id;  // canonical form of the contracted graph
  int rank = 0;          // antiholomorphic slots, one per vertex
  int free_rank = 0;     // holomorphic slots left open on sub-trivalent vertices
  int dim = 0;
  bool saturated = false;  // rank exceeds dim: zero after antisymmetrization
  std::uint64_t seed = 0;
  std::string note;
  std::vector<S> comp;  // dim^(rank+free_rank), antiholomorphic block antisymmetrized

  std::size_t cells() const {
    std::size_t s = 1;
    for (int r = 0; r < rank + free_rank; ++r) s *= std::size_t(dim);
    return s;
  }
  std::size_t index(const std::vector<int>& lb, const std::vector<int>& fr) const {
    std::size_t s = 0;
    for (int v : lb) s = s * dim + std::size_t(v);
    for (int v : fr) s = s * dim + std::size_t(v);
    return s;
  }
  const S& at(const std::vector<int>& lb, const std::vector<int>& fr = {}) const { return comp[index(lb, fr)]; }
  double max_abs() const {
    double w = 0.0;
    for (const S& v : comp) w = std::max(w, scalar<S>::mag(v));
    return w;
  }
};

// Core contraction. Vertices must all be bulk and of valence <= 3; each
// carries three holomorphic slots (edge ends fill them in input-edge order,
// the rest stay free) plus one antiholomorphic slot. The antisymmetrization
// is the plain alternating sum over the antiholomorphic block, no 1/k!.
template <class S>
WeightTensor<S> contract_graph(const graphs::FeynmanGraph& fg, const VertexTensor<S>& R, const SqMat<S>& oi,
                               std::uint64_t seed = 0) {
  const int n = R.n;
  std::vector<std::string> ids;
  for (const auto& v : fg.vertices) {
    if (v.kind != graphs::VertexKind::bulk_black)
      throw std::invalid_argument("not a weight-system graph: vertex '" + v.id + "' is " +
                                  graphs::kind_name(v.kind) + ", need bulk_black");
    ids.push_back(v.id);
  }
  const int V = int(ids.size());
  auto vx = [&](const std::string& id) {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) throw std::invalid_argument("edge endpoint references unknown vertex id: " + id);
    return int(it - ids.begin());
  };

  // slot bookkeeping: slots[v] lists (edge index, end) fills, then frees
  std::vector<std::array<int, 3>> slot_src(V, {-1, -1, -1});  // encoded 2*e (tail) / 2*e+1 (head)
  std::vector<int> used(V, 0);
  std::vector<std::pair<int, int>> edges;
  for (const auto& [t, h] : fg.edges) {
    int u = vx(t), w = vx(h);
    int e = int(edges.size());
    edges.push_back({u, w});
    if (used[u] == 3 || used[w] == 3 || (u == w && used[u] == 2))
      throw std::invalid_argument("not a weight-system graph: vertex valence exceeds 3");
    slot_src[u][used[u]++] = 2 * e;
    slot_src[w][used[w]++] = 2 * e + 1;
  }
  const int E = int(edges.size());
  std::vector<std::pair<int, int>> frees;  // (vertex, slot position)
  for (int v = 0; v < V; ++v)
    for (int s = used[v]; s < 3; ++s) frees.push_back({v, s});

  WeightTensor<S> out;
  out.graph_id = graphs::canonical_form(fg);
  out.rank = V;
  out.free_rank = int(frees.size());
  out.dim = n;
  out.seed = seed;
  out.note = "edge slots in input order; antisymmetrized by alternating sum";
  out.comp.assign(out.cells(), S{});
  if (V > n) {
    out.saturated = true;
    out.note += "; saturation: rank exceeds the antiholomorphic dimension, tensor is identically zero";
    return out;
  }

  // raw tensor before antisymmetrization
  std::vector<S> raw(out.cells(), S{});
  std::vector<int> lb(V, 0), fr(out.free_rank, 0), ea(2 * E, 0);
  auto vertex_slot = [&](int v, int s) -> int {
    int src = slot_src[v][s];
    if (src >= 0) return ea[src];
    for (std::size_t q = 0; q < frees.size(); ++q)
      if (frees[q] == std::make_pair(v, s)) return fr[q];
    return 0;
  };
  auto cell_value = [&]() {
    S acc{};
    auto rec = [&](auto&& self, int e, const S& prod) -> void {
      if (e == E) {
        S term = prod;
        for (int v = 0; v < V; ++v) term = term * R.at(vertex_slot(v, 0), vertex_slot(v, 1), vertex_slot(v, 2), lb[v]);
        acc += term;
        return;
      }
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          ea[2 * e] = a;
          ea[2 * e + 1] = b;
          self(self, e + 1, prod * oi.at(a, b));
        }
    };
    rec(rec, 0, S(1));
    return acc;
  };
  auto for_tuples = [&](std::vector<int>& t, auto&& body) {
    std::fill(t.begin(), t.end(), 0);
    while (true) {
      body();
      int p = int(t.size()) - 1;
      while (p >= 0 && ++t[p] == n) t[p--] = 0;
      if (p < 0) break;
    }
  };
  for_tuples(fr, [&]() { for_tuples(lb, [&]() { raw[out.index(lb, fr)] = cell_value(); }); });

  // alternating sum over the antiholomorphic block
  std::vector<int> perm(V);
  for_tuples(fr, [&]() {
    for_tuples(lb, [&]() {
      std::iota(perm.begin(), perm.end(), 0);
      S acc{};
      do {
        int inv = 0;
        for (int a = 0; a < V; ++a)
          for (int b = a + 1; b < V; ++b) inv += perm[a] > perm[b];
        std::vector<int> plb(V);
        for (int v = 0; v < V; ++v) plb[v] = lb[perm[v]];
        S term = raw[out.index(plb, fr)];
        acc = (inv & 1) ? acc - term : acc + term;
      } while (std::next_permutation(perm.begin(), perm.end()));
      out.comp[out.index(lb, fr)] = acc;
    });
  });
  return out;
}

template <class S>
WeightTensor<S> contract_graph(const graphs::FeynmanGraph& fg, const GeometryJet<S>& geo) {
  return contract_graph(fg, basepoint_curvature(geo), geo.Oi, geo.seed);
}

// Independent evaluation of the two-vertex triple-edge graph: raise all three
// slots of the first factor, pair against the second, subtract the index
// swap. No graph machinery, used as the cross-check oracle.
template <class S>
WeightTensor<S> theta_weight_direct(const VertexTensor<S>& R, const SqMat<S>& oi, std::uint64_t seed = 0) {
  const int n = R.n;
  WeightTensor<S> out;
  {
    graphs::FeynmanGraph th;
    th.vertices = {{"v0", graphs::VertexKind::bulk_black}, {"v1", graphs::VertexKind::bulk_black}};
    th.edges = {{"v0", "v1"}, {"v0", "v1"}, {"v0", "v1"}};
    out.graph_id = graphs::canonical_form(th);
  }
  out.rank = 2;
  out.dim = n;
  out.seed = seed;
  out.note = "direct raise-then-pair evaluation";
  out.comp.assign(out.cells(), S{});
  if (2 > n) {
    out.saturated = true;
    return out;
  }
  std::vector<S> up(std::size_t(n) * n * n * n, S{});  // T^{b1b2b3}_{lb}
  auto U = [&](int b1, int b2, int b3, int lb) -> S& { return up[((std::size_t(b1) * n + b2) * n + b3) * n + lb]; };
  for (int b1 = 0; b1 < n; ++b1)
    for (int b2 = 0; b2 < n; ++b2)
      for (int b3 = 0; b3 < n; ++b3)
        for (int lb = 0; lb < n; ++lb) {
          S acc{};
          for (int a1 = 0; a1 < n; ++a1)
            for (int a2 = 0; a2 < n; ++a2)
              for (int a3 = 0; a3 < n; ++a3)
                acc += oi.at(a1, b1) * oi.at(a2, b2) * oi.at(a3, b3) * R.at(a1, a2, a3, lb);
          U(b1, b2, b3, lb) = acc;
        }
  for (int lb = 0; lb < n; ++lb)
    for (int lbp = 0; lbp < n; ++lbp) {
      S acc{};
      for (int b1 = 0; b1 < n; ++b1)
        for (int b2 = 0; b2 < n; ++b2)
          for (int b3 = 0; b3 < n; ++b3)
            acc += (U(b1, b2, b3, lb) * R.at(b1, b2, b3, lbp) - U(b1, b2, b3, lbp) * R.at(b1, b2, b3, lb));
      out.comp[out.index({lb, lbp}, {})] = acc;
    }
  return out;
}

template <class S>
WeightTensor<S> theta_weight_direct(const GeometryJet<S>& geo) {
  return theta_weight_direct(basepoint_curvature(geo), geo.Oi, geo.seed);
}

// Collapsed-propagator identity: the three leg pairings of the four-valent
// vertex, summed and antisymmetrized over the two antiholomorphic slots,
// vanish exactly when the pairing-trace of the first two curvature slots
// does. Reported as the max-norm over the six free indices.
template <class S>
double ihx_residual(const VertexTensor<S>& R, const SqMat<S>& oi) {
  const int n = R.n;
  double worst = 0.0;
  for (int K = 0; K < n; ++K)
    for (int Ip = 0; Ip < n; ++Ip)
      for (int Jp = 0; Jp < n; ++Jp)
        for (int Kp = 0; Kp < n; ++Kp)
          for (int Lb = 0; Lb < n; ++Lb)
            for (int Lp = 0; Lp < n; ++Lp) {
              S acc{};
              for (int I = 0; I < n; ++I)
                for (int J = 0; J < n; ++J) {
                  S w = oi.at(I, J);
                  acc += w * (R.at(I, J, K, Lb) * R.at(Ip, Jp, Kp, Lp) + R.at(I, J, Kp, Lb) * R.at(Ip, Jp, K, Lp) +
                              R.at(I, J, Jp, Lb) * R.at(Ip, K, Kp, Lp));
                  acc -= w * (R.at(I, J, K, Lp) * R.at(Ip, Jp, Kp, Lb) + R.at(I, J, Kp, Lp) * R.at(Ip, Jp, K, Lb) +
                              R.at(I, J, Jp, Lp) * R.at(Ip, K, Kp, Lb));
                }
              worst = std::max(worst, scalar<S>::mag(acc));
            }
  return worst;
}

template <class S>
double ihx_residual(const GeometryJet<S>& geo) {
  return ihx_residual(basepoint_curvature(geo), geo.Oi);
}

// Holomorphic total symmetry of the lowered curvature and the vanishing of
// its pairing trace — the two mechanisms behind tadpole and collapsed-edge
// cancellations.
struct AsReport {
  double symmetry_violation = 0.0;
  double trace_violation = 0.0;
  bool pass(double tol) const { return symmetry_violation <= tol && trace_violation <= tol; }
};

template <class S>
AsReport as_symmetry_check(const VertexTensor<S>& R, const SqMat<S>& oi) {
  const int n = R.n;
  AsReport rep;
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int lb = 0; lb < n; ++lb) {
          int idx[3] = {i, j, k};
          const S& base = R.at(i, j, k, lb);
          for (const auto& p : perms) {
            S d = R.at(idx[p[0]], idx[p[1]], idx[p[2]], lb) - base;
            rep.symmetry_violation = std::max(rep.symmetry_violation, scalar<S>::mag(d));
          }
        }
  for (int k = 0; k < n; ++k)
    for (int lb = 0; lb < n; ++lb) {
      S acc{};
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc += oi.at(i, j) * R.at(i, j, k, lb);
      rep.trace_violation = std::max(rep.trace_violation, scalar<S>::mag(acc));
    }
  return rep;
}

template <class S>
AsReport as_symmetry_check(const GeometryJet<S>& geo) {
  return as_symmetry_check(basepoint_curvature(geo), geo.Oi);
}

}  // namespace rw::weights
