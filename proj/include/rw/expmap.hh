#pragma once

#include <vector>

#include "rw/geometry.hh"
#include "rw/matrix.hh"
#include "rw/series.hh"

namespace rw {

// Homogeneous fiber-degree slice of a series. A slice taken inside the fiber
// window is complete at every fiber order (the others vanish identically).
template <class S>
Series<S> ypart(const Series<S>& a, int k) {
  Series<S> out = Series<S>::zero(a.n, a.tr);
  out.resx = a.resx;
  out.resy = k <= a.resy ? RES_EXACT : a.resy;
  for (const auto& [m, c] : a.t)
    if (m.fiber_order() == k) out.add_term(m, c);
  return out;
}

// Slice by form content: keep terms whose odd factors are all dx (bar=false)
// or all dxb (bar=true). Terms of mixed type are dropped.
template <class S>
Series<S> form_slice(const Series<S>& a, bool bar) {
  std::uint16_t dx_mask = (1u << NMAX) - 1u;
  Series<S> out = Series<S>::zero(a.n, a.tr);
  out.resx = a.resx;
  out.resy = a.resy;
  for (const auto& [m, c] : a.t) {
    bool has_dx = (m.odd & dx_mask) != 0;
    bool has_dxb = (m.odd & static_cast<std::uint16_t>(~dx_mask)) != 0;
    if (bar ? (has_dxb && !has_dx) : (has_dx && !has_dxb)) out.add_term(m, c);
  }
  return out;
}

template <class S>
struct ExpMap {
  int n = 0;
  Trunc tr;
  std::vector<Series<S>> phi;  // n components, series in (x, xb, y)
};

// Fiberwise Jacobian d phi^p / d y^q as a matrix of series.
template <class S>
MatSer<S> fiber_jacobian(const ExpMap<S>& em) {
  MatSer<S> J(em.n, em.tr);
  for (int p = 0; p < em.n; ++p)
    for (int q = 0; q < em.n; ++q) J.at(p, q) = derive(em.phi[p], Var::Y, q);
  return J;
}

// J^T Om J - Om: the fiberwise pairing defect of the map (antisymmetric).
template <class S>
MatSer<S> pairing_defect(const GeometryJet<S>& g, const ExpMap<S>& em) {
  MatSer<S> J = fiber_jacobian(em);
  MatSer<S> G(em.n, em.tr);
  for (int a = 0; a < em.n; ++a)
    for (int b = 0; b < em.n; ++b) {
      Series<S> acc = Series<S>::zero(em.n, em.tr);
      for (int p = 0; p < em.n; ++p)
        for (int q = 0; q < em.n; ++q) acc = acc + g.Om.at(p, q) * (J.at(p, a) * J.at(q, b));
      acc.add_term(Mono{}, -g.Om.at(a, b));
      G.at(a, b) = acc;
    }
  return G;
}

template <class S>
double pairing_defect_norm(const GeometryJet<S>& g, const ExpMap<S>& em) {
  MatSer<S> G = pairing_defect(g, em);
  double worst = 0.0;
  for (auto& e : G.e) worst = std::max(worst, resolved_norm(e));
  return worst;
}

// Formal exponential map phi^i(x, xb; y) = x^i + y^i + sum_{k>=2} phi_k^i with
// phi_k of fiber degree k, built in two stages:
//   1. the parallel-transport recursion
//        k(k-1) phi_k = -[Gamma(phi) psi psi]_k,   psi = sum_a a phi_a,
//      which reproduces the connection jets order by order;
//   2. unless plain=true, an order-by-order fiberwise correction restoring
//      J^T Om J = Om: at each degree m the defect slice G^(m-1) is closed, and
//        lambda_a = -G^(m-1)_{ab} y^b / (m+1),  dphi = Om^{-1} lambda
//      removes it while adding nothing fully symmetric.
template <class S>
ExpMap<S> geodesic_exp(const GeometryJet<S>& g, const Trunc& tr, bool plain = false) {
  ExpMap<S> em;
  em.n = g.n;
  em.tr = tr;
  em.phi.assign(g.n, Series<S>::zero(g.n, tr));
  for (int i = 0; i < g.n; ++i) em.phi[i] = Series<S>::gen(g.n, tr, Var::X, i) + Series<S>::gen(g.n, tr, Var::Y, i);

  std::vector<Series<S>> gam(static_cast<std::size_t>(g.n) * g.n * g.n, Series<S>::zero(g.n, tr));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) gam[(i * g.n + j) * g.n + k] = retrunc(g.gamma(i, j, k), tr);

  std::vector<Series<S>> parts;  // phi_a per component, parts[a*n+i]
  parts.assign(static_cast<std::size_t>(tr.ky + 1) * g.n, Series<S>::zero(g.n, tr));
  for (int i = 0; i < g.n; ++i) {
    parts[0 * g.n + i] = Series<S>::gen(g.n, tr, Var::X, i);
    if (tr.ky >= 1) parts[1 * g.n + i] = Series<S>::gen(g.n, tr, Var::Y, i);
  }

  for (int k = 2; k <= tr.ky; ++k) {
    // psi^j = sum_{a<k} a phi_a^j
    std::vector<Series<S>> psi(g.n, Series<S>::zero(g.n, tr));
    for (int j = 0; j < g.n; ++j)
      for (int a = 1; a < k; ++a) psi[j] = psi[j] + scalar<S>::from_ratio(a, 1) * parts[a * g.n + j];
    for (int i = 0; i < g.n; ++i) {
      Series<S> acc = Series<S>::zero(g.n, tr);
      for (int j = 0; j < g.n; ++j)
        for (int l = 0; l < g.n; ++l) {
          Series<S> gval = subst_x(gam[(i * g.n + j) * g.n + l], em.phi);
          acc = acc + gval * psi[j] * psi[l];
        }
      Series<S> ck = scalar<S>::from_ratio(-1, k * (k - 1)) * ypart(acc, k);
      parts[k * g.n + i] = ck;
      em.phi[i] = em.phi[i] + ck;
    }
  }

  // the recursion stops at the fiber cap without dropping anything, so the
  // window must record the construction depth by hand
  for (int i = 0; i < g.n; ++i) em.phi[i].resy = std::min(em.phi[i].resy, tr.ky);

  if (plain) return em;

  for (int m = 3; m <= tr.ky; ++m) {
    MatSer<S> G = pairing_defect(g, em);
    bool any = false;
    std::vector<Series<S>> lam(g.n, Series<S>::zero(g.n, tr));
    for (int a = 0; a < g.n; ++a) {
      Series<S> acc = Series<S>::zero(g.n, tr);
      for (int b = 0; b < g.n; ++b) acc = acc + ypart(G.at(a, b), m - 1) * Series<S>::gen(g.n, tr, Var::Y, b);
      if (!acc.t.empty()) any = true;
      lam[a] = scalar<S>::from_ratio(-1, m + 1) * acc;
    }
    if (!any) continue;
    for (int i = 0; i < g.n; ++i) {
      Series<S> d = Series<S>::zero(g.n, tr);
      for (int a = 0; a < g.n; ++a) d = d + g.Oi.at(i, a) * lam[a];
      em.phi[i] = em.phi[i] + d;
    }
  }
  return em;
}

}  // namespace rw
