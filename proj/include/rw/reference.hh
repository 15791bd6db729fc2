#pragma once

// Closed-form reference expressions for the low orders of the exponential
// map, the induced connection, and the flat Weyl-bundle connection, frozen
// from the exact-rational convention fits (see tools/convfit.cc).

#include "rw/geometry.hh"
#include "rw/weyl.hh"

namespace rw {

// -(1/2) Gamma^i_{jk} y^j y^k
template <class S>
Series<S> exp_quadratic_reference(const GeometryJet<S>& g, const Trunc& tr, int i) {
  Series<S> acc = Series<S>::zero(g.n, tr);
  for (int j = 0; j < g.n; ++j)
    for (int k = 0; k < g.n; ++k)
      acc = acc + scalar<S>::from_ratio(-1, 2) * (retrunc(g.gamma(i, j, k), tr) * Series<S>::gen(g.n, tr, Var::Y, j) *
                                                  Series<S>::gen(g.n, tr, Var::Y, k));
  return acc;
}

// [-(1/6) d_c Gamma^i_{jk} + (1/3) Gamma^i_{mc} Gamma^m_{jk}
//  - (1/24) Rt^i_{cjk}] y^c y^j y^k
// with Rt^i_{cjk} = Oi^{bi} Om_{aj} R20(a,k|b,c).
template <class S>
Series<S> exp_cubic_reference(const GeometryJet<S>& g, const Trunc& tr, int i) {
  Series<S> acc = Series<S>::zero(g.n, tr);
  for (int c = 0; c < g.n; ++c)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        Series<S> coeff = scalar<S>::from_ratio(-1, 6) * retrunc(derive(g.gamma(i, j, k), Var::X, c), tr);
        for (int m = 0; m < g.n; ++m)
          coeff = coeff + scalar<S>::from_ratio(1, 3) *
                              (retrunc(g.gamma(i, m, c), tr) * retrunc(g.gamma(m, j, k), tr));
        Series<S> rt = Series<S>::zero(g.n, tr);
        for (int a = 0; a < g.n; ++a)
          for (int b = 0; b < g.n; ++b)
            rt = rt + (g.Oi.at(b, i) * g.Om.at(a, j)) * retrunc(curv20(g, a, k, b, c), tr);
        coeff = coeff + scalar<S>::from_ratio(-1, 24) * rt;
        acc = acc + coeff * (Series<S>::gen(g.n, tr, Var::Y, c) * Series<S>::gen(g.n, tr, Var::Y, j) *
                             Series<S>::gen(g.n, tr, Var::Y, k));
      }
  return acc;
}

// First curvature correction of the flat Weyl-bundle connection (the weight-3
// part of the solved element), in lowered form:
//   (1/8) dGamma_{ijk},r  - (1/8) dGamma_{ijr},k  yyy dx^k
// - (1/4) Gamma_{sir} Gamma_{pjk} Oi^{ps}        yyy dx^k
// - (1/6) dbar_{kb} Gamma_{rij}                  yyy dxb^kb
template <class S>
Series<S> weight3_reference(const GeometryJet<S>& g, const Trunc& tr) {
  int n = g.n;
  Series<S> acc = Series<S>::zero(n, tr);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < n; ++r) {
        Series<S> yyy = Series<S>::gen(n, tr, Var::Y, i) * Series<S>::gen(n, tr, Var::Y, j) *
                        Series<S>::gen(n, tr, Var::Y, r);
        for (int k = 0; k < n; ++k) {
          Series<S> coeff =
              scalar<S>::from_ratio(1, 8) * retrunc(derive(g.gamma_low(i, j, k), Var::X, r), tr) +
              scalar<S>::from_ratio(-1, 8) * retrunc(derive(g.gamma_low(i, j, r), Var::X, k), tr);
          for (int s = 0; s < n; ++s)
            for (int p = 0; p < n; ++p)
              coeff = coeff + (scalar<S>::from_ratio(-1, 4) * g.Oi.at(p, s)) *
                                  (retrunc(g.gamma_low(s, i, r), tr) * retrunc(g.gamma_low(p, j, k), tr));
          acc = acc + (coeff * yyy) * Series<S>::odd_gen(n, tr, k);
        }
        for (int kb = 0; kb < n; ++kb) {
          Series<S> coeff =
              scalar<S>::from_ratio(-1, 6) * retrunc(derive(g.gamma_low(r, i, j), Var::XB, kb), tr);
          acc = acc + (coeff * yyy) * Series<S>::odd_gen(n, tr, NMAX + kb);
        }
      }
  return acc;
}

}  // namespace rw
