#pragma once

#include <array>
#include <vector>

#include "rw/derivation.hh"
#include "rw/geometry.hh"
#include "rw/expmap.hh"

namespace rw {

// dx^i d/dy^i as a derivation-valued one-form
template <class S>
DerivationForm<S> delta_form(int n, const Trunc& tr) {
  DerivationForm<S> d(n, tr);
  for (int i = 0; i < n; ++i) d.comp[i] = Series<S>::odd_gen(n, tr, i);
  return d;
}

// -dx^j Gamma^i_{kj} y^k d/dy^i
template <class S>
DerivationForm<S> connection_form(const GeometryJet<S>& g, const Trunc& tr) {
  DerivationForm<S> A(g.n, tr);
  for (int i = 0; i < g.n; ++i) {
    Series<S> acc = Series<S>::zero(g.n, tr);
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k)
        acc = acc - Series<S>::odd_gen(g.n, tr, j) * (retrunc(g.gamma(i, k, j), tr) * Series<S>::gen(g.n, tr, Var::Y, k));
    A.comp[i] = acc;
  }
  return A;
}

// delta(a) = dx^i wedge d a / d y^i
template <class S>
Series<S> delta_apply(const Series<S>& a) {
  Series<S> r(a.n, a.tr);
  for (int i = 0; i < a.n; ++i) r = r + wedge(i, derive(a, Var::Y, i));
  return r;
}

// delta_inv: y^i iota_{dx^i} scaled by 1/(p + r) per monomial, where p counts
// holomorphic form factors and r the fiber degree; kills the (0,0) part.
template <class S>
Series<S> delta_inv_apply(const Series<S>& a) {
  Series<S> out(a.n, a.tr);
  out.resx = a.resx;
  out.resy = res_shift(1, a.resy);
  std::uint16_t dx_mask = (1u << NMAX) - 1u;
  for (const auto& [m, c] : a.t) {
    int p = __builtin_popcount(m.odd & dx_mask);
    int r = m.fiber_order();
    if (p == 0) continue;  // nothing to contract (and p=r=0 is projected out)
    S norm = scalar<S>::from_ratio(1, p + r);
    for (int i = 0; i < a.n; ++i) {
      if (!(m.odd & (1u << i))) continue;
      Mono mm = m;
      mm.odd = static_cast<std::uint16_t>(m.odd & ~(1u << i));
      mm.y[i] += 1;
      int sg = left_insert_sign(m.odd, i);
      S cc = norm * c;
      if (sg < 0) cc = S{} - cc;
      out.add_term(mm, cc);
    }
  }
  return out;
}

// Classical Weyl bracket {a, b} = P^{pq} (da/dy^p)(db/dy^q), with the Poisson
// tensor P fixed relative to the pairing inverse by direction 'orient'.
template <class S>
Series<S> weyl_bracket(const GeometryJet<S>& g, const Series<S>& a, const Series<S>& b, int orient = +1) {
  Series<S> out(a.n, a.tr);
  for (int p = 0; p < a.n; ++p)
    for (int q = 0; q < a.n; ++q) {
      S w = g.Oi.at(p, q);
      if (orient < 0) w = S{} - w;
      if (scalar<S>::is_zero(w, 0.0)) continue;
      out = out + w * (derive(a, Var::Y, p) * derive(b, Var::Y, q));
    }
  return out;
}

// Derivation f -> {a, f}: component q is P^{pq} da/dy^p.
template <class S>
DerivationForm<S> bracket_derivation(const GeometryJet<S>& g, const Series<S>& a, int orient = +1) {
  DerivationForm<S> D(a.n, a.tr);
  for (int q = 0; q < a.n; ++q) {
    Series<S> acc = Series<S>::zero(a.n, a.tr);
    for (int p = 0; p < a.n; ++p) {
      S w = g.Oi.at(p, q);
      if (orient < 0) w = S{} - w;
      acc = acc + w * derive(a, Var::Y, p);
    }
    D.comp[q] = acc;
  }
  return D;
}

// Covariant differential on Weyl-algebra elements: d + connection action.
template <class S>
Series<S> nabla_apply(const GeometryJet<S>& g, const DerivationForm<S>& A, const Series<S>& a) {
  (void)g;
  return d_full(a) + A.apply(a);
}

// curvature of the plain connection as a derivation-valued two-form
template <class S>
DerivationForm<S> connection_curvature(const DerivationForm<S>& A) {
  DerivationForm<S> dA(A.n, A.tr);
  for (int i = 0; i < A.n; ++i) dA.comp[i] = d_full(A.comp[i]);
  S half = scalar<S>::from_ratio(1, 2);
  return dA + half * commutator(A, A);
}

// Quadratic Weyl element sourcing the connection curvature: kappa y^l Om_{li} F^i
// with kappa calibrated (exactly) so that {Q, -} equals the curvature action.
template <class S>
Series<S> curvature_element(const GeometryJet<S>& g, const DerivationForm<S>& F, int orient, long long knum,
                            long long kden) {
  Series<S> q = Series<S>::zero(g.n, F.tr);
  S kappa = scalar<S>::from_ratio(knum, kden);
  for (int l = 0; l < g.n; ++l)
    for (int i = 0; i < g.n; ++i) {
      S w = g.Om.at(l, i);
      if (scalar<S>::is_zero(w, 0.0)) continue;
      q = q + (kappa * w) * (Series<S>::gen(g.n, F.tr, Var::Y, l) * F.comp[i]);
    }
  (void)orient;
  return q;
}

template <class S>
struct FedosovResult {
  Series<S> I;              // weight >= 3 element of the Weyl bundle, one-form
  Series<S> Rw;             // curvature element
  DerivationForm<S> A;      // plain connection action
  DerivationForm<S> total;  // A - delta + {I, -}: the flat connection's form part
  int orient = +1;          // Poisson orientation used
  long long knum = -1, kden = 2;
};

// Solve I = delta_inv(Rw + nabla I + (1/2){I, I}) by weight iteration, having
// first calibrated the Poisson orientation and the curvature-element scale so
// that {Rw, -} reproduces the connection curvature exactly.
template <class S>
FedosovResult<S> fedosov_solve(const GeometryJet<S>& g, const Trunc& tr) {
  FedosovResult<S> out;
  out.A = connection_form(g, tr);
  DerivationForm<S> F = connection_curvature(out.A);

  // calibration: find orient and kappa with {Q,-} = F
  bool found = false;
  for (int orient : {+1, -1}) {
    for (long long num : {-1ll, 1ll}) {
      Series<S> q = curvature_element(g, F, orient, num, 2);
      DerivationForm<S> D = bracket_derivation(g, q, orient);
      double worst = 0;
      for (int i = 0; i < g.n; ++i) worst = std::max(worst, full_norm(D.comp[i] - F.comp[i]));
      if (worst == 0.0) {
        out.orient = orient;
        out.knum = num;
        out.kden = 2;
        out.Rw = q;
        found = true;
        break;
      }
    }
    if (found) break;
  }
  if (!found) {
    // fall back: fit kappa on the largest component pair is not needed in
    // practice; keep the default and let downstream residuals expose it
    out.Rw = curvature_element(g, F, out.orient, out.knum, out.kden);
  }

  Series<S> I = Series<S>::zero(g.n, tr);
  S half = scalar<S>::from_ratio(1, 2);
  int steps = tr.ky + 3;
  for (int it = 0; it < steps; ++it) {
    Series<S> rhs = out.Rw + nabla_apply(g, out.A, I) + half * weyl_bracket(g, I, I, out.orient);
    Series<S> next = delta_inv_apply(rhs);
    if (series_eq(I, next)) {
      I = next;
      break;
    }
    I = next;
  }
  // the fixed point is only iterated to the fiber cap; record that depth
  I.resy = std::min(I.resy, tr.ky);
  out.I = I;
  out.total = out.A - delta_form<S>(g.n, tr) + bracket_derivation(g, I, out.orient);
  return out;
}

// Fiber-degree slice of a derivation-valued form, optionally restricted to
// holomorphic or antiholomorphic form content.
template <class S>
DerivationForm<S> derivation_yslice(const DerivationForm<S>& D, int k) {
  DerivationForm<S> out(D.n, D.tr);
  for (int i = 0; i < D.n; ++i) out.comp[i] = ypart(D.comp[i], k);
  return out;
}

template <class S>
double fedosov_flatness(const FedosovResult<S>& f) {
  DerivationForm<S> dT(f.total.n, f.total.tr);
  for (int i = 0; i < f.total.n; ++i) dT.comp[i] = d_full(f.total.comp[i]);
  S half = scalar<S>::from_ratio(1, 2);
  DerivationForm<S> sq = dT + half * commutator(f.total, f.total);
  double worst = 0;
  for (int i = 0; i < f.total.n; ++i) worst = std::max(worst, resolved_norm(sq.comp[i]));
  return worst;
}

}  // namespace rw
