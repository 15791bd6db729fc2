#pragma once
#include <vector>

#include "rw/series.hh"

namespace rw {

// Form-valued derivation in the fiber directions:
//   D = sum_k comp[k] d/dy^k
// with comp[k] a series that carries its dx/dxb factors explicitly.
// Components of fixed form degree are extracted via component().
template <class S>
struct DerivationForm {
  int n = 0;
  Trunc tr{};
  std::vector<Series<S>> comp;

  DerivationForm() = default;
  DerivationForm(int n_, Trunc tr_) : n(n_), tr(tr_), comp(n_, Series<S>(n_, tr_)) {}

  bool is_zero() const {
    for (auto& s : comp)
      if (!s.is_zero()) return false;
    return true;
  }

  // form parity of the coefficients (derivations of mixed parity are not used)
  int parity() const {
    for (auto& s : comp)
      for (auto& [m, c] : s.t) return m.form_degree() & 1;
    return 0;
  }

  Series<S> apply(const Series<S>& a) const {
    Series<S> r(n, tr);
    for (int k = 0; k < n; ++k) r = r + comp[k] * derive(a, Var::Y, k);
    return r;
  }

  // form-degree-0 part of the dx^j (bar=false) or dxb^j (bar=true)
  // coefficient of comp[k]
  Series<S> component(bool bar, int j, int k) const {
    int bit = bar ? NMAX + j : j;
    Series<S> c = iota(bit, comp[k]);
    Series<S> r(n, tr);
    r.resx = c.resx;
    r.resy = c.resy;
    for (auto& [m, v] : c.t)
      if (m.form_degree() == 0) r.add_term(m, v);
    return r;
  }

  friend DerivationForm operator+(const DerivationForm& a, const DerivationForm& b) {
    DerivationForm r(a.n, a.tr);
    for (int k = 0; k < a.n; ++k) r.comp[k] = a.comp[k] + b.comp[k];
    return r;
  }
  friend DerivationForm operator-(const DerivationForm& a, const DerivationForm& b) {
    DerivationForm r(a.n, a.tr);
    for (int k = 0; k < a.n; ++k) r.comp[k] = a.comp[k] - b.comp[k];
    return r;
  }
  friend DerivationForm operator*(const S& c, const DerivationForm& a) {
    DerivationForm r(a.n, a.tr);
    for (int k = 0; k < a.n; ++k) r.comp[k] = c * a.comp[k];
    return r;
  }
};

// graded commutator [A,B] of form-valued fiber derivations
template <class S>
DerivationForm<S> commutator(const DerivationForm<S>& a, const DerivationForm<S>& b) {
  DerivationForm<S> r(a.n, a.tr);
  int sg = (a.parity() & b.parity()) ? 1 : -1;  // odd*odd anticommutator sign folds to +
  for (int m = 0; m < a.n; ++m) {
    Series<S> s(a.n, a.tr);
    for (int k = 0; k < a.n; ++k) {
      s = s + a.comp[k] * derive(b.comp[m], Var::Y, k);
      Series<S> t = b.comp[k] * derive(a.comp[m], Var::Y, k);
      s = (sg > 0) ? s + t : s - t;
    }
    r.comp[m] = s;
  }
  return r;
}

// exterior differential d_x + d_xb applied to the coefficients
template <class S>
DerivationForm<S> d_full(const DerivationForm<S>& a) {
  DerivationForm<S> r(a.n, a.tr);
  for (int k = 0; k < a.n; ++k) r.comp[k] = d_full(a.comp[k]);
  return r;
}

}  // namespace rw
