#pragma once
#include <stdexcept>
#include <vector>

#include "rw/series.hh"

namespace rw {

// dense numeric n x n matrix over the scalar field
template <class S>
struct SqMat {
  int n = 0;
  std::vector<S> a;
  SqMat() = default;
  explicit SqMat(int n_) : n(n_), a(size_t(n_) * n_, S(0)) {}
  S& at(int i, int j) { return a[size_t(i) * n + j]; }
  const S& at(int i, int j) const { return a[size_t(i) * n + j]; }
  static SqMat id(int n) {
    SqMat m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = S(1);
    return m;
  }
};

template <class S>
SqMat<S> mat_mul(const SqMat<S>& a, const SqMat<S>& b) {
  SqMat<S> r(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int k = 0; k < a.n; ++k)
      for (int j = 0; j < a.n; ++j) r.at(i, j) += a.at(i, k) * b.at(k, j);
  return r;
}

// Gauss-Jordan over the scalar field; works in float and exact modes
template <class S>
SqMat<S> mat_inverse(const SqMat<S>& m) {
  int n = m.n;
  SqMat<S> a = m, inv = SqMat<S>::id(n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    double best = 0;
    for (int r = col; r < n; ++r) {
      double mg = scalar<S>::mag(a.at(r, col));
      if (mg > best) { best = mg; piv = r; }
    }
    if (piv < 0 || scalar<S>::is_zero(a.at(piv, col), 0.0))
      throw std::domain_error("not invertible at basepoint");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a.at(piv, j), a.at(col, j));
        std::swap(inv.at(piv, j), inv.at(col, j));
      }
    S d = a.at(col, col);
    for (int j = 0; j < n; ++j) {
      a.at(col, j) = a.at(col, j) / d;
      inv.at(col, j) = inv.at(col, j) / d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      S f = a.at(r, col);
      if (scalar<S>::is_zero(f, 0.0)) continue;
      for (int j = 0; j < n; ++j) {
        a.at(r, j) = a.at(r, j) - f * a.at(col, j);
        inv.at(r, j) = inv.at(r, j) - f * inv.at(col, j);
      }
    }
  }
  return inv;
}

// dense n x n matrix with series entries
template <class S>
struct MatSer {
  int n = 0;
  Trunc tr{};
  std::vector<Series<S>> e;
  MatSer() = default;
  MatSer(int n_, Trunc tr_) : n(n_), tr(tr_), e(size_t(n_) * n_, Series<S>(n_, tr_)) {}
  Series<S>& at(int i, int j) { return e[size_t(i) * n + j]; }
  const Series<S>& at(int i, int j) const { return e[size_t(i) * n + j]; }
  static MatSer id(int n, Trunc tr) {
    MatSer m(n, tr);
    for (int i = 0; i < n; ++i) m.at(i, i) = Series<S>::one(n, tr);
    return m;
  }
};

template <class S>
MatSer<S> matser_mul(const MatSer<S>& a, const MatSer<S>& b) {
  MatSer<S> r(a.n, a.tr);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) {
      Series<S> s(a.n, a.tr);
      for (int k = 0; k < a.n; ++k) s = s + a.at(i, k) * b.at(k, j);
      r.at(i, j) = s;
    }
  return r;
}

template <class S>
MatSer<S> matser_add(const MatSer<S>& a, const MatSer<S>& b) {
  MatSer<S> r(a.n, a.tr);
  for (size_t i = 0; i < a.e.size(); ++i) r.e[i] = a.e[i] + b.e[i];
  return r;
}

template <class S>
bool matser_is_zero(const MatSer<S>& a) {
  for (auto& s : a.e)
    if (!s.is_zero()) return false;
  return true;
}

// inverse by geometric series on the positive-order remainder:
// M = M0 + N, M^-1 = sum_k (-M0^-1 N)^k M0^-1
template <class S>
MatSer<S> matser_invert(const MatSer<S>& m) {
  int n = m.n;
  SqMat<S> m0(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m0.at(i, j) = m.at(i, j).coeff(Mono{});
  SqMat<S> m0inv = mat_inverse(m0);

  MatSer<S> m0i(n, m.tr), nn(n, m.tr);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m0i.at(i, j) = Series<S>::constant(n, m.tr, m0inv.at(i, j));
      Series<S> rem = m.at(i, j);
      rem.t.erase(Mono{});
      nn.at(i, j) = rem;
    }
  // propagate the remainder's resolution data
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      nn.at(i, j).resx = m.at(i, j).resx;
      nn.at(i, j).resy = m.at(i, j).resy;
    }

  MatSer<S> step(n, m.tr);  // -M0^-1 N
  {
    MatSer<S> t = matser_mul(m0i, nn);
    for (size_t i = 0; i < t.e.size(); ++i) step.e[i] = -t.e[i];
  }
  MatSer<S> acc = m0i, pow = m0i;
  int guard = m.tr.kx + m.tr.ky + m.tr.kform + 2;
  for (int k = 0; k < guard; ++k) {
    pow = matser_mul(step, pow);
    if (matser_is_zero(pow)) break;
    acc = matser_add(acc, pow);
  }
  return acc;
}

}  // namespace rw
