#pragma once
#include <algorithm>
#include <climits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rw/mono.hh"
#include "rw/scalar.hh"

namespace rw {

inline double drop_tolerance = 1e-13;

// Resolution sentinel: nothing has ever been dropped below this series' caps.
inline constexpr int RES_EXACT = 1 << 20;

// Raise a window by a valuation offset; INT_MAX valuation means the channel
// carrying this error is absent altogether.
inline int res_shift(int val, int res) {
  if (res >= RES_EXACT || val == INT_MAX) return RES_EXACT;
  int s = val + res;
  return s >= RES_EXACT ? RES_EXACT : s;
}

struct Trunc {
  int kx = 4;     // cap on total base order (x plus xb)
  int ky = 4;     // cap on total fiber order (y)
  int kform = 8;  // cap on form degree
  friend bool operator==(const Trunc&, const Trunc&) = default;
};

template <class S>
struct Series {
  int n = 1;
  Trunc tr{};
  int resx = RES_EXACT;  // base orders <= resx carry exact coefficients
  int resy = RES_EXACT;  // fiber orders <= resy carry exact coefficients
  std::map<Mono, S> t;

  Series() = default;
  Series(int n_, Trunc tr_) : n(n_), tr(tr_) {}

  static Series zero(int n, Trunc tr) { return Series(n, tr); }
  static Series constant(int n, Trunc tr, const S& c) {
    Series s(n, tr);
    if (!scalar<S>::is_zero(c, drop_tolerance)) s.t[Mono{}] = c;
    return s;
  }
  static Series one(int n, Trunc tr) { return constant(n, tr, S(1)); }
  static Series gen(int n, Trunc tr, Var v, int i) {
    Series s(n, tr);
    Mono m;
    if (v == Var::X) m.x[i] = 1;
    else if (v == Var::XB) m.xb[i] = 1;
    else m.y[i] = 1;
    s.t[m] = S(1);
    return s;
  }
  static Series odd_gen(int n, Trunc tr, int bit) {
    Series s(n, tr);
    Mono m;
    m.odd = uint16_t(1u << bit);
    s.t[m] = S(1);
    return s;
  }

  bool is_zero() const { return t.empty(); }

  const S coeff(const Mono& m) const {
    auto it = t.find(m);
    return it == t.end() ? S(0) : it->second;
  }

  // lowest base/fiber order among retained terms (INT_MAX when none)
  int base_val() const {
    int v = INT_MAX;
    for (auto& [m, c] : t) v = std::min(v, m.base_order());
    return v;
  }
  int fiber_val() const {
    int v = INT_MAX;
    for (auto& [m, c] : t) v = std::min(v, m.fiber_order());
    return v;
  }

  // insert coeff*m, respecting caps and resolution bookkeeping
  void add_term(const Mono& m, const S& c) {
    if (scalar<S>::is_zero(c, 0.0)) return;
    bool real = !scalar<S>::is_zero(c, drop_tolerance);
    if (m.base_order() > tr.kx) {
      if (real) resx = std::min(resx, tr.kx);
      return;
    }
    if (m.fiber_order() > tr.ky) {
      if (real) resy = std::min(resy, tr.ky);
      return;
    }
    if (m.form_degree() > tr.kform) {
      // an overflowing form factor hides content at this monomial's even
      // orders; retire the fiber window below it so the loss is visible
      if (real) resy = std::min(resy, m.fiber_order() - 1);
      return;
    }
    auto [it, fresh] = t.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (scalar<S>::is_zero(it->second, drop_tolerance)) t.erase(it);
    }
  }

  void prune() {
    for (auto it = t.begin(); it != t.end();) {
      if (scalar<S>::is_zero(it->second, drop_tolerance)) it = t.erase(it);
      else ++it;
    }
  }

  friend Series operator+(const Series& a, const Series& b) {
    check_shape(a, b);
    Series r = a;
    r.resx = std::min(a.resx, b.resx);
    r.resy = std::min(a.resy, b.resy);
    for (auto& [m, c] : b.t) r.add_term(m, c);
    return r;
  }
  friend Series operator-(const Series& a, const Series& b) {
    check_shape(a, b);
    Series r = a;
    r.resx = std::min(a.resx, b.resx);
    r.resy = std::min(a.resy, b.resy);
    for (auto& [m, c] : b.t) r.add_term(m, -c);
    return r;
  }
  friend Series operator-(const Series& a) {
    Series r = a;
    for (auto& [m, c] : r.t) c = -c;
    return r;
  }
  friend Series operator*(const S& c, const Series& a) {
    Series r = a;
    if (scalar<S>::is_zero(c, 0.0)) { r.t.clear(); return r; }
    for (auto& [m, v] : r.t) v = c * v;
    r.prune();
    return r;
  }
  friend Series operator*(const Series& a, const Series& b) {
    check_shape(a, b);
    Series r(a.n, a.tr);
    // Window of the product. Content dropped from one factor reaches a
    // combined order only after being shifted up by the other factor's lowest
    // retained order, and the product of two dropped tails starts above the
    // sum of both windows.
    int rx = std::min({res_shift(a.base_val(), b.resx), res_shift(b.base_val(), a.resx),
                       (a.resx < RES_EXACT && b.resx < RES_EXACT) ? a.resx + b.resx + 1 : RES_EXACT});
    int ry = std::min({res_shift(a.fiber_val(), b.resy), res_shift(b.fiber_val(), a.resy),
                       (a.resy < RES_EXACT && b.resy < RES_EXACT) ? a.resy + b.resy + 1 : RES_EXACT});
    // A base-dropped tail times a fiber-dropped tail can sit at any mix of
    // orders above (sx, sy); keep the window inside one of the two source
    // windows so that cross product stays outside it.
    auto cross_guard = [&](int sx, int sy) {
      if (sx >= RES_EXACT || sy >= RES_EXACT) return;
      if (rx <= sx || ry <= sy) return;
      if (rx - sx <= ry - sy) rx = sx;
      else ry = sy;
    };
    cross_guard(a.resx, b.resy);
    cross_guard(b.resx, a.resy);
    r.resx = rx;
    r.resy = ry;
    for (auto& [ma, ca] : a.t) {
      for (auto& [mb, cb] : b.t) {
        uint16_t om = 0;
        int sg = merge_odd(ma.odd, mb.odd, om);
        if (sg == 0) continue;
        Mono m;
        bool over = false;
        for (int i = 0; i < NMAX; ++i) {
          int vx = ma.x[i] + mb.x[i], vb = ma.xb[i] + mb.xb[i], vy = ma.y[i] + mb.y[i];
          if (vx > 255 || vb > 255 || vy > 255) { over = true; break; }
          m.x[i] = uint8_t(vx);
          m.xb[i] = uint8_t(vb);
          m.y[i] = uint8_t(vy);
        }
        if (over) throw std::overflow_error("monomial exponent overflow");
        m.odd = om;
        S c = ca * cb;
        if (sg < 0) c = -c;
        r.add_term(m, c);
      }
    }
    r.prune();
    return r;
  }

  static void check_shape(const Series& a, const Series& b) {
    if (a.n != b.n || !(a.tr == b.tr))
      throw std::invalid_argument("series dimension/truncation mismatch");
  }
};

// formal partial derivative w.r.t. an even generator
template <class S>
Series<S> derive(const Series<S>& a, Var v, int i) {
  Series<S> r(a.n, a.tr);
  bool base = (v != Var::Y);
  r.resx = a.resx == RES_EXACT ? RES_EXACT : (base ? a.resx - 1 : a.resx);
  r.resy = a.resy == RES_EXACT ? RES_EXACT : (base ? a.resy : a.resy - 1);
  for (auto& [m, c] : a.t) {
    uint8_t p = (v == Var::X) ? m.x[i] : (v == Var::XB) ? m.xb[i] : m.y[i];
    if (p == 0) continue;
    Mono d = m;
    if (v == Var::X) d.x[i] = uint8_t(p - 1);
    else if (v == Var::XB) d.xb[i] = uint8_t(p - 1);
    else d.y[i] = uint8_t(p - 1);
    r.add_term(d, S(int(p)) * c);
  }
  return r;
}

// left wedge by the odd generator with the given bit
template <class S>
Series<S> wedge(int bit, const Series<S>& a) {
  Series<S> r(a.n, a.tr);
  r.resx = a.resx;
  r.resy = a.resy;
  for (auto& [m, c] : a.t) {
    if (m.odd & (1u << bit)) continue;
    Mono w = m;
    w.odd = uint16_t(m.odd | (1u << bit));
    int sg = left_insert_sign(m.odd, bit);
    r.add_term(w, sg < 0 ? S(0) - c : c);
  }
  return r;
}

// interior product (left odd derivation) removing the given odd bit
template <class S>
Series<S> iota(int bit, const Series<S>& a) {
  Series<S> r(a.n, a.tr);
  r.resx = a.resx;
  r.resy = a.resy;
  for (auto& [m, c] : a.t) {
    if (!(m.odd & (1u << bit))) continue;
    Mono w = m;
    w.odd = uint16_t(m.odd & ~(1u << bit));
    int sg = left_insert_sign(w.odd, bit);
    r.add_term(w, sg < 0 ? S(0) - c : c);
  }
  return r;
}

// holomorphic Dolbeault differential: sum_i dx^i ^ d/dx^i
template <class S>
Series<S> d_x(const Series<S>& a) {
  Series<S> r(a.n, a.tr);
  for (int i = 0; i < a.n; ++i) r = r + wedge(i, derive(a, Var::X, i));
  return r;
}

// antiholomorphic Dolbeault differential: sum_i dxb^i ^ d/dxb^i
template <class S>
Series<S> d_xb(const Series<S>& a) {
  Series<S> r(a.n, a.tr);
  for (int i = 0; i < a.n; ++i) r = r + wedge(NMAX + i, derive(a, Var::XB, i));
  return r;
}

template <class S>
Series<S> d_full(const Series<S>& a) {
  return d_x(a) + d_xb(a);
}

// substitute x^i -> repl[i] (repl in the same ring); xb, y, odd untouched
template <class S>
Series<S> subst_x(const Series<S>& a, const std::vector<Series<S>>& repl) {
  Series<S> r(a.n, a.tr);
  std::vector<std::vector<Series<S>>> pow(a.n);
  for (auto& [m, c] : a.t) {
    Series<S> term(a.n, a.tr);
    Mono rest = m;
    for (int i = 0; i < NMAX; ++i) rest.x[i] = 0;
    term.t[rest] = c;
    for (int i = 0; i < a.n; ++i) {
      int p = m.x[i];
      if (p == 0) continue;
      auto& pws = pow[i];
      if (pws.empty()) pws.push_back(repl[i]);
      while ((int)pws.size() < p) pws.push_back(pws.back() * repl[i]);
      term = term * pws[p - 1];
    }
    r = r + term;
  }
  // Fiber orders dropped from a stay fiber orders of the composite, but a
  // dropped base order p re-enters at any base/fiber mix of combined order
  // >= p when every substitute starts at combined order >= 1; a substitute
  // reaching order 0 erases the window entirely.
  if (a.resy < RES_EXACT) r.resy = std::min(r.resy, a.resy);
  if (a.resx < RES_EXACT) {
    int tv = INT_MAX;
    for (auto& s : repl) {
      for (auto& [m, c] : s.t) tv = std::min(tv, m.base_order() + m.fiber_order());
      if (s.resx < RES_EXACT) tv = std::min(tv, s.resx + 1);
      if (s.resy < RES_EXACT) tv = std::min(tv, s.resy + 1);
    }
    if (tv == 0) {
      r.resx = r.resy = -1;
    } else if (r.resx > a.resx - std::max(r.resy, 0)) {
      r.resy = std::min(r.resy, a.resx);
      r.resx = std::min(r.resx, std::max(-1, a.resx - std::max(r.resy, 0)));
    }
  }
  return r;
}

// max coefficient magnitude over fully resolved monomials
template <class S>
double resolved_norm(const Series<S>& a) {
  double m = 0;
  for (auto& [mo, c] : a.t)
    if (mo.base_order() <= a.resx && mo.fiber_order() <= a.resy)
      m = std::max(m, scalar<S>::mag(c));
  return m;
}

template <class S>
double full_norm(const Series<S>& a) {
  double m = 0;
  for (auto& [mo, c] : a.t) m = std::max(m, scalar<S>::mag(c));
  return m;
}

// exact equality of coefficient tables (float mode: within tol)
template <class S>
bool series_eq(const Series<S>& a, const Series<S>& b, double tol = 0.0) {
  Series<S> d = a - b;
  for (auto& [m, c] : d.t)
    if (!scalar<S>::is_zero(c, tol)) return false;
  return true;
}

template <class S>
std::string to_string(const Series<S>& a) {
  if (a.t.empty()) return "0";
  std::string out;
  for (auto& [m, c] : a.t) {
    if (!out.empty()) out += " + ";
    out += "(" + scalar<S>::str(c) + ")";
    for (int i = 0; i < a.n; ++i)
      for (int k = 0; k < m.x[i]; ++k) out += " " + gen_name(Var::X, i);
    for (int i = 0; i < a.n; ++i)
      for (int k = 0; k < m.xb[i]; ++k) out += " " + gen_name(Var::XB, i);
    for (int i = 0; i < a.n; ++i)
      for (int k = 0; k < m.y[i]; ++k) out += " " + gen_name(Var::Y, i);
    for (int b = 0; b < 2 * NMAX; ++b)
      if (m.odd & (1u << b)) out += " " + odd_name(b);
  }
  return out;
}

}  // namespace rw
