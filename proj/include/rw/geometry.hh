#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rw/matrix.hh"
#include "rw/series.hh"

namespace rw {

enum class GeoMode { flat, generic, compatible, hyper };

inline const char* geo_mode_name(GeoMode m) {
  switch (m) {
    case GeoMode::flat: return "flat";
    case GeoMode::generic: return "generic";
    case GeoMode::compatible: return "compatible";
    case GeoMode::hyper: return "hyper";
  }
  return "?";
}

inline GeoMode geo_mode_parse(const std::string& s) {
  if (s == "flat") return GeoMode::flat;
  if (s == "generic") return GeoMode::generic;
  if (s == "compatible") return GeoMode::compatible;
  if (s == "hyper") return GeoMode::hyper;
  throw std::invalid_argument("unknown geometry mode: " + s);
}

// Base-space jet data: a constant symplectic pairing on the fiber directions
// together with connection coefficients given as polynomials in (x, xb).
// Gamma is stored raised, Gamma^i_{jk}, symmetric in (j,k); entries live in a
// y-free ring so callers re-truncate into whatever ring an operation needs.
template <class S>
struct GeometryJet {
  int n = 0;
  int K = 0;  // polynomial order of the stored jets in (x, xb)
  GeoMode mode = GeoMode::flat;
  std::uint64_t seed = 0;
  SqMat<S> Om, Oi;             // pairing and its inverse, constant
  std::vector<Series<S>> Gam;  // n^3 entries, index (i*n + j)*n + k

  const Series<S>& gamma(int i, int j, int k) const { return Gam[(i * n + j) * n + k]; }
  Series<S>& gamma(int i, int j, int k) { return Gam[(i * n + j) * n + k]; }

  // Gamma_{ijk} = Om_{im} Gamma^m_{jk}
  Series<S> gamma_low(int i, int j, int k) const {
    Series<S> acc = Series<S>::zero(n, Gam.empty() ? Trunc{} : Gam[0].tr);
    for (int m = 0; m < n; ++m) acc = acc + Om.at(i, m) * gamma(m, j, k);
    return acc;
  }
};

namespace detail {

// Dyadic draws k/128 with k in [-128, 128]: exactly representable in both
// scalar modes, so the float and rational geometries coincide.
template <class S>
S draw_coeff(std::mt19937_64& eng, bool complex_part = true) {
  auto pick = [&]() {
    std::int64_t k = static_cast<std::int64_t>(eng() % 257) - 128;
    return static_cast<double>(k) / 128.0;
  };
  double re = pick();
  double im = complex_part ? pick() : 0.0;
  return scalar<S>::from_parts(re, im);
}

// Random polynomial in the base variables (holomorphic iff xb_only is false
// and x_ok true, etc.), total degree between 0 and K.
template <class S>
Series<S> draw_base_poly(int n, const Trunc& tr, int K, std::mt19937_64& eng, bool use_x, bool use_xb) {
  Series<S> out = Series<S>::zero(n, tr);
  // enumerate exponent tuples with total degree <= K over the allowed block
  std::vector<Mono> monos;
  Mono unit{};
  std::vector<int> slots;  // 0..n-1 -> x_i, n..2n-1 -> xb_{i-n}
  if (use_x)
    for (int i = 0; i < n; ++i) slots.push_back(i);
  if (use_xb)
    for (int i = 0; i < n; ++i) slots.push_back(n + i);
  std::vector<int> expo(slots.size(), 0);
  // recursive enumeration
  auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos == slots.size()) {
      Mono m{};
      for (std::size_t q = 0; q < slots.size(); ++q) {
        if (slots[q] < n)
          m.x[slots[q]] = static_cast<std::uint8_t>(expo[q]);
        else
          m.xb[slots[q] - n] = static_cast<std::uint8_t>(expo[q]);
      }
      monos.push_back(m);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      expo[pos] = e;
      self(self, pos + 1, left - e);
    }
    expo[pos] = 0;
  };
  if (!slots.empty())
    rec(rec, 0, K);
  else
    monos.push_back(unit);
  for (const Mono& m : monos) out.add_term(m, draw_coeff<S>(eng));
  return out;
}

}  // namespace detail

// Darboux pairing: Om = blockdiag([[0,1],[-1,0]], ...). Requires even n.
template <class S>
SqMat<S> darboux(int n) {
  if (n % 2 != 0) throw std::invalid_argument("antisymmetric nondegenerate pairing requires even dimension");
  SqMat<S> om(n);
  for (int a = 0; a + 1 < n; a += 2) {
    om.at(a, a + 1) = scalar<S>::from_ratio(1, 1);
    om.at(a + 1, a) = scalar<S>::from_ratio(-1, 1);
  }
  return om;
}

// mode=flat       : Gamma = 0 (any n >= 1; Om is Darboux when n is even, and
//                   is omitted from play otherwise — flat ops never invert it).
// mode=generic    : random Gamma^i_{jk} symmetric in (j,k) only.
// mode=compatible : random lowered jets fully symmetrized over (i,j,k), then
//                   raised; equivalent to torsion-free + parallel pairing.
// mode=hyper      : Gamma^i_{jk}(xb) = sum_a u_a^i v_aj v_ak h_a(xb) with
//                   v_a = Om u_a and span{u_a} isotropic; exactly torsion-free,
//                   pairing-parallel, and (2,0)-flat, with nonzero dbar-jet.
template <class S>
GeometryJet<S> make_geometry(int n, int K, std::uint64_t seed, GeoMode mode) {
  if (n < 1 || n > NMAX) throw std::invalid_argument("dimension out of range");
  if (K < 0) throw std::invalid_argument("negative jet order");
  GeometryJet<S> g;
  g.n = n;
  g.K = K;
  g.mode = mode;
  g.seed = seed;
  Trunc tr{K, 0, 2 * NMAX};
  bool need_om = (mode != GeoMode::flat);
  if (need_om && n % 2 != 0)
    throw std::invalid_argument("antisymmetric nondegenerate pairing requires even dimension");
  if (n % 2 == 0) {
    g.Om = darboux<S>(n);
    g.Oi = mat_inverse(g.Om);
  } else {
    g.Om = SqMat<S>::id(n);  // placeholder, unused in flat mode
    g.Oi = SqMat<S>::id(n);
  }
  g.Gam.assign(static_cast<std::size_t>(n) * n * n, Series<S>::zero(n, tr));
  std::mt19937_64 eng(seed);

  if (mode == GeoMode::flat) return g;

  if (mode == GeoMode::generic) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
          Series<S> p = detail::draw_base_poly<S>(n, tr, K, eng, true, true);
          g.gamma(i, j, k) = p;
          if (k != j) g.gamma(i, k, j) = p;
        }
    return g;
  }

  if (mode == GeoMode::compatible) {
    // draw lowered G_{ijk} for i<=j<=k, replicate to all orderings, raise
    std::vector<Series<S>> low(static_cast<std::size_t>(n) * n * n, Series<S>::zero(n, tr));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k) {
          Series<S> p = detail::draw_base_poly<S>(n, tr, K, eng, true, true);
          int idx[3] = {i, j, k};
          int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
          for (auto& pr : perm)
            low[(static_cast<std::size_t>(idx[pr[0]]) * n + idx[pr[1]]) * n + idx[pr[2]]] = p;
        }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          Series<S> acc = Series<S>::zero(n, tr);
          for (int q = 0; q < n; ++q) acc = acc + g.Oi.at(i, q) * low[(static_cast<std::size_t>(q) * n + j) * n + k];
          g.gamma(i, j, k) = acc;
        }
    return g;
  }

  // hyper
  int rank = n / 2;
  for (int a = 0; a < rank; ++a) {
    // u_a drawn from the Lagrangian span{e_0, e_2, ...} of the Darboux pairing
    std::vector<S> u(n, S{});
    for (int b = 0; b < n; b += 2) u[b] = detail::draw_coeff<S>(eng);
    std::vector<S> v(n, S{});
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < n; ++m) v[i] = v[i] + g.Om.at(i, m) * u[m];
    Series<S> h = detail::draw_base_poly<S>(n, tr, K, eng, false, true);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) g.gamma(i, j, k) = g.gamma(i, j, k) + (u[i] * v[j] * v[k]) * h;
  }
  return g;
}

// Additive perturbation of the raised jets, symmetric in (j,k), scaled by a
// dyadic eps; used for negative controls. Destroys compatibility in general.
template <class S>
GeometryJet<S> perturb_geometry(const GeometryJet<S>& g, double eps, std::uint64_t seed) {
  GeometryJet<S> out = g;
  std::mt19937_64 eng(seed);
  S e = scalar<S>::from_parts(eps, 0.0);
  Trunc tr = g.Gam[0].tr;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = j; k < g.n; ++k) {
        Series<S> p = e * detail::draw_base_poly<S>(g.n, tr, g.K, eng, true, true);
        out.gamma(i, j, k) = out.gamma(i, j, k) + p;
        if (k != j) out.gamma(i, k, j) = out.gamma(i, k, j) + p;
      }
  return out;
}

// Re-truncate a series into another ring (same dimension). Terms beyond the
// new caps drop with the usual resolution bookkeeping.
template <class S>
Series<S> retrunc(const Series<S>& a, const Trunc& tr) {
  Series<S> out = Series<S>::zero(a.n, tr);
  out.resx = a.resx;
  out.resy = a.resy;
  for (const auto& [m, c] : a.t) out.add_term(m, c);
  return out;
}

// (2,0) curvature of the connection: R^a_{k|bc} antisymmetric in (b,c),
//   R = d_b Gamma^a_{ck} - d_c Gamma^a_{bk} + Gamma^a_{bp}Gamma^p_{ck}
//                                           - Gamma^a_{cp}Gamma^p_{bk}.
template <class S>
Series<S> curv20(const GeometryJet<S>& g, int a, int k, int b, int c) {
  // a product of two degree-K jets has degree 2K; widen past the storage ring
  // so the quadratic terms stay exact, and let callers re-truncate
  Trunc wide{2 * g.K, 0, 2 * NMAX};
  auto w = [&](const Series<S>& s) { return retrunc(s, wide); };
  Series<S> r = w(derive(g.gamma(a, c, k), Var::X, b)) - w(derive(g.gamma(a, b, k), Var::X, c));
  for (int p = 0; p < g.n; ++p)
    r = r + w(g.gamma(a, b, p)) * w(g.gamma(p, c, k)) - w(g.gamma(a, c, p)) * w(g.gamma(p, b, k));
  return r;
}

// (1,1) jet: A^i_{jk|lb} = d_{xb^lb} Gamma^i_{jk}, symmetric in (j,k).
template <class S>
Series<S> curv11(const GeometryJet<S>& g, int i, int j, int k, int lb) {
  return derive(g.gamma(i, j, k), Var::XB, lb);
}

// Value of the (1,1) jet at the basepoint, lowered: Om_{im} A^m_{jk|lb}(0).
template <class S>
S atiyah0_low(const GeometryJet<S>& g, int i, int j, int k, int lb) {
  S acc{};
  Mono unit{};
  for (int m = 0; m < g.n; ++m) acc = acc + g.Om.at(i, m) * curv11(g, m, j, k, lb).coeff(unit);
  return acc;
}

// Parallel-pairing defect: with constant Om this is
//   Gamma_{jki} - Gamma_{ikj}   (lowered),
// which vanishes iff the lowered jets are fully symmetric.
template <class S>
double compat_residual(const GeometryJet<S>& g) {
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        Series<S> d = g.gamma_low(j, k, i) - g.gamma_low(i, k, j);
        worst = std::max(worst, resolved_norm(d));
      }
  return worst;
}

}  // namespace rw
