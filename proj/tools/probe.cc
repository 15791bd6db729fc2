#include <cstdio>

#include "rw/expmap.hh"
#include "rw/geometry.hh"
#include "rw/groth.hh"
#include "rw/reference.hh"
#include "rw/weyl.hh"

using S = rw::ratc;
using rw::Mono;
using rw::Series;
using rw::Trunc;
using rw::Var;

static void show(const char* tag, const Series<S>& s) {
  std::printf("%-14s res=(%d,%d) terms=%zu\n", tag, s.resx >= rw::RES_EXACT ? 99 : s.resx,
              s.resy >= rw::RES_EXACT ? 99 : s.resy, s.t.size());
}

static double inwin(const Series<S>& s) {
  double m = 0;
  for (auto& [mo, c] : s.t)
    if (mo.base_order() <= s.resx && mo.fiber_order() <= s.resy)
      m = std::max(m, rw::scalar<S>::mag(c));
  return m;
}

// max magnitude of small-window coefficients that differ between runs
static double mismatch(const Series<S>& small, const Series<S>& big) {
  double m = 0;
  for (auto& [mo, c] : small.t)
    if (mo.base_order() <= small.resx && mo.fiber_order() <= small.resy)
      m = std::max(m, rw::scalar<S>::mag(c - big.coeff(mo)));
  for (auto& [mo, c] : big.t)
    if (mo.base_order() <= small.resx && mo.fiber_order() <= small.resy &&
        small.t.find(mo) == small.t.end())
      m = std::max(m, rw::scalar<S>::mag(c));
  return m;
}

int main() {
  const int n = 2;
  Trunc tsmall{2, 3, 8}, tbig{2, 6, 8};

  auto g = rw::make_geometry<S>(n, 2, 34, rw::GeoMode::compatible);
  auto ems = rw::geodesic_exp(g, tsmall, false);
  auto emb = rw::geodesic_exp(g, tbig, false);
  auto Rs = rw::induced_connection(ems);
  auto Rb = rw::induced_connection(emb);

  show("phi small", ems.phi[0]);
  show("phi big", emb.phi[0]);
  show("R small", Rs.comp[0]);
  show("R big", Rb.comp[0]);

  auto cs = rw::curvature_components(Rs);
  auto cb = rw::curvature_components(Rb);
  const char* names[4] = {"(2,0)", "dxRa", "dxbRh", "(0,2)"};
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < n; ++i)
      std::printf("%-6s comp%d  small res=(%d,%d) in-window %g   big in-window %g   mismatch %g\n",
                  names[k], i, cs[k].comp[i].resx, cs[k].comp[i].resy, inwin(cs[k].comp[i]),
                  inwin(cb[k].comp[i]), mismatch(cs[k].comp[i], cb[k].comp[i]));

  std::printf("\nmixed-degree sum [1]+[2]:\n");
  for (int i = 0; i < n; ++i) {
    auto ms = cs[1].comp[i] + cs[2].comp[i];
    auto mb = cb[1].comp[i] + cb[2].comp[i];
    std::printf("  comp%d small res=(%d,%d) in-window %g  big in-window %g  mismatch %g  full %g/%g\n",
                i, ms.resx, ms.resy, inwin(ms), inwin(mb), mismatch(ms, mb), rw::full_norm(ms),
                rw::full_norm(mb));
  }
  return 0;
}
