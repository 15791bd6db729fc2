#pragma once
#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

// Feynman-graph engine for the boundary BFV operator: graph data model and
// file format, canonical forms, automorphism/loop counting, vanishing
// filters, vertex degree accounting, and bounded enumeration of candidate
// operator graphs in the A and B boundary representations.

namespace rw::graphs {

enum class VertexKind : int { bulk_black = 0, bulk_red, boundary_A, boundary_B, leaf_a, leaf_b };

inline const char* kind_name(VertexKind k) {
  switch (k) {
    case VertexKind::bulk_black: return "bulk_black";
    case VertexKind::bulk_red: return "bulk_red";
    case VertexKind::boundary_A: return "boundary_A";
    case VertexKind::boundary_B: return "boundary_B";
    case VertexKind::leaf_a: return "leaf_a";
    case VertexKind::leaf_b: return "leaf_b";
  }
  return "?";
}

inline VertexKind kind_from_name(const std::string& s) {
  for (int i = 0; i < 6; ++i)
    if (s == kind_name(VertexKind(i))) return VertexKind(i);
  throw std::invalid_argument("unknown vertex kind: " + s);
}

inline bool is_bulk(VertexKind k) { return k == VertexKind::bulk_black || k == VertexKind::bulk_red; }
inline bool is_boundary(VertexKind k) { return k == VertexKind::boundary_A || k == VertexKind::boundary_B; }
inline bool is_leaf(VertexKind k) { return k == VertexKind::leaf_a || k == VertexKind::leaf_b; }

struct FeynmanGraph {
  struct Vertex {
    std::string id;
    VertexKind kind;
  };
  std::vector<Vertex> vertices;
  // directed (tail, head) by vertex id; parallel edges and self-loops allowed
  std::vector<std::pair<std::string, std::string>> edges;
};

// Index view with edge multiplicities.
struct Adj {
  int n = 0;
  std::vector<VertexKind> kind;
  std::vector<std::vector<int>> mult;  // mult[u][v] = #edges u -> v
  std::vector<int> ind, outd;
  int edge_count = 0;
};

inline Adj compile(const FeynmanGraph& g) {
  Adj a;
  a.n = int(g.vertices.size());
  std::map<std::string, int> idx;
  for (int i = 0; i < a.n; ++i) {
    if (!idx.emplace(g.vertices[i].id, i).second)
      throw std::invalid_argument("duplicate vertex id: " + g.vertices[i].id);
    a.kind.push_back(g.vertices[i].kind);
  }
  a.mult.assign(a.n, std::vector<int>(a.n, 0));
  a.ind.assign(a.n, 0);
  a.outd.assign(a.n, 0);
  for (auto& [t, h] : g.edges) {
    auto it = idx.find(t), ih = idx.find(h);
    if (it == idx.end() || ih == idx.end())
      throw std::invalid_argument("edge endpoint references unknown vertex id: " + (it == idx.end() ? t : h));
    a.mult[it->second][ih->second]++;
    a.outd[it->second]++;
    a.ind[ih->second]++;
    a.edge_count++;
  }
  return a;
}

inline void validate(const FeynmanGraph& g) {
  Adj a = compile(g);
  for (int v = 0; v < a.n; ++v) {
    const std::string& id = g.vertices[v].id;
    switch (a.kind[v]) {
      case VertexKind::boundary_A:
        if (a.outd[v] != 0) throw std::invalid_argument("boundary_A vertex '" + id + "' must have only incoming edges");
        break;
      case VertexKind::boundary_B:
        if (a.ind[v] != 0) throw std::invalid_argument("boundary_B vertex '" + id + "' must have only outgoing edges");
        break;
      case VertexKind::leaf_a: {
        if (a.ind[v] != 1 || a.outd[v] != 0)
          throw std::invalid_argument("leaf_a vertex '" + id + "' must have exactly one incoming edge and none outgoing");
        for (int u = 0; u < a.n; ++u)
          if (a.mult[u][v] && !is_bulk(a.kind[u]))
            throw std::invalid_argument("leaf_a vertex '" + id + "' must attach to a bulk vertex");
        break;
      }
      case VertexKind::leaf_b: {
        if (a.outd[v] != 1 || a.ind[v] != 0)
          throw std::invalid_argument("leaf_b vertex '" + id + "' must have exactly one outgoing edge and none incoming");
        for (int u = 0; u < a.n; ++u)
          if (a.mult[v][u] && !is_bulk(a.kind[u]))
            throw std::invalid_argument("leaf_b vertex '" + id + "' must attach to a bulk vertex");
        break;
      }
      default:
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// canonical form / automorphisms

namespace detail {

// One-dimensional Weil-Leman style color refinement with edge multiplicities.
inline std::vector<int> wl_refine(const Adj& g, std::vector<int> col) {
  const int n = g.n;
  auto classes = [&] { return std::set<int>(col.begin(), col.end()).size(); };
  std::size_t k = classes();
  while (true) {
    std::vector<std::pair<std::vector<long long>, int>> sig(n);
    for (int v = 0; v < n; ++v) {
      std::vector<long long> s{col[v], g.mult[v][v]};
      std::vector<std::array<long long, 3>> nb;
      for (int w = 0; w < n; ++w) {
        if (w == v) continue;
        if (g.mult[v][w] || g.mult[w][v]) nb.push_back({(long long)col[w], (long long)g.mult[v][w], (long long)g.mult[w][v]});
      }
      std::sort(nb.begin(), nb.end());
      for (auto& t : nb) s.insert(s.end(), t.begin(), t.end());
      sig[v] = {std::move(s), v};
    }
    std::vector<std::pair<std::vector<long long>, int>> sorted = sig;
    std::sort(sorted.begin(), sorted.end());
    std::map<std::vector<long long>, int> rank;
    for (auto& p : sorted)
      rank.emplace(p.first, int(rank.size()));
    for (int v = 0; v < n; ++v) col[v] = rank[sig[v].first];
    std::size_t k2 = classes();
    if (k2 == k) return col;
    k = k2;
  }
}

inline std::string encode_by_color(const Adj& g, const std::vector<int>& col) {
  const int n = g.n;
  std::vector<int> vp(n);
  std::iota(vp.begin(), vp.end(), 0);
  std::sort(vp.begin(), vp.end(), [&](int a, int b) { return col[a] < col[b]; });
  static const char kc[] = "brABal";
  std::string s = "V:";
  for (int p = 0; p < n; ++p) s += kc[int(g.kind[vp[p]])];
  s += ";E:";
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      int m = g.mult[vp[p]][vp[q]];
      if (m) s += std::to_string(p) + ">" + std::to_string(q) + "*" + std::to_string(m) + ",";
    }
  return s;
}

// u and v interchangeable (their transposition is an automorphism)?
inline bool swappable(const Adj& g, int u, int v) {
  if (g.kind[u] != g.kind[v]) return false;
  if (g.mult[u][u] != g.mult[v][v]) return false;
  if (g.mult[u][v] != g.mult[v][u]) return false;
  for (int w = 0; w < g.n; ++w) {
    if (w == u || w == v) continue;
    if (g.mult[u][w] != g.mult[v][w] || g.mult[w][u] != g.mult[w][v]) return false;
  }
  return true;
}

inline void canon_rec(const Adj& g, std::vector<int> col, std::string& best, bool& have) {
  col = wl_refine(g, std::move(col));
  const int n = g.n;
  // locate the first non-singleton cell (by color value)
  int target_color = -1;
  std::map<int, std::vector<int>> cells;
  for (int v = 0; v < n; ++v) cells[col[v]].push_back(v);
  for (auto& [c, vs] : cells)
    if (vs.size() > 1) {
      target_color = c;
      break;
    }
  if (target_color < 0) {
    std::string enc = encode_by_color(g, col);
    if (!have || enc < best) {
      best = std::move(enc);
      have = true;
    }
    return;
  }
  const auto& members = cells[target_color];
  std::vector<int> reps;
  for (int u : members) {
    bool dup = false;
    for (int r : reps)
      if (swappable(g, r, u)) {
        dup = true;
        break;
      }
    if (!dup) reps.push_back(u);
  }
  for (int u : reps) {
    std::vector<int> c2(n);
    for (int v = 0; v < n; ++v) c2[v] = 2 * col[v];
    c2[u] -= 1;
    canon_rec(g, std::move(c2), best, have);
  }
}

inline std::vector<int> kind_colors(const Adj& g) {
  std::vector<int> col(g.n);
  for (int v = 0; v < g.n; ++v) col[v] = int(g.kind[v]);
  return col;
}

}  // namespace detail

// Kind- and orientation-respecting canonical encoding; byte-equal iff isomorphic.
inline std::string canonical_form(const FeynmanGraph& fg) {
  validate(fg);
  Adj g = compile(fg);
  std::string best;
  bool have = false;
  detail::canon_rec(g, detail::kind_colors(g), best, have);
  return best;
}

// |Aut|: vertex automorphisms times permutations of parallel edges.
inline long long automorphism_count(const FeynmanGraph& fg) {
  validate(fg);
  Adj g = compile(fg);
  const int n = g.n;
  auto col = detail::wl_refine(g, detail::kind_colors(g));
  std::vector<int> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(), [&](int a, int b) { return col[a] < col[b]; });
  std::vector<int> f(n, -1);
  std::vector<char> used(n, 0);
  long long cnt = 0;
  auto dfs = [&](auto&& self, int k) -> void {
    if (k == n) {
      ++cnt;
      return;
    }
    int v = ord[k];
    for (int u = 0; u < n; ++u) {
      if (used[u] || col[u] != col[v]) continue;
      if (g.mult[v][v] != g.mult[u][u]) continue;
      bool ok = true;
      for (int j = 0; j < k && ok; ++j) {
        int w = ord[j];
        ok = g.mult[v][w] == g.mult[u][f[w]] && g.mult[w][v] == g.mult[f[w]][u];
      }
      if (!ok) continue;
      f[v] = u;
      used[u] = 1;
      self(self, k + 1);
      used[u] = 0;
      f[v] = -1;
    }
  };
  dfs(dfs, 0);
  long long total = cnt;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      for (int m = 2; m <= g.mult[u][v]; ++m) total *= m;
  return total;
}

// First Betti number |E| - |V| + #components of the underlying undirected graph.
inline int loops_count(const FeynmanGraph& fg) {
  validate(fg);
  Adj g = compile(fg);
  std::vector<int> parent(g.n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int u = 0; u < g.n; ++u)
    for (int v = 0; v < g.n; ++v)
      if (g.mult[u][v]) parent[find(u)] = find(v);
  int comps = 0;
  for (int v = 0; v < g.n; ++v)
    if (find(v) == v) ++comps;
  return g.edge_count - g.n + comps;
}

// ---------------------------------------------------------------------------
// vanishing filters

struct FilterToggles {
  bool tadpole = true;
  bool double_edge = true;
  bool bivalent_1in1out = true;
};

struct FilterVerdict {
  bool keep = true;
  std::string reason;  // one of tadpole, double_edge, bivalent_1in1out when dropped
};

inline FilterVerdict vanishing_filter(const FeynmanGraph& fg, const FilterToggles& t = {}) {
  validate(fg);
  Adj g = compile(fg);
  if (t.tadpole)
    for (int v = 0; v < g.n; ++v)
      if (is_bulk(g.kind[v]) && g.mult[v][v] > 0) return {false, "tadpole"};
  if (t.double_edge)
    for (int u = 0; u < g.n; ++u)
      for (int v = u + 1; v < g.n; ++v)
        if (g.mult[u][v] + g.mult[v][u] >= 2) return {false, "double_edge"};
  if (t.bivalent_1in1out)
    for (int v = 0; v < g.n; ++v) {
      if (!is_bulk(g.kind[v]) || g.ind[v] != 1 || g.outd[v] != 1 || g.mult[v][v]) continue;
      bool internal = true;
      for (int w = 0; w < g.n; ++w)
        if ((g.mult[v][w] || g.mult[w][v]) && !is_bulk(g.kind[w])) internal = false;
      if (internal) return {false, "bivalent_1in1out"};
    }
  return {true, ""};
}

// ---------------------------------------------------------------------------
// vertex degree accounting

// Coefficient total degree per (color, #in, #out) signature: 2 - 2*out.
// Black tower exists from one arrow up, the red tower from three arrows up.
class VertexDegreeTable {
 public:
  explicit VertexDegreeTable(int max_valence = 12) : cap_(max_valence) {
    for (int s = 1; s <= max_valence; ++s)
      for (int in = 0; in <= s; ++in) {
        entries_[{0, in, s - in}] = 2 - 2 * (s - in);
        if (s >= 3) entries_[{1, in, s - in}] = 2 - 2 * (s - in);
      }
  }

  static const VertexDegreeTable& standard() {
    static const VertexDegreeTable t;
    return t;
  }

  std::optional<int> lookup(VertexKind k, int in, int out) const {
    if (!is_bulk(k)) return std::nullopt;
    auto it = entries_.find({k == VertexKind::bulk_red ? 1 : 0, in, out});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  int require(VertexKind k, int in, int out) const {
    auto d = lookup(k, in, out);
    if (!d)
      throw std::out_of_range(std::string("extend VertexDegreeTable: no entry for (") + kind_name(k) +
                              ", in=" + std::to_string(in) + ", out=" + std::to_string(out) + ")");
    return *d;
  }

  bool contains(VertexKind k, int in, int out) const { return lookup(k, in, out).has_value(); }
  std::size_t size() const { return entries_.size(); }
  int max_valence() const { return cap_; }

 private:
  int cap_;
  std::map<std::array<int, 3>, int> entries_;
};

enum class Rep { A_rep, B_rep };

inline const char* rep_name(Rep r) { return r == Rep::A_rep ? "A_rep" : "B_rep"; }

struct BalanceResult {
  bool balanced = false;
  long long deficit = 0;  // sum of coefficient degrees + n + 2m - 3
};

// Linear degree constraint. B side: sum_bulk deg(kind, in, out) + n + 2m - 3 == 0
// (the all-black specialization is 3I+II+3III+IV-V+3VI+VII-VIII-3IX+2m-3=0).
// A side: same functional with mirrored slot roles, and at most one bulk vertex.
inline BalanceResult degree_balance(const FeynmanGraph& fg, const VertexDegreeTable& table, Rep rep) {
  validate(fg);
  Adj g = compile(fg);
  long long n = 0, m = 0, sum = 0;
  for (int v = 0; v < g.n; ++v) {
    if (is_boundary(g.kind[v])) ++m;
    if (!is_bulk(g.kind[v])) continue;
    ++n;
    sum += rep == Rep::B_rep ? table.require(g.kind[v], g.ind[v], g.outd[v])
                             : table.require(g.kind[v], g.outd[v], g.ind[v]);
  }
  if (n == 0) return {true, 0};  // free sector: only the constant operator pair remains
  long long deficit = sum + n + 2 * m - 3;
  bool ok = deficit == 0 && !(rep == Rep::A_rep && n > 1);
  return {ok, deficit};
}

// Ghost-number-one selection for the collapsed boundary operator: with the
// degree table fixed this pins sum of bulk in-degrees (B side; out-degrees on
// the A side) to 2n + m - 2. Reconstructed from the one-vertex operator tower
// and cross-checked on the full three-vertex candidate catalogue.
inline bool ghost_number_one(const FeynmanGraph& fg, Rep rep) {
  validate(fg);
  Adj g = compile(fg);
  long long n = 0, m = 0, s = 0;
  for (int v = 0; v < g.n; ++v) {
    if (is_boundary(g.kind[v])) ++m;
    if (!is_bulk(g.kind[v])) continue;
    ++n;
    s += rep == Rep::B_rep ? g.ind[v] : g.outd[v];
  }
  if (n == 0) return false;
  return s == 2 * n + m - 2;
}

// ---------------------------------------------------------------------------
// enumeration

struct Candidate {
  FeynmanGraph graph;
  std::string canonical;
  long long aut = 1;
  int loops = 0;
  BalanceResult balance;
  FilterVerdict verdict;
};

namespace detail {

struct EnumRecord {
  std::vector<int> color, in, out;            // per bulk vertex
  std::vector<std::vector<int>> M;            // internal bulk->bulk edges
  std::vector<std::vector<int>> blocks;       // boundary dots: per-dot slot counts by bulk vertex
};

inline std::string record_key(const EnumRecord& r) {
  const int n = int(r.color.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  do {
    std::string s;
    for (int p = 0; p < n; ++p)
      s += std::to_string(r.color[perm[p]]) + "," + std::to_string(r.in[perm[p]]) + "," +
           std::to_string(r.out[perm[p]]) + ";";
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) s += std::to_string(r.M[perm[p]][perm[q]]) + ",";
    std::vector<std::vector<int>> bl;
    for (auto& b : r.blocks) {
      std::vector<int> pb(n);
      for (int p = 0; p < n; ++p) pb[p] = b[perm[p]];
      bl.push_back(std::move(pb));
    }
    std::sort(bl.begin(), bl.end());
    s += "|";
    for (auto& b : bl) {
      for (int x : b) s += std::to_string(x) + ",";
      s += ";";
    }
    if (best.empty() || s < best) best = std::move(s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// partitions of the slot multiset (counts per bulk vertex) into exactly m
// unordered nonempty blocks; blocks generated in non-increasing order
inline void multiset_partitions(const std::vector<int>& remaining, const std::vector<int>& max_block, int m_left,
                                std::vector<std::vector<int>>& blocks,
                                const std::function<void(const std::vector<std::vector<int>>&)>& cb) {
  int total = std::accumulate(remaining.begin(), remaining.end(), 0);
  if (total == 0) {
    if (m_left == 0) cb(blocks);
    return;
  }
  if (m_left <= 0 || total < m_left) return;
  const int n = int(remaining.size());
  // enumerate one block <= max_block (lexicographic), <= remaining, nonempty
  std::vector<int> b(n, 0);
  auto rec = [&](auto&& self, int i, bool tight) -> void {
    if (i == n) {
      if (std::accumulate(b.begin(), b.end(), 0) == 0) return;
      std::vector<int> rem2(n);
      for (int j = 0; j < n; ++j) rem2[j] = remaining[j] - b[j];
      blocks.push_back(b);
      multiset_partitions(rem2, b, m_left - 1, blocks, cb);
      blocks.pop_back();
      return;
    }
    int hi = std::min(remaining[i], tight ? max_block[i] : remaining[i]);
    for (int v = hi; v >= 0; --v) {
      b[i] = v;
      self(self, i + 1, tight && v == max_block[i]);
    }
    b[i] = 0;
  };
  rec(rec, 0, true);
}

inline FeynmanGraph materialize(const EnumRecord& r, Rep rep) {
  const int n = int(r.color.size());
  FeynmanGraph g;
  for (int i = 0; i < n; ++i)
    g.vertices.push_back({"v" + std::to_string(i), r.color[i] ? VertexKind::bulk_red : VertexKind::bulk_black});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int e = 0; e < r.M[i][j]; ++e) g.edges.push_back({"v" + std::to_string(i), "v" + std::to_string(j)});
  int colsum, rowsum, leafid = 0;
  for (int i = 0; i < n; ++i) {
    colsum = rowsum = 0;
    for (int j = 0; j < n; ++j) {
      colsum += r.M[j][i];
      rowsum += r.M[i][j];
    }
    int legs = rep == Rep::B_rep ? r.in[i] - colsum : r.out[i] - rowsum;
    for (int l = 0; l < legs; ++l, ++leafid) {
      std::string lid = "l" + std::to_string(leafid);
      if (rep == Rep::B_rep) {
        g.vertices.push_back({lid, VertexKind::leaf_b});
        g.edges.push_back({lid, "v" + std::to_string(i)});
      } else {
        g.vertices.push_back({lid, VertexKind::leaf_a});
        g.edges.push_back({"v" + std::to_string(i), lid});
      }
    }
  }
  for (std::size_t d = 0; d < r.blocks.size(); ++d) {
    std::string sid = "s" + std::to_string(d);
    g.vertices.push_back({sid, rep == Rep::B_rep ? VertexKind::boundary_A : VertexKind::boundary_B});
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < r.blocks[d][i]; ++e) {
        if (rep == Rep::B_rep)
          g.edges.push_back({"v" + std::to_string(i), sid});
        else
          g.edges.push_back({sid, "v" + std::to_string(i)});
      }
  }
  return g;
}

}  // namespace detail

// Exhaustive bounded enumeration of candidate operator graphs: per-vertex
// (color, in, out) signatures within the degree table -> internal edge
// matrices (parallels and self-loops enter as candidates) -> leftover slots
// attached to univalent leaves (one each) and boundary dots (multiset
// partitions; shared dots are composite brackets). Keeps exactly the graphs
// passing degree_balance and ghost_number_one, deduplicated by canonical
// form; vanishing verdicts are annotations, dropped candidates are retained.
inline std::vector<Candidate> enumerate_bfv(int n_bulk, int max_valence, Rep rep) {
  if (n_bulk < 0 || n_bulk > 3)
    throw std::invalid_argument("enumerate_bfv: n_bulk=" + std::to_string(n_bulk) + " outside supported range 0..3");
  if (max_valence < 1 || max_valence > 8)
    throw std::invalid_argument("enumerate_bfv: max_valence=" + std::to_string(max_valence) +
                                " outside supported range 1..8");
  std::vector<Candidate> out;
  if (n_bulk == 0) return out;                         // constant sector only
  if (rep == Rep::A_rep && n_bulk > 1) return out;     // one-vertex bound on the A side
  if ((3 * (n_bulk - 1)) % 2 != 0) return out;         // balance parity: even n has no solutions
  const auto& table = VertexDegreeTable::standard();
  const int n = n_bulk;
  const int base = 3 * (n - 1) / 2;  // internal edge budget forced by balance

  std::vector<std::array<int, 3>> sigs;  // (color, in, out)
  for (int color = 0; color < 2; ++color)
    for (int s = 1; s <= max_valence; ++s)
      for (int in = 0; in <= s; ++in)
        if (table.contains(color ? VertexKind::bulk_red : VertexKind::bulk_black, in, s - in))
          sigs.push_back({color, in, s - in});

  std::map<std::string, detail::EnumRecord> uniq;

  std::vector<int> pick(n, 0);
  auto for_tuples = [&](auto&& self, int i) -> void {
    if (i == n) {
      detail::EnumRecord r;
      r.color.resize(n);
      r.in.resize(n);
      r.out.resize(n);
      for (int v = 0; v < n; ++v) {
        r.color[v] = sigs[pick[v]][0];
        r.in[v] = sigs[pick[v]][1];
        r.out[v] = sigs[pick[v]][2];
      }
      int dot_slots = 0, leaf_slots = 0;
      for (int v = 0; v < n; ++v) {
        dot_slots += rep == Rep::B_rep ? r.out[v] : r.in[v];
        leaf_slots += rep == Rep::B_rep ? r.in[v] : r.out[v];
      }
      int mstar = dot_slots - base;
      if (mstar < 0) return;
      if (leaf_slots != 2 * n + mstar - 2) return;  // ghost number one
      // internal edge matrices, total <= base
      r.M.assign(n, std::vector<int>(n, 0));
      std::vector<int> rowleft(r.out), colleft(r.in);
      auto mats = [&](auto&& mself, int cell, int left) -> void {
        if (cell == n * n) {
          int E = base - left;
          int be = dot_slots - E;
          if (be < mstar || (mstar == 0 && be > 0)) return;
          std::vector<int> bnd(n), maxb(n);
          for (int v = 0; v < n; ++v) {
            int row = 0, colm = 0;
            for (int j = 0; j < n; ++j) {
              row += r.M[v][j];
              colm += r.M[j][v];
            }
            bnd[v] = rep == Rep::B_rep ? r.out[v] - row : r.in[v] - colm;
            maxb[v] = bnd[v];
          }
          std::vector<std::vector<int>> blocks;
          detail::multiset_partitions(bnd, maxb, mstar, blocks, [&](const std::vector<std::vector<int>>& bl) {
            detail::EnumRecord rr = r;
            rr.blocks = bl;
            uniq.emplace(detail::record_key(rr), rr);
          });
          return;
        }
        int i = cell / n, j = cell % n;
        int hi = std::min({left, rowleft[i], colleft[j]});
        for (int e = 0; e <= hi; ++e) {
          r.M[i][j] = e;
          rowleft[i] -= e;
          colleft[j] -= e;
          mself(mself, cell + 1, left - e);
          rowleft[i] += e;
          colleft[j] += e;
        }
        r.M[i][j] = 0;
      };
      mats(mats, 0, base);
      return;
    }
    for (std::size_t s = 0; s < sigs.size(); ++s) {
      pick[i] = int(s);
      self(self, i + 1);
    }
  };
  for_tuples(for_tuples, 0);

  for (auto& [key, rec] : uniq) {
    Candidate c;
    c.graph = detail::materialize(rec, rep);
    c.canonical = canonical_form(c.graph);
    c.aut = automorphism_count(c.graph);
    c.loops = loops_count(c.graph);
    c.balance = degree_balance(c.graph, table, rep);
    c.verdict = vanishing_filter(c.graph);
    out.push_back(std::move(c));
  }
  // safety: merge any canonical collisions the compact key missed (none expected)
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.canonical < b.canonical; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Candidate& a, const Candidate& b) { return a.canonical == b.canonical; }),
            out.end());
  return out;
}

// ---------------------------------------------------------------------------
// operator term report

inline std::string term_skeleton(const FeynmanGraph& fg, Rep rep) {
  Adj g = compile(fg);
  const char* field = rep == Rep::B_rep ? "B" : "A";
  std::string s;
  for (int v = 0; v < g.n; ++v) {
    if (!is_bulk(g.kind[v])) continue;
    if (!s.empty()) s += " * ";
    s += "Rhat" + std::to_string(g.ind[v] + g.outd[v] - 1) +
         (g.kind[v] == VertexKind::bulk_red ? "'" : "") + "(in=" + std::to_string(g.ind[v]) +
         ",out=" + std::to_string(g.outd[v]) + ")";
  }
  for (int v = 0; v < g.n; ++v) {
    if (!is_boundary(g.kind[v])) continue;
    int sz = g.ind[v] + g.outd[v];
    s += std::string(" [") + field + " x" + std::to_string(sz) + "]";
  }
  int legs = 0;
  for (int v = 0; v < g.n; ++v)
    if (is_leaf(g.kind[v])) ++legs;
  if (legs) s += std::string(" (d/d") + field + ")^" + std::to_string(legs);
  return s;
}

struct OperatorTerm {
  std::string canonical;
  std::string skeleton;
  int hbar_power = 0;
  long long aut = 1;  // prefactor 1/aut
};

struct TermReport {
  std::array<std::string, 2> omega0;
  std::vector<OperatorTerm> terms;
};

// Symbolic description of the boundary operator: the fixed constant pair plus
// one term per surviving candidate graph.
inline TermReport bfv_term_report(const std::vector<Candidate>& cands, Rep rep) {
  TermReport r;
  r.omega0 = {"-i*hbar Int_d1 dA^i (delta/delta A^i)", "-i*hbar Int_d2 dB_i (delta/delta B_i)"};
  for (const auto& c : cands) {
    if (!c.verdict.keep) continue;
    r.terms.push_back({c.canonical, term_skeleton(c.graph, rep), c.loops, c.aut});
  }
  return r;
}

// ---------------------------------------------------------------------------
// JSON file format

inline nlohmann::json graph_to_json(const FeynmanGraph& g) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (auto& v : g.vertices) j["vertices"].push_back({{"id", v.id}, {"kind", kind_name(v.kind)}});
  j["edges"] = nlohmann::json::array();
  for (auto& [t, h] : g.edges) j["edges"].push_back({t, h});
  return j;
}

inline FeynmanGraph graph_from_json(const nlohmann::json& j) {
  FeynmanGraph g;
  if (!j.contains("vertices") || !j.contains("edges")) throw std::invalid_argument("graph json needs vertices and edges");
  auto as_id = [](const nlohmann::json& x) {
    return x.is_string() ? x.get<std::string>() : nlohmann::json(x).dump();
  };
  for (auto& v : j.at("vertices")) g.vertices.push_back({as_id(v.at("id")), kind_from_name(v.at("kind").get<std::string>())});
  for (auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("edge must be a [tail, head] pair");
    g.edges.push_back({as_id(e[0]), as_id(e[1])});
  }
  return g;
}

inline nlohmann::json catalog_to_json(const std::vector<Candidate>& cands, Rep rep) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cands) {
    nlohmann::json row;
    row["canonical"] = c.canonical;
    row["aut"] = c.aut;
    row["loops"] = c.loops;
    row["balance"] = {{"balanced", c.balance.balanced}, {"deficit", c.balance.deficit}};
    row["filter_verdict"] = c.verdict.keep ? "keep" : "drop(" + c.verdict.reason + ")";
    row["term_skeleton"] = term_skeleton(c.graph, rep);
    row["graph"] = graph_to_json(c.graph);
    arr.push_back(std::move(row));
  }
  return arr;
}

}  // namespace rw::graphs
