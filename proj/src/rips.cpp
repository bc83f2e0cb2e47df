#include "tdaeeg/rips.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "tdaeeg/error.hpp"

namespace tdaeeg::ph {

Simplex make_simplex(std::span<const std::int32_t> vertices, double value) {
  if (vertices.empty() || vertices.size() > 3)
    throw InvalidArgument("simplices are limited to 1-3 vertices");
  Simplex s;
  s.size = static_cast<int>(vertices.size());
  s.value = value;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] < 0) throw InvalidArgument("negative vertex id");
    if (i > 0 && vertices[i] <= vertices[i - 1])
      throw InvalidArgument("simplex vertices must be strictly increasing");
    s.vertices[i] = vertices[i];
  }
  return s;
}

bool filtration_less(const Simplex& a, const Simplex& b) noexcept {
  if (a.value != b.value) return a.value < b.value;
  if (a.size != b.size) return a.size < b.size;
  return a.vertices < b.vertices;
}

std::vector<Simplex> rips_filtration(const PointCloud& cloud, double max_scale, int max_dim) {
  if (max_dim < 0 || max_dim > 2) throw InvalidArgument("max_dim must be 0, 1 or 2");
  const std::size_t n = cloud.size();
  std::vector<double> dist(n * n, 0.0);
  double diam = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::sqrt(squared_distance(cloud.point(i), cloud.point(j)));
      dist[i * n + j] = dist[j * n + i] = d;
      diam = std::max(diam, d);
    }
  if (!(max_scale > 0.0)) max_scale = diam;

  std::vector<Simplex> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Simplex s;
    s.size = 1;
    s.vertices[0] = static_cast<std::int32_t>(i);
    out.push_back(s);
  }
  if (max_dim >= 1) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = dist[i * n + j];
        if (d > max_scale) continue;
        Simplex s;
        s.size = 2;
        s.vertices = {static_cast<std::int32_t>(i), static_cast<std::int32_t>(j), -1};
        s.value = d;
        out.push_back(s);
      }
  }
  if (max_dim >= 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dij = dist[i * n + j];
        if (dij > max_scale) continue;
        for (std::size_t k = j + 1; k < n; ++k) {
          const double dik = dist[i * n + k];
          const double djk = dist[j * n + k];
          if (dik > max_scale || djk > max_scale) continue;
          Simplex s;
          s.size = 3;
          s.vertices = {static_cast<std::int32_t>(i), static_cast<std::int32_t>(j),
                        static_cast<std::int32_t>(k)};
          s.value = std::max({dij, dik, djk});
          out.push_back(s);
        }
      }
  }
  std::sort(out.begin(), out.end(), filtration_less);
  return out;
}

namespace {

constexpr std::int32_t kNone = -1;

// Filtration position of each edge, keyed by local vertex ids.
class EdgeTable {
 public:
  explicit EdgeTable(std::size_t nv) : nv_(nv) {
    if (nv > 16384) throw InvalidArgument("complex too large for the edge table");
    table_.assign(nv * nv, kNone);
  }
  std::int32_t& at(std::int32_t u, std::int32_t v) {
    if (u > v) std::swap(u, v);
    return table_[static_cast<std::size_t>(u) * nv_ + static_cast<std::size_t>(v)];
  }

 private:
  std::size_t nv_;
  std::vector<std::int32_t> table_;
};

void append_if_positive(PersistenceDiagram& d, int dim, double birth, double death) {
  if (death > birth) d.features.push_back({dim, birth, death});
}

}  // namespace

PersistenceDiagram compute_persistence(std::span<const Simplex> filtration) {
  const std::size_t total = filtration.size();

  // Local vertex ids in order of appearance.
  std::unordered_map<std::int32_t, std::int32_t> local;
  std::vector<std::int32_t> vertex_pos;  // local id -> filtration position
  for (std::size_t i = 0; i < total; ++i) {
    const auto& s = filtration[i];
    if (s.size < 1 || s.size > 3) throw InvalidArgument("simplices are limited to 1-3 vertices");
    for (int k = 1; k < s.size; ++k)
      if (s.vertices[k] <= s.vertices[k - 1])
        throw InvalidArgument("simplex vertices must be strictly increasing");
    if (s.size == 1) {
      if (!local.emplace(s.vertices[0], static_cast<std::int32_t>(vertex_pos.size())).second)
        throw InvalidArgument("duplicate vertex in filtration");
      vertex_pos.push_back(static_cast<std::int32_t>(i));
    }
  }
  auto local_id = [&](std::int32_t v, std::size_t at) {
    const auto it = local.find(v);
    if (it == local.end() || static_cast<std::size_t>(vertex_pos[it->second]) > at)
      throw DomainError("faces after cofaces");
    return it->second;
  };

  const std::size_t nv = vertex_pos.size();
  EdgeTable edges(nv);
  std::vector<std::size_t> edge_list;      // filtration positions of edges
  std::vector<std::size_t> triangle_list;  // filtration positions of triangles
  std::vector<std::array<std::int32_t, 3>> triangle_edges;
  auto check_value = [&](std::size_t face_pos, const Simplex& s) {
    if (filtration[face_pos].value > s.value) throw DomainError("faces after cofaces");
  };
  for (std::size_t i = 0; i < total; ++i) {
    const auto& s = filtration[i];
    if (s.size == 2) {
      const auto u = local_id(s.vertices[0], i), v = local_id(s.vertices[1], i);
      check_value(static_cast<std::size_t>(vertex_pos[u]), s);
      check_value(static_cast<std::size_t>(vertex_pos[v]), s);
      auto& slot = edges.at(u, v);
      if (slot != kNone) throw InvalidArgument("duplicate edge in filtration");
      slot = static_cast<std::int32_t>(i);
      edge_list.push_back(i);
    } else if (s.size == 3) {
      const auto a = local_id(s.vertices[0], i), b = local_id(s.vertices[1], i),
                 c = local_id(s.vertices[2], i);
      std::array<std::int32_t, 3> faces{edges.at(a, b), edges.at(a, c), edges.at(b, c)};
      for (auto f : faces) {
        if (f == kNone) throw DomainError("faces after cofaces");
        check_value(static_cast<std::size_t>(f), s);
      }
      triangle_list.push_back(i);
      triangle_edges.push_back(faces);
    }
  }

  PersistenceDiagram diagram;

  // Dimension 0: reduce the edge boundary columns. A column always holds two
  // vertex positions; its pivot is the younger one.
  std::vector<std::int32_t> partner(total, kNone);  // vertex pivot -> other entry
  std::vector<char> vertex_paired(total, 0);
  std::vector<char> edge_negative(total, 0);
  for (std::size_t e : edge_list) {
    const auto& s = filtration[e];
    std::int32_t lo = vertex_pos[local.at(s.vertices[0])];
    std::int32_t hi = vertex_pos[local.at(s.vertices[1])];
    if (lo > hi) std::swap(lo, hi);
    while (partner[hi] != kNone) {
      const std::int32_t other = partner[hi];
      if (other == lo) {
        hi = kNone;
        break;
      }
      hi = std::max(lo, other);
      lo = std::min(lo, other);
    }
    if (hi == kNone) continue;
    partner[hi] = lo;
    vertex_paired[hi] = 1;
    edge_negative[e] = 1;
    append_if_positive(diagram, 0, filtration[hi].value, s.value);
  }
  for (std::size_t v = 0; v < nv; ++v) {
    const auto pos = static_cast<std::size_t>(vertex_pos[v]);
    if (!vertex_paired[pos]) diagram.features.push_back({0, filtration[pos].value, kInfinity});
  }

  // Dimension 1: reduce coboundary columns of the positive edges, youngest
  // first. Negative edges are cleared: their columns reduce to zero. The
  // pivot of a column is its oldest cofacet.
  std::vector<std::int32_t> edge_slot(total, kNone);
  std::vector<std::size_t> positive;
  for (std::size_t e : edge_list)
    if (!edge_negative[e]) {
      edge_slot[e] = static_cast<std::int32_t>(positive.size());
      positive.push_back(e);
    }
  std::vector<std::size_t> offsets(positive.size() + 1, 0);
  for (const auto& faces : triangle_edges)
    for (auto f : faces)
      if (edge_slot[f] != kNone) ++offsets[static_cast<std::size_t>(edge_slot[f]) + 1];
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
  std::vector<std::int32_t> cofacets(offsets.back());
  {
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t t = 0; t < triangle_list.size(); ++t)
      for (auto f : triangle_edges[t])
        if (edge_slot[f] != kNone)
          cofacets[fill[static_cast<std::size_t>(edge_slot[f])]++] =
              static_cast<std::int32_t>(triangle_list[t]);
  }

  std::unordered_map<std::int32_t, std::size_t> pivot_owner;  // triangle -> reduced column
  std::vector<std::vector<std::int32_t>> reduced;
  std::vector<std::int32_t> column, scratch;
  for (std::size_t idx = positive.size(); idx-- > 0;) {
    const std::size_t e = positive[idx];
    column.assign(cofacets.begin() + static_cast<std::ptrdiff_t>(offsets[idx]),
                  cofacets.begin() + static_cast<std::ptrdiff_t>(offsets[idx + 1]));
    while (!column.empty()) {
      const auto it = pivot_owner.find(column.front());
      if (it == pivot_owner.end()) break;
      const auto& other = reduced[it->second];
      scratch.clear();
      std::set_symmetric_difference(column.begin(), column.end(), other.begin(), other.end(),
                                    std::back_inserter(scratch));
      column.swap(scratch);
    }
    const double birth = filtration[e].value;
    if (column.empty()) {
      diagram.features.push_back({1, birth, kInfinity});
      continue;
    }
    pivot_owner.emplace(column.front(), reduced.size());
    append_if_positive(diagram, 1, birth, filtration[static_cast<std::size_t>(column.front())].value);
    reduced.push_back(column);
  }

  diagram.sort();
  return diagram;
}

namespace {

// Triangle identity in filtration order: (value, lexicographic vertices).
struct TriKey {
  double value;
  std::int32_t i, j, k;
  bool operator<(const TriKey& o) const noexcept {
    if (value != o.value) return value < o.value;
    if (i != o.i) return i < o.i;
    if (j != o.j) return j < o.j;
    return k < o.k;
  }
  bool operator==(const TriKey& o) const noexcept {
    return value == o.value && i == o.i && j == o.j && k == o.k;
  }
};

struct TriHash {
  std::size_t operator()(const TriKey& t) const noexcept {
    std::size_t h = std::hash<double>{}(t.value);
    for (auto v : {t.i, t.j, t.k}) h = h * 1000003u ^ static_cast<std::size_t>(v);
    return h;
  }
};

}  // namespace

PersistenceDiagram rips_persistence(const PointCloud& cloud, double max_scale) {
  // Same pairs as compute_persistence(rips_filtration(cloud, max_scale, 2)),
  // but triangles are enumerated from the distance matrix on demand.
  const std::size_t n = cloud.size();
  if (n > 8192) throw InvalidArgument("cloud too large for Rips persistence");
  std::vector<double> dist(n * n, 0.0);
  double diam = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::sqrt(squared_distance(cloud.point(i), cloud.point(j)));
      dist[i * n + j] = dist[j * n + i] = d;
      diam = std::max(diam, d);
    }
  if (!(max_scale > 0.0)) max_scale = diam;
  auto D = [&](std::size_t a, std::size_t b) { return dist[a * n + b]; };

  struct Edge {
    double value;
    std::int32_t i, j;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (D(i, j) <= max_scale)
        edges.push_back({D(i, j), static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  PersistenceDiagram diagram;

  // Dimension 0 by union-find; the younger root (larger vertex id) dies.
  std::vector<std::int32_t> parent(n);
  for (std::size_t v = 0; v < n; ++v) parent[v] = static_cast<std::int32_t>(v);
  auto find = [&](std::int32_t v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      auto& p = parent[static_cast<std::size_t>(v)];
      p = parent[static_cast<std::size_t>(p)];
      v = p;
    }
    return v;
  };
  std::vector<char> negative(edges.size(), 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto a = find(edges[e].i), b = find(edges[e].j);
    if (a == b) continue;
    parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    negative[e] = 1;
    append_if_positive(diagram, 0, 0.0, edges[e].value);
  }
  for (std::size_t v = 0; v < n; ++v)
    if (parent[v] == static_cast<std::int32_t>(v)) diagram.features.push_back({0, 0.0, kInfinity});

  // Dimension 1 by cohomology with clearing, youngest positive edge first.
  auto coboundary = [&](const Edge& e, std::vector<TriKey>& out) {
    for (std::size_t k = 0; k < n; ++k) {
      if (static_cast<std::int32_t>(k) == e.i || static_cast<std::int32_t>(k) == e.j) continue;
      const double a = D(static_cast<std::size_t>(e.i), k), b = D(static_cast<std::size_t>(e.j), k);
      if (a > max_scale || b > max_scale) continue;
      std::int32_t v[3] = {e.i, e.j, static_cast<std::int32_t>(k)};
      std::sort(v, v + 3);
      out.push_back({std::max({e.value, a, b}), v[0], v[1], v[2]});
    }
  };
  std::unordered_map<TriKey, std::size_t, TriHash> pivot_owner;
  std::vector<std::vector<std::size_t>> combos;  // edges summed into each stored column
  std::vector<TriKey> column, addend, scratch;
  for (std::size_t e = edges.size(); e-- > 0;) {
    if (negative[e]) continue;
    std::vector<std::size_t> combo{e};
    column.clear();
    coboundary(edges[e], column);
    std::sort(column.begin(), column.end());
    while (!column.empty()) {
      const auto it = pivot_owner.find(column.front());
      if (it == pivot_owner.end()) break;
      addend.clear();
      for (auto f : combos[it->second]) coboundary(edges[f], addend);
      std::sort(addend.begin(), addend.end());
      // Entries appearing an even number of times cancel.
      std::size_t w = 0;
      for (std::size_t r = 0; r < addend.size();) {
        std::size_t t = r;
        while (t < addend.size() && addend[t] == addend[r]) ++t;
        if ((t - r) % 2 == 1) addend[w++] = addend[r];
        r = t;
      }
      addend.resize(w);
      scratch.clear();
      std::set_symmetric_difference(column.begin(), column.end(), addend.begin(), addend.end(),
                                    std::back_inserter(scratch));
      column.swap(scratch);
      const auto& other = combos[it->second];
      std::vector<std::size_t> merged;
      std::set_symmetric_difference(combo.begin(), combo.end(), other.begin(), other.end(),
                                    std::back_inserter(merged));
      combo.swap(merged);
    }
    const double birth = edges[e].value;
    if (column.empty()) {
      diagram.features.push_back({1, birth, kInfinity});
      continue;
    }
    pivot_owner.emplace(column.front(), combos.size());
    append_if_positive(diagram, 1, birth, column.front().value);
    combos.push_back(std::move(combo));
  }

  diagram.sort();
  return diagram;
}

std::size_t betti_at(const PersistenceDiagram& diagram, double eps, int dim) {
  if (!(eps >= 0.0)) throw InvalidArgument("eps must be non-negative");
  std::size_t count = 0;
  for (const auto& f : diagram.features)
    if (f.dim == dim && f.birth <= eps && eps < f.death) ++count;
  return count;
}

}  // namespace tdaeeg::ph
