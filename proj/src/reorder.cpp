#include "tetmf/reorder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace tetmf {

bool CellPermutation::is_bijection() const {
  std::vector<index_t> s = new_of_old;
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] != i) return false;
  return true;
}

std::vector<index_t> CellPermutation::old_of_new() const {
  std::vector<index_t> o(new_of_old.size());
  for (std::size_t c = 0; c < new_of_old.size(); ++c) o[new_of_old[c]] = static_cast<index_t>(c);
  return o;
}

CellPermutation CellPermutation::identity(std::size_t n) {
  CellPermutation p;
  p.new_of_old.resize(n);
  std::iota(p.new_of_old.begin(), p.new_of_old.end(), 0);
  return p;
}

CellPermutation CellPermutation::random(std::size_t n, std::uint64_t seed) {
  CellPermutation p = identity(n);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit bounded draw so the result is portable
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(p.new_of_old[i - 1], p.new_of_old[j]);
  }
  return p;
}

namespace {

struct Graph {
  // adjacency with weights, neighbors sorted by id
  std::vector<std::vector<std::pair<index_t, std::uint32_t>>> adj;

  std::size_t size() const { return adj.size(); }
  std::uint32_t weight(index_t a, index_t b) const {
    for (const auto& [n, w] : adj[a])
      if (n == b) return w;
    return 0;
  }
};

Graph cell_graph(const TetMesh& mesh) {
  Graph g;
  g.adj.resize(mesh.n_cells());
  for (const auto& f : mesh.interior_faces) {
    g.adj[f.cell_minus].push_back({f.cell_plus, 1});
    g.adj[f.cell_plus].push_back({f.cell_minus, 1});
  }
  for (auto& a : g.adj) std::sort(a.begin(), a.end());
  return g;
}

// Breadth-first wavefront from the lowest-degree node; neighbors enter the
// queue by descending connection weight, then by id. Disconnected parts
// restart from their own lowest-degree node.
std::vector<index_t> wavefront_order(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<index_t> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](index_t a, index_t b) { return g.adj[a].size() < g.adj[b].size(); });
  std::vector<char> seen(n, 0);
  std::vector<index_t> order;
  order.reserve(n);
  std::vector<std::pair<index_t, std::uint32_t>> next;
  for (index_t root : by_degree) {
    if (seen[root]) continue;
    seen[root] = 1;
    order.push_back(root);
    for (std::size_t head = order.size() - 1; head < order.size(); ++head) {
      next.clear();
      for (const auto& e : g.adj[order[head]])
        if (!seen[e.first]) next.push_back(e);
      std::stable_sort(next.begin(), next.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
      for (const auto& [u, w] : next) {
        seen[u] = 1;
        order.push_back(u);
      }
    }
  }
  return order;
}

// Consecutive runs of the wavefront order.
std::vector<std::vector<index_t>> form_groups(const Graph& g, int group_size) {
  const auto order = wavefront_order(g);
  std::vector<std::vector<index_t>> groups;
  for (std::size_t i = 0; i < order.size(); i += group_size)
    groups.emplace_back(order.begin() + i, order.begin() + std::min(order.size(), i + group_size));
  return groups;
}

Graph contract(const Graph& g, const std::vector<std::vector<index_t>>& groups) {
  std::vector<index_t> group_of(g.size());
  for (std::size_t k = 0; k < groups.size(); ++k)
    for (index_t v : groups[k]) group_of[v] = static_cast<index_t>(k);
  Graph c;
  c.adj.resize(groups.size());
  for (std::size_t k = 0; k < groups.size(); ++k) {
    auto& a = c.adj[k];
    for (index_t v : groups[k])
      for (const auto& [u, w] : g.adj[v]) {
        const index_t gu = group_of[u];
        if (gu != k) a.push_back({gu, w});
      }
    std::sort(a.begin(), a.end());
    std::size_t out = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (out > 0 && a[out - 1].first == a[i].first)
        a[out - 1].second += a[i].second;
      else
        a[out++] = a[i];
    }
    a.resize(out);
  }
  return c;
}

}  // namespace

CellPermutation hierarchical_reorder(const TetMesh& mesh, int group_size) {
  if (group_size < 2) throw Error("group_size must be at least 2");
  const std::size_t n = mesh.n_cells();
  if (n == 0) return {};
  std::vector<Graph> graphs{cell_graph(mesh)};
  std::vector<std::vector<std::vector<index_t>>> members;  // members[k][group] are nodes of level k
  while (graphs.back().size() > static_cast<std::size_t>(group_size)) {
    auto groups = form_groups(graphs.back(), group_size);
    Graph next = contract(graphs.back(), groups);
    members.push_back(std::move(groups));
    graphs.push_back(std::move(next));
  }
  std::vector<index_t> order = wavefront_order(graphs.back());
  for (std::size_t k = members.size(); k-- > 0;) {
    std::vector<index_t> expanded;
    expanded.reserve(graphs[k].size());
    for (index_t grp : order) expanded.insert(expanded.end(), members[k][grp].begin(), members[k][grp].end());
    order = std::move(expanded);
  }
  CellPermutation p;
  p.new_of_old.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.new_of_old[order[i]] = static_cast<index_t>(i);
  return p;
}

LocalityReport locality_metrics(const TetMesh& mesh, const CellPermutation& perm, int batch_size) {
  if (perm.size() != mesh.n_cells() || !perm.is_bijection())
    throw Error("permutation is not a bijection on the cells of the mesh");
  if (batch_size < 1) throw Error("batch size must be positive");
  LocalityReport r;
  double sum = 0;
  for (const auto& f : mesh.interior_faces) {
    const std::int64_t a = perm.new_of_old[f.cell_minus], b = perm.new_of_old[f.cell_plus];
    const std::uint64_t d = static_cast<std::uint64_t>(std::llabs(a - b));
    sum += static_cast<double>(d);
    r.max_bandwidth = std::max(r.max_bandwidth, d);
  }
  if (!mesh.interior_faces.empty()) r.mean_neighbor_index_distance = sum / mesh.interior_faces.size();
  const auto old_of_new = perm.old_of_new();
  std::vector<index_t> number(mesh.vertices.size(), static_cast<index_t>(-1));
  index_t next = 0;
  double span_sum = 0;
  std::size_t batches = 0;
  for (std::size_t start = 0; start < old_of_new.size(); start += batch_size) {
    index_t lo = static_cast<index_t>(-1), hi = 0;
    for (std::size_t i = start; i < std::min(old_of_new.size(), start + batch_size); ++i)
      for (index_t v : mesh.cells[old_of_new[i]]) {
        if (number[v] == static_cast<index_t>(-1)) number[v] = next++;
        lo = std::min(lo, number[v]);
        hi = std::max(hi, number[v]);
      }
    span_sum += hi - lo;
    ++batches;
  }
  r.dof_span_per_batch = batches ? span_sum / batches : 0;
  return r;
}

}  // namespace tetmf
