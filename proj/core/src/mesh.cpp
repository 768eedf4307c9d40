#include "biharm/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <string>
#include <unordered_set>

#include "biharm/error.hpp"

namespace biharm {

namespace {

std::uint64_t pair_key(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

bool on_boundary(const Point& a, const Point& b) {
  return (a.x == 0.0 && b.x == 0.0) || (a.x == 1.0 && b.x == 1.0) ||
         (a.y == 0.0 && b.y == 0.0) || (a.y == 1.0 && b.y == 1.0);
}

std::uint64_t next_tag() {
  static std::atomic<std::uint64_t> counter{1};
  return counter++;
}

}  // namespace

// ---------------------------------------------------------------------------
// Forest

std::shared_ptr<Forest> Forest::from_triangles(std::vector<Point> vertices,
                                               std::span<const std::array<VertexId, 3>> triangles) {
  auto f = std::make_shared<Forest>();
  f->tag_ = next_tag();
  f->vertices_ = std::move(vertices);
  for (const auto& tri : triangles) {
    for (VertexId v : tri)
      if (v < 0 || v >= static_cast<VertexId>(f->vertices_.size())) throw GeometryError("macro vertex out of range");
    ForestNode n;
    n.v = tri;
    f->nodes_.push_back(n);
    if (!(f->area(static_cast<ElementId>(f->nodes_.size() - 1)) > 0.0))
      throw GeometryError("macro triangles must be counterclockwise and non-degenerate");
  }
  f->n_macro_ = static_cast<int>(triangles.size());
  return f;
}

std::shared_ptr<Forest> Forest::unit_square() {
  // Newest vertex is the centre, so every refinement edge lies on the
  // boundary and the labelling is compatible across the diagonals.
  const std::array<std::array<VertexId, 3>, 4> macro{{{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}}};
  return from_triangles({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {0.5, 0.5}}, macro);
}

std::shared_ptr<Forest> Forest::unit_square_diagonal() {
  // Both halves are bisected across the shared diagonal.
  const std::array<std::array<VertexId, 3>, 2> macro{{{2, 0, 1}, {0, 2, 3}}};
  return from_triangles({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}, macro);
}

VertexId Forest::midpoint(VertexId a, VertexId b) {
  const auto key = pair_key(a, b);
  if (auto it = midpoints_.find(key); it != midpoints_.end()) return it->second;
  const Point& pa = vertices_[a];
  const Point& pb = vertices_[b];
  vertices_.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
  const auto id = static_cast<VertexId>(vertices_.size() - 1);
  midpoints_.emplace(key, id);
  return id;
}

std::array<ElementId, 2> Forest::bisect(ElementId e) {
  if (nodes_[e].has_children()) return nodes_[e].children;
  const auto [a, b, c] = nodes_[e].v;
  const VertexId m = midpoint(a, b);
  const int level = nodes_[e].level + 1;
  ForestNode left;
  left.v = {c, a, m};
  left.parent = e;
  left.level = level;
  ForestNode right;
  right.v = {b, c, m};
  right.parent = e;
  right.level = level;
  const auto first = static_cast<ElementId>(nodes_.size());
  nodes_.push_back(left);
  nodes_.push_back(right);
  nodes_[e].children = {first, first + 1};
  return nodes_[e].children;
}

VertexId Forest::find_midpoint(VertexId a, VertexId b) const {
  auto it = midpoints_.find(pair_key(a, b));
  return it == midpoints_.end() ? -1 : it->second;
}

bool Forest::is_ancestor_or_self(ElementId ancestor, ElementId e) const {
  while (e != kNoElement) {
    if (e == ancestor) return true;
    e = nodes_[e].parent;
  }
  return false;
}

double Forest::area(ElementId e) const {
  const auto& v = nodes_[e].v;
  const Point a = vertices_[v[0]];
  const Point b = vertices_[v[1]];
  const Point c = vertices_[v[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point Forest::centroid(ElementId e) const {
  const auto& v = nodes_[e].v;
  const Point s = vertices_[v[0]] + vertices_[v[1]] + vertices_[v[2]];
  return (1.0 / 3.0) * s;
}

// ---------------------------------------------------------------------------
// Mesh

Mesh::Mesh(std::shared_ptr<Forest> forest, std::vector<ElementId> leaves)
    : forest_(std::move(forest)), leaves_(std::move(leaves)) {
  std::sort(leaves_.begin(), leaves_.end());
  index_.reserve(leaves_.size());
  for (std::size_t i = 0; i < leaves_.size(); ++i) index_.emplace(leaves_[i], static_cast<int>(i));
  build_edges();
}

Mesh Mesh::unit_square(int level) { return macro(Forest::unit_square()).uniform(level); }

Mesh Mesh::unit_square_diagonal(int level) { return macro(Forest::unit_square_diagonal()).uniform(level); }

Mesh Mesh::macro(std::shared_ptr<Forest> forest) {
  std::vector<ElementId> roots;
  for (ElementId e = 0; e < forest->n_macro(); ++e) roots.push_back(e);
  return Mesh(std::move(forest), std::move(roots));
}

Mesh Mesh::uniform(int level) const {
  if (level < 0 || level > 24) throw std::out_of_range("uniform mesh level must be in [0, 24]");
  std::vector<ElementId> out;
  std::vector<ElementId> stack;
  for (ElementId e = forest_->n_macro() - 1; e >= 0; --e) stack.push_back(e);
  while (!stack.empty()) {
    const ElementId e = stack.back();
    stack.pop_back();
    if (forest_->node(e).level >= level) {
      out.push_back(e);
      continue;
    }
    const auto ch = forest_->bisect(e);
    stack.push_back(ch[1]);
    stack.push_back(ch[0]);
  }
  return Mesh(forest_, std::move(out));
}

int Mesh::index_of(ElementId e) const {
  auto it = index_.find(e);
  return it == index_.end() ? -1 : it->second;
}

int Mesh::ancestor_leaf(ElementId e) const {
  for (ElementId cur = e; cur != kNoElement; cur = forest_->node(cur).parent) {
    if (const int i = index_of(cur); i >= 0) return i;
  }
  throw IncompatibleMeshError("forest node " + std::to_string(e) + " lies above this mesh's leaves");
}

void Mesh::build_edges() {
  edges_.clear();
  element_edges_.assign(leaves_.size(), {-1, -1, -1});
  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(3 * leaves_.size());
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    const auto& v = forest_->node(leaves_[i]).v;
    for (int k = 0; k < 3; ++k) {
      const VertexId a = v[(k + 1) % 3];
      const VertexId b = v[(k + 2) % 3];
      const auto key = pair_key(a, b);
      auto [it, inserted] = lookup.try_emplace(key, static_cast<int>(edges_.size()));
      if (inserted) {
        Edge e;
        e.v = {a, b};
        e.elem[0] = static_cast<int>(i);
        e.local_edge[0] = k;
        e.kind = on_boundary(forest_->vertex(a), forest_->vertex(b)) ? EdgeKind::boundary
                                                                        : EdgeKind::interior;
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        e.elem[1] = static_cast<int>(i);
        e.local_edge[1] = k;
      }
      element_edges_[i][k] = it->second;
    }
  }
}

std::array<Point, 3> Mesh::corners(int i) const {
  const auto& v = forest_->node(leaves_[i]).v;
  return {forest_->vertex(v[0]), forest_->vertex(v[1]), forest_->vertex(v[2])};
}

double Mesh::area(int i) const { return forest_->area(leaves_[i]); }

double Mesh::element_size(int i) const {
  const double a = area(i);
  if (!(a > 0.0)) throw GeometryError("degenerate element " + std::to_string(leaves_[i]));
  return std::sqrt(a);
}

double Mesh::edge_size(int edge) const {
  const Point d = forest_->vertex(edges_[edge].v[1]) - forest_->vertex(edges_[edge].v[0]);
  return std::sqrt(dot(d, d));
}

double Mesh::face_weight(int edge) const {
  const Edge& e = edges_[edge];
  if (e.elem[1] == Edge::kNoLeaf) return element_size(e.elem[0]);
  return 0.5 * (element_size(e.elem[0]) + element_size(e.elem[1]));
}

Point Mesh::normal(int edge) const {
  const Point d = forest_->vertex(edges_[edge].v[1]) - forest_->vertex(edges_[edge].v[0]);
  const double len = std::sqrt(dot(d, d));
  return {d.y / len, -d.x / len};
}

Point Mesh::edge_point(int edge, double s) const {
  const Point a = forest_->vertex(edges_[edge].v[0]);
  const Point b = forest_->vertex(edges_[edge].v[1]);
  return a + s * (b - a);
}

void Mesh::dump(std::ostream& os) const {
  std::vector<VertexId> used;
  for (ElementId e : leaves_)
    for (VertexId v : forest_->node(e).v) used.push_back(v);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  os.precision(17);
  os << "vertices\n";
  for (VertexId v : used) os << v << ' ' << forest_->vertex(v).x << ' ' << forest_->vertex(v).y << '\n';
  os << "elements\n";
  for (ElementId e : leaves_) {
    const auto& n = forest_->node(e);
    os << e << ' ' << n.v[0] << ' ' << n.v[1] << ' ' << n.v[2] << ' ' << n.level << ' ' << n.parent
       << '\n';
  }
  os << "edges\n";
  for (const auto& e : edges_)
    os << e.v[0] << ' ' << e.v[1] << ' ' << (e.is_boundary() ? "boundary" : "interior") << '\n';
}

// ---------------------------------------------------------------------------
// Refinement and coarsening

Mesh bisect(const Mesh& mesh, std::span<const int> marked) {
  if (mesh.n_elements() == 0) throw std::invalid_argument("bisect: empty mesh");
  if (marked.empty()) return mesh;
  Forest& forest = *mesh.forest_ptr();

  std::vector<ElementId> leaves(mesh.leaves().begin(), mesh.leaves().end());
  std::unordered_set<ElementId> refine;
  for (int i : marked) {
    if (i < 0 || static_cast<std::size_t>(i) >= mesh.n_elements())
      throw std::out_of_range("bisect: marked element is not a leaf");
    refine.insert(mesh.leaf(i));
  }

  while (!refine.empty()) {
    std::vector<ElementId> next;
    next.reserve(leaves.size() + 2 * refine.size());
    for (ElementId e : leaves) {
      if (refine.count(e)) {
        const auto ch = forest.bisect(e);
        next.push_back(ch[0]);
        next.push_back(ch[1]);
      } else {
        next.push_back(e);
      }
    }
    leaves = std::move(next);
    refine.clear();

    // An edge owned by a single leaf whose midpoint is an active vertex
    // carries a hanging node; that leaf is the coarse side.
    std::unordered_map<std::uint64_t, int> edge_count;
    std::unordered_set<VertexId> active;
    for (ElementId e : leaves) {
      const auto& v = forest.node(e).v;
      for (int k = 0; k < 3; ++k) {
        ++edge_count[pair_key(v[(k + 1) % 3], v[(k + 2) % 3])];
        active.insert(v[k]);
      }
    }
    for (ElementId e : leaves) {
      const auto& v = forest.node(e).v;
      for (int k = 0; k < 3; ++k) {
        const VertexId a = v[(k + 1) % 3];
        const VertexId b = v[(k + 2) % 3];
        if (edge_count[pair_key(a, b)] != 1) continue;
        const VertexId m = forest.find_midpoint(a, b);
        if (m >= 0 && active.count(m)) {
          refine.insert(e);
          break;
        }
      }
    }
  }
  return Mesh(mesh.forest_ptr(), std::move(leaves));
}

Mesh coarsen(const Mesh& mesh, std::span<const int> marked) {
  if (marked.empty()) return mesh;
  const Forest& forest = mesh.forest();
  std::vector<char> is_marked(mesh.n_elements(), 0);
  for (int i : marked) {
    if (i < 0 || static_cast<std::size_t>(i) >= mesh.n_elements())
      throw std::out_of_range("coarsen: marked element is not a leaf");
    is_marked[i] = 1;
  }

  // Candidate parents: both children are marked leaves. Grouped by the
  // bisection midpoint, which disappears when the parent is restored.
  std::unordered_map<VertexId, std::vector<ElementId>> by_midpoint;
  for (std::size_t i = 0; i < mesh.n_elements(); ++i) {
    const ElementId e = mesh.leaf(static_cast<int>(i));
    const ElementId p = forest.node(e).parent;
    if (!is_marked[i] || p == kNoElement) continue;
    const auto& ch = forest.node(p).children;
    if (ch[0] != e) continue;  // visit each pair once
    const int sib = mesh.index_of(ch[1]);
    if (sib < 0 || !is_marked[sib]) continue;
    by_midpoint[forest.node(e).v[2]].push_back(p);
  }
  if (by_midpoint.empty()) return mesh;

  std::unordered_map<VertexId, int> vertex_use;
  for (ElementId e : mesh.leaves())
    for (VertexId v : forest.node(e).v) ++vertex_use[v];

  std::unordered_set<ElementId> merged;
  for (const auto& [m, parents] : by_midpoint) {
    if (vertex_use[m] != 2 * static_cast<int>(parents.size())) continue;
    for (ElementId p : parents) merged.insert(p);
  }
  if (merged.empty()) return mesh;

  std::vector<ElementId> out;
  out.reserve(mesh.n_elements());
  for (ElementId e : mesh.leaves()) {
    const ElementId p = forest.node(e).parent;
    if (p != kNoElement && merged.count(p)) {
      if (forest.node(p).children[0] == e) out.push_back(p);
    } else {
      out.push_back(e);
    }
  }
  return Mesh(mesh.forest_ptr(), std::move(out));
}

namespace {

// Flags the strict ancestors of the mesh's leaves.
std::vector<char> interior_nodes(const Mesh& m) {
  const Forest& f = m.forest();
  std::vector<char> flag(f.size(), 0);
  for (ElementId e : m.leaves()) {
    for (ElementId p = f.node(e).parent; p != kNoElement && !flag[p]; p = f.node(p).parent) flag[p] = 1;
  }
  return flag;
}

template <class Descend>
Mesh collect_leaves(const Mesh& a, Descend descend) {
  const Forest& f = a.forest();
  std::vector<ElementId> out;
  std::vector<ElementId> stack;
  for (ElementId e = f.n_macro() - 1; e >= 0; --e) stack.push_back(e);
  while (!stack.empty()) {
    const ElementId e = stack.back();
    stack.pop_back();
    if (descend(e)) {
      stack.push_back(f.node(e).children[1]);
      stack.push_back(f.node(e).children[0]);
    } else {
      out.push_back(e);
    }
  }
  return Mesh(a.forest_ptr(), std::move(out));
}

void require_compatible(const Mesh& a, const Mesh& b, const char* what) {
  if (!a.compatible_with(b))
    throw IncompatibleMeshError(std::string(what) + ": meshes do not share a macro mesh");
}

}  // namespace

Mesh finest_common_coarsening(const Mesh& a, const Mesh& b) {
  require_compatible(a, b, "finest_common_coarsening");
  if (a == b) return a;
  const auto ia = interior_nodes(a);
  const auto ib = interior_nodes(b);
  return collect_leaves(a, [&](ElementId e) { return ia[e] && ib[e]; });
}

Mesh overlay(const Mesh& a, const Mesh& b) {
  require_compatible(a, b, "overlay");
  if (a == b) return a;
  // Interior flags are sized by the forest at call time; both meshes
  // only reference nodes that already exist.
  const auto ia = interior_nodes(a);
  const auto ib = interior_nodes(b);
  return collect_leaves(a, [&](ElementId e) { return ia[e] || ib[e]; });
}

std::size_t count_nonconforming(const Mesh& mesh) {
  std::size_t bad = 0;
  for (const Edge& e : mesh.edges()) {
    const bool two_sided = e.elem[1] != Edge::kNoLeaf;
    if (e.is_boundary() == two_sided) ++bad;
  }
  return bad;
}

}  // namespace biharm
