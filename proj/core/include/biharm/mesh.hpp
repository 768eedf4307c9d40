#pragma once

// Hierarchical triangular meshes of the unit square.
//
// All meshes that descend from one macro mesh share a single bisection
// forest. A node of the forest is bisected at most once, and the two
// children are memoized, so two meshes built from the same forest name the
// same triangle by the same ElementId. Common coarsening and overlay are
// therefore set operations on forest nodes.
//
// The forest is append-only. A Mesh is an immutable view: a sorted leaf set
// plus its edge graph. Refinement may append nodes to the shared forest,
// which must not happen concurrently with other refinements.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace biharm {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

using VertexId = std::int32_t;
using ElementId = std::int32_t;
inline constexpr ElementId kNoElement = -1;

/// A node of the bisection forest. Vertices are counterclockwise; the
/// refinement edge is always the edge (v[0], v[1]) opposite the newest
/// vertex v[2].
struct ForestNode {
  std::array<VertexId, 3> v{};
  ElementId parent = kNoElement;
  std::array<ElementId, 2> children{kNoElement, kNoElement};
  int level = 0;

  bool has_children() const { return children[0] != kNoElement; }
  static constexpr int refinement_edge = 2;
};

class Forest {
 public:
  /// Criss-cross macro mesh: four triangles meeting at the square's centre.
  static std::shared_ptr<Forest> unit_square();
  /// Two triangles split by the diagonal from (0,0) to (1,1).
  static std::shared_ptr<Forest> unit_square_diagonal();
  /// General macro mesh; triangle (a, b, c) is bisected across (a, b) first.
  static std::shared_ptr<Forest> from_triangles(std::vector<Point> vertices,
                                                std::span<const std::array<VertexId, 3>> triangles);

  std::span<const Point> vertices() const { return vertices_; }
  const Point& vertex(VertexId v) const { return vertices_[v]; }
  const ForestNode& node(ElementId e) const { return nodes_[e]; }
  std::size_t size() const { return nodes_.size(); }
  int n_macro() const { return n_macro_; }
  std::uint64_t tag() const { return tag_; }

  /// Bisects node `e` (memoized) and returns its children.
  std::array<ElementId, 2> bisect(ElementId e);

  /// Midpoint vertex of (a, b) if some node was bisected across that edge.
  VertexId find_midpoint(VertexId a, VertexId b) const;

  /// True if `ancestor` equals `e` or lies on its parent chain.
  bool is_ancestor_or_self(ElementId ancestor, ElementId e) const;

  double area(ElementId e) const;
  Point centroid(ElementId e) const;

 private:
  VertexId midpoint(VertexId a, VertexId b);

  std::vector<Point> vertices_;
  std::vector<ForestNode> nodes_;
  std::unordered_map<std::uint64_t, VertexId> midpoints_;
  int n_macro_ = 0;
  std::uint64_t tag_ = 0;
};

enum class EdgeKind { interior, boundary };

/// An edge of the active (leaf) triangulation. `elem[0]` is the "+" side
/// and `elem[1]` the "-" side (kNoLeaf on the boundary). Element indices
/// are local leaf indices, not forest ids.
struct Edge {
  static constexpr int kNoLeaf = -1;
  std::array<VertexId, 2> v{};
  std::array<int, 2> elem{kNoLeaf, kNoLeaf};
  std::array<int, 2> local_edge{-1, -1};
  EdgeKind kind = EdgeKind::boundary;

  bool is_boundary() const { return kind == EdgeKind::boundary; }
};

class Mesh {
 public:
  Mesh() = default;
  Mesh(std::shared_ptr<Forest> forest, std::vector<ElementId> leaves);

  /// Macro mesh followed by `level` uniform bisection sweeps.
  static Mesh unit_square(int level);
  static Mesh unit_square_diagonal(int level);
  /// All macro elements of `forest`.
  static Mesh macro(std::shared_ptr<Forest> forest);

  /// The uniform mesh of the given level on this mesh's forest.
  Mesh uniform(int level) const;

  const Forest& forest() const { return *forest_; }
  const std::shared_ptr<Forest>& forest_ptr() const { return forest_; }
  bool compatible_with(const Mesh& other) const { return forest_ && forest_ == other.forest_; }

  std::size_t n_elements() const { return leaves_.size(); }
  std::span<const ElementId> leaves() const { return leaves_; }
  ElementId leaf(int i) const { return leaves_[i]; }
  /// Local index of a forest node that is a leaf here, or -1.
  int index_of(ElementId e) const;
  /// Local index of the leaf that contains forest node `e` (e must be a
  /// descendant-or-self of one of this mesh's leaves).
  int ancestor_leaf(ElementId e) const;

  std::span<const Edge> edges() const { return edges_; }
  /// Edge indices of leaf `i`, ordered by local edge number.
  const std::array<int, 3>& element_edges(int i) const { return element_edges_[i]; }

  std::array<Point, 3> corners(int i) const;
  double area(int i) const;
  /// h_kappa = sqrt(area).
  double element_size(int i) const;
  double edge_size(int edge) const;
  /// Mean of the adjacent h_kappa on interior edges, h_kappa on boundary.
  double face_weight(int edge) const;
  /// Outward unit normal of the "+" element on `edge`.
  Point normal(int edge) const;
  Point edge_point(int edge, double s) const;

  bool operator==(const Mesh& other) const {
    return forest_ == other.forest_ && leaves_ == other.leaves_;
  }

  void dump(std::ostream& os) const;

 private:
  void build_edges();

  std::shared_ptr<Forest> forest_;
  std::vector<ElementId> leaves_;
  std::unordered_map<ElementId, int> index_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> element_edges_;
};

/// Refines every marked leaf (local indices) at least once, then closes the
/// mesh by newest-vertex bisection until no hanging nodes remain.
Mesh bisect(const Mesh& mesh, std::span<const int> marked);

/// Replaces sibling pairs that are both marked and whose merge keeps the
/// mesh conforming by their parent. One generation per call.
Mesh coarsen(const Mesh& mesh, std::span<const int> marked);

Mesh finest_common_coarsening(const Mesh& a, const Mesh& b);
Mesh overlay(const Mesh& a, const Mesh& b);

/// Edges whose adjacency disagrees with their geometry: interior edges
/// seen by one leaf only (hanging nodes) or boundary edges seen by two.
std::size_t count_nonconforming(const Mesh& mesh);

}  // namespace biharm
