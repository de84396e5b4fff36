#ifndef UQPDE_TRIMESH_HPP
#define UQPDE_TRIMESH_HPP

#include "uqpde/types.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace uqpde {

/// Triangle mesh with counter-clockwise elements and an ordered boundary loop.
///
/// boundary_nodes lists the boundary vertices in traversal order; each
/// boundary edge (boundary_nodes[i], boundary_nodes[i+1]) lies on exactly one
/// triangle. markers carries one tag per boundary node (e.g. left/right/
/// top/bottom for the unit square, outer for the disk).
struct TriMesh {
  Matrix vertices;                       // n x 2
  Eigen::MatrixXi triangles;             // m x 3, CCW
  std::vector<int> boundary_nodes;       // ordered traversal
  std::vector<std::array<int, 2>> boundary_edges;
  std::vector<std::string> markers;      // one per boundary node

  Index num_vertices() const { return vertices.rows(); }
  Index num_triangles() const { return triangles.rows(); }

  double triangle_area(Index t) const;
  double total_area() const;

  /// Boundary node indices whose marker is in `tags`.
  std::vector<int> nodes_with_marker(const std::vector<std::string>& tags) const;

  /// Throws if areas are non-positive, boundary edges are not unique to one
  /// triangle, or the boundary traversal is inconsistent.
  void validate() const;
};

/// Structured mesh of the unit square: (nx+1)(ny+1) vertices, 2*nx*ny
/// triangles, every cell split along the (+1,+1) diagonal. Corner nodes on
/// the left/right edges carry the left/right marker.
TriMesh mesh_unit_square(int nx, int ny);

/// Unit disk: one center vertex plus n_rings rings of n_sectors vertices at
/// radii i/n_rings; fan triangulation at the center, two triangles per quad
/// between rings. Boundary nodes are the outer ring ordered by angle.
TriMesh mesh_unit_disk(int n_rings, int n_sectors);

/// Plain-text mesh format: `v x y`, `t i j k`, `b i marker` lines.
void write_mesh(const TriMesh& mesh, std::ostream& out);
void write_mesh_file(const TriMesh& mesh, const std::string& path);
TriMesh read_mesh(std::istream& in);
TriMesh read_mesh_file(const std::string& path);

/// Content hash of vertices + triangles; keys cached eigenbases.
std::uint64_t mesh_hash(const TriMesh& mesh);

}  // namespace uqpde

#endif
