#include "uqpde/trimesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace uqpde {

double TriMesh::triangle_area(Index t) const {
  const auto a = vertices.row(triangles(t, 0));
  const auto b = vertices.row(triangles(t, 1));
  const auto c = vertices.row(triangles(t, 2));
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

double TriMesh::total_area() const {
  double area = 0.0;
  for (Index t = 0; t < num_triangles(); ++t) area += triangle_area(t);
  return area;
}

std::vector<int> TriMesh::nodes_with_marker(const std::vector<std::string>& tags) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < boundary_nodes.size(); ++i) {
    if (std::find(tags.begin(), tags.end(), markers[i]) != tags.end()) {
      out.push_back(boundary_nodes[i]);
    }
  }
  return out;
}

void TriMesh::validate() const {
  require(boundary_nodes.size() == markers.size(),
          "TriMesh: one marker per boundary node required");
  for (Index t = 0; t < num_triangles(); ++t) {
    require(triangle_area(t) > 0.0,
            "TriMesh: non-positive area in triangle " + std::to_string(t));
  }
  // count triangles adjacent to each edge
  std::map<std::pair<int, int>, int> edge_count;
  for (Index t = 0; t < num_triangles(); ++t) {
    for (int e = 0; e < 3; ++e) {
      int a = triangles(t, e), b = triangles(t, (e + 1) % 3);
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  for (const auto& edge : boundary_edges) {
    auto it = edge_count.find({std::min(edge[0], edge[1]), std::max(edge[0], edge[1])});
    require(it != edge_count.end() && it->second == 1,
            "TriMesh: boundary edge (" + std::to_string(edge[0]) + ", " +
                std::to_string(edge[1]) + ") must belong to exactly one triangle");
  }
  // traversal consistency: consecutive boundary nodes form the edge list
  require(boundary_edges.size() <= boundary_nodes.size(),
          "TriMesh: more boundary edges than nodes");
  for (std::size_t i = 0; i < boundary_edges.size(); ++i) {
    const int a = boundary_nodes[i];
    const int b = boundary_nodes[(i + 1) % boundary_nodes.size()];
    require(boundary_edges[i][0] == a && boundary_edges[i][1] == b,
            "TriMesh: boundary edge order inconsistent with node traversal at " +
                std::to_string(i));
  }
}

TriMesh mesh_unit_square(int nx, int ny) {
  require(nx >= 1 && ny >= 1, "mesh_unit_square: nx, ny must be >= 1");
  TriMesh mesh;
  const int nvx = nx + 1, nvy = ny + 1;
  mesh.vertices.resize(static_cast<Index>(nvx) * nvy, 2);
  auto vid = [&](int i, int j) { return j * nvx + i; };
  for (int j = 0; j < nvy; ++j) {
    for (int i = 0; i < nvx; ++i) {
      mesh.vertices(vid(i, j), 0) = static_cast<double>(i) / nx;
      mesh.vertices(vid(i, j), 1) = static_cast<double>(j) / ny;
    }
  }
  mesh.triangles.resize(2 * static_cast<Index>(nx) * ny, 3);
  Index t = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.triangles.row(t++) << v00, v10, v11;
      mesh.triangles.row(t++) << v00, v11, v01;
    }
  }
  // boundary loop: bottom, right, top (reversed), left (reversed)
  auto add = [&](int v, const std::string& marker) {
    mesh.boundary_nodes.push_back(v);
    mesh.markers.push_back(marker);
  };
  for (int i = 0; i < nx; ++i) add(vid(i, 0), i == 0 ? "left" : "bottom");
  for (int j = 0; j < ny; ++j) add(vid(nx, j), "right");
  for (int i = nx; i > 0; --i) add(vid(i, ny), i == nx ? "right" : "top");
  for (int j = ny; j > 0; --j) add(vid(0, j), "left");
  const int nb = static_cast<int>(mesh.boundary_nodes.size());
  for (int i = 0; i < nb; ++i) {
    mesh.boundary_edges.push_back({mesh.boundary_nodes[i], mesh.boundary_nodes[(i + 1) % nb]});
  }
  return mesh;
}

TriMesh mesh_unit_disk(int n_rings, int n_sectors) {
  require(n_rings >= 1, "mesh_unit_disk: n_rings must be >= 1");
  require(n_sectors >= 3, "mesh_unit_disk: n_sectors must be >= 3");
  TriMesh mesh;
  const Index n_vertices = 1 + static_cast<Index>(n_rings) * n_sectors;
  mesh.vertices.resize(n_vertices, 2);
  mesh.vertices.row(0) << 0.0, 0.0;
  auto vid = [&](int ring, int sector) {
    return 1 + (ring - 1) * n_sectors + (sector % n_sectors);
  };
  for (int ring = 1; ring <= n_rings; ++ring) {
    const double r = static_cast<double>(ring) / n_rings;
    for (int s = 0; s < n_sectors; ++s) {
      const double theta = 2.0 * std::numbers::pi * s / n_sectors;
      mesh.vertices(vid(ring, s), 0) = r * std::cos(theta);
      mesh.vertices(vid(ring, s), 1) = r * std::sin(theta);
    }
  }
  mesh.triangles.resize(static_cast<Index>(n_sectors) * (2 * n_rings - 1), 3);
  Index t = 0;
  for (int s = 0; s < n_sectors; ++s) {
    mesh.triangles.row(t++) << 0, vid(1, s), vid(1, s + 1);
  }
  for (int ring = 1; ring < n_rings; ++ring) {
    for (int s = 0; s < n_sectors; ++s) {
      const int a0 = vid(ring, s), a1 = vid(ring, s + 1);
      const int b0 = vid(ring + 1, s), b1 = vid(ring + 1, s + 1);
      mesh.triangles.row(t++) << a0, b0, b1;
      mesh.triangles.row(t++) << a0, b1, a1;
    }
  }
  for (int s = 0; s < n_sectors; ++s) {
    mesh.boundary_nodes.push_back(vid(n_rings, s));
    mesh.markers.push_back("outer");
    mesh.boundary_edges.push_back({vid(n_rings, s), vid(n_rings, s + 1)});
  }
  return mesh;
}

void write_mesh(const TriMesh& mesh, std::ostream& out) {
  out.precision(17);
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    out << "v " << mesh.vertices(v, 0) << " " << mesh.vertices(v, 1) << "\n";
  }
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    out << "t " << mesh.triangles(t, 0) << " " << mesh.triangles(t, 1) << " "
        << mesh.triangles(t, 2) << "\n";
  }
  for (std::size_t i = 0; i < mesh.boundary_nodes.size(); ++i) {
    out << "b " << mesh.boundary_nodes[i] << " " << mesh.markers[i] << "\n";
  }
}

void write_mesh_file(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "write_mesh_file: cannot open " + path);
  write_mesh(mesh, out);
  require(out.good(), "write_mesh_file: write failed for " + path);
}

TriMesh read_mesh(std::istream& in) {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;
  TriMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    char tag;
    ls >> tag;
    if (tag == 'v') {
      std::array<double, 2> v{};
      ls >> v[0] >> v[1];
      vertices.push_back(v);
    } else if (tag == 't') {
      std::array<int, 3> t{};
      ls >> t[0] >> t[1] >> t[2];
      triangles.push_back(t);
    } else if (tag == 'b') {
      int node;
      std::string marker;
      ls >> node >> marker;
      mesh.boundary_nodes.push_back(node);
      mesh.markers.push_back(marker);
    } else {
      throw Error("read_mesh: unknown line tag '" + std::string(1, tag) + "'");
    }
    require(!ls.fail(), "read_mesh: malformed line: " + line);
  }
  mesh.vertices.resize(static_cast<Index>(vertices.size()), 2);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    mesh.vertices(static_cast<Index>(i), 0) = vertices[i][0];
    mesh.vertices(static_cast<Index>(i), 1) = vertices[i][1];
  }
  mesh.triangles.resize(static_cast<Index>(triangles.size()), 3);
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    for (int k = 0; k < 3; ++k) mesh.triangles(static_cast<Index>(i), k) = triangles[i][k];
  }
  const int nb = static_cast<int>(mesh.boundary_nodes.size());
  for (int i = 0; i < nb; ++i) {
    mesh.boundary_edges.push_back({mesh.boundary_nodes[i], mesh.boundary_nodes[(i + 1) % nb]});
  }
  return mesh;
}

TriMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "read_mesh_file: cannot open " + path);
  return read_mesh(in);
}

std::uint64_t mesh_hash(const TriMesh& mesh) {
  std::uint64_t h = content_hash(mesh.vertices.data(), mesh.vertices.size());
  for (Index i = 0; i < mesh.triangles.size(); ++i) {
    h ^= static_cast<std::uint64_t>(mesh.triangles.data()[i]) + 0x9e3779b97f4a7c15ull +
         (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace uqpde
