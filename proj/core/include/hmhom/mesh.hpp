#pragma once

#include <array>
#include <string>
#include <vector>

#include "hmhom/geometry.hpp"

namespace hmhom {

/// Watertight triangle surface mesh of one or more inclusions, with the
/// per-panel quantities the boundary operators need cached up front.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  // Per-triangle caches, filled by rebuild_cache().
  std::vector<Vec3> centroid;
  std::vector<double> area;
  std::vector<Vec3> normal;   // unit, pointing out of the owning inclusion
  std::vector<int> owner;     // inclusion id per triangle

  int panel_count() const { return static_cast<int>(triangles.size()); }

  /// Recomputes centroids, areas and normals. Normal orientation is taken
  /// from the winding order; callers that know the inclusion centers should
  /// use orient_outward afterwards.
  void rebuild_cache();

  /// Flips triangles whose normal points into the inclusion they belong to
  /// (dot(normal, centroid - center) <= 0) and refreshes the cache.
  void orient_outward(const std::vector<Vec3>& inclusion_centers);

  /// Appends another mesh, offsetting vertex indices and keeping owners.
  void append(const TriangleMesh& other);
};

/// Subdivided icosahedron projected on the sphere: 20 * 4^level triangles,
/// outward-oriented, watertight. level 0 is the icosahedron itself.
TriangleMesh icosphere_mesh(const Sphere& sphere, int level, int owner_id = 0);

/// One icosphere per inclusion, owners set to the inclusion indices.
TriangleMesh mesh_microstructure(const Microstructure& ms, int level);

/// Wavefront-style text export (v/f records) for external viewing.
std::string to_obj(const TriangleMesh& mesh);

}  // namespace hmhom
