#include "hmhom/mesh.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace hmhom {

void TriangleMesh::rebuild_cache() {
  const std::size_t n = triangles.size();
  centroid.resize(n);
  area.resize(n);
  normal.resize(n);
  if (owner.size() != n) owner.assign(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    const Vec3& a = vertices[triangles[t][0]];
    const Vec3& b = vertices[triangles[t][1]];
    const Vec3& c = vertices[triangles[t][2]];
    centroid[t] = (a + b + c) / 3.0;
    Vec3 cross = (b - a).cross(c - a);
    const double doubled = cross.norm();
    if (!(doubled > 0.0)) throw std::invalid_argument("degenerate triangle in mesh");
    area[t] = 0.5 * doubled;
    normal[t] = cross / doubled;
  }
}

void TriangleMesh::orient_outward(const std::vector<Vec3>& inclusion_centers) {
  rebuild_cache();
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const Vec3& ctr = inclusion_centers.at(static_cast<std::size_t>(owner[t]));
    if (normal[t].dot(centroid[t] - ctr) <= 0.0) {
      std::swap(triangles[t][1], triangles[t][2]);
      normal[t] = -normal[t];
    }
  }
}

void TriangleMesh::append(const TriangleMesh& other) {
  const int offset = static_cast<int>(vertices.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  for (const auto& tri : other.triangles)
    triangles.push_back({tri[0] + offset, tri[1] + offset, tri[2] + offset});
  centroid.insert(centroid.end(), other.centroid.begin(), other.centroid.end());
  area.insert(area.end(), other.area.begin(), other.area.end());
  normal.insert(normal.end(), other.normal.begin(), other.normal.end());
  owner.insert(owner.end(), other.owner.begin(), other.owner.end());
}

namespace {

struct IcosphereBuilder {
  std::vector<Vec3> verts;                       // on the unit sphere
  std::vector<std::array<int, 3>> faces;
  std::map<std::pair<int, int>, int> midpoint;   // edge -> split vertex

  int add_vertex(const Vec3& v) {
    verts.push_back(v.normalized());
    return static_cast<int>(verts.size()) - 1;
  }

  int split(int i, int j) {
    auto key = std::minmax(i, j);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = add_vertex(0.5 * (verts[i] + verts[j]));
    midpoint.emplace(key, id);
    return id;
  }

  void base_icosahedron() {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    const double pts[12][3] = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                               {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                               {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (const auto& p : pts) add_vertex(Vec3{p[0], p[1], p[2]});
    const int f[20][3] = {{0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                          {1, 5, 9},  {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                          {3, 9, 4},  {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                          {4, 9, 5},  {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (const auto& tri : f) faces.push_back({tri[0], tri[1], tri[2]});
  }

  void subdivide() {
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& tri : faces) {
      const int ab = split(tri[0], tri[1]);
      const int bc = split(tri[1], tri[2]);
      const int ca = split(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
};

}  // namespace

TriangleMesh icosphere_mesh(const Sphere& sphere, int level, int owner_id) {
  if (level < 0) throw std::invalid_argument("subdivision level must be >= 0");
  IcosphereBuilder b;
  b.base_icosahedron();
  for (int l = 0; l < level; ++l) b.subdivide();

  TriangleMesh mesh;
  mesh.vertices.reserve(b.verts.size());
  for (const Vec3& v : b.verts) mesh.vertices.push_back(sphere.center + sphere.radius * v);
  mesh.triangles = std::move(b.faces);
  mesh.owner.assign(mesh.triangles.size(), owner_id);
  mesh.orient_outward(std::vector<Vec3>(static_cast<std::size_t>(owner_id) + 1, sphere.center));
  return mesh;
}

TriangleMesh mesh_microstructure(const Microstructure& ms, int level) {
  TriangleMesh mesh;
  for (std::size_t a = 0; a < ms.spheres.size(); ++a)
    mesh.append(icosphere_mesh(ms.spheres[a], level, static_cast<int>(a)));
  return mesh;
}

std::string to_obj(const TriangleMesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  for (const Vec3& v : mesh.vertices) out << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const auto& t : mesh.triangles)
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  return out.str();
}

}  // namespace hmhom
