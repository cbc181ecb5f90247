#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "darkstore/geometry.hpp"
#include "darkstore/rng.hpp"

namespace darkstore {

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  std::size_t tri_count() const { return triangles.size(); }
  bool empty() const { return triangles.empty(); }
  double triangle_area(std::size_t t) const;
  double area() const;
  std::pair<Vec3, Vec3> bounds() const;
  double diagonal() const;
  TriMesh scaled(double s) const;
  // Indices in range, finite coordinates, at most 1% zero-area triangles.
  void validate() const;
  bool operator==(const TriMesh&) const = default;
};

namespace mesh {

// Synthetic asset generators. Shared vertices are welded.
TriMesh box(Vec3 size, int subdivisions);
TriMesh cylinder(double radius, double height, int segments, int rings = 1);
// Revolved bottle profile: body, shoulder and neck.
TriMesh bottle(double radius, double height, int segments, int profile_steps);
// L-shaped prism with the given overall footprint and thickness.
TriMesh l_shape(double size_x, double size_y, double thickness, double height, int density);
TriMesh uv_sphere(double radius, int stacks, int slices);

}  // namespace mesh

std::vector<Vec3> sample_surface_points(const TriMesh& mesh, std::size_t n, Rng& rng);

// Static k-d tree over a point set for nearest-neighbour queries.
class KdTree3 {
 public:
  explicit KdTree3(std::span<const Vec3> points);
  double nearest_distance(const Vec3& q) const;

 private:
  void build(std::size_t lo, std::size_t hi, int depth);
  void search(std::size_t lo, std::size_t hi, int depth, const Vec3& q, double& best2) const;

  std::vector<Vec3> points_;
};

// Symmetric sum of mean nearest-neighbour distances (un-squared).
double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b);

// Vertex clustering on a cubic grid; collapsed triangles are dropped.
TriMesh decimate_cluster(const TriMesh& mesh, double cell);

enum class PrimitiveKind { box, cylinder };
TriMesh fit_primitive(const TriMesh& mesh, PrimitiveKind kind, int cylinder_segments = 16);

enum class LodMethod { original, cluster, box_fit, cylinder_fit, external };

struct LodCandidate {
  TriMesh mesh;
  LodMethod method = LodMethod::original;
  double cell = 0.0;          // cluster cell size, metres
  double cell_fraction = 0.0; // the same size over the original's bounding-box diagonal
  std::string external_name;  // for externally produced meshes
  std::size_t tri_count = 0;
  double chamfer = 0.0;

  // Scale-free name; cluster candidates are named by cell_fraction.
  std::string tag() const;
};

struct LodScore {
  double rel_dist = 0.0;
  double rel_tris = 0.0;
  double total() const { return rel_dist + rel_tris; }
};

// Indices of candidates not dominated in (chamfer, tri_count).
std::vector<std::size_t> pareto_front(std::span<const LodCandidate> candidates);
// Relative units: chamfer over the largest chamfer, triangles over the
// original triangle count.
std::vector<LodScore> lod_scores(std::span<const LodCandidate> candidates);
// Front member with the smallest rel_dist + rel_tris.
std::size_t select_lod(std::span<const LodCandidate> candidates);

struct LodParams {
  std::size_t samples = 8192;
  // Cluster cell sizes as fractions of the bounding-box diagonal.
  std::vector<double> cluster_fractions{0.005, 0.01, 0.02, 0.04, 0.08, 0.16};
  int cylinder_segments = 16;
  std::uint64_t seed = 0;
  bool operator==(const LodParams&) const = default;
};

struct ExternalMesh {
  std::string name;
  TriMesh mesh;
};

// Original plus built-in and external candidates, each scored against the
// original by sampled Chamfer distance. Empty candidates are dropped.
std::vector<LodCandidate> generate_candidates(const TriMesh& original, const LodParams& params,
                                              std::span<const ExternalMesh> external = {});

struct LodRecord {
  std::string asset_id;
  std::string method;
  std::size_t tri_before = 0;
  std::size_t tri_after = 0;
  double chamfer = 0.0;
  double rel_dist = 0.0;
  double rel_tris = 0.0;
};

struct LodResult {
  std::vector<LodCandidate> candidates;
  std::vector<std::size_t> front;
  std::size_t selected = 0;
  LodRecord record;
};

LodResult optimize_asset(const std::string& asset_id, const TriMesh& mesh, const LodParams& params,
                         std::span<const ExternalMesh> external = {});

struct SyntheticAsset {
  std::string id;
  std::string shape;  // box, bottle, l_shape
  TriMesh mesh;
};

// Bundled synthetic benchmark assets of roughly 10k triangles each.
std::vector<SyntheticAsset> synthetic_assets();

// ASCII OBJ with v and f records. Polygonal faces are fan-triangulated;
// texture and normal indices are ignored.
TriMesh read_obj(std::istream& in);
TriMesh read_obj_file(const std::string& path);
void write_obj(std::ostream& out, const TriMesh& mesh);
void write_obj_file(const std::string& path, const TriMesh& mesh);

}  // namespace darkstore
