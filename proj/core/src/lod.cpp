#include "darkstore/lod.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "darkstore/error.hpp"

namespace darkstore {

// ---------------------------------------------------------------------------
// TriMesh

double TriMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Vec3 a = vertices[tri[0]];
  const Vec3 b = vertices[tri[1]];
  const Vec3 c = vertices[tri[2]];
  return 0.5 * (b - a).cross(c - a).norm();
}

double TriMesh::area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) sum += triangle_area(t);
  return sum;
}

std::pair<Vec3, Vec3> TriMesh::bounds() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Vec3 lo{inf, inf, inf};
  Vec3 hi{-inf, -inf, -inf};
  for (const Vec3& v : vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
  }
  return {lo, hi};
}

double TriMesh::diagonal() const {
  if (vertices.empty()) return 0.0;
  const auto [lo, hi] = bounds();
  return (hi - lo).norm();
}

TriMesh TriMesh::scaled(double s) const {
  TriMesh out = *this;
  for (Vec3& v : out.vertices) v = v * s;
  return out;
}

void TriMesh::validate() const {
  for (const Vec3& v : vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
      throw Error(ErrorCode::invalid_parameter, "mesh has non-finite vertex");
    }
  }
  std::size_t degenerate = 0;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (std::uint32_t idx : triangles[t]) {
      if (idx >= vertices.size()) throw Error(ErrorCode::invalid_parameter, "mesh triangle index out of range");
    }
    if (triangle_area(t) <= 0.0) ++degenerate;
  }
  if (degenerate * 100 > triangles.size()) {
    throw Error(ErrorCode::invalid_parameter, "mesh has more than 1% degenerate triangles");
  }
}

// ---------------------------------------------------------------------------
// Generators

namespace {

class MeshBuilder {
 public:
  std::uint32_t vertex(const Vec3& v) {
    const std::array<long long, 3> key{std::llround(v.x * 1e9), std::llround(v.y * 1e9), std::llround(v.z * 1e9)};
    auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back(v);
    return it->second;
  }
  void triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    if (a != b && b != c && a != c) mesh_.triangles.push_back({a, b, c});
  }
  // Gridded parallelogram; the normal follows u x v.
  void grid(const Vec3& origin, const Vec3& u, const Vec3& v, int nu, int nv) {
    std::vector<std::uint32_t> ids(static_cast<std::size_t>((nu + 1) * (nv + 1)));
    for (int j = 0; j <= nv; ++j) {
      for (int i = 0; i <= nu; ++i) {
        ids[static_cast<std::size_t>(j * (nu + 1) + i)] =
            vertex(origin + u * (static_cast<double>(i) / nu) + v * (static_cast<double>(j) / nv));
      }
    }
    for (int j = 0; j < nv; ++j) {
      for (int i = 0; i < nu; ++i) {
        const auto a = ids[static_cast<std::size_t>(j * (nu + 1) + i)];
        const auto b = ids[static_cast<std::size_t>(j * (nu + 1) + i + 1)];
        const auto c = ids[static_cast<std::size_t>((j + 1) * (nu + 1) + i + 1)];
        const auto d = ids[static_cast<std::size_t>((j + 1) * (nu + 1) + i)];
        triangle(a, b, c);
        triangle(a, c, d);
      }
    }
  }
  TriMesh take() { return std::move(mesh_); }

 private:
  TriMesh mesh_;
  std::map<std::array<long long, 3>, std::uint32_t> index_;
};

TriMesh aabb_mesh(const Vec3& lo, const Vec3& hi, int n) {
  MeshBuilder b;
  const Vec3 ex{hi.x - lo.x, 0, 0};
  const Vec3 ey{0, hi.y - lo.y, 0};
  const Vec3 ez{0, 0, hi.z - lo.z};
  b.grid(lo, ey, ex, n, n);            // bottom, -z
  b.grid(lo + ez, ex, ey, n, n);       // top, +z
  b.grid(lo, ex, ez, n, n);            // front, -y
  b.grid(lo + ey, ez, ex, n, n);       // back, +y
  b.grid(lo, ez, ey, n, n);            // left, -x
  b.grid(lo + ex, ey, ez, n, n);       // right, +x
  return b.take();
}

// Surface of revolution about the z axis through (cx, cy). profile holds
// (radius, z) pairs from bottom to top; both ends are capped with fans.
TriMesh revolve(const std::vector<std::pair<double, double>>& profile, int segments, double cx = 0.0,
                double cy = 0.0) {
  MeshBuilder b;
  const std::size_t m = profile.size();
  std::vector<std::vector<std::uint32_t>> rings(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (int s = 0; s < segments; ++s) {
      const double a = 2.0 * kPi * s / segments;
      rings[r].push_back(b.vertex({cx + profile[r].first * std::cos(a), cy + profile[r].first * std::sin(a),
                                   profile[r].second}));
    }
  }
  for (std::size_t r = 0; r + 1 < m; ++r) {
    for (int s = 0; s < segments; ++s) {
      const int n = (s + 1) % segments;
      b.triangle(rings[r][s], rings[r][n], rings[r + 1][n]);
      b.triangle(rings[r][s], rings[r + 1][n], rings[r + 1][s]);
    }
  }
  const std::uint32_t bottom = b.vertex({cx, cy, profile.front().second});
  const std::uint32_t top = b.vertex({cx, cy, profile.back().second});
  for (int s = 0; s < segments; ++s) {
    const int n = (s + 1) % segments;
    b.triangle(bottom, rings.front()[n], rings.front()[s]);
    b.triangle(top, rings.back()[s], rings.back()[n]);
  }
  return b.take();
}

}  // namespace

namespace mesh {

TriMesh box(Vec3 size, int subdivisions) {
  return aabb_mesh({-0.5 * size.x, -0.5 * size.y, 0.0}, {0.5 * size.x, 0.5 * size.y, size.z},
                   std::max(1, subdivisions));
}

TriMesh cylinder(double radius, double height, int segments, int rings) {
  std::vector<std::pair<double, double>> profile;
  rings = std::max(1, rings);
  for (int r = 0; r <= rings; ++r) profile.emplace_back(radius, height * r / rings);
  return revolve(profile, segments);
}

TriMesh bottle(double radius, double height, int segments, int profile_steps) {
  std::vector<std::pair<double, double>> profile;
  const double neck = 0.35 * radius;
  for (int i = 0; i <= profile_steps; ++i) {
    const double t = static_cast<double>(i) / profile_steps;
    double r = radius;
    if (t > 0.8) {
      r = neck;
    } else if (t > 0.55) {
      const double s = (t - 0.55) / 0.25;
      r = neck + (radius - neck) * 0.5 * (1.0 + std::cos(kPi * s));
    }
    profile.emplace_back(r, t * height);
  }
  return revolve(profile, segments);
}

TriMesh l_shape(double size_x, double size_y, double thickness, double height, int density) {
  MeshBuilder b;
  const double ox = -0.5 * size_x;
  const double oy = -0.5 * size_y;
  const std::vector<Vec2> outline{{0, 0}, {size_x, 0}, {size_x, thickness}, {thickness, thickness},
                                  {thickness, size_y}, {0, size_y}};
  auto cells = [&](double len) { return std::max(1, static_cast<int>(std::ceil(len * density))); };
  const Vec3 up{0, 0, height};
  for (std::size_t i = 0; i < outline.size(); ++i) {
    const Vec2 a = outline[i];
    const Vec2 c = outline[(i + 1) % outline.size()];
    const Vec3 p{ox + a.x, oy + a.y, 0.0};
    const Vec3 e{c.x - a.x, c.y - a.y, 0.0};
    b.grid(p, e, up, cells(e.norm()), cells(height));
  }
  // Caps split into the two arms of the L.
  const Vec3 arm_a_origin{ox, oy, 0.0};
  const Vec3 arm_b_origin{ox, oy + thickness, 0.0};
  const Vec3 ax{size_x, 0, 0};
  const Vec3 ay{0, thickness, 0};
  const Vec3 bx{thickness, 0, 0};
  const Vec3 by{0, size_y - thickness, 0};
  b.grid(arm_a_origin, ay, ax, cells(thickness), cells(size_x));
  b.grid(arm_b_origin, by, bx, cells(size_y - thickness), cells(thickness));
  b.grid(arm_a_origin + up, ax, ay, cells(size_x), cells(thickness));
  b.grid(arm_b_origin + up, bx, by, cells(thickness), cells(size_y - thickness));
  return b.take();
}

TriMesh uv_sphere(double radius, int stacks, int slices) {
  std::vector<std::pair<double, double>> profile;
  // Revolve a meridian; the fans close the poles.
  for (int i = 1; i < stacks; ++i) {
    const double phi = kPi * (1.0 - static_cast<double>(i) / stacks);
    profile.emplace_back(radius * std::sin(phi), radius * std::cos(phi));
  }
  auto m = revolve(profile, slices);
  // Move the cap centres onto the poles.
  for (Vec3& v : m.vertices) {
    if (v.x == 0.0 && v.y == 0.0) v.z = v.z < 0.0 ? -radius : radius;
  }
  return m;
}

}  // namespace mesh

// ---------------------------------------------------------------------------
// Sampling and Chamfer distance

std::vector<Vec3> sample_surface_points(const TriMesh& mesh, std::size_t n, Rng& rng) {
  if (mesh.empty()) throw Error(ErrorCode::empty_mesh, "sample_surface_points: empty mesh");
  if (n == 0) throw Error(ErrorCode::invalid_parameter, "sample_surface_points: n must be >= 1");
  std::vector<double> cdf(mesh.tri_count());
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.tri_count(); ++t) {
    total += mesh.triangle_area(t);
    cdf[t] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::empty_mesh, "sample_surface_points: mesh has zero area");
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double pick = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), pick);
    const auto t = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    const auto& tri = mesh.triangles[t];
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    out.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
  }
  return out;
}

namespace {

double coord(const Vec3& v, int axis) { return axis == 0 ? v.x : (axis == 1 ? v.y : v.z); }

constexpr std::size_t kLeafSize = 8;

}  // namespace

KdTree3::KdTree3(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  if (!points_.empty()) build(0, points_.size(), 0);
}

void KdTree3::build(std::size_t lo, std::size_t hi, int depth) {
  if (hi - lo <= kLeafSize) return;
  const int axis = depth % 3;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(points_.begin() + static_cast<std::ptrdiff_t>(lo), points_.begin() + static_cast<std::ptrdiff_t>(mid),
                   points_.begin() + static_cast<std::ptrdiff_t>(hi),
                   [axis](const Vec3& a, const Vec3& b) { return coord(a, axis) < coord(b, axis); });
  build(lo, mid, depth + 1);
  build(mid + 1, hi, depth + 1);
}

void KdTree3::search(std::size_t lo, std::size_t hi, int depth, const Vec3& q, double& best2) const {
  if (hi - lo <= kLeafSize) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec3 d = points_[i] - q;
      best2 = std::min(best2, d.dot(d));
    }
    return;
  }
  const int axis = depth % 3;
  const std::size_t mid = lo + (hi - lo) / 2;
  const Vec3& m = points_[mid];
  const Vec3 d = m - q;
  best2 = std::min(best2, d.dot(d));
  const double delta = coord(q, axis) - coord(m, axis);
  if (delta < 0.0) {
    search(lo, mid, depth + 1, q, best2);
    if (delta * delta < best2) search(mid + 1, hi, depth + 1, q, best2);
  } else {
    search(mid + 1, hi, depth + 1, q, best2);
    if (delta * delta < best2) search(lo, mid, depth + 1, q, best2);
  }
}

double KdTree3::nearest_distance(const Vec3& q) const {
  if (points_.empty()) return std::numeric_limits<double>::infinity();
  double best2 = std::numeric_limits<double>::infinity();
  search(0, points_.size(), 0, q, best2);
  return std::sqrt(best2);
}

namespace {

double mean_nearest(std::span<const Vec3> from, const KdTree3& to) {
  double sum = 0.0;
  for (const Vec3& p : from) sum += to.nearest_distance(p);
  return sum / static_cast<double>(from.size());
}

}  // namespace

double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::invalid_parameter, "chamfer_distance: empty point set");
  const KdTree3 ta(a);
  const KdTree3 tb(b);
  return mean_nearest(a, tb) + mean_nearest(b, ta);
}

// ---------------------------------------------------------------------------
// Simplification

TriMesh decimate_cluster(const TriMesh& mesh, double cell) {
  if (!(cell > 0.0)) throw Error(ErrorCode::invalid_parameter, "decimate_cluster: cell must be positive");
  if (mesh.vertices.empty()) return {};
  const Vec3 lo = mesh.bounds().first;
  std::map<std::array<long long, 3>, std::uint32_t> cell_index;
  std::vector<std::uint32_t> remap(mesh.vertices.size());
  std::vector<Vec3> sums;
  std::vector<double> counts;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Vec3 p = mesh.vertices[v] - lo;
    const std::array<long long, 3> key{static_cast<long long>(std::floor(p.x / cell)),
                                       static_cast<long long>(std::floor(p.y / cell)),
                                       static_cast<long long>(std::floor(p.z / cell))};
    auto [it, inserted] = cell_index.try_emplace(key, static_cast<std::uint32_t>(sums.size()));
    if (inserted) {
      sums.push_back({});
      counts.push_back(0.0);
    }
    sums[it->second] += mesh.vertices[v];
    counts[it->second] += 1.0;
    remap[v] = it->second;
  }
  TriMesh out;
  out.vertices.resize(sums.size());
  for (std::size_t c = 0; c < sums.size(); ++c) out.vertices[c] = sums[c] / counts[c];

  std::set<std::array<std::uint32_t, 3>> seen;
  std::vector<std::array<std::uint32_t, 3>> tris;
  for (const auto& t : mesh.triangles) {
    const std::array<std::uint32_t, 3> r{remap[t[0]], remap[t[1]], remap[t[2]]};
    if (r[0] == r[1] || r[1] == r[2] || r[0] == r[2]) continue;
    const Vec3 n = (out.vertices[r[1]] - out.vertices[r[0]]).cross(out.vertices[r[2]] - out.vertices[r[0]]);
    if (!(n.norm() > 0.0)) continue;
    auto key = r;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) continue;
    tris.push_back(r);
  }
  // Compact away vertices no triangle references.
  std::vector<std::int64_t> used(out.vertices.size(), -1);
  TriMesh compact;
  for (auto& t : tris) {
    for (auto& idx : t) {
      if (used[idx] < 0) {
        used[idx] = static_cast<std::int64_t>(compact.vertices.size());
        compact.vertices.push_back(out.vertices[idx]);
      }
      idx = static_cast<std::uint32_t>(used[idx]);
    }
    compact.triangles.push_back(t);
  }
  return compact;
}

TriMesh fit_primitive(const TriMesh& mesh, PrimitiveKind kind, int cylinder_segments) {
  if (mesh.empty()) throw Error(ErrorCode::empty_mesh, "fit_primitive: empty mesh");
  const auto [lo, hi] = mesh.bounds();
  if (kind == PrimitiveKind::box) return aabb_mesh(lo, hi, 1);

  // Area-weighted centroid of the surface, projected on the floor.
  double area = 0.0;
  Vec2 c{};
  for (std::size_t t = 0; t < mesh.tri_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double a = mesh.triangle_area(t);
    const Vec3 centroid = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    c = c + centroid.xy() * a;
    area += a;
  }
  c = area > 0.0 ? c / area : (lo.xy() + hi.xy()) * 0.5;
  double radius = 0.0;
  for (const Vec3& v : mesh.vertices) radius = std::max(radius, (v.xy() - c).norm());
  return revolve({{radius, lo.z}, {radius, hi.z}}, cylinder_segments, c.x, c.y);
}

// ---------------------------------------------------------------------------
// Selection

std::string LodCandidate::tag() const {
  switch (method) {
    case LodMethod::original: return "original";
    case LodMethod::box_fit: return "box_fit";
    case LodMethod::cylinder_fit: return "cylinder_fit";
    case LodMethod::external: return "external:" + external_name;
    case LodMethod::cluster: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "cluster(%.6g)", cell_fraction);
      return buf;
    }
  }
  return "original";
}

std::vector<std::size_t> pareto_front(std::span<const LodCandidate> candidates) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (candidates[a].tri_count != candidates[b].tri_count) return candidates[a].tri_count < candidates[b].tri_count;
    return candidates[a].chamfer < candidates[b].chamfer;
  });
  std::vector<std::size_t> front;
  double best = std::numeric_limits<double>::infinity();
  std::size_t g = 0;
  while (g < order.size()) {
    std::size_t end = g;
    while (end < order.size() && candidates[order[end]].tri_count == candidates[order[g]].tri_count) ++end;
    const double group_min = candidates[order[g]].chamfer;
    if (group_min < best) {
      for (std::size_t k = g; k < end && candidates[order[k]].chamfer == group_min; ++k) front.push_back(order[k]);
      best = group_min;
    }
    g = end;
  }
  std::sort(front.begin(), front.end());
  return front;
}

std::vector<LodScore> lod_scores(std::span<const LodCandidate> candidates) {
  std::size_t reference = 0;
  bool found = false;
  double max_chamfer = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    max_chamfer = std::max(max_chamfer, candidates[i].chamfer);
    if (candidates[i].method == LodMethod::original && !found) {
      reference = i;
      found = true;
    }
  }
  if (!found) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (candidates[i].tri_count > candidates[reference].tri_count) reference = i;
    }
  }
  const double ref_tris = static_cast<double>(std::max<std::size_t>(1, candidates[reference].tri_count));
  std::vector<LodScore> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    out.push_back({max_chamfer > 0.0 ? c.chamfer / max_chamfer : 0.0,
                   static_cast<double>(c.tri_count) / ref_tris});
  }
  return out;
}

std::size_t select_lod(std::span<const LodCandidate> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::invalid_parameter, "select_lod: no candidates");
  const auto scores = lod_scores(candidates);
  const auto front = pareto_front(candidates);
  std::size_t best = front.front();
  for (std::size_t i : front) {
    const double si = scores[i].total();
    const double sb = scores[best].total();
    if (si < sb) {
      best = i;
    } else if (si == sb) {
      if (candidates[i].tri_count < candidates[best].tri_count ||
          (candidates[i].tri_count == candidates[best].tri_count && candidates[i].tag() < candidates[best].tag())) {
        best = i;
      }
    }
  }
  return best;
}

std::vector<LodCandidate> generate_candidates(const TriMesh& original, const LodParams& params,
                                              std::span<const ExternalMesh> external) {
  if (original.empty()) throw Error(ErrorCode::empty_mesh, "generate_candidates: empty mesh");
  std::vector<LodCandidate> out;
  LodCandidate orig;
  orig.mesh = original;
  orig.method = LodMethod::original;
  orig.tri_count = original.tri_count();
  out.push_back(orig);

  const double diag = original.diagonal();
  for (double f : params.cluster_fractions) {
    LodCandidate c;
    c.method = LodMethod::cluster;
    c.cell = f * diag;
    c.cell_fraction = f;
    c.mesh = decimate_cluster(original, c.cell);
    out.push_back(std::move(c));
  }
  {
    LodCandidate c;
    c.method = LodMethod::box_fit;
    c.mesh = fit_primitive(original, PrimitiveKind::box);
    out.push_back(std::move(c));
  }
  {
    LodCandidate c;
    c.method = LodMethod::cylinder_fit;
    c.mesh = fit_primitive(original, PrimitiveKind::cylinder, params.cylinder_segments);
    out.push_back(std::move(c));
  }
  for (const ExternalMesh& e : external) {
    LodCandidate c;
    c.method = LodMethod::external;
    c.external_name = e.name;
    c.mesh = e.mesh;
    out.push_back(std::move(c));
  }
  // Degenerate (empty or zero-area) candidates are excluded, as are any that
  // would exceed the original triangle budget.
  std::erase_if(out, [&](const LodCandidate& c) {
    return c.method != LodMethod::original &&
           (c.mesh.empty() || !(c.mesh.area() > 0.0) || c.mesh.tri_count() > original.tri_count());
  });

  Rng ref_rng(derive_seed(params.seed, "lod/reference"));
  const auto ref_points = sample_surface_points(original, params.samples, ref_rng);
  const KdTree3 ref_tree(ref_points);
  for (auto& c : out) {
    c.tri_count = c.mesh.tri_count();
    if (c.method == LodMethod::original) {
      c.chamfer = 0.0;
      continue;
    }
    Rng rng(derive_seed(params.seed, "lod/candidate/" + c.tag()));
    const auto pts = sample_surface_points(c.mesh, params.samples, rng);
    const KdTree3 tree(pts);
    c.chamfer = mean_nearest(ref_points, tree) + mean_nearest(pts, ref_tree);
  }
  return out;
}

LodResult optimize_asset(const std::string& asset_id, const TriMesh& mesh, const LodParams& params,
                         std::span<const ExternalMesh> external) {
  LodResult r;
  r.candidates = generate_candidates(mesh, params, external);
  r.front = pareto_front(r.candidates);
  r.selected = select_lod(r.candidates);
  const auto scores = lod_scores(r.candidates);
  const LodCandidate& sel = r.candidates[r.selected];
  r.record = {asset_id, sel.tag(), mesh.tri_count(), sel.tri_count, sel.chamfer,
              scores[r.selected].rel_dist, scores[r.selected].rel_tris};
  return r;
}

std::vector<SyntheticAsset> synthetic_assets() {
  std::vector<SyntheticAsset> out;
  out.push_back({"synthetic_box", "box", mesh::box({0.12, 0.08, 0.2}, 29)});
  out.push_back({"synthetic_bottle", "bottle", mesh::bottle(0.04, 0.28, 64, 78)});
  out.push_back({"synthetic_l_shape", "l_shape", mesh::l_shape(0.2, 0.16, 0.05, 0.12, 200)});
  return out;
}

// ---------------------------------------------------------------------------
// OBJ

TriMesh read_obj(std::istream& in) {
  TriMesh m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v.x >> v.y >> v.z)) {
        throw Error(ErrorCode::parse_error, "OBJ line " + std::to_string(line_no) + ": bad vertex");
      }
      m.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<std::uint32_t> face;
      std::string tok;
      while (ss >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        long long idx = 0;
        try {
          idx = std::stoll(head);
        } catch (const std::exception&) {
          throw Error(ErrorCode::parse_error, "OBJ line " + std::to_string(line_no) + ": bad face index");
        }
        if (idx < 0) idx += static_cast<long long>(m.vertices.size()) + 1;
        if (idx < 1 || idx > static_cast<long long>(m.vertices.size())) {
          throw Error(ErrorCode::parse_error, "OBJ line " + std::to_string(line_no) + ": face index out of range");
        }
        face.push_back(static_cast<std::uint32_t>(idx - 1));
      }
      if (face.size() < 3) throw Error(ErrorCode::parse_error, "OBJ line " + std::to_string(line_no) + ": face needs 3 indices");
      for (std::size_t k = 1; k + 1 < face.size(); ++k) m.triangles.push_back({face[0], face[k], face[k + 1]});
    }
  }
  return m;
}

TriMesh read_obj_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open OBJ file '" + path + "'");
  return read_obj(in);
}

void write_obj(std::ostream& out, const TriMesh& mesh) {
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_obj_file(const std::string& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::parse_error, "cannot write OBJ file '" + path + "'");
  write_obj(out, mesh);
}

}  // namespace darkstore
