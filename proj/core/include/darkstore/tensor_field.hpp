#pragma once

#include <optional>
#include <span>
#include <vector>

#include "darkstore/geometry.hpp"

namespace darkstore {

// Symmetric traceless 2x2 tensor [[a, b], [b, -a]].
struct SymTensor2 {
  double a = 0.0;
  double b = 0.0;

  SymTensor2 operator+(const SymTensor2& o) const { return {a + o.a, b + o.b}; }
  SymTensor2 operator*(double s) const { return {a * s, b * s}; }
  bool operator==(const SymTensor2&) const = default;
  double magnitude() const { return std::hypot(a, b); }
};

struct BasisTensor {
  Vec2 anchor;
  double magnitude = 0.0;  // edge length
  double angle = 0.0;      // edge direction, (-pi, pi]

  SymTensor2 tensor() const {
    return {magnitude * std::cos(2.0 * angle), magnitude * std::sin(2.0 * angle)};
  }
};

// Edge from p_i to p_next; throws degenerate_edge on coincident points.
BasisTensor basis_from_edge(Vec2 p_i, Vec2 p_next);

// One basis per polygon vertex, using the edge that leaves it.
std::vector<BasisTensor> polygon_bases(const Polygon& poly);

inline constexpr double kDegenerateTensor = 1e-6;

// Direction of the major eigenvector in [0, pi), or nullopt when the tensor
// is numerically zero.
std::optional<double> major_direction(const SymTensor2& t, double eps = kDegenerateTensor);

// Exponentially weighted sum of basis tensors, cached on a regular lattice.
// The basis list is kept so the grid can be checked against exact sums.
class TensorField {
 public:
  TensorField() = default;
  TensorField(std::vector<BasisTensor> bases, double decay, double resolution, const Rect& bounds);

  // Exact weighted sum at p.
  SymTensor2 analytic(Vec2 p) const;
  // Bilinear interpolation of the lattice; throws out_of_bounds outside it.
  SymTensor2 eval(Vec2 p) const;

  SymTensor2 at(std::size_t i, std::size_t j) const { return grid_[j * nx_ + i]; }
  Vec2 lattice_point(std::size_t i, std::size_t j) const {
    return {origin_.x + static_cast<double>(i) * resolution_,
            origin_.y + static_cast<double>(j) * resolution_};
  }

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double decay() const { return decay_; }
  double resolution() const { return resolution_; }
  const Rect& bounds() const { return bounds_; }
  const std::vector<BasisTensor>& bases() const { return bases_; }
  bool empty() const { return bases_.empty(); }

 private:
  std::vector<BasisTensor> bases_;
  double decay_ = 1.0;
  double resolution_ = 1.0;
  Rect bounds_{};
  Vec2 origin_{};
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<SymTensor2> grid_;
};

// Polygons are expected to be resampled already. Throws empty_field when
// polygons is empty.
TensorField build_field(std::span<const Polygon> polygons, double decay, double resolution,
                        const Rect& bounds);

struct FieldGlyph {
  Vec2 point;
  double direction = 0.0;
};

// Major direction at every lattice point whose tensor is not degenerate.
std::vector<FieldGlyph> field_glyphs(const TensorField& field);

}  // namespace darkstore
