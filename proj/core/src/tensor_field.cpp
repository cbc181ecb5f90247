#include "darkstore/tensor_field.hpp"

#include <algorithm>
#include <string>

#include "darkstore/error.hpp"

namespace darkstore {

BasisTensor basis_from_edge(Vec2 p_i, Vec2 p_next) {
  const Vec2 edge = p_next - p_i;
  const double len = edge.norm();
  if (!(len > 0.0)) {
    throw Error(ErrorCode::degenerate_edge, "basis_from_edge: zero-length edge");
  }
  return {p_i, len, wrap_angle(std::atan2(edge.y, edge.x))};
}

std::vector<BasisTensor> polygon_bases(const Polygon& poly) {
  std::vector<BasisTensor> out;
  out.reserve(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) out.push_back(basis_from_edge(poly[i], poly.edge_end(i)));
  return out;
}

std::optional<double> major_direction(const SymTensor2& t, double eps) {
  if (t.magnitude() <= eps) return std::nullopt;
  return wrap_half_turn(0.5 * std::atan2(t.b, t.a));
}

TensorField::TensorField(std::vector<BasisTensor> bases, double decay, double resolution,
                         const Rect& bounds)
    : bases_(std::move(bases)), decay_(decay), resolution_(resolution), bounds_(bounds),
      origin_(bounds.min) {
  if (!(decay > 0.0)) throw Error(ErrorCode::invalid_parameter, "tensor field decay must be positive");
  if (!(resolution > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "tensor field resolution must be positive");
  }
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "tensor field bounds must have positive area");
  }
  // Last lattice line lands on or beyond the far edge.
  nx_ = static_cast<std::size_t>(std::ceil(bounds.width() / resolution - 1e-9)) + 1;
  ny_ = static_cast<std::size_t>(std::ceil(bounds.height() / resolution - 1e-9)) + 1;
  grid_.resize(nx_ * ny_);
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) grid_[j * nx_ + i] = analytic(lattice_point(i, j));
  }
}

SymTensor2 TensorField::analytic(Vec2 p) const {
  SymTensor2 sum;
  for (const BasisTensor& basis : bases_) {
    const double w = std::exp(-decay_ * (p - basis.anchor).norm());
    const SymTensor2 t = basis.tensor();
    sum.a += w * t.a;
    sum.b += w * t.b;
  }
  return sum;
}

SymTensor2 TensorField::eval(Vec2 p) const {
  if (nx_ == 0 || ny_ == 0) throw Error(ErrorCode::empty_field, "tensor field has no grid");
  const double fx = (p.x - origin_.x) / resolution_;
  const double fy = (p.y - origin_.y) / resolution_;
  const double max_x = static_cast<double>(nx_ - 1);
  const double max_y = static_cast<double>(ny_ - 1);
  constexpr double tol = 1e-9;
  if (!(fx >= -tol && fy >= -tol && fx <= max_x + tol && fy <= max_y + tol)) {
    throw Error(ErrorCode::out_of_bounds, "tensor field evaluated outside its grid");
  }
  const double cx = std::clamp(fx, 0.0, max_x);
  const double cy = std::clamp(fy, 0.0, max_y);
  auto i0 = static_cast<std::size_t>(std::floor(cx));
  auto j0 = static_cast<std::size_t>(std::floor(cy));
  i0 = std::min(i0, nx_ > 1 ? nx_ - 2 : 0);
  j0 = std::min(j0, ny_ > 1 ? ny_ - 2 : 0);
  const std::size_t i1 = std::min(i0 + 1, nx_ - 1);
  const std::size_t j1 = std::min(j0 + 1, ny_ - 1);
  const double tx = cx - static_cast<double>(i0);
  const double ty = cy - static_cast<double>(j0);
  const SymTensor2 t00 = at(i0, j0);
  const SymTensor2 t10 = at(i1, j0);
  const SymTensor2 t01 = at(i0, j1);
  const SymTensor2 t11 = at(i1, j1);
  const double w00 = (1 - tx) * (1 - ty);
  const double w10 = tx * (1 - ty);
  const double w01 = (1 - tx) * ty;
  const double w11 = tx * ty;
  return {w00 * t00.a + w10 * t10.a + w01 * t01.a + w11 * t11.a,
          w00 * t00.b + w10 * t10.b + w01 * t01.b + w11 * t11.b};
}

TensorField build_field(std::span<const Polygon> polygons, double decay, double resolution,
                        const Rect& bounds) {
  if (polygons.empty()) throw Error(ErrorCode::empty_field, "build_field: no polygons");
  std::vector<BasisTensor> bases;
  for (const Polygon& poly : polygons) {
    auto b = polygon_bases(poly);
    bases.insert(bases.end(), b.begin(), b.end());
  }
  return TensorField(std::move(bases), decay, resolution, bounds);
}

std::vector<FieldGlyph> field_glyphs(const TensorField& field) {
  std::vector<FieldGlyph> out;
  for (std::size_t j = 0; j < field.ny(); ++j) {
    for (std::size_t i = 0; i < field.nx(); ++i) {
      if (auto dir = major_direction(field.at(i, j))) out.push_back({field.lattice_point(i, j), *dir});
    }
  }
  return out;
}

}  // namespace darkstore
