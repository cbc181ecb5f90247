#include "darkstore/catalog.hpp"

#include "darkstore/error.hpp"

namespace darkstore {

namespace {

constexpr double kPanel = 0.02;

// Evenly spaced boards from z0 with the given pitch. Top headroom measured to
// the underside of the top panel unless open_top is false.
FixtureTemplate shelving(std::string id, FixtureKind kind, Vec2 half, double height, double z0, double pitch,
                         int count, bool top_headroom) {
  FixtureTemplate t;
  t.id = std::move(id);
  t.kind = kind;
  t.half_extents = half;
  t.height = height;
  t.panel_thickness = kPanel;
  const Rect usable{{-half.x + kPanel, -half.y + kPanel}, {half.x - kPanel, half.y}};
  for (int i = 0; i < count; ++i) {
    Board b;
    b.index = i;
    b.z = z0 + pitch * i;
    b.usable = usable;
    if (i + 1 < count) {
      b.gap_to_next = pitch - kPanel;
    } else if (top_headroom) {
      b.gap_to_next = height - kPanel - b.z;
    }
    t.boards.push_back(b);
  }
  t.validate();
  return t;
}

}  // namespace

const std::vector<FixtureTemplate>& default_fixture_templates() {
  static const std::vector<FixtureTemplate> templates = [] {
    std::vector<FixtureTemplate> v;
    v.push_back(shelving("shelf_a", FixtureKind::shelf, {0.6, 0.25}, 1.8, 0.12, 0.33, 5, true));
    v.push_back(shelving("shelf_b", FixtureKind::shelf, {0.5, 0.25}, 1.6, 0.12, 0.37, 4, true));
    v.push_back(shelving("shelf_c", FixtureKind::shelf, {1.0, 0.3}, 1.4, 0.12, 0.43, 3, false));
    v.push_back(shelving("fridge_upright", FixtureKind::fridge, {0.45, 0.4}, 2.0, 0.2, 0.4, 4, false));
    v.push_back(shelving("fridge_chest", FixtureKind::fridge, {0.9, 0.4}, 0.9, 0.3, 0.5, 1, true));
    v.push_back(shelving("showcase", FixtureKind::showcase, {1.0, 0.45}, 1.2, 0.5, 0.35, 2, true));
    {
      FixtureTemplate p;
      p.id = "pallet";
      p.kind = FixtureKind::pallet;
      p.half_extents = {0.6, 0.4};
      p.height = 1.5;
      p.boards.push_back({0, 0.15, {{-0.6, -0.4}, {0.6, 0.4}}, 1.2});
      p.validate();
      v.push_back(p);
    }
    {
      FixtureTemplate b;
      b.id = "box";
      b.kind = FixtureKind::box;
      b.half_extents = {0.3, 0.3};
      b.height = 0.6;
      b.validate();
      v.push_back(b);
    }
    return v;
  }();
  return templates;
}

const std::vector<ProductSpec>& default_product_catalog() {
  static const std::vector<ProductSpec> products = [] {
    std::vector<ProductSpec> v{
        {"cereal_box", "cereal", {0.19, 0.07, 0.28}, false, 1, "synthetic:box"},
        {"pasta_pack", "pasta", {0.1, 0.06, 0.22}, false, 1, "synthetic:box"},
        {"rice_bag", "rice", {0.16, 0.08, 0.24}, false, 1, "synthetic:box"},
        {"tea_box", "tea", {0.14, 0.07, 0.07}, true, 3, "synthetic:box"},
        {"cracker_box", "snacks", {0.18, 0.05, 0.12}, true, 2, "synthetic:box"},
        {"chocolate_bar", "sweets", {0.16, 0.03, 0.08}, true, 3, "synthetic:box"},
        {"detergent_box", "household", {0.2, 0.12, 0.26}, false, 1, "synthetic:box"},
        {"tissue_box", "paper", {0.22, 0.12, 0.1}, true, 2, "synthetic:box"},
        {"milk_carton", "dairy", {0.07, 0.07, 0.2}, false, 1, "synthetic:box"},
        {"juice_carton", "juice", {0.09, 0.06, 0.24}, false, 1, "synthetic:box"},
        {"water_bottle", "water", {0.07, 0.07, 0.26}, false, 1, "synthetic:bottle"},
        {"soda_bottle", "soda", {0.09, 0.09, 0.28}, false, 1, "synthetic:bottle"},
        {"oil_bottle", "oil", {0.08, 0.08, 0.27}, false, 1, "synthetic:bottle"},
        {"shampoo_bottle", "care", {0.07, 0.07, 0.22}, false, 1, "synthetic:bottle"},
        {"soup_can", "canned", {0.07, 0.07, 0.1}, true, 3, "synthetic:can"},
        {"soda_can", "drinks", {0.066, 0.066, 0.12}, true, 2, "synthetic:can"},
        {"coffee_tin", "coffee", {0.1, 0.1, 0.13}, true, 2, "synthetic:can"},
        {"yoghurt_cup", "chilled", {0.08, 0.08, 0.09}, true, 2, "synthetic:can"},
        {"spice_jar", "spices", {0.05, 0.05, 0.11}, true, 2, "synthetic:can"},
        {"hanger_hook", "hardware", {0.12, 0.1, 0.16}, false, 1, "synthetic:l_shape"},
        {"shelf_bracket", "tools", {0.1, 0.08, 0.12}, true, 2, "synthetic:l_shape"},
    };
    for (const auto& p : v) p.validate();
    return v;
  }();
  return products;
}

const TextureCatalog& default_texture_catalog() {
  static const TextureCatalog catalog = [] {
    TextureCatalog c;
    auto fill = [](std::vector<std::string>& out, const char* prefix, int n) {
      for (int i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s_%02d", prefix, i);
        out.emplace_back(buf);
      }
    };
    fill(c.floor, "floor", 26);
    fill(c.wall, "wall", 17);
    fill(c.ceiling, "ceiling", 15);
    return c;
  }();
  return catalog;
}

TriMesh product_mesh(const ProductSpec& p) {
  const Vec3 d = p.dims;
  if (p.mesh_ref == "synthetic:box") return mesh::box(d, 12);
  if (p.mesh_ref == "synthetic:bottle" || p.mesh_ref == "synthetic:can") {
    auto m = p.mesh_ref == "synthetic:bottle" ? mesh::bottle(0.5 * std::min(d.x, d.y), d.z, 48, 40)
                                              : mesh::cylinder(0.5 * std::min(d.x, d.y), d.z, 48, 16);
    // Stretch the circle onto the footprint when it is not square.
    const double r = 0.5 * std::min(d.x, d.y);
    for (Vec3& v : m.vertices) {
      v.x *= 0.5 * d.x / r;
      v.y *= 0.5 * d.y / r;
    }
    return m;
  }
  if (p.mesh_ref == "synthetic:l_shape") {
    auto m = mesh::l_shape(d.x, d.z, 0.3 * std::min(d.x, d.z), d.y, 150);
    // The L lies in the x-z plane and is extruded along y.
    for (Vec3& v : m.vertices) {
      const Vec3 o = v;
      v = {o.x, o.z - 0.5 * d.y, o.y + 0.5 * d.z};
    }
    // The axis swap mirrors the mesh, so restore the winding.
    for (auto& t : m.triangles) std::swap(t[1], t[2]);
    return m;
  }
  throw Error(ErrorCode::invalid_parameter, "product '" + p.id + "': unknown mesh_ref '" + p.mesh_ref + "'");
}

}  // namespace darkstore
