#pragma once

#include <string>
#include <vector>

#include "darkstore/arrangement.hpp"
#include "darkstore/layout.hpp"
#include "darkstore/lod.hpp"

namespace darkstore {

// Built-in fixture templates: three shelf variants, upright and chest
// fridges, a showcase, a pallet and a box.
const std::vector<FixtureTemplate>& default_fixture_templates();
// Built-in products, one per category.
const std::vector<ProductSpec>& default_product_catalog();
const TextureCatalog& default_texture_catalog();

// Canonical mesh of a product: origin at the bottom centre, front facing +y,
// bounding box equal to dims. mesh_ref selects the shape
// ("synthetic:box", "synthetic:bottle", "synthetic:can", "synthetic:l_shape").
TriMesh product_mesh(const ProductSpec& product);

}  // namespace darkstore
