#pragma once

#include <string>
#include <vector>

#include "vforms/integrate.hpp"

namespace vforms {

/// Built-in manifolds: box2, box3, box2_split, halfplane, disk, annulus, s1,
/// s2, plus disk_flipped (one collar orientation sign deliberately wrong, for
/// failure-detection scenarios). Throws std::invalid_argument on unknown
/// names.
Manifold catalog_manifold(const std::string& name);

struct CatalogEntry {
    std::string name;
    std::string description;
};

std::vector<CatalogEntry> catalog_manifolds();

/// A form whose coefficients are given in ambient coordinates, restricted to
/// the manifold chart-wise: on each chart the parametrization substitutes in
/// and each covector picks up the Jacobian minor determinant. Coefficient
/// arity must equal the ambient dimension; indices run over ambient axes.
Form ambient_form(const Manifold& m, std::string id, int degree, SpacePtr space,
                  const FormTable& ambient_table, FieldKind kind, std::optional<Box> support);

/// The same restriction map packaged for reuse: one piece per chart, the
/// chart's parametrization into a box chart of the ambient space.
SmoothMap embedding_map(const Manifold& m, const Manifold& ambient_box);
Manifold ambient_box_manifold(int dim);

}  // namespace vforms
