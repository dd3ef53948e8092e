#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vforms/chart.hpp"
#include "vforms/coefficient.hpp"

namespace vforms {

enum class FieldKind : std::uint8_t { smooth, integrable };

/// Multi-index of an (r,s) tensor coefficient: r contravariant slots followed
/// by s covariant slots, entries in 1..N.
struct TensorIndex {
    std::vector<int> up, lo;
    auto operator<=>(const TensorIndex&) const = default;
};

using TensorTable = std::map<TensorIndex, CoefficientFn>;

/// Piecewise-defined smooth map between manifolds: one expression list per
/// (source chart, destination chart) pair it is declared on. The optional
/// inverse marks a declared diffeomorphism, which integrable pullback needs.
struct SmoothMapPiece {
    std::string src_chart, dst_chart;
    std::vector<Expr> exprs;
    std::optional<std::vector<Expr>> inverse;
};

struct SmoothMap {
    std::string id;
    std::string src_manifold, dst_manifold;
    std::vector<SmoothMapPiece> pieces;

    const SmoothMapPiece* piece_for(std::string_view src_chart) const;
};

/// Compactly supported scalar function given per chart.
struct ScalarOnManifold {
    std::string id;
    std::string manifold;
    std::map<std::string, Expr> charts;
    std::optional<Box> support;  // ambient
};

/// Vector-valued (r,s) tensor field as chart-indexed coefficient tables.
/// Uniqueness of the chart decomposition makes the table the field, so every
/// operation acts coefficient-wise; compatibility across overlaps is a
/// validated invariant, not an enforced construction.
struct TensorField {
    std::string id;
    std::string manifold;
    int dim = 0;  // chart dimension N
    int r = 0, s = 0;
    SpacePtr space;
    FieldKind kind = FieldKind::smooth;
    std::map<std::string, TensorTable> tables;
    std::optional<Box> support;  // ambient

    int arity() const { return dim; }
};

TensorField make_tensor_field(TensorField t);

/// The chart's coefficient table. Errors when the chart meets the field's
/// support but carries no table.
const TensorTable& decompose(const TensorField& t, const Manifold& m, std::string_view chart_id);

bool chart_meets_support(const Manifold& m, const Chart& chart, const std::optional<Box>& ambient_box);

/// Apply a linear map to the values, leaving the geometric slots alone.
TensorField pushforward(const LinearMap& f, const TensorField& t);

/// Pullback of a purely covariant field (r = 0) along a smooth map. For
/// integrable fields the map must carry declared inverses.
TensorField pullback(const SmoothMap& f, const Manifold& src, const Manifold& dst,
                     const TensorField& t);

/// Multiply by a compactly supported scalar; supports intersect.
TensorField scalar_action(const ScalarOnManifold& g, const TensorField& t);

TensorField add(const TensorField& a, const TensorField& b);
TensorField scale(Cx a, const TensorField& t);

/// Full contraction with r covectors and s vectors given by chart-frame
/// components; returns the value-space vector.
Vector evaluate(const TensorField& t, const Manifold& m, std::string_view chart_id,
                std::span<const double> x, const std::vector<std::vector<double>>& covecs,
                const std::vector<std::vector<double>>& vecs);

/// Ambient support box: the declared one, else the union of per-coefficient
/// boxes mapped through the charts (sampled bounding box, inflated; an
/// overestimate by construction).
std::optional<Box> support_box(const TensorField& t, const Manifold& m);

struct OverlapReport {
    double residual = 0.0;
    int sampled = 0;
    std::string detail;
};

/// Samples the tensor transformation law on declared overlaps.
OverlapReport overlap_compatibility(const TensorField& t, const Manifold& m, int samples = 100,
                                    std::uint64_t seed = 11);

/// The canonical reindexing between a vector-valued field, the family of its
/// scalar component fields, and sections of the tensor bundle all share this
/// representation, so both adapters are identities on the table.
TensorField component_family_view(const TensorField& t);
TensorField section_view(const TensorField& t);

}  // namespace vforms
