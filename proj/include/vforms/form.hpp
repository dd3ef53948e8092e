#pragma once

#include "vforms/tensor_field.hpp"

namespace vforms {

/// Strictly increasing index 1 <= i_1 < ... < i_k <= N naming the basis
/// covector dx_{i_1} ^ ... ^ dx_{i_k}.
struct FormIndex {
    std::vector<int> idx;
    auto operator<=>(const FormIndex&) const = default;
    int order() const { return static_cast<int>(idx.size()); }
};

using FormTable = std::map<FormIndex, CoefficientFn>;

/// Vector-valued alternating form of fixed degree as chart-indexed coefficient
/// tables over increasing indices. Degree 0 uses the single empty index.
struct Form {
    std::string id;
    std::string manifold;
    int dim = 0;     // chart dimension N
    int degree = 0;  // k
    SpacePtr space;
    FieldKind kind = FieldKind::smooth;
    std::map<std::string, FormTable> tables;
    std::optional<Box> support;  // ambient
};

Form make_form(Form f);
Form zero_form(std::string id, std::string manifold, int dim, int degree, SpacePtr space);

const FormTable& form_table(const Form& f, const Manifold& m, std::string_view chart_id);

/// Merge of two disjoint increasing indices with the shuffle sign, or nullopt
/// when they share an entry.
std::optional<std::pair<FormIndex, int>> merge_indices(const FormIndex& a, const FormIndex& b);

/// Graded product. Both variants keep the value space in argument order
/// (a.space (x) b.space) and the covector slots in argument order; they differ
/// in which factor may be integrable: variant 1 admits an integrable left
/// factor, variant 2 an integrable right factor. The other factor must be
/// smooth.
Form wedge(const Form& a, const Form& b, int variant);

/// Chart-wise d: each coefficient is differentiated per axis and the new axis
/// index is merged in with its shuffle sign. Requires a smooth form; the
/// per-chart results satisfy the overlap law automatically.
Form exterior_derivative(const Form& f);

Form pushforward(const LinearMap& m, const Form& f);

/// Pullback along a piecewise smooth map: coefficients compose with the map
/// and pick up the Jacobian minor determinants, all symbolically. Integrable
/// forms need declared inverses on every piece.
Form pullback(const SmoothMap& fmap, const Manifold& src, const Manifold& dst, const Form& f);

Form add(const Form& a, const Form& b);
Form scale(Cx a, const Form& f);
Form scalar_action(const ScalarOnManifold& g, const Form& f);

/// omega(X_1, ..., X_k) at a chart point, vectors in chart-frame components.
Vector evaluate(const Form& f, const Manifold& m, std::string_view chart_id,
                std::span<const double> x, const std::vector<std::vector<double>>& vectors);

/// Sampled overlap law for forms (pullback of the other chart's table along
/// the transition must reproduce this chart's table).
OverlapReport overlap_compatibility(const Form& f, const Manifold& m, int samples = 100,
                                    std::uint64_t seed = 11);

std::optional<Box> support_box(const Form& f, const Manifold& m);

/// Inclusion of the boundary as a smooth map bd -> m, one piece per face.
SmoothMap boundary_inclusion(const Manifold& m, const Manifold& bd);

/// Max coefficient magnitude over sampled chart points; the residual metric
/// for identities checked table-against-table.
double sampled_table_max(const Form& f, const Manifold& m, int samples_per_chart,
                         std::uint64_t seed);

double sampled_difference(const Form& a, const Form& b, const Manifold& m, int samples_per_chart,
                          std::uint64_t seed);

}  // namespace vforms
