#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vforms/box.hpp"
#include "vforms/expr.hpp"

namespace vforms {

class CoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One chart of an N-manifold embedded in ambient R^m. The image is an open
/// box in chart coordinates; a boundary chart is a half-box whose last axis
/// starts at exactly 0, with the boundary face at x_N = 0. `param` maps chart
/// coordinates into the ambient space, `coord` inverts it on the patch, and
/// `gamma` is the chart's orientation sign.
struct Chart {
    std::string id;
    Box image;
    bool boundary = false;
    std::vector<Expr> param;  // N variables -> m components
    std::vector<Expr> coord;  // m variables -> N components
    int gamma = +1;
};

/// One factor of a chart's partition numerator: a ball bump over a subset of
/// chart axes, raised to an integer power. `scale` multiplies the default
/// margin-shrunk radius; factors whose scaled ball pokes past the image are
/// legal as long as a smaller factor bounds the product's support.
struct BumpFactor {
    std::vector<int> axes;  // 1-based chart coordinate axes entering the ball
    double scale = 1.0;
    int power = 1;
};
using BumpRecipe = std::vector<BumpFactor>;

struct Manifold {
    std::string id;
    int dim = 0;
    int ambient = 0;
    bool oriented = true;
    bool has_boundary = false;
    std::vector<Chart> charts;
    std::vector<std::pair<std::string, std::string>> overlaps;  // declared overlapping pairs
    // Optional per-chart numerator shapes for build_partition; charts without
    // an entry get one unit-power bump per axis.
    std::map<std::string, BumpRecipe> partition_recipes;

    const Chart& chart(std::string_view id) const;
    const Chart* find_chart(std::string_view id) const;
    bool overlap_declared(std::string_view a, std::string_view b) const;
};

/// Validates chart shapes against the manifold header and returns it.
Manifold make_manifold(Manifold m);

/// Chart-change map coord_b(param_a(x)) with its symbolic Jacobian.
struct Transition {
    std::string from, to;
    std::vector<Expr> map;
    std::vector<std::vector<Expr>> jacobian;  // jacobian[i][j] = d map_i / d x_j
};

/// Requires the pair to be declared overlapping (or a == b). The composition
/// itself never needs the overlap; use compose_chart_map to skip the check.
Transition transition(const Manifold& m, std::string_view a, std::string_view b);
Transition compose_chart_map(const Manifold& m, std::string_view a, std::string_view b);

/// Evaluate coord of `chart` at an ambient point and report the chart point if
/// it lands inside the image (boundary face included). Failures to evaluate
/// count as "not on this patch".
std::optional<std::vector<double>> locate_in_chart(const Chart& chart, int ambient,
                                                   std::span<const double> ambient_point);

struct OrientationReport {
    bool consistent = true;
    int sampled_overlaps = 0;
    std::string detail;      // first violating pair/point when inconsistent
    double worst_det = 0.0;  // most negative gamma_a * gamma_b * det observed
};

/// Samples declared overlaps and checks gamma_a * gamma_b * det J > 0.
OrientationReport orientation_check(const Manifold& m, int samples_per_pair = 200,
                                    std::uint64_t seed = 1);

/// Smooth nonnegative weights subordinate to a chart subfamily which sum to
/// exactly one on the target support region. The implicit complement weight
/// lives off the support and is never materialized.
struct PartitionTerm {
    std::string chart;
    Expr psi;        // in that chart's coordinates
    Box support;     // support box of psi in chart coordinates
};

struct PartitionOfUnity {
    std::string id;
    std::string manifold;
    Box target_support;  // ambient box containing the forms this partition serves
    double margin = 0.05;
    std::vector<PartitionTerm> terms;
};

/// Builds bump-quotient weights psi_a = B_a / (sum_b B_b + B_dagger) where
/// each B_a is a product of bump primitives filling chart a's image shrunk by
/// `margin` per axis (shaped by the manifold's recipe when one is declared)
/// and B_dagger is a bump sum vanishing on the target support. On boundary
/// charts the last axis bump reaches the x_N = 0 face so that boundary points
/// stay covered.
PartitionOfUnity build_partition(const Manifold& m, const Box& target_support,
                                 const std::vector<std::string>& chart_ids, double margin = 0.05,
                                 std::string id = "pou");

/// Term `index`'s weight expressed in another chart's coordinates.
Expr partition_term_on_chart(const Manifold& m, const PartitionOfUnity& pou, std::size_t index,
                             std::string_view chart_id);

struct PartitionReport {
    double max_unit_deviation = 0.0;  // max |1 - sum psi| over support samples
    double support_leak = 0.0;        // max |psi| outside the declared term support
    bool covered = true;
    std::string detail;
};

PartitionReport verify_partition(const Manifold& m, const PartitionOfUnity& pou, int samples = 400,
                                 std::uint64_t seed = 7);

/// Same as verify_partition but throws CoverageError when some sampled support
/// point is uncovered.
void require_covering(const Manifold& m, const PartitionOfUnity& pou, int samples = 400,
                      std::uint64_t seed = 7);

/// The x_N = 0 faces of the boundary charts as an (N-1)-manifold in the same
/// ambient space. Each face chart inherits gamma * (-1)^N, the sign for which
/// the flat half-space calibration makes the boundary identity hold with a
/// plus sign on both sides.
Manifold boundary_manifold(const Manifold& m);

namespace detail {
double det(const std::vector<std::vector<double>>& a);
std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a);
}  // namespace detail

}  // namespace vforms
