#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "vforms/catalog.hpp"
#include "vforms/integrate.hpp"

using namespace vforms;

namespace {

constexpr double kPi = std::numbers::pi;

CoefficientFn rc(const SpacePtr& space, int arity, std::vector<std::string> exprs) {
    std::vector<CoeffComponent> comps;
    for (const std::string& e : exprs) comps.push_back(CoeffComponent::real(parse_expr(e, arity)));
    return make_coefficient(space, arity, std::move(comps));
}

Form angle_form_s1() {
    // The restriction of -x2 dx1 + x1 dx2 to the circle; its integral is the
    // circumference of the parameter, 2 pi.
    const Manifold s1 = catalog_manifold("s1");
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable ambient;
    ambient[FormIndex{{1}}] = rc(r, 2, {"0 - x2"});
    ambient[FormIndex{{2}}] = rc(r, 2, {"x1"});
    return ambient_form(s1, "angle", 1, r, ambient, FieldKind::smooth,
                        Box{{-2.0, -2.0}, {2.0, 2.0}});
}

Form disk_area_form() {
    const Manifold disk = catalog_manifold("disk");
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable ambient;
    ambient[FormIndex{{1, 2}}] = rc(r, 2, {"1 + x1^2 + x2"});
    return ambient_form(disk, "area", 2, r, ambient, FieldKind::smooth,
                        Box{{-1.0, -1.0}, {1.0, 1.0}});
}

}  // namespace

TEST_CASE("circle integral of the angle form is the circumference") {
    const Manifold s1 = catalog_manifold("s1");
    const Vector v = integrate(angle_form_s1(), s1, 64);
    CHECK(std::abs(v.comps[0].real() - 2.0 * kPi) <= 1e-8);
}

TEST_CASE("disk integral of a polynomial density matches the closed form") {
    // Integral over the unit disk of 1 + x1^2 + x2 equals pi + pi/4.
    const Manifold disk = catalog_manifold("disk");
    const Vector v = integrate(disk_area_form(), disk, 96);
    CHECK(std::abs(v.comps[0].real() - 5.0 * kPi / 4.0) <= 1e-6);
}

TEST_CASE("per-term contributions sum to the partitioned integral") {
    const Manifold disk = catalog_manifold("disk");
    const Form f = disk_area_form();
    const PartitionOfUnity pou = default_partition(f, disk);
    const std::vector<Vector> terms = integrate_terms(f, disk, pou, 48);
    CHECK(terms.size() == pou.terms.size());
    Cx total = 0.0;
    for (const Vector& t : terms) total += t.comps[0];
    const Vector whole = integrate_with_partition(f, disk, pou, 48);
    CHECK(std::abs(total - whole.comps[0]) <= 1e-12);
}

TEST_CASE("weak integral reconstruction reproduces the strong integral exactly") {
    const Manifold disk = catalog_manifold("disk");
    const Form f = disk_area_form();
    const WeakIntegral w = weak_integral(f, disk, 48);
    const Vector strong = integrate(f, disk, 48);
    CHECK(max_abs_diff(reconstruct(w), strong) == 0.0);
}

TEST_CASE("a measure applied to the unit scalar is the weak integral of its density") {
    const Manifold disk = catalog_manifold("disk");
    const Form f = disk_area_form();
    const VectorialMeasure mu{"mu", f};
    ScalarOnManifold one;
    one.id = "one";
    one.manifold = "disk";
    for (const Chart& ch : disk.charts) one.charts[ch.id] = Expr::constant(1.0);
    one.support = f.support;
    const WeakIntegral via_measure = measure_apply(mu, one, disk, 48);
    const WeakIntegral direct = weak_integral(f, disk, 48);
    REQUIRE(via_measure.components.size() == direct.components.size());
    for (std::size_t i = 0; i < direct.components.size(); ++i)
        CHECK(std::abs(via_measure.components[i] - direct.components[i]) <= 1e-14);
}

TEST_CASE("measures are linear in the scalar argument") {
    const Manifold disk = catalog_manifold("disk");
    const VectorialMeasure mu{"mu", disk_area_form()};
    ScalarOnManifold g1, g2;
    g1.id = "g1";
    g2.id = "g2";
    g1.manifold = g2.manifold = "disk";
    // Express both scalars in ambient coordinates through each chart.
    for (const Chart& ch : disk.charts) {
        std::vector<Expr> par(ch.param.begin(), ch.param.end());
        g1.charts[ch.id] = parse_expr("x1^2", 2).substitute(par);
        g2.charts[ch.id] = parse_expr("1 + x2", 2).substitute(par);
    }
    g1.support = g2.support = Box{{-1.0, -1.0}, {1.0, 1.0}};
    const ScalarOnManifold combo = scalar_combo(2.0, g1, -3.0, g2);
    const WeakIntegral lhs = measure_apply(mu, combo, disk, 32);
    const WeakIntegral a = measure_apply(mu, g1, disk, 32);
    const WeakIntegral b = measure_apply(mu, g2, disk, 32);
    for (std::size_t i = 0; i < lhs.components.size(); ++i)
        CHECK(std::abs(lhs.components[i] - (2.0 * a.components[i] - 3.0 * b.components[i])) <=
              1e-12);
}

TEST_CASE("boundary identity holds on the half-plane with a compact bump") {
    const Manifold half = catalog_manifold("halfplane");
    const SpacePtr r = scalar_space(Scalar::real);
    Form theta;
    theta.id = "theta";
    theta.manifold = "halfplane";
    theta.dim = 2;
    theta.degree = 1;
    theta.space = r;
    theta.tables["h"][FormIndex{{1}}] = rc(r, 2, {"bump(1.5; 0,0; x1,x2)"});
    theta.support = Box{{-1.5, -1.5}, {1.5, 1.5}};
    theta = make_form(std::move(theta));

    const StokesResult res = stokes_pair(theta, half, 64);
    CHECK(res.residual <= 1e-6);
    // Both sides are genuinely nonzero: the boundary term integrates the bump
    // profile along the face.
    CHECK(std::abs(res.rhs.comps[0].real()) > 0.5);

    const StokesResult wrong = stokes_pair(theta, half, 64, -1.0);
    CHECK(wrong.residual > 1e-2);
}

TEST_CASE("closed one-manifold integrals of derivatives vanish") {
    const Manifold s1 = catalog_manifold("s1");
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable ambient;
    ambient[FormIndex{}] = rc(r, 2, {"x1 * x2 + x2^2"});
    const Form g = ambient_form(s1, "g", 0, r, ambient, FieldKind::smooth,
                                Box{{-2.0, -2.0}, {2.0, 2.0}});
    const StokesResult res = stokes_pair(g, s1, 96);
    CHECK(res.residual <= 1e-8);
    CHECK(res.rhs.comps[0] == Cx(0.0));  // empty boundary contributes exactly zero
}

TEST_CASE("integration validates its inputs") {
    const Manifold disk = catalog_manifold("disk");
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable ambient;
    ambient[FormIndex{{1}}] = rc(r, 2, {"x1"});
    const Form low = ambient_form(disk, "low", 1, r, ambient, FieldKind::smooth,
                                  Box{{-1.0, -1.0}, {1.0, 1.0}});
    CHECK_THROWS((void)integrate(low, disk, 16));  // not top degree

    Manifold unoriented = catalog_manifold("disk");
    unoriented.oriented = false;
    CHECK_THROWS((void)integrate(disk_area_form(), unoriented, 16));
}
