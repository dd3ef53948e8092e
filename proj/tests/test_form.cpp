#include <complex>
#include <vector>

#include "doctest.h"
#include "vforms/catalog.hpp"
#include "vforms/form.hpp"

using namespace vforms;

namespace {

CoefficientFn rc(SpacePtr space, int arity, std::vector<std::string> exprs) {
    std::vector<CoeffComponent> comps;
    for (const std::string& e : exprs) comps.push_back(CoeffComponent::real(parse_expr(e, arity)));
    return make_coefficient(std::move(space), arity, std::move(comps));
}

Form one_form_box2(std::string id, SpacePtr space, FormTable table) {
    Form f;
    f.id = std::move(id);
    f.manifold = "box2";
    f.dim = 2;
    f.degree = 1;
    f.space = std::move(space);
    f.tables["main"] = std::move(table);
    return make_form(std::move(f));
}

}  // namespace

TEST_CASE("form construction rejects malformed index tables") {
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable bad;
    bad[FormIndex{{2, 1}}] = rc(r, 2, {"x1"});  // not strictly increasing
    Form f;
    f.id = "bad";
    f.manifold = "box2";
    f.dim = 2;
    f.degree = 2;
    f.space = r;
    f.tables["main"] = std::move(bad);
    CHECK_THROWS(make_form(std::move(f)));

    FormTable wrong_order;
    wrong_order[FormIndex{{1}}] = rc(r, 2, {"x1"});  // order 1 in a degree-2 table
    Form g;
    g.id = "bad2";
    g.manifold = "box2";
    g.dim = 2;
    g.degree = 2;
    g.space = r;
    g.tables["main"] = std::move(wrong_order);
    CHECK_THROWS(make_form(std::move(g)));
}

TEST_CASE("merge_indices carries the shuffle sign") {
    const auto m = merge_indices(FormIndex{{1, 3}}, FormIndex{{2}});
    REQUIRE(m.has_value());
    CHECK(m->first.idx == std::vector<int>{1, 2, 3});
    CHECK(m->second == -1);
    CHECK(!merge_indices(FormIndex{{1}}, FormIndex{{1}}).has_value());
    const auto p = merge_indices(FormIndex{{1}}, FormIndex{{2}});
    CHECK(p->second == 1);
}

TEST_CASE("exterior derivative of a function collects the partials") {
    const Manifold m = catalog_manifold("box2");
    const SpacePtr r = scalar_space(Scalar::real);
    Form f;
    f.id = "f";
    f.manifold = "box2";
    f.dim = 2;
    f.degree = 0;
    f.space = r;
    f.tables["main"][FormIndex{}] = rc(r, 2, {"x1^2 * x2"});
    f = make_form(std::move(f));

    const Form df = exterior_derivative(f);
    CHECK(df.degree == 1);
    const std::vector<double> x{0.4, 0.7};
    const Vector d1 = evaluate(df, m, "main", x, {{1.0, 0.0}});
    const Vector d2 = evaluate(df, m, "main", x, {{0.0, 1.0}});
    CHECK(d1.comps[0].real() == doctest::Approx(2 * 0.4 * 0.7));
    CHECK(d2.comps[0].real() == doctest::Approx(0.4 * 0.4));
}

TEST_CASE("exterior derivative of a one-form matches the curl formula") {
    const Manifold m = catalog_manifold("box2");
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable t;
    t[FormIndex{{1}}] = rc(r, 2, {"x1 * x2"});
    t[FormIndex{{2}}] = rc(r, 2, {"x1^2"});
    const Form theta = one_form_box2("theta", r, std::move(t));
    const Form dtheta = exterior_derivative(theta);
    // d(x1 x2 dx1 + x1^2 dx2) = (2 x1 - x1) dx1^dx2.
    const std::vector<double> x{0.4, 0.7};
    const Vector val = evaluate(dtheta, m, "main", x, {{1.0, 0.0}, {0.0, 1.0}});
    CHECK(val.comps[0].real() == doctest::Approx(0.4));
    // Antisymmetry in the vector slots.
    const Vector swapped = evaluate(dtheta, m, "main", x, {{0.0, 1.0}, {1.0, 0.0}});
    CHECK(swapped.comps[0].real() == doctest::Approx(-0.4));
}

TEST_CASE("wedge multiplies coefficients and tensors the value spaces") {
    const Manifold m = catalog_manifold("box2");
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable ta, tb;
    ta[FormIndex{{1}}] = rc(r, 2, {"x1 + 1"});
    tb[FormIndex{{2}}] = rc(r, 2, {"x2"});
    const Form a = one_form_box2("a", r, std::move(ta));
    const Form b = one_form_box2("b", r, std::move(tb));

    const Form ab = wedge(a, b, 1);
    CHECK(ab.degree == 2);
    CHECK(ab.space->dim == 1);
    const std::vector<double> x{0.5, 0.8};
    const Vector v = evaluate(ab, m, "main", x, {{1.0, 0.0}, {0.0, 1.0}});
    CHECK(v.comps[0].real() == doctest::Approx(1.5 * 0.8));

    // Reversing the arguments flips the shuffle sign for two one-forms.
    const Form ba = wedge(b, a, 2);
    const Vector w = evaluate(ba, m, "main", x, {{1.0, 0.0}, {0.0, 1.0}});
    CHECK(w.comps[0].real() == doctest::Approx(-1.5 * 0.8));
}

TEST_CASE("pushforward acts on values and leaves the covector slots alone") {
    const Manifold m = catalog_manifold("box2");
    const SpacePtr r2 = make_space("R2", Scalar::real, 2);
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable t;
    t[FormIndex{{1}}] = rc(r2, 2, {"x1", "x2"});
    const Form f = one_form_box2("f", r2, std::move(t));
    const LinearMap psi = make_map(r2, r, {1.0, -2.0});
    const Form pf = pushforward(psi, f);
    CHECK(same_space(*pf.space, *r));
    const std::vector<double> x{0.5, 0.2};
    const Vector v = evaluate(pf, m, "main", x, {{1.0, 0.0}});
    CHECK(v.comps[0].real() == doctest::Approx(0.5 - 2.0 * 0.2));
}

TEST_CASE("pullback along a chart self-map composes and weights by the Jacobian") {
    const Manifold m = catalog_manifold("box2");
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable t;
    t[FormIndex{{2}}] = rc(r, 2, {"x1"});
    const Form theta = one_form_box2("theta", r, std::move(t));

    SmoothMap fmap;
    fmap.id = "F";
    fmap.src_manifold = "box2";
    fmap.dst_manifold = "box2";
    fmap.pieces.push_back({"main", "main", {parse_expr("x1^2", 2), parse_expr("x2^3", 2)}, {}});
    const Form pulled = pullback(fmap, m, m, theta);
    // F*(x1 dx2) = x1^2 d(x2^3) = 3 x1^2 x2^2 dx2.
    const std::vector<double> x{0.6, 0.5};
    const Vector v = evaluate(pulled, m, "main", x, {{0.0, 1.0}});
    CHECK(v.comps[0].real() == doctest::Approx(3.0 * 0.36 * 0.25));
    const Vector z = evaluate(pulled, m, "main", x, {{1.0, 0.0}});
    CHECK(z.comps[0].real() == doctest::Approx(0.0));
}

TEST_CASE("scalar action multiplies chartwise and intersects supports") {
    const Manifold m = catalog_manifold("box2");
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable t;
    t[FormIndex{{1}}] = rc(r, 2, {"1"});
    Form f = one_form_box2("f", r, std::move(t));
    f.support = Box{{0.0, 0.0}, {0.8, 1.0}};

    ScalarOnManifold g;
    g.id = "g";
    g.manifold = "box2";
    g.charts["main"] = parse_expr("x1 * x2", 2);
    g.support = Box{{0.2, 0.0}, {1.0, 1.0}};

    const Form gf = scalar_action(g, f);
    REQUIRE(gf.support.has_value());
    CHECK(gf.support->lo[0] == doctest::Approx(0.2));
    CHECK(gf.support->hi[0] == doctest::Approx(0.8));
    const std::vector<double> x{0.5, 0.4};
    const Vector v = evaluate(gf, m, "main", x, {{1.0, 0.0}});
    CHECK(v.comps[0].real() == doctest::Approx(0.2));
}

TEST_CASE("zero, add and scale obey the linear structure") {
    const Manifold m = catalog_manifold("box2");
    const SpacePtr r = scalar_space(Scalar::real);
    const Form z = zero_form("z", "box2", 2, 1, r);
    FormTable t;
    t[FormIndex{{1}}] = rc(r, 2, {"x2"});
    const Form f = one_form_box2("f", r, std::move(t));
    const Form s = add(scale(Cx(3.0), f), z);
    const std::vector<double> x{0.1, 0.5};
    const Vector v = evaluate(s, m, "main", x, {{1.0, 0.0}});
    CHECK(v.comps[0].real() == doctest::Approx(1.5));
}

TEST_CASE("ambient forms satisfy the overlap law across curved charts") {
    const Manifold disk = catalog_manifold("disk");
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable ambient;
    ambient[FormIndex{{2}}] = rc(r, 2, {"x1"});
    const Form theta =
        ambient_form(disk, "theta", 1, r, ambient, FieldKind::smooth, std::nullopt);
    CHECK(theta.tables.size() == 5);
    const OverlapReport rep = overlap_compatibility(theta, disk, 80);
    CHECK(rep.sampled > 0);
    CHECK(rep.residual <= 1e-10);
}

TEST_CASE("boundary inclusion restricts forms to the face") {
    const Manifold half = catalog_manifold("halfplane");
    const Manifold bd = boundary_manifold(half);
    const SmoothMap incl = boundary_inclusion(half, bd);
    REQUIRE(incl.pieces.size() == 1);
    CHECK(incl.pieces[0].src_chart == "h_face");
    CHECK(incl.pieces[0].dst_chart == "h");

    const SpacePtr r = scalar_space(Scalar::real);
    Form theta;
    theta.id = "theta";
    theta.manifold = "halfplane";
    theta.dim = 2;
    theta.degree = 1;
    theta.space = r;
    theta.tables["h"][FormIndex{{1}}] = rc(r, 2, {"x1 + x2"});
    theta = make_form(std::move(theta));

    const Form restricted = pullback(incl, bd, half, theta);
    const std::vector<double> t0{0.3};
    const Vector v = evaluate(restricted, bd, "h_face", t0, {{1.0}});
    CHECK(v.comps[0].real() == doctest::Approx(0.3));
}

TEST_CASE("sampled residual metrics are deterministic in the seed") {
    const Manifold m = catalog_manifold("box2");
    const SpacePtr r = scalar_space(Scalar::real);
    FormTable t;
    t[FormIndex{{1}}] = rc(r, 2, {"sin(x1) * x2"});
    const Form f = one_form_box2("f", r, std::move(t));
    const double a = sampled_table_max(f, m, 50, 123);
    const double b = sampled_table_max(f, m, 50, 123);
    CHECK(a == b);
    CHECK(a > 0.0);
    CHECK(sampled_difference(f, f, m, 50, 99) == 0.0);
}
