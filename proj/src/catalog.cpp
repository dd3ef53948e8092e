#include "vforms/catalog.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vforms {

namespace {

constexpr double kPi = std::numbers::pi;

Expr v(int i) { return Expr::variable(i); }
Expr c(double x) { return Expr::constant(x); }

std::vector<Expr> identity_exprs(int n) {
    std::vector<Expr> out;
    for (int i = 1; i <= n; ++i) out.push_back(v(i));
    return out;
}

Chart identity_chart(std::string id, Box image) {
    Chart ch;
    ch.id = std::move(id);
    const int n = image.dim();
    ch.image = std::move(image);
    ch.param = identity_exprs(n);
    ch.coord = identity_exprs(n);
    return ch;
}

Manifold make_box(const std::string& id, int n) {
    Manifold m;
    m.id = id;
    m.dim = n;
    m.ambient = n;
    m.charts.push_back(
        identity_chart("main", Box{std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)}));
    return make_manifold(std::move(m));
}

Manifold make_box2_split() {
    Manifold m;
    m.id = "box2_split";
    m.dim = 2;
    m.ambient = 2;
    m.charts.push_back(identity_chart("left", Box{{0.0, 0.0}, {0.6, 1.0}}));
    m.charts.push_back(identity_chart("right", Box{{0.4, 0.0}, {1.0, 1.0}}));
    m.overlaps.push_back({"left", "right"});
    return make_manifold(std::move(m));
}

Manifold make_halfplane() {
    Manifold m;
    m.id = "halfplane";
    m.dim = 2;
    m.ambient = 2;
    Chart ch = identity_chart("h", Box{{-2.0, 0.0}, {2.0, 2.0}});
    ch.boundary = true;
    m.charts.push_back(std::move(ch));
    return make_manifold(std::move(m));
}

/// Collar chart of the unit disk around boundary direction t0: chart
/// coordinates (t, s) with ambient point ((1-s) cos t, (1-s) sin t), the
/// boundary circle at s = 0. The inverse recovers s from the radius and t
/// from the half-angle formula in the frame rotated by -t0, which covers
/// t - t0 in (-pi, pi).
Chart disk_collar(int k) {
    const double t0 = k * (kPi / 2.0);
    Chart ch;
    ch.id = "c" + std::to_string(k);
    ch.image = Box{{t0 - 1.42, 0.0}, {t0 + 1.42, 0.72}};
    ch.boundary = true;
    const Expr t = v(1), s = v(2);
    ch.param = {(c(1.0) - s) * cos(t), (c(1.0) - s) * sin(t)};
    const Expr x = v(1), y = v(2);
    const Expr rho = sqrt(x * x + y * y);
    const Expr xb1 = c(std::cos(t0)) * x + c(std::sin(t0)) * y;
    const Expr xb2 = c(-std::sin(t0)) * x + c(std::cos(t0)) * y;
    ch.coord = {c(t0) + c(2.0) * atan(xb2 / (xb1 + rho)), c(1.0) - rho};
    return ch;
}

Manifold make_disk(bool flip_one_collar) {
    Manifold m;
    m.id = flip_one_collar ? "disk_flipped" : "disk";
    m.dim = 2;
    m.ambient = 2;
    m.charts.push_back(identity_chart("core", Box{{-0.7, -0.7}, {0.7, 0.7}}));
    for (int k = 0; k < 4; ++k) m.charts.push_back(disk_collar(k));
    if (flip_one_collar) m.charts[2].gamma = -1;
    for (int k = 0; k < 4; ++k) {
        m.overlaps.push_back({"core", "c" + std::to_string(k)});
        m.overlaps.push_back({"c" + std::to_string(k), "c" + std::to_string((k + 1) % 4)});
    }
    // Partition shapes tuned so Gauss-Legendre order 32 resolves the weight
    // quotients to ~1e-7 on both the disk and its boundary circle: a radial
    // squared core bump and, on collars, a cubed angular bump softened by a
    // wider companion times a squared face-axis bump.
    m.partition_recipes["core"] = {{{1, 2}, 1.0, 2}};
    for (int k = 0; k < 4; ++k)
        m.partition_recipes["c" + std::to_string(k)] = {{{1}, 1.0, 3}, {{1}, 1.3, 1}, {{2}, 1.0, 2}};
    return make_manifold(std::move(m));
}

/// Angular chart of the annulus 0.5 < rho < 1.5 around direction t0, chart
/// coordinates (rho, t).
Chart annulus_chart(const std::string& id, double t0) {
    Chart ch;
    ch.id = id;
    ch.image = Box{{0.5, t0 - 2.2}, {1.5, t0 + 2.2}};
    const Expr r = v(1), t = v(2);
    ch.param = {r * cos(t), r * sin(t)};
    const Expr x = v(1), y = v(2);
    const Expr rho = sqrt(x * x + y * y);
    const Expr xb1 = c(std::cos(t0)) * x + c(std::sin(t0)) * y;
    const Expr xb2 = c(-std::sin(t0)) * x + c(std::cos(t0)) * y;
    ch.coord = {rho, c(t0) + c(2.0) * atan(xb2 / (xb1 + rho))};
    return ch;
}

Manifold make_annulus() {
    Manifold m;
    m.id = "annulus";
    m.dim = 2;
    m.ambient = 2;
    m.charts.push_back(annulus_chart("a0", 0.0));
    m.charts.push_back(annulus_chart("a1", kPi));
    m.overlaps.push_back({"a0", "a1"});
    return make_manifold(std::move(m));
}

/// Angle chart of the unit circle: parameter t on an arc, inverse by the
/// half-angle formula anchored at the arc's center direction.
Manifold make_s1() {
    Manifold m;
    m.id = "s1";
    m.dim = 1;
    m.ambient = 2;
    {
        Chart ch;
        ch.id = "u0";
        ch.image = Box{{-2.5}, {2.5}};
        ch.param = {cos(v(1)), sin(v(1))};
        ch.coord = {c(2.0) * atan(v(2) / (v(1) + c(1.0)))};
        m.charts.push_back(std::move(ch));
    }
    {
        Chart ch;
        ch.id = "u1";
        ch.image = Box{{kPi - 2.5}, {kPi + 2.5}};
        ch.param = {cos(v(1)), sin(v(1))};
        ch.coord = {c(kPi) + c(2.0) * atan((c(0.0) - v(2)) / (c(1.0) - v(1)))};
        m.charts.push_back(std::move(ch));
    }
    m.overlaps.push_back({"u0", "u1"});
    // Cubed bumps with a wider companion keep the weight crossovers gentle
    // enough for moderate quadrature orders to resolve them.
    m.partition_recipes["u0"] = {{{1}, 1.0, 3}, {{1}, 1.3, 1}};
    m.partition_recipes["u1"] = {{{1}, 1.0, 3}, {{1}, 1.3, 1}};
    return make_manifold(std::move(m));
}

/// Two stereographic charts of the unit sphere. Chart "n" projects from the
/// north pole (its patch contains the south pole at the origin), chart "s"
/// from the south pole with the second coordinate negated so both charts
/// induce the same orientation: the transition (u, v) -> (u/q, -v/q) with
/// q = u^2 + v^2 has Jacobian determinant 1/q^2 > 0.
Manifold make_s2() {
    Manifold m;
    m.id = "s2";
    m.dim = 2;
    m.ambient = 3;
    const Expr u = v(1), w2 = v(2);
    const Expr q = u * u + w2 * w2;
    const Expr w = c(1.0) + q;
    {
        Chart ch;
        ch.id = "n";
        ch.image = Box{{-2.0, -2.0}, {2.0, 2.0}};
        ch.param = {c(2.0) * u / w, c(2.0) * w2 / w, (q - c(1.0)) / w};
        const Expr x = v(1), y = v(2), z = v(3);
        ch.coord = {x / (c(1.0) - z), y / (c(1.0) - z)};
        m.charts.push_back(std::move(ch));
    }
    {
        Chart ch;
        ch.id = "s";
        ch.image = Box{{-2.0, -2.0}, {2.0, 2.0}};
        ch.param = {c(2.0) * u / w, c(-2.0) * w2 / w, (c(1.0) - q) / w};
        const Expr x = v(1), y = v(2), z = v(3);
        ch.coord = {x / (c(1.0) + z), (c(0.0) - y) / (c(1.0) + z)};
        m.charts.push_back(std::move(ch));
    }
    m.overlaps.push_back({"n", "s"});
    return make_manifold(std::move(m));
}

}  // namespace

Manifold catalog_manifold(const std::string& name) {
    if (name == "box2") return make_box("box2", 2);
    if (name == "box3") return make_box("box3", 3);
    if (name == "box2_split") return make_box2_split();
    if (name == "halfplane") return make_halfplane();
    if (name == "disk") return make_disk(false);
    if (name == "disk_flipped") return make_disk(true);
    if (name == "annulus") return make_annulus();
    if (name == "s1") return make_s1();
    if (name == "s2") return make_s2();
    throw std::invalid_argument("unknown catalog manifold '" + name + "'");
}

std::vector<CatalogEntry> catalog_manifolds() {
    return {
        {"box2", "open unit square in R^2, 1 chart"},
        {"box3", "open unit cube in R^3, 1 chart"},
        {"box2_split", "open unit square covered by 2 overlapping charts"},
        {"halfplane", "strip (-2,2) x [0,2) with boundary at x2 = 0, 1 boundary chart"},
        {"disk", "unit disk in R^2, 5 charts (1 interior core, 4 boundary collars)"},
        {"disk_flipped", "unit disk with one collar orientation sign flipped, 5 charts"},
        {"annulus", "open annulus 0.5 < r < 1.5 in R^2, 2 angular charts"},
        {"s1", "unit circle in R^2, 2 angle charts"},
        {"s2", "unit sphere in R^3, 2 stereographic charts"},
    };
}

Manifold ambient_box_manifold(int dim) {
    Manifold m;
    m.id = "__ambient" + std::to_string(dim);
    m.dim = dim;
    m.ambient = dim;
    m.charts.push_back(
        identity_chart("main", Box{std::vector<double>(dim, -8.0), std::vector<double>(dim, 8.0)}));
    return make_manifold(std::move(m));
}

SmoothMap embedding_map(const Manifold& m, const Manifold& ambient_box) {
    SmoothMap f;
    f.id = m.id + "_embedding";
    f.src_manifold = m.id;
    f.dst_manifold = ambient_box.id;
    for (const Chart& ch : m.charts) {
        SmoothMapPiece piece;
        piece.src_chart = ch.id;
        piece.dst_chart = "main";
        piece.exprs = ch.param;
        f.pieces.push_back(std::move(piece));
    }
    return f;
}

Form ambient_form(const Manifold& m, std::string id, int degree, SpacePtr space,
                  const FormTable& ambient_table, FieldKind kind, std::optional<Box> support) {
    const Manifold box = ambient_box_manifold(m.ambient);
    Form amb;
    amb.id = id + "_ambient";
    amb.manifold = box.id;
    amb.dim = m.ambient;
    amb.degree = degree;
    amb.space = space;
    amb.kind = FieldKind::smooth;  // restriction first, kind attached below
    amb.tables["main"] = ambient_table;
    amb.support = support;
    amb = make_form(std::move(amb));

    Form out = pullback(embedding_map(m, box), m, box, amb);
    out.id = std::move(id);
    out.kind = kind;
    out.support = std::move(support);
    return make_form(std::move(out));
}

}  // namespace vforms
