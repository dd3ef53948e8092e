#include "vforms/value_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vforms {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void require_real_entries(const LinearMap& f) {
    if (f.source->scalar == Scalar::real && f.target->scalar == Scalar::real) {
        for (const Cx& e : f.m)
            require(e.imag() == 0.0, "map between real spaces must have real entries");
    }
}

}  // namespace

SpacePtr make_space(std::string id, Scalar scalar, int dim, std::vector<std::string> dual_labels) {
    require(dim >= 1, "value space dimension must be >= 1");
    if (dual_labels.empty()) {
        dual_labels.reserve(dim);
        for (int i = 1; i <= dim; ++i) dual_labels.push_back("e" + std::to_string(i));
    }
    require(static_cast<int>(dual_labels.size()) == dim,
            "dual label count must equal the dimension");
    auto s = std::make_shared<ValueSpace>();
    s->id = std::move(id);
    s->scalar = scalar;
    s->dim = dim;
    s->dual_labels = std::move(dual_labels);
    return s;
}

SpacePtr scalar_space(Scalar s) {
    static const SpacePtr r = make_space("R", Scalar::real, 1, {"1"});
    static const SpacePtr c = make_space("C", Scalar::cplx, 1, {"1"});
    return s == Scalar::real ? r : c;
}

SpacePtr tensor_product_space(const SpacePtr& g, const SpacePtr& h) {
    require(g->scalar == h->scalar, "tensor product factors must share the scalar field");
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(g->dim) * h->dim);
    for (const auto& a : g->dual_labels)
        for (const auto& b : h->dual_labels) labels.push_back(a + "*" + b);
    return make_space("(" + g->id + "*" + h->id + ")", g->scalar, g->dim * h->dim,
                      std::move(labels));
}

bool same_space(const ValueSpace& a, const ValueSpace& b) {
    return a.scalar == b.scalar && a.dim == b.dim && a.id == b.id;
}

Vector make_vector(SpacePtr space, std::vector<Cx> comps) {
    require(static_cast<int>(comps.size()) == space->dim,
            "component count must equal the space dimension");
    if (space->scalar == Scalar::real)
        for (const Cx& c : comps) require(c.imag() == 0.0, "real-space vector must have real components");
    return Vector{std::move(space), std::move(comps)};
}

Vector zero_vector(SpacePtr space) {
    std::vector<Cx> z(space->dim, Cx(0.0, 0.0));
    return Vector{std::move(space), std::move(z)};
}

Vector add(const Vector& a, const Vector& b) {
    require(same_space(a.space, b.space), "vector sum requires matching spaces");
    Vector out = a;
    for (std::size_t i = 0; i < out.comps.size(); ++i) out.comps[i] += b.comps[i];
    return out;
}

Vector scale(Cx a, const Vector& v) {
    Vector out = v;
    for (Cx& c : out.comps) c *= a;
    if (v.space->scalar == Scalar::real)
        require(a.imag() == 0.0, "real-space vectors admit real scalars only");
    return out;
}

Vector kron(const Vector& u, const Vector& v) {
    SpacePtr sp = tensor_product_space(u.space, v.space);
    std::vector<Cx> out;
    out.reserve(u.comps.size() * v.comps.size());
    for (const Cx& a : u.comps)
        for (const Cx& b : v.comps) out.push_back(a * b);
    return Vector{std::move(sp), std::move(out)};
}

double max_abs_diff(const Vector& a, const Vector& b) {
    require(a.comps.size() == b.comps.size(), "dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.comps.size(); ++i) m = std::max(m, std::abs(a.comps[i] - b.comps[i]));
    return m;
}

LinearMap make_map(SpacePtr source, SpacePtr target, std::vector<Cx> entries) {
    require(entries.size() == static_cast<std::size_t>(source->dim) * target->dim,
            "matrix shape must be target.dim x source.dim");
    require(source->scalar == target->scalar ||
                (source->scalar == Scalar::cplx && target->scalar == Scalar::real),
            "scalar fields must match unless the map is a realification projection");
    LinearMap f{std::move(source), std::move(target), std::move(entries)};
    require_real_entries(f);
    return f;
}

LinearMap identity_map(SpacePtr g) {
    std::vector<Cx> m(static_cast<std::size_t>(g->dim) * g->dim, Cx(0.0));
    for (int i = 0; i < g->dim; ++i) m[static_cast<std::size_t>(i) * g->dim + i] = 1.0;
    SpacePtr src = g;
    return make_map(std::move(src), std::move(g), std::move(m));
}

Vector apply(const LinearMap& f, const Vector& v) {
    require(same_space(f.source, v.space), "map source must match the vector's space");
    std::vector<Cx> out(f.target->dim, Cx(0.0));
    for (int i = 0; i < f.target->dim; ++i) {
        Cx acc(0.0);
        for (int j = 0; j < f.source->dim; ++j) acc += f.at(i, j) * v.comps[j];
        out[i] = f.realifying() ? Cx(acc.real(), 0.0) : acc;
    }
    return Vector{f.target, std::move(out)};
}

LinearMap compose(const LinearMap& f, const LinearMap& g) {
    require(same_space(f.source, g.target), "inner spaces must match in composition");
    require(!(g.source->scalar == Scalar::real && f.target->scalar == Scalar::cplx) ||
                g.source->scalar == f.target->scalar,
            "composition would need a real source and complex target");
    std::vector<Cx> m(static_cast<std::size_t>(f.target->dim) * g.source->dim, Cx(0.0));
    for (int i = 0; i < f.target->dim; ++i)
        for (int j = 0; j < g.source->dim; ++j) {
            Cx acc(0.0);
            for (int k = 0; k < f.source->dim; ++k) acc += f.at(i, k) * g.at(k, j);
            m[static_cast<std::size_t>(i) * g.source->dim + j] = acc;
        }
    return LinearMap{g.source, f.target, std::move(m)};
}

LinearMap kronecker_map(const LinearMap& f, const LinearMap& g) {
    require(f.source->scalar == g.source->scalar && f.target->scalar == g.target->scalar,
            "kronecker factors must share scalar fields");
    SpacePtr src = tensor_product_space(f.source, g.source);
    SpacePtr tgt = tensor_product_space(f.target, g.target);
    const int sn = src->dim, fn = f.source->dim, gn = g.source->dim;
    const int ft = f.target->dim, gt = g.target->dim;
    std::vector<Cx> m(static_cast<std::size_t>(tgt->dim) * sn, Cx(0.0));
    for (int i1 = 0; i1 < ft; ++i1)
        for (int i2 = 0; i2 < gt; ++i2)
            for (int j1 = 0; j1 < fn; ++j1)
                for (int j2 = 0; j2 < gn; ++j2)
                    m[static_cast<std::size_t>(i1 * gt + i2) * sn + (j1 * gn + j2)] =
                        f.at(i1, j1) * g.at(i2, j2);
    return LinearMap{std::move(src), std::move(tgt), std::move(m)};
}

LinearMap swap_map(const SpacePtr& a, const SpacePtr& b) {
    SpacePtr src = tensor_product_space(a, b);
    SpacePtr tgt = tensor_product_space(b, a);
    const int da = a->dim, db = b->dim, n = src->dim;
    std::vector<Cx> m(static_cast<std::size_t>(n) * n, Cx(0.0));
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j)
            m[static_cast<std::size_t>(j * da + i) * n + (i * db + j)] = 1.0;
    return LinearMap{std::move(src), std::move(tgt), std::move(m)};
}

Realification realify(const SpacePtr& g) {
    require(g->scalar == Scalar::cplx, "realify expects a complex space");
    std::vector<std::string> labels;
    labels.reserve(2 * g->dim);
    for (const auto& l : g->dual_labels) {
        labels.push_back("Re " + l);
        labels.push_back("Im " + l);
    }
    Realification out;
    out.real_space = make_space(g->id + "_R", Scalar::real, 2 * g->dim, std::move(labels));
    SpacePtr projected = make_space(g->id + "_comp", Scalar::real, g->dim, g->dual_labels);
    std::vector<Cx> re(static_cast<std::size_t>(g->dim) * g->dim, Cx(0.0));
    std::vector<Cx> im = re;
    for (int i = 0; i < g->dim; ++i) {
        re[static_cast<std::size_t>(i) * g->dim + i] = Cx(1.0, 0.0);
        im[static_cast<std::size_t>(i) * g->dim + i] = Cx(0.0, -1.0);  // Re(-i v) = Im v
    }
    out.re = LinearMap{g, projected, std::move(re)};
    out.im = LinearMap{g, projected, std::move(im)};
    return out;
}

Vector embed_realified(const Realification& r, const Vector& v) {
    require(2 * static_cast<int>(v.comps.size()) == r.real_space->dim,
            "vector does not belong to the realified space's source");
    std::vector<Cx> out;
    out.reserve(2 * v.comps.size());
    for (const Cx& c : v.comps) {
        out.emplace_back(c.real(), 0.0);
        out.emplace_back(c.imag(), 0.0);
    }
    return Vector{r.real_space, std::move(out)};
}

Vector recombine_realified(const Realification& r, const SpacePtr& g, const Vector& w) {
    require(same_space(w.space, r.real_space), "vector must live in the realified space");
    std::vector<Cx> out;
    out.reserve(w.comps.size() / 2);
    for (std::size_t i = 0; i + 1 < w.comps.size(); i += 2)
        out.emplace_back(w.comps[i].real(), w.comps[i + 1].real());
    return Vector{g, std::move(out)};
}

std::vector<LinearMap> dual_functionals(const SpacePtr& g) {
    std::vector<LinearMap> out;
    out.reserve(g->dim);
    for (int j = 0; j < g->dim; ++j) {
        std::vector<Cx> row(g->dim, Cx(0.0));
        row[j] = 1.0;
        out.push_back(LinearMap{g, scalar_space(g->scalar), std::move(row)});
    }
    return out;
}

}  // namespace vforms
