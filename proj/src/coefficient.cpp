#include "vforms/coefficient.hpp"

#include <stdexcept>

namespace vforms {

CoeffComponent add(const CoeffComponent& a, const CoeffComponent& b) {
    return {a.re + b.re, a.im + b.im};
}

CoeffComponent sub(const CoeffComponent& a, const CoeffComponent& b) {
    return {a.re - b.re, a.im - b.im};
}

CoeffComponent mul(const CoeffComponent& a, const CoeffComponent& b) {
    if (a.real_only() && b.real_only()) return CoeffComponent::real(a.re * b.re);
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

CoeffComponent scale(Cx s, const CoeffComponent& c) {
    if (s.imag() == 0.0) return {Expr::constant(s.real()) * c.re, Expr::constant(s.real()) * c.im};
    return {Expr::constant(s.real()) * c.re - Expr::constant(s.imag()) * c.im,
            Expr::constant(s.real()) * c.im + Expr::constant(s.imag()) * c.re};
}

CoeffComponent mul_expr(const Expr& g, const CoeffComponent& c) {
    return {g * c.re, g * c.im};
}

CoeffComponent diff(const CoeffComponent& c, int i) { return {c.re.diff(i), c.im.diff(i)}; }

CoeffComponent substitute(const CoeffComponent& c, std::span<const Expr> replacements) {
    return {c.re.substitute(replacements), c.im.substitute(replacements)};
}

Cx eval(const CoeffComponent& c, std::span<const double> point) {
    return Cx(c.re.eval(point), c.im.eval(point));
}

CoefficientFn make_coefficient(SpacePtr space, int arity, std::vector<CoeffComponent> comps,
                               std::optional<Box> support) {
    if (static_cast<int>(comps.size()) != space->dim)
        throw std::invalid_argument("coefficient needs one component per space dimension");
    for (const CoeffComponent& c : comps) {
        if (c.re.max_variable() > arity || c.im.max_variable() > arity)
            throw std::invalid_argument("coefficient component exceeds the declared arity");
        if (space->scalar == Scalar::real && !c.real_only())
            throw std::invalid_argument("real-space coefficient must have zero imaginary part");
    }
    if (support && support->dim() != arity)
        throw std::invalid_argument("coefficient support box must match the arity");
    return CoefficientFn{std::move(space), arity, std::move(comps), std::move(support)};
}

CoefficientFn zero_coefficient(SpacePtr space, int arity) {
    std::vector<CoeffComponent> comps(space->dim, CoeffComponent::real(Expr::constant(0.0)));
    return CoefficientFn{std::move(space), arity, std::move(comps), std::nullopt};
}

std::vector<Cx> eval(const CoefficientFn& f, std::span<const double> point) {
    std::vector<Cx> out;
    out.reserve(f.comps.size());
    for (const CoeffComponent& c : f.comps) out.push_back(eval(c, point));
    return out;
}

Vector eval_vector(const CoefficientFn& f, std::span<const double> point) {
    return Vector{f.space, eval(f, point)};
}

CoefficientFn add(const CoefficientFn& a, const CoefficientFn& b) {
    if (!same_space(a.space, b.space) || a.arity != b.arity)
        throw std::invalid_argument("coefficient sum requires matching space and arity");
    CoefficientFn out = a;
    for (std::size_t i = 0; i < out.comps.size(); ++i) out.comps[i] = add(out.comps[i], b.comps[i]);
    if (a.support && b.support) {
        // Union bounding box; absence of support on either side drops the marker.
        Box u = *a.support;
        for (int i = 0; i < u.dim(); ++i) {
            u.lo[i] = std::min(u.lo[i], b.support->lo[i]);
            u.hi[i] = std::max(u.hi[i], b.support->hi[i]);
        }
        out.support = u;
    } else {
        out.support.reset();
    }
    return out;
}

CoefficientFn scale(Cx a, const CoefficientFn& f) {
    CoefficientFn out = f;
    if (f.space->scalar == Scalar::real && a.imag() != 0.0)
        throw std::invalid_argument("real-space coefficient admits real scalars only");
    for (CoeffComponent& c : out.comps) c = scale(a, c);
    return out;
}

CoefficientFn mul_expr(const Expr& g, const CoefficientFn& f) {
    CoefficientFn out = f;
    for (CoeffComponent& c : out.comps) c = mul_expr(g, c);
    return out;
}

CoefficientFn diff(const CoefficientFn& f, int i) {
    CoefficientFn out = f;
    for (CoeffComponent& c : out.comps) c = diff(c, i);
    return out;
}

CoefficientFn substitute(const CoefficientFn& f, std::span<const Expr> replacements, int new_arity) {
    std::vector<CoeffComponent> comps;
    comps.reserve(f.comps.size());
    for (const CoeffComponent& c : f.comps) comps.push_back(substitute(c, replacements));
    return CoefficientFn{f.space, new_arity, std::move(comps), std::nullopt};
}

CoefficientFn kron(const CoefficientFn& f, const CoefficientFn& g) {
    if (f.arity != g.arity) throw std::invalid_argument("kron requires matching arities");
    SpacePtr sp = tensor_product_space(f.space, g.space);
    std::vector<CoeffComponent> comps;
    comps.reserve(f.comps.size() * g.comps.size());
    for (const CoeffComponent& a : f.comps)
        for (const CoeffComponent& b : g.comps) comps.push_back(mul(a, b));
    std::optional<Box> support;
    if (f.support && g.support) {
        // Disjoint supports make the product identically zero; either box is
        // then a valid overestimate.
        auto both = intersect(*f.support, *g.support);
        support = both ? *both : *f.support;
    } else if (f.support) {
        support = f.support;
    } else if (g.support) {
        support = g.support;
    }
    return CoefficientFn{std::move(sp), f.arity, std::move(comps), std::move(support)};
}

CoefficientFn apply(const LinearMap& m, const CoefficientFn& f) {
    if (!same_space(m.source, f.space))
        throw std::invalid_argument("map source must match the coefficient space");
    std::vector<CoeffComponent> comps;
    comps.reserve(m.target->dim);
    for (int i = 0; i < m.target->dim; ++i) {
        CoeffComponent acc = CoeffComponent::real(Expr::constant(0.0));
        for (int j = 0; j < m.source->dim; ++j) acc = add(acc, scale(m.at(i, j), f.comps[j]));
        if (m.realifying()) acc = CoeffComponent::real(acc.re);
        comps.push_back(std::move(acc));
    }
    return CoefficientFn{m.target, f.arity, std::move(comps), f.support};
}

bool is_zero(const CoefficientFn& f) {
    for (const CoeffComponent& c : f.comps)
        if (!c.re.is_constant(0.0) || !c.im.is_constant(0.0)) return false;
    return true;
}

}  // namespace vforms
