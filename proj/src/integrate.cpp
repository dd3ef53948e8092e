#include "vforms/integrate.hpp"

#include <cmath>
#include <stdexcept>

namespace vforms {

namespace {

FormIndex top_index(int n) {
    FormIndex ix;
    ix.idx.resize(n);
    for (int i = 0; i < n; ++i) ix.idx[i] = i + 1;
    return ix;
}

/// Bounding box, in chart coordinates, of the part of the chart whose ambient
/// image meets `ambient_box`: a lattice scan of the parametrization, inflated
/// by 1.5 cells so the true preimage boundary stays inside. Returns nullopt
/// when no lattice point lands in the box.
std::optional<Box> chart_window(const Chart& chart, const Box& ambient_box) {
    const int n = chart.image.dim();
    const int per_axis = n >= 3 ? 12 : 24;
    std::vector<double> cell(n);
    for (int i = 0; i < n; ++i) cell[i] = (chart.image.hi[i] - chart.image.lo[i]) / per_axis;

    std::vector<int> idx(n, 0);
    std::vector<double> x(n), lo(n), hi(n);
    bool any = false;
    while (true) {
        for (int i = 0; i < n; ++i) x[i] = chart.image.lo[i] + (idx[i] + 0.5) * cell[i];
        std::vector<double> y;
        y.reserve(chart.param.size());
        bool ok = true;
        for (const Expr& e : chart.param) {
            try {
                y.push_back(e.eval(x));
            } catch (const EvalError&) {
                ok = false;
                break;
            }
        }
        if (ok && ambient_box.contains(y)) {
            for (int i = 0; i < n; ++i) {
                lo[i] = any ? std::min(lo[i], x[i]) : x[i];
                hi[i] = any ? std::max(hi[i], x[i]) : x[i];
            }
            any = true;
        }
        int axis = 0;
        while (axis < n && ++idx[axis] == per_axis) idx[axis++] = 0;
        if (axis == n) break;
    }
    if (!any) return std::nullopt;
    for (int i = 0; i < n; ++i) {
        lo[i] = std::max(chart.image.lo[i], lo[i] - 1.5 * cell[i]);
        hi[i] = std::min(chart.image.hi[i], hi[i] + 1.5 * cell[i]);
    }
    return Box{std::move(lo), std::move(hi)};
}

}  // namespace

std::vector<Vector> integrate_terms(const Form& f, const Manifold& m, const PartitionOfUnity& pou,
                                    int quad_order) {
    if (f.manifold != m.id) throw std::invalid_argument("form and manifold do not match");
    if (f.degree != m.dim) throw std::invalid_argument("only top-degree forms integrate");
    if (pou.manifold != m.id) throw std::invalid_argument("partition subordinate to another manifold");
    if (!m.oriented) throw std::invalid_argument("integration requires an oriented manifold");

    const FormIndex top = top_index(m.dim);
    std::vector<Vector> out;
    for (const PartitionTerm& term : pou.terms) {
        const Chart& chart = m.chart(term.chart);
        std::vector<Cx> acc(f.space->dim, Cx(0.0));
        const FormTable& table = form_table(f, m, chart.id);
        const auto it = table.find(top);
        std::optional<Box> domain = term.support;
        if (it != table.end() && f.support) {
            if (const std::optional<Box> win = chart_window(chart, *f.support))
                domain = intersect(term.support, *win);
            else
                domain.reset();
        }
        if (it != table.end() && domain) {
            const CoefficientFn& coeff = it->second;
            const BoxRule rule = box_rule(*domain, quad_order);
            const double sign = static_cast<double>(chart.gamma);
            for (std::size_t i = 0; i < rule.points.size(); ++i) {
                const double psi = term.psi.eval(rule.points[i]);
                if (psi == 0.0) continue;
                const double s = sign * rule.weights[i] * psi;
                const std::vector<Cx> vals = eval(coeff, rule.points[i]);
                for (int d = 0; d < f.space->dim; ++d) acc[d] += s * vals[d];
            }
        }
        Vector v;
        v.space = f.space;
        v.comps = std::move(acc);
        out.push_back(std::move(v));
    }
    return out;
}

Vector integrate_with_partition(const Form& f, const Manifold& m, const PartitionOfUnity& pou,
                                int quad_order) {
    std::vector<Cx> acc(f.space->dim, Cx(0.0));
    for (const Vector& v : integrate_terms(f, m, pou, quad_order))
        for (int d = 0; d < f.space->dim; ++d) acc[d] += v.comps[d];
    Vector out;
    out.space = f.space;
    out.comps = std::move(acc);
    return out;
}

PartitionOfUnity default_partition(const Form& f, const Manifold& m) {
    std::optional<Box> support = support_box(f, m);
    if (!support)
        throw std::invalid_argument("form '" + f.id + "' has no known support box to integrate over");
    std::vector<std::string> ids;
    for (const Chart& c : m.charts) ids.push_back(c.id);
    PartitionOfUnity pou = build_partition(m, *support, ids, 0.05, "pou_" + f.id);
    require_covering(m, pou);
    return pou;
}

Vector integrate(const Form& f, const Manifold& m, int quad_order) {
    return integrate_with_partition(f, m, default_partition(f, m), quad_order);
}

WeakIntegral weak_integral(const Form& f, const Manifold& m, const PartitionOfUnity& pou,
                           int quad_order) {
    WeakIntegral w;
    w.space = f.space;
    for (const LinearMap& lambda : dual_functionals(f.space)) {
        const Form observed = pushforward(lambda, f);
        const Vector v = integrate_with_partition(observed, m, pou, quad_order);
        w.components.push_back(v.comps[0]);
    }
    return w;
}

WeakIntegral weak_integral(const Form& f, const Manifold& m, int quad_order) {
    return weak_integral(f, m, default_partition(f, m), quad_order);
}

Vector reconstruct(const WeakIntegral& w) { return make_vector(w.space, w.components); }

WeakIntegral measure_apply(const VectorialMeasure& mu, const ScalarOnManifold& g, const Manifold& m,
                           int quad_order) {
    // The measure is the fixed functional determined by the density: quadrature
    // geometry (partition and support window) comes from the density alone and
    // the scalar only enters the integrand. With the geometry shared across
    // calls, linearity in the scalar holds to rounding error.
    Form weighted = scalar_action(g, mu.density);
    weighted.support = mu.density.support;
    return weak_integral(weighted, m, quad_order);
}

ScalarOnManifold scalar_combo(double a, const ScalarOnManifold& g1, double b,
                              const ScalarOnManifold& g2) {
    if (g1.manifold != g2.manifold)
        throw std::invalid_argument("scalar combination needs one manifold");
    ScalarOnManifold out;
    out.id = g1.id + "+" + g2.id;
    out.manifold = g1.manifold;
    for (const auto& [chart, e1] : g1.charts) {
        auto it = g2.charts.find(chart);
        if (it == g2.charts.end())
            throw std::invalid_argument("scalar combination needs both terms on every chart");
        out.charts[chart] = Expr::constant(a) * e1 + Expr::constant(b) * it->second;
    }
    if (g1.support && g2.support) {
        Box u = *g1.support;
        for (int i = 0; i < u.dim(); ++i) {
            u.lo[i] = std::min(u.lo[i], g2.support->lo[i]);
            u.hi[i] = std::max(u.hi[i], g2.support->hi[i]);
        }
        out.support = u;
    }
    return out;
}

StokesResult stokes_pair(const Form& theta, const Manifold& m, int quad_order,
                         double boundary_sign) {
    if (theta.degree != m.dim - 1)
        throw std::invalid_argument("boundary identity needs a form one degree below the top");
    StokesResult res;
    res.lhs = integrate(exterior_derivative(theta), m, quad_order);

    if (!m.has_boundary) {
        res.rhs = zero_vector(theta.space);
    } else {
        const Manifold bd = boundary_manifold(m);
        const SmoothMap incl = boundary_inclusion(m, bd);
        const Form pulled = pullback(incl, bd, m, theta);
        res.rhs = scale(Cx(boundary_sign, 0.0), integrate(pulled, bd, quad_order));
    }
    res.residual = max_abs_diff(res.lhs, res.rhs);
    return res;
}

}  // namespace vforms
