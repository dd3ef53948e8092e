#include "vforms/form.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace vforms {

namespace {

void check_form_index(const FormIndex& ix, int k, int n) {
    if (ix.order() != k) throw std::invalid_argument("form index order mismatch");
    for (int i = 0; i < k; ++i) {
        if (ix.idx[i] < 1 || ix.idx[i] > n) throw std::invalid_argument("form index out of range");
        if (i > 0 && ix.idx[i] <= ix.idx[i - 1])
            throw std::invalid_argument("form index must be strictly increasing");
    }
}

void for_each_increasing(int n, int k, const std::function<void(const FormIndex&)>& fn) {
    std::vector<int> ix(k);
    for (int i = 0; i < k; ++i) ix[i] = i + 1;
    if (k == 0) {
        fn(FormIndex{});
        return;
    }
    if (k > n) return;
    while (true) {
        fn(FormIndex{ix});
        int i = k - 1;
        while (i >= 0 && ix[i] == n - (k - 1 - i)) --i;
        if (i < 0) return;
        ++ix[i];
        for (int j = i + 1; j < k; ++j) ix[j] = ix[j - 1] + 1;
    }
}

// det of a k x k matrix of expressions, Laplace expansion along the first row.
Expr symbolic_det(const std::vector<std::vector<Expr>>& m) {
    const int k = static_cast<int>(m.size());
    if (k == 0) return Expr::constant(1.0);
    if (k == 1) return m[0][0];
    if (k == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    Expr acc = Expr::constant(0.0);
    for (int c = 0; c < k; ++c) {
        std::vector<std::vector<Expr>> minor;
        for (int r = 1; r < k; ++r) {
            std::vector<Expr> row;
            for (int cc = 0; cc < k; ++cc)
                if (cc != c) row.push_back(m[r][cc]);
            minor.push_back(std::move(row));
        }
        Expr term = m[0][c] * symbolic_det(minor);
        acc = (c % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

std::vector<double> sample_in(const Box& box, std::mt19937_64& rng) {
    std::vector<double> p(box.dim());
    for (int i = 0; i < box.dim(); ++i) {
        const double w = box.hi[i] - box.lo[i];
        std::uniform_real_distribution<double> d(box.lo[i] + 1e-3 * w, box.hi[i] - 1e-3 * w);
        p[i] = d(rng);
    }
    return p;
}

}  // namespace

Form make_form(Form f) {
    if (f.dim < 1) throw std::invalid_argument("form needs a chart dimension");
    if (f.degree < 0 || f.degree > f.dim)
        throw std::invalid_argument("form degree must lie in 0..N");
    if (!f.space) throw std::invalid_argument("form needs a value space");
    for (const auto& [chart, table] : f.tables)
        for (const auto& [ix, coeff] : table) {
            check_form_index(ix, f.degree, f.dim);
            if (coeff.arity != f.dim)
                throw std::invalid_argument("coefficient arity differs from the chart dimension in '" +
                                            chart + "'");
            if (!same_space(coeff.space, f.space))
                throw std::invalid_argument("coefficient space differs from the form's space");
        }
    if (f.kind == FieldKind::integrable && !f.support)
        throw std::invalid_argument("integrable form requires a declared ambient support box");
    return f;
}

Form zero_form(std::string id, std::string manifold, int dim, int degree, SpacePtr space) {
    Form f;
    f.id = std::move(id);
    f.manifold = std::move(manifold);
    f.dim = dim;
    f.degree = degree;
    f.space = std::move(space);
    return make_form(std::move(f));
}

const FormTable& form_table(const Form& f, const Manifold& m, std::string_view chart_id) {
    static const FormTable empty;
    const Chart& chart = m.chart(chart_id);
    auto it = f.tables.find(chart.id);
    if (it != f.tables.end()) return it->second;
    if (chart_meets_support(m, chart, f.support))
        throw std::invalid_argument("chart '" + chart.id + "' meets the support of '" + f.id +
                                    "' but has no coefficient table");
    return empty;
}

std::optional<std::pair<FormIndex, int>> merge_indices(const FormIndex& a, const FormIndex& b) {
    FormIndex merged;
    merged.idx.reserve(a.idx.size() + b.idx.size());
    int sign = 1;
    std::size_t i = 0, j = 0;
    while (i < a.idx.size() && j < b.idx.size()) {
        if (a.idx[i] == b.idx[j]) return std::nullopt;
        if (a.idx[i] < b.idx[j]) {
            merged.idx.push_back(a.idx[i++]);
        } else {
            // b's entry jumps over the remaining entries of a.
            if ((a.idx.size() - i) % 2 == 1) sign = -sign;
            merged.idx.push_back(b.idx[j++]);
        }
    }
    while (i < a.idx.size()) merged.idx.push_back(a.idx[i++]);
    while (j < b.idx.size()) merged.idx.push_back(b.idx[j++]);
    return std::make_pair(std::move(merged), sign);
}

Form wedge(const Form& a, const Form& b, int variant) {
    if (variant != 1 && variant != 2) throw std::invalid_argument("wedge variant must be 1 or 2");
    if (a.manifold != b.manifold || a.dim != b.dim)
        throw std::invalid_argument("wedge factors must live on the same manifold");
    const Form& must_be_smooth = (variant == 1) ? b : a;
    if (must_be_smooth.kind != FieldKind::smooth)
        throw std::invalid_argument(variant == 1
                                        ? "wedge variant 1 requires a smooth right factor"
                                        : "wedge variant 2 requires a smooth left factor");

    Form out;
    out.id = a.id + "^" + b.id;
    out.manifold = a.manifold;
    out.dim = a.dim;
    out.degree = std::min(a.degree + b.degree, a.dim);
    out.space = tensor_product_space(a.space, b.space);
    out.kind = (a.kind == FieldKind::integrable || b.kind == FieldKind::integrable)
                   ? FieldKind::integrable
                   : FieldKind::smooth;
    if (a.degree + b.degree > a.dim) {
        // No increasing index of that order exists, so the product is zero;
        // represent it at top degree with empty tables.
        if (out.kind == FieldKind::integrable)
            out.support = a.support ? a.support : b.support;
        return make_form(std::move(out));
    }

    for (const auto& [chart, ta] : a.tables) {
        auto itb = b.tables.find(chart);
        if (itb == b.tables.end()) continue;
        FormTable table;
        for (const auto& [ia, ca] : ta)
            for (const auto& [ib, cb] : itb->second) {
                auto merged = merge_indices(ia, ib);
                if (!merged) continue;
                CoefficientFn prod = kron(ca, cb);
                if (merged->second < 0) prod = scale(Cx(-1.0, 0.0), prod);
                auto it = table.find(merged->first);
                if (it == table.end())
                    table.emplace(merged->first, std::move(prod));
                else
                    it->second = add(it->second, prod);
            }
        if (!table.empty()) out.tables[chart] = std::move(table);
    }
    if (out.kind == FieldKind::integrable) {
        if (a.support && b.support) {
            auto cap = intersect(*a.support, *b.support);
            out.support = cap ? *cap : *a.support;
        } else {
            out.support = a.support ? a.support : b.support;
        }
    } else if (a.support && b.support) {
        auto cap = intersect(*a.support, *b.support);
        out.support = cap ? *cap : *a.support;
    } else if (a.support || b.support) {
        out.support = a.support ? a.support : b.support;
    }
    return make_form(std::move(out));
}

Form exterior_derivative(const Form& f) {
    if (f.kind != FieldKind::smooth)
        throw std::invalid_argument("exterior derivative requires a smooth form");
    Form out;
    out.id = "d(" + f.id + ")";
    out.manifold = f.manifold;
    out.dim = f.dim;
    out.degree = std::min(f.degree + 1, f.dim);
    out.space = f.space;
    out.kind = FieldKind::smooth;
    out.support = f.support;
    if (f.degree + 1 > f.dim) {
        // d of a top-degree form vanishes; keep empty tables at top degree.
        return make_form(std::move(out));
    }

    for (const auto& [chart, table] : f.tables) {
        FormTable dt;
        for (const auto& [ix, coeff] : table) {
            for (int j = 1; j <= f.dim; ++j) {
                FormIndex axis{{j}};
                auto merged = merge_indices(axis, ix);
                if (!merged) continue;
                CoefficientFn dc = diff(coeff, j);
                if (is_zero(dc)) continue;
                if (merged->second < 0) dc = scale(Cx(-1.0, 0.0), dc);
                auto it = dt.find(merged->first);
                if (it == dt.end())
                    dt.emplace(merged->first, std::move(dc));
                else
                    it->second = add(it->second, dc);
            }
        }
        out.tables[chart] = std::move(dt);
    }
    return make_form(std::move(out));
}

Form pushforward(const LinearMap& m, const Form& f) {
    if (!same_space(m.source, f.space))
        throw std::invalid_argument("pushforward map source must match the form's space");
    Form out = f;
    out.id = f.id + "_pushed";
    out.space = m.target;
    for (auto& [chart, table] : out.tables)
        for (auto& [ix, coeff] : table) coeff = apply(m, coeff);
    return out;
}

Form pullback(const SmoothMap& fmap, const Manifold& src, const Manifold& dst, const Form& f) {
    if (f.manifold != fmap.dst_manifold || src.id != fmap.src_manifold)
        throw std::invalid_argument("smooth map endpoints do not match the pullback request");
    if (f.kind == FieldKind::integrable)
        for (const auto& p : fmap.pieces)
            if (!p.inverse)
                throw std::invalid_argument(
                    "integrable pullback requires a declared inverse on every piece");

    if (f.degree > src.dim)
        throw std::invalid_argument("form degree exceeds the source dimension");

    Form out;
    out.id = f.id + "_pulled";
    out.manifold = src.id;
    out.dim = src.dim;
    out.degree = f.degree;
    out.space = f.space;
    out.kind = f.kind;

    for (const auto& piece : fmap.pieces) {
        const Chart& w = src.chart(piece.src_chart);
        if (static_cast<int>(piece.exprs.size()) != dst.dim)
            throw std::invalid_argument("smooth map piece has wrong component count");
        FormTable table;  // stored even when empty: the pullback is defined (and zero) there
        auto itt = f.tables.find(piece.dst_chart);
        if (itt != f.tables.end()) {
            std::vector<std::vector<Expr>> jac(dst.dim);
            for (int i = 0; i < dst.dim; ++i)
                for (int j = 1; j <= src.dim; ++j) jac[i].push_back(piece.exprs[i].diff(j));

            for_each_increasing(src.dim, f.degree, [&](const FormIndex& jx) {
                CoefficientFn acc = zero_coefficient(f.space, src.dim);
                for (const auto& [ix, coeff] : itt->second) {
                    std::vector<std::vector<Expr>> minor(f.degree, std::vector<Expr>());
                    for (int r = 0; r < f.degree; ++r)
                        for (int c = 0; c < f.degree; ++c)
                            minor[r].push_back(jac[ix.idx[r] - 1][jx.idx[c] - 1]);
                    Expr weight = symbolic_det(minor);
                    if (weight.is_constant(0.0)) continue;
                    CoefficientFn pulled = substitute(coeff, piece.exprs, src.dim);
                    acc = add(acc, mul_expr(weight, pulled));
                }
                if (!is_zero(acc)) table[jx] = std::move(acc);
            });
        }
        out.tables[w.id] = std::move(table);
    }

    if (f.support) {
        if (src.ambient == dst.ambient) {
            // The common case is an inclusion of a piece of the manifold (the
            // boundary in particular), where the source sits inside the same
            // ambient box.
            out.support = f.support;
        } else {
            // Otherwise overestimate by the ambient bounding box of every
            // source chart a piece is defined on.
            std::optional<Box> total;
            std::mt19937_64 rng(3);
            for (const auto& piece : fmap.pieces) {
                const Chart& chart = src.chart(piece.src_chart);
                std::vector<double> lo, hi;
                for (int s = 0; s < 256; ++s) {
                    std::vector<double> x = sample_in(chart.image, rng);
                    std::vector<double> y(src.ambient);
                    try {
                        for (int j = 0; j < src.ambient; ++j) y[j] = chart.param[j].eval(x);
                    } catch (const EvalError&) {
                        continue;
                    }
                    if (lo.empty()) {
                        lo = y;
                        hi = y;
                    } else {
                        for (int j = 0; j < src.ambient; ++j) {
                            lo[j] = std::min(lo[j], y[j]);
                            hi[j] = std::max(hi[j], y[j]);
                        }
                    }
                }
                if (lo.empty()) continue;
                const Box bb = inflate(Box{lo, hi}, 0.2);
                if (!total) {
                    total = bb;
                } else {
                    for (int j = 0; j < src.ambient; ++j) {
                        total->lo[j] = std::min(total->lo[j], bb.lo[j]);
                        total->hi[j] = std::max(total->hi[j], bb.hi[j]);
                    }
                }
            }
            if (!total)
                total = Box{std::vector<double>(src.ambient, -1e-9),
                            std::vector<double>(src.ambient, 1e-9)};
            out.support = total;
        }
    }
    return make_form(std::move(out));
}

Form add(const Form& a, const Form& b) {
    if (a.manifold != b.manifold || a.degree != b.degree || !same_space(a.space, b.space))
        throw std::invalid_argument("form sum requires matching degree and space");
    Form out = a;
    out.id = a.id + "+" + b.id;
    for (const auto& [chart, table] : b.tables) {
        FormTable& dst = out.tables[chart];
        for (const auto& [ix, coeff] : table) {
            auto it = dst.find(ix);
            if (it == dst.end())
                dst.emplace(ix, coeff);
            else
                it->second = add(it->second, coeff);
        }
    }
    if (a.support && b.support) {
        Box u = *a.support;
        for (int i = 0; i < u.dim(); ++i) {
            u.lo[i] = std::min(u.lo[i], b.support->lo[i]);
            u.hi[i] = std::max(u.hi[i], b.support->hi[i]);
        }
        out.support = u;
    } else if (a.support || b.support) {
        out.support = a.support ? a.support : b.support;
    }
    return out;
}

Form scale(Cx a, const Form& f) {
    Form out = f;
    for (auto& [chart, table] : out.tables)
        for (auto& [ix, coeff] : table) coeff = scale(a, coeff);
    return out;
}

Form scalar_action(const ScalarOnManifold& g, const Form& f) {
    if (g.manifold != f.manifold)
        throw std::invalid_argument("scalar and form live on different manifolds");
    Form out = f;
    out.id = g.id + "*" + f.id;
    for (auto& [chart, table] : out.tables) {
        auto it = g.charts.find(chart);
        if (it == g.charts.end())
            throw std::invalid_argument("scalar '" + g.id + "' missing on chart '" + chart + "'");
        for (auto& [ix, coeff] : table) coeff = mul_expr(it->second, coeff);
    }
    if (g.support && f.support) {
        auto cap = intersect(*g.support, *f.support);
        out.support = cap ? *cap : *f.support;
    } else if (g.support) {
        out.support = g.support;
    }
    return out;
}

Vector evaluate(const Form& f, const Manifold& m, std::string_view chart_id,
                std::span<const double> x, const std::vector<std::vector<double>>& vectors) {
    if (static_cast<int>(vectors.size()) != f.degree)
        throw std::invalid_argument("evaluate needs k vectors for a k-form");
    const FormTable& table = form_table(f, m, chart_id);
    Vector out = zero_vector(f.space);
    for (const auto& [ix, coeff] : table) {
        std::vector<std::vector<double>> mat(f.degree, std::vector<double>(f.degree));
        for (int r = 0; r < f.degree; ++r)
            for (int c = 0; c < f.degree; ++c) mat[r][c] = vectors[c][ix.idx[r] - 1];
        const double weight = detail::det(mat);
        if (weight == 0.0) continue;
        out = add(out, scale(Cx(weight, 0.0), eval_vector(coeff, x)));
    }
    return out;
}

OverlapReport overlap_compatibility(const Form& f, const Manifold& m, int samples,
                                    std::uint64_t seed) {
    OverlapReport rep;
    std::mt19937_64 rng(seed);
    for (const auto& [a, b] : m.overlaps) {
        auto ta = f.tables.find(a);
        auto tb = f.tables.find(b);
        if (ta == f.tables.end() || tb == f.tables.end()) continue;
        const Chart& ca = m.chart(a);
        const Chart& cb = m.chart(b);
        const Transition tr = compose_chart_map(m, a, b);
        std::vector<std::vector<Expr>> jac(m.dim);
        for (int i = 0; i < m.dim; ++i)
            for (int j = 1; j <= m.dim; ++j) jac[i].push_back(tr.map[i].diff(j));

        for (int s_i = 0; s_i < samples; ++s_i) {
            const std::vector<double> x = sample_in(ca.image, rng);
            std::vector<double> y(m.ambient), tx(m.dim);
            try {
                for (int j = 0; j < m.ambient; ++j) y[j] = ca.param[j].eval(x);
            } catch (const EvalError&) {
                continue;
            }
            if (!locate_in_chart(cb, m.ambient, y)) continue;
            bool usable = true;
            try {
                for (int i = 0; i < m.dim; ++i) tx[i] = tr.map[i].eval(x);
            } catch (const EvalError&) {
                usable = false;
            }
            if (!usable) continue;
            ++rep.sampled;
            for_each_increasing(m.dim, f.degree, [&](const FormIndex& jx) {
                std::vector<Cx> lhs(f.space->dim, Cx(0.0));
                auto it = ta->second.find(jx);
                if (it != ta->second.end()) lhs = eval(it->second, x);
                std::vector<Cx> rhs(f.space->dim, Cx(0.0));
                for (const auto& [ix, coeff] : tb->second) {
                    std::vector<std::vector<double>> minor(f.degree,
                                                           std::vector<double>(f.degree));
                    bool ok = true;
                    try {
                        for (int r = 0; r < f.degree; ++r)
                            for (int c = 0; c < f.degree; ++c)
                                minor[r][c] = jac[ix.idx[r] - 1][jx.idx[c] - 1].eval(x);
                    } catch (const EvalError&) {
                        ok = false;
                    }
                    if (!ok) continue;
                    const double w = detail::det(minor);
                    if (w == 0.0) continue;
                    const auto vals = eval(coeff, tx);
                    for (int d = 0; d < f.space->dim; ++d) rhs[d] += w * vals[d];
                }
                for (int d = 0; d < f.space->dim; ++d) {
                    const double delta = std::abs(lhs[d] - rhs[d]);
                    if (delta > rep.residual) {
                        rep.residual = delta;
                        std::ostringstream os;
                        os << "charts " << a << "/" << b << " index slot " << d;
                        rep.detail = os.str();
                    }
                }
            });
        }
    }
    return rep;
}

std::optional<Box> support_box(const Form& f, const Manifold& m) {
    if (f.support) return f.support;
    TensorField probe;
    probe.id = f.id;
    probe.manifold = f.manifold;
    probe.dim = f.dim;
    probe.r = 0;
    probe.s = 0;
    probe.space = f.space;
    // Borrow the field-level bbox machinery by flattening coefficients.
    std::optional<Box> total;
    for (const auto& [chart_id, table] : f.tables) {
        for (const auto& [ix, coeff] : table) {
            if (!coeff.support) continue;
            TensorField one = probe;
            one.tables[chart_id][TensorIndex{}] = coeff;
            auto bb = support_box(one, m);
            if (!bb) continue;
            if (!total) {
                total = bb;
            } else {
                for (int j = 0; j < total->dim(); ++j) {
                    total->lo[j] = std::min(total->lo[j], bb->lo[j]);
                    total->hi[j] = std::max(total->hi[j], bb->hi[j]);
                }
            }
        }
    }
    return total;
}

SmoothMap boundary_inclusion(const Manifold& m, const Manifold& bd) {
    SmoothMap incl;
    incl.id = bd.id + "_into_" + m.id;
    incl.src_manifold = bd.id;
    incl.dst_manifold = m.id;
    for (const Chart& c : m.charts) {
        if (!c.boundary) continue;
        SmoothMapPiece piece;
        piece.src_chart = c.id + "_face";
        piece.dst_chart = c.id;
        for (int i = 1; i < m.dim; ++i) piece.exprs.push_back(Expr::variable(i));
        piece.exprs.push_back(Expr::constant(0.0));
        incl.pieces.push_back(std::move(piece));
    }
    return incl;
}

double sampled_table_max(const Form& f, const Manifold& m, int samples_per_chart,
                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (const Chart& chart : m.charts) {
        auto it = f.tables.find(chart.id);
        if (it == f.tables.end()) continue;
        for (int s = 0; s < samples_per_chart; ++s) {
            const std::vector<double> x = sample_in(chart.image, rng);
            for (const auto& [ix, coeff] : it->second) {
                const auto vals = eval(coeff, x);
                for (const Cx& v : vals) worst = std::max(worst, std::abs(v));
            }
        }
    }
    return worst;
}

double sampled_difference(const Form& a, const Form& b, const Manifold& m, int samples_per_chart,
                          std::uint64_t seed) {
    if (a.degree != b.degree || !same_space(a.space, b.space))
        throw std::invalid_argument("sampled difference requires forms of one type");
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    const int vd = a.space->dim;
    for (const Chart& chart : m.charts) {
        auto ita = a.tables.find(chart.id);
        auto itb = b.tables.find(chart.id);
        if (ita == a.tables.end() && itb == b.tables.end()) continue;
        for (int s = 0; s < samples_per_chart; ++s) {
            const std::vector<double> x = sample_in(chart.image, rng);
            for_each_increasing(m.dim, a.degree, [&](const FormIndex& ix) {
                std::vector<Cx> va(vd, Cx(0.0)), vb(vd, Cx(0.0));
                if (ita != a.tables.end())
                    if (auto it = ita->second.find(ix); it != ita->second.end()) va = eval(it->second, x);
                if (itb != b.tables.end())
                    if (auto it = itb->second.find(ix); it != itb->second.end()) vb = eval(it->second, x);
                for (int d = 0; d < vd; ++d) worst = std::max(worst, std::abs(va[d] - vb[d]));
            });
        }
    }
    return worst;
}

}  // namespace vforms
