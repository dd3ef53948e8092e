#include "vforms/tensor_field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace vforms {

namespace {

void check_index(const TensorIndex& ix, int r, int s, int n) {
    if (static_cast<int>(ix.up.size()) != r || static_cast<int>(ix.lo.size()) != s)
        throw std::invalid_argument("tensor index slot count mismatch");
    for (int v : ix.up)
        if (v < 1 || v > n) throw std::invalid_argument("tensor index out of range");
    for (int v : ix.lo)
        if (v < 1 || v > n) throw std::invalid_argument("tensor index out of range");
}

// All tuples in [1..n]^len, visited in lexicographic order.
void for_each_tuple(int n, int len, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> tuple(len, 1);
    if (len == 0) {
        fn(tuple);
        return;
    }
    while (true) {
        fn(tuple);
        int i = len - 1;
        while (i >= 0 && tuple[i] == n) {
            tuple[i] = 1;
            --i;
        }
        if (i < 0) return;
        ++tuple[i];
    }
}

std::vector<double> grid_points_1d(double lo, double hi, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * (i + 0.5) / count);
    out.push_back(lo + 1e-9 * (hi - lo));
    out.push_back(hi - 1e-9 * (hi - lo));
    return out;
}

// Sampled ambient bounding box of (a subset of) a chart's image.
std::optional<Box> mapped_bbox(const Chart& chart, int ambient, const Box& region,
                               const std::function<bool(std::span<const double>)>& keep) {
    const int n = region.dim();
    std::vector<std::vector<double>> axes;
    for (int i = 0; i < n; ++i) axes.push_back(grid_points_1d(region.lo[i], region.hi[i], 9));
    std::vector<double> lo(ambient, 0.0), hi(ambient, 0.0);
    bool any = false;
    std::vector<int> pick(n, 0);
    std::vector<double> x(n);
    while (true) {
        for (int i = 0; i < n; ++i) x[i] = axes[i][pick[i]];
        bool use = true;
        std::vector<double> y(ambient);
        try {
            for (int j = 0; j < ambient; ++j) y[j] = chart.param[j].eval(x);
        } catch (const EvalError&) {
            use = false;
        }
        if (use && keep && !keep(x)) use = false;
        if (use) {
            if (!any) {
                lo = y;
                hi = y;
                any = true;
            } else {
                for (int j = 0; j < ambient; ++j) {
                    lo[j] = std::min(lo[j], y[j]);
                    hi[j] = std::max(hi[j], y[j]);
                }
            }
        }
        int i = n - 1;
        while (i >= 0 && pick[i] + 1 == static_cast<int>(axes[i].size())) {
            pick[i] = 0;
            --i;
        }
        if (i < 0) break;
        ++pick[i];
    }
    if (!any) return std::nullopt;
    for (int j = 0; j < ambient; ++j)
        if (!(lo[j] < hi[j])) {
            lo[j] -= 1e-9;
            hi[j] += 1e-9;
        }
    return inflate(Box{std::move(lo), std::move(hi)}, 0.15);
}

}  // namespace

const SmoothMapPiece* SmoothMap::piece_for(std::string_view src_chart) const {
    for (const auto& p : pieces)
        if (p.src_chart == src_chart) return &p;
    return nullptr;
}

TensorField make_tensor_field(TensorField t) {
    if (t.dim < 1) throw std::invalid_argument("tensor field needs a chart dimension");
    if (t.r < 0 || t.s < 0) throw std::invalid_argument("tensor valence must be nonnegative");
    if (!t.space) throw std::invalid_argument("tensor field needs a value space");
    for (const auto& [chart, table] : t.tables) {
        for (const auto& [ix, f] : table) {
            check_index(ix, t.r, t.s, t.dim);
            if (f.arity != t.dim)
                throw std::invalid_argument("coefficient arity differs from the chart dimension in '" +
                                            chart + "'");
            if (!same_space(f.space, t.space))
                throw std::invalid_argument("coefficient space differs from the field's space");
        }
    }
    if (t.kind == FieldKind::integrable && !t.support)
        throw std::invalid_argument("integrable field requires a declared ambient support box");
    return t;
}

bool chart_meets_support(const Manifold& m, const Chart& chart, const std::optional<Box>& box) {
    if (!box) return true;
    bool meets = false;
    mapped_bbox(chart, m.ambient, chart.image, [&](std::span<const double> x) {
        std::vector<double> y(m.ambient);
        try {
            for (int j = 0; j < m.ambient; ++j) y[j] = chart.param[j].eval(x);
        } catch (const EvalError&) {
            return false;
        }
        if (box->contains(y)) meets = true;
        return true;
    });
    return meets;
}

const TensorTable& decompose(const TensorField& t, const Manifold& m, std::string_view chart_id) {
    static const TensorTable empty;
    const Chart& chart = m.chart(chart_id);
    auto it = t.tables.find(chart.id);
    if (it != t.tables.end()) return it->second;
    if (chart_meets_support(m, chart, t.support))
        throw std::invalid_argument("chart '" + chart.id + "' meets the support of '" + t.id +
                                    "' but has no coefficient table");
    return empty;
}

TensorField pushforward(const LinearMap& f, const TensorField& t) {
    if (!same_space(f.source, t.space))
        throw std::invalid_argument("pushforward map source must match the field's space");
    TensorField out = t;
    out.space = f.target;
    out.id = t.id + "_pushed";
    for (auto& [chart, table] : out.tables)
        for (auto& [ix, coeff] : table) coeff = apply(f, coeff);
    return out;
}

TensorField pullback(const SmoothMap& f, const Manifold& src, const Manifold& dst,
                     const TensorField& t) {
    if (t.r != 0)
        throw std::invalid_argument("pullback is defined for purely covariant fields (r = 0)");
    if (t.manifold != f.dst_manifold || src.id != f.src_manifold)
        throw std::invalid_argument("smooth map endpoints do not match the pullback request");
    if (t.kind == FieldKind::integrable)
        for (const auto& p : f.pieces)
            if (!p.inverse)
                throw std::invalid_argument(
                    "integrable pullback requires a declared inverse on every piece");

    TensorField out;
    out.id = t.id + "_pulled";
    out.manifold = src.id;
    out.dim = src.dim;
    out.r = 0;
    out.s = t.s;
    out.space = t.space;
    out.kind = t.kind;

    for (const auto& piece : f.pieces) {
        const Chart& w = src.chart(piece.src_chart);
        auto dst_table_it = t.tables.find(piece.dst_chart);
        if (dst_table_it == t.tables.end()) continue;
        const TensorTable& dst_table = dst_table_it->second;
        if (static_cast<int>(piece.exprs.size()) != dst.dim)
            throw std::invalid_argument("smooth map piece has wrong component count");

        std::vector<std::vector<Expr>> jac(dst.dim);
        for (int i = 0; i < dst.dim; ++i)
            for (int j = 1; j <= src.dim; ++j) jac[i].push_back(piece.exprs[i].diff(j));

        TensorTable table;
        for_each_tuple(src.dim, t.s, [&](const std::vector<int>& jlo) {
            CoefficientFn acc = zero_coefficient(t.space, src.dim);
            for (const auto& [ix, coeff] : dst_table) {
                Expr weight = Expr::constant(1.0);
                for (int k = 0; k < t.s; ++k) weight = weight * jac[ix.lo[k] - 1][jlo[k] - 1];
                if (weight.is_constant(0.0)) continue;
                CoefficientFn pulled = substitute(coeff, piece.exprs, src.dim);
                acc = add(acc, mul_expr(weight, pulled));
            }
            if (!is_zero(acc)) table[TensorIndex{{}, jlo}] = std::move(acc);
        });
        if (!table.empty()) out.tables[w.id] = std::move(table);
    }
    if (t.support) {
        // Overestimated ambient support: source points whose image lands in
        // the original support, bounded per chart and joined.
        std::optional<Box> total;
        for (const auto& piece : f.pieces) {
            const Chart& w = src.chart(piece.src_chart);
            const Chart& u = dst.chart(piece.dst_chart);
            auto bb = mapped_bbox(w, src.ambient, w.image, [&](std::span<const double> x) {
                std::vector<double> fx(dst.dim), y(dst.ambient);
                try {
                    for (int i = 0; i < dst.dim; ++i) fx[i] = piece.exprs[i].eval(x);
                    for (int j = 0; j < dst.ambient; ++j) y[j] = u.param[j].eval(fx);
                } catch (const EvalError&) {
                    return false;
                }
                return t.support->contains(y);
            });
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
        out.support = total ? total : std::optional<Box>(Box{std::vector<double>(src.ambient, -1e-9),
                                                             std::vector<double>(src.ambient, 1e-9)});
    }
    return make_tensor_field(std::move(out));
}

TensorField scalar_action(const ScalarOnManifold& g, const TensorField& t) {
    if (g.manifold != t.manifold)
        throw std::invalid_argument("scalar and field live on different manifolds");
    TensorField out = t;
    out.id = g.id + "*" + t.id;
    for (auto& [chart, table] : out.tables) {
        auto it = g.charts.find(chart);
        if (it == g.charts.end())
            throw std::invalid_argument("scalar '" + g.id + "' missing on chart '" + chart + "'");
        for (auto& [ix, coeff] : table) coeff = mul_expr(it->second, coeff);
    }
    if (g.support && t.support) {
        auto cap = intersect(*g.support, *t.support);
        out.support = cap ? *cap : *t.support;
    } else if (g.support) {
        out.support = g.support;
    }
    return out;
}

TensorField add(const TensorField& a, const TensorField& b) {
    if (a.manifold != b.manifold || a.r != b.r || a.s != b.s || !same_space(a.space, b.space))
        throw std::invalid_argument("tensor sum requires matching type");
    TensorField out = a;
    out.id = a.id + "+" + b.id;
    for (const auto& [chart, table] : b.tables) {
        TensorTable& dst = out.tables[chart];
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
    } else {
        out.support.reset();
        if (a.kind == FieldKind::integrable || b.kind == FieldKind::integrable)
            out.support = a.support ? a.support : b.support;
    }
    return out;
}

TensorField scale(Cx a, const TensorField& t) {
    TensorField out = t;
    for (auto& [chart, table] : out.tables)
        for (auto& [ix, coeff] : table) coeff = scale(a, coeff);
    return out;
}

Vector evaluate(const TensorField& t, const Manifold& m, std::string_view chart_id,
                std::span<const double> x, const std::vector<std::vector<double>>& covecs,
                const std::vector<std::vector<double>>& vecs) {
    if (static_cast<int>(covecs.size()) != t.r || static_cast<int>(vecs.size()) != t.s)
        throw std::invalid_argument("evaluate needs r covectors and s vectors");
    const TensorTable& table = decompose(t, m, chart_id);
    Vector out = zero_vector(t.space);
    for (const auto& [ix, coeff] : table) {
        double weight = 1.0;
        for (int a = 0; a < t.r; ++a) weight *= covecs[a][ix.up[a] - 1];
        for (int b = 0; b < t.s; ++b) weight *= vecs[b][ix.lo[b] - 1];
        if (weight == 0.0) continue;
        out = add(out, scale(Cx(weight, 0.0), eval_vector(coeff, x)));
    }
    return out;
}

std::optional<Box> support_box(const TensorField& t, const Manifold& m) {
    if (t.support) return t.support;
    std::optional<Box> total;
    for (const auto& [chart_id, table] : t.tables) {
        const Chart& chart = m.chart(chart_id);
        for (const auto& [ix, coeff] : table) {
            if (!coeff.support) continue;
            auto bb = mapped_bbox(chart, m.ambient, *coeff.support, nullptr);
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

OverlapReport overlap_compatibility(const TensorField& t, const Manifold& m, int samples,
                                    std::uint64_t seed) {
    OverlapReport rep;
    std::mt19937_64 rng(seed);
    for (const auto& [a, b] : m.overlaps) {
        auto ta = t.tables.find(a);
        auto tb = t.tables.find(b);
        if (ta == t.tables.end() || tb == t.tables.end()) continue;
        const Chart& ca = m.chart(a);
        const Chart& cb = m.chart(b);
        const Transition tr = compose_chart_map(m, a, b);
        for (int s_i = 0; s_i < samples; ++s_i) {
            std::vector<double> x(m.dim);
            for (int i = 0; i < m.dim; ++i) {
                std::uniform_real_distribution<double> d(ca.image.lo[i], ca.image.hi[i]);
                x[i] = d(rng);
            }
            std::vector<double> y(m.ambient), tx(m.dim);
            try {
                for (int j = 0; j < m.ambient; ++j) y[j] = ca.param[j].eval(x);
            } catch (const EvalError&) {
                continue;
            }
            if (!locate_in_chart(cb, m.ambient, y)) continue;
            bool ok = true;
            std::vector<std::vector<double>> jac(m.dim, std::vector<double>(m.dim));
            try {
                for (int i = 0; i < m.dim; ++i) {
                    tx[i] = tr.map[i].eval(x);
                    for (int j = 0; j < m.dim; ++j) jac[i][j] = tr.jacobian[i][j].eval(x);
                }
            } catch (const EvalError&) {
                ok = false;
            }
            if (!ok || std::abs(detail::det(jac)) < 1e-12) continue;
            const auto jinv = detail::invert(jac);
            ++rep.sampled;

            for_each_tuple(m.dim, t.r, [&](const std::vector<int>& up) {
                for_each_tuple(m.dim, t.s, [&](const std::vector<int>& lo) {
                    std::vector<Cx> lhs(t.space->dim, Cx(0.0));
                    auto it = ta->second.find(TensorIndex{up, lo});
                    if (it != ta->second.end()) lhs = eval(it->second, x);
                    std::vector<Cx> rhs(t.space->dim, Cx(0.0));
                    for (const auto& [ix, coeff] : tb->second) {
                        double w = 1.0;
                        for (int k = 0; k < t.r; ++k) w *= jinv[up[k] - 1][ix.up[k] - 1];
                        for (int k = 0; k < t.s; ++k) w *= jac[ix.lo[k] - 1][lo[k] - 1];
                        if (w == 0.0) continue;
                        const auto vals = eval(coeff, tx);
                        for (int d = 0; d < t.space->dim; ++d) rhs[d] += w * vals[d];
                    }
                    for (int d = 0; d < t.space->dim; ++d) {
                        const double delta = std::abs(lhs[d] - rhs[d]);
                        if (delta > rep.residual) {
                            rep.residual = delta;
                            std::ostringstream os;
                            os << "charts " << a << "/" << b << " component " << d;
                            rep.detail = os.str();
                        }
                    }
                });
            });
        }
    }
    return rep;
}

TensorField component_family_view(const TensorField& t) { return t; }
TensorField section_view(const TensorField& t) { return t; }

}  // namespace vforms
