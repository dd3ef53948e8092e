#include "vforms/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace vforms {

namespace {

std::vector<double> eval_all(const std::vector<Expr>& exprs, std::span<const double> p) {
    std::vector<double> out;
    out.reserve(exprs.size());
    for (const Expr& e : exprs) out.push_back(e.eval(p));
    return out;
}

std::vector<double> sample_point(const Box& box, std::mt19937_64& rng, double inset_frac = 1e-3) {
    std::vector<double> p(box.dim());
    for (int i = 0; i < box.dim(); ++i) {
        const double w = box.hi[i] - box.lo[i];
        std::uniform_real_distribution<double> d(box.lo[i] + inset_frac * w,
                                                 box.hi[i] - inset_frac * w);
        p[i] = d(rng);
    }
    return p;
}

}  // namespace

const Chart* Manifold::find_chart(std::string_view id) const {
    for (const Chart& c : charts)
        if (c.id == id) return &c;
    return nullptr;
}

const Chart& Manifold::chart(std::string_view id) const {
    const Chart* c = find_chart(id);
    if (!c) throw std::invalid_argument("unknown chart '" + std::string(id) + "'");
    return *c;
}

bool Manifold::overlap_declared(std::string_view a, std::string_view b) const {
    for (const auto& [x, y] : overlaps)
        if ((x == a && y == b) || (x == b && y == a)) return true;
    return false;
}

Manifold make_manifold(Manifold m) {
    if (m.dim < 1) throw std::invalid_argument("manifold dimension must be >= 1");
    if (m.ambient < m.dim) throw std::invalid_argument("ambient dimension below manifold dimension");
    if (m.charts.empty()) throw std::invalid_argument("manifold needs at least one chart");
    bool any_boundary = false;
    for (const Chart& c : m.charts) {
        if (c.image.dim() != m.dim)
            throw std::invalid_argument("chart '" + c.id + "': image dimension mismatch");
        if (static_cast<int>(c.param.size()) != m.ambient)
            throw std::invalid_argument("chart '" + c.id + "': param must have one component per ambient axis");
        if (static_cast<int>(c.coord.size()) != m.dim)
            throw std::invalid_argument("chart '" + c.id + "': coord must have one component per chart axis");
        for (const Expr& e : c.param)
            if (e.max_variable() > m.dim)
                throw std::invalid_argument("chart '" + c.id + "': param uses too many variables");
        for (const Expr& e : c.coord)
            if (e.max_variable() > m.ambient)
                throw std::invalid_argument("chart '" + c.id + "': coord uses too many variables");
        if (c.gamma != 1 && c.gamma != -1)
            throw std::invalid_argument("chart '" + c.id + "': orientation sign must be +1 or -1");
        if (c.boundary) {
            if (c.image.lo[m.dim - 1] != 0.0)
                throw std::invalid_argument("chart '" + c.id + "': boundary chart must start at x_N = 0");
            any_boundary = true;
        }
    }
    for (const auto& [a, b] : m.overlaps) {
        m.chart(a);
        m.chart(b);
        if (a == b) throw std::invalid_argument("overlap pair repeats chart '" + a + "'");
    }
    m.has_boundary = any_boundary;
    return m;
}

Transition compose_chart_map(const Manifold& m, std::string_view a, std::string_view b) {
    const Chart& ca = m.chart(a);
    const Chart& cb = m.chart(b);
    Transition t;
    t.from = ca.id;
    t.to = cb.id;
    if (a == b) {
        for (int i = 1; i <= m.dim; ++i) t.map.push_back(Expr::variable(i));
    } else {
        for (const Expr& c : cb.coord) t.map.push_back(c.substitute(ca.param));
    }
    t.jacobian.resize(m.dim);
    for (int i = 0; i < m.dim; ++i) {
        t.jacobian[i].reserve(m.dim);
        for (int j = 1; j <= m.dim; ++j) t.jacobian[i].push_back(t.map[i].diff(j));
    }
    return t;
}

Transition transition(const Manifold& m, std::string_view a, std::string_view b) {
    if (a != b && !m.overlap_declared(a, b))
        throw std::invalid_argument("charts '" + std::string(a) + "' and '" + std::string(b) +
                                    "' are not declared overlapping");
    return compose_chart_map(m, a, b);
}

std::optional<std::vector<double>> locate_in_chart(const Chart& chart, int ambient,
                                                   std::span<const double> ambient_point) {
    if (static_cast<int>(ambient_point.size()) != ambient) return std::nullopt;
    std::vector<double> x;
    try {
        x = eval_all(chart.coord, ambient_point);
    } catch (const EvalError&) {
        return std::nullopt;
    }
    for (double v : x)
        if (!std::isfinite(v)) return std::nullopt;
    const int n = chart.image.dim();
    for (int i = 0; i < n; ++i) {
        const bool face_axis = chart.boundary && i == n - 1;
        const double lo = chart.image.lo[i] - (face_axis ? 1e-12 : 0.0);
        if (x[i] <= lo && !(face_axis && x[i] >= -1e-12)) return std::nullopt;
        if (face_axis && x[i] < 0.0) x[i] = 0.0;
        if (!face_axis && x[i] <= chart.image.lo[i]) return std::nullopt;
        if (x[i] >= chart.image.hi[i]) return std::nullopt;
    }
    return x;
}

OrientationReport orientation_check(const Manifold& m, int samples_per_pair, std::uint64_t seed) {
    OrientationReport rep;
    std::mt19937_64 rng(seed);
    for (const auto& [a, b] : m.overlaps) {
        const Chart& ca = m.chart(a);
        const Chart& cb = m.chart(b);
        const Transition t = compose_chart_map(m, a, b);
        for (int s = 0; s < samples_per_pair; ++s) {
            const std::vector<double> x = sample_point(ca.image, rng);
            std::vector<double> y;
            try {
                y = eval_all(ca.param, x);
            } catch (const EvalError&) {
                continue;
            }
            if (!locate_in_chart(cb, m.ambient, y)) continue;
            std::vector<std::vector<double>> jac(m.dim, std::vector<double>(m.dim));
            bool ok = true;
            for (int i = 0; i < m.dim && ok; ++i)
                for (int j = 0; j < m.dim && ok; ++j) {
                    try {
                        jac[i][j] = t.jacobian[i][j].eval(x);
                    } catch (const EvalError&) {
                        ok = false;
                    }
                }
            if (!ok) continue;
            ++rep.sampled_overlaps;
            const double d = ca.gamma * cb.gamma * detail::det(jac);
            if (d <= 0.0) {
                rep.consistent = false;
                rep.worst_det = std::min(rep.worst_det, d);
                if (rep.detail.empty()) {
                    std::ostringstream os;
                    os << "charts " << a << "/" << b << ": gamma-weighted jacobian determinant " << d;
                    rep.detail = os.str();
                }
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// partition of unity
// ---------------------------------------------------------------------------

namespace {

struct AxisBump {
    double center;
    double radius;
};

// Per-axis bump layout of a chart's image shrunk by `margin`. On the boundary
// axis the ball is centered at the face so the weight stays positive there.
std::vector<AxisBump> chart_bump_axes(const Chart& c, double margin) {
    std::vector<AxisBump> out;
    const int n = c.image.dim();
    for (int i = 0; i < n; ++i) {
        const double half = 0.5 * (c.image.hi[i] - c.image.lo[i]);
        if (c.boundary && i == n - 1) {
            out.push_back({0.0, (1.0 - margin) * (c.image.hi[i] - c.image.lo[i])});
        } else {
            out.push_back({0.5 * (c.image.lo[i] + c.image.hi[i]), (1.0 - margin) * half});
        }
    }
    return out;
}

// A factor's concrete ball: per-axis centers from the margin layout, radius =
// scale times the smallest default radius among its axes.
struct BallFactor {
    std::vector<int> axes;  // 1-based
    std::vector<double> centers;
    double radius;
    int power;
};

BumpRecipe default_recipe(int dim) {
    BumpRecipe r;
    for (int a = 1; a <= dim; ++a) r.push_back(BumpFactor{{a}, 1.0, 1});
    return r;
}

std::vector<BallFactor> chart_ball_factors(const Manifold& m, const Chart& c, double margin) {
    const auto it = m.partition_recipes.find(c.id);
    const BumpRecipe recipe = it != m.partition_recipes.end() ? it->second : default_recipe(c.image.dim());
    const auto axes = chart_bump_axes(c, margin);
    std::vector<BallFactor> out;
    for (const BumpFactor& f : recipe) {
        if (f.axes.empty() || f.power < 1 || !(f.scale > 0.0))
            throw std::invalid_argument("invalid partition recipe on chart '" + c.id + "'");
        BallFactor b{f.axes, {}, std::numeric_limits<double>::infinity(), f.power};
        for (int a : f.axes) {
            if (a < 1 || a > c.image.dim())
                throw std::invalid_argument("partition recipe axis out of range on chart '" + c.id + "'");
            b.centers.push_back(axes[a - 1].center);
            b.radius = std::min(b.radius, axes[a - 1].radius);
        }
        b.radius *= f.scale;
        out.push_back(std::move(b));
    }
    return out;
}

// Product of the factor bumps reading the given coordinate expressions.
Expr bump_product(const std::vector<BallFactor>& factors, const std::vector<Expr>& coords) {
    Expr prod = Expr::constant(1.0);
    for (const BallFactor& f : factors) {
        std::vector<Expr> args;
        for (int a : f.axes) args.push_back(coords[a - 1]);
        Expr b = Expr::bump(f.radius, f.centers, args);
        prod = prod * (f.power == 1 ? b : powi(b, f.power));
    }
    return prod;
}

// Ambient bump sum vanishing on the support box: one ball tangent to each
// face, sitting entirely outside the box.
Expr complement_bumps(const Box& support, const std::vector<Expr>& ambient) {
    double radius = 0.0;
    for (int i = 0; i < support.dim(); ++i) radius = std::max(radius, support.hi[i] - support.lo[i]);
    Expr sum = Expr::constant(0.0);
    for (int i = 0; i < support.dim(); ++i) {
        for (int side = 0; side < 2; ++side) {
            std::vector<double> center(support.dim());
            for (int j = 0; j < support.dim(); ++j) center[j] = 0.5 * (support.lo[j] + support.hi[j]);
            center[i] = side ? support.hi[i] + radius : support.lo[i] - radius;
            sum = sum + Expr::bump(radius, center, ambient);
        }
    }
    return sum;
}

}  // namespace

PartitionOfUnity build_partition(const Manifold& m, const Box& target_support,
                                 const std::vector<std::string>& chart_ids, double margin,
                                 std::string id) {
    if (target_support.dim() != m.ambient)
        throw std::invalid_argument("target support must be an ambient box");
    if (chart_ids.empty()) throw std::invalid_argument("partition needs at least one chart");
    if (!(margin > 0.0 && margin < 0.5)) throw std::invalid_argument("margin must lie in (0, 0.5)");

    PartitionOfUnity pou;
    pou.id = std::move(id);
    pou.manifold = m.id;
    pou.target_support = target_support;
    pou.margin = margin;

    std::vector<const Chart*> cover;
    for (const auto& cid : chart_ids) cover.push_back(&m.chart(cid));

    for (const Chart* ca : cover) {
        const auto own_factors = chart_ball_factors(m, *ca, margin);
        std::vector<Expr> identity;
        for (int i = 1; i <= m.dim; ++i) identity.push_back(Expr::variable(i));

        Expr denom = Expr::constant(0.0);
        for (const Chart* cb : cover) {
            const auto factors = chart_ball_factors(m, *cb, margin);
            if (cb == ca) {
                denom = denom + bump_product(factors, identity);
            } else {
                const Transition t = compose_chart_map(m, ca->id, cb->id);
                denom = denom + bump_product(factors, t.map);
            }
        }
        denom = denom + complement_bumps(target_support, ca->param);

        Expr psi = bump_product(own_factors, identity) / denom;
        // Guard with the numerator's own balls so psi is exactly zero outside
        // them without evaluating 0/0. The guard radii are shrunk by a hair so
        // that inside them the numerator stays above the double underflow
        // threshold (total bump exponent <= 690 split across factors); the
        // weight in the trimmed sliver is below e^-200, zero at this precision.
        const double nfac = static_cast<double>(own_factors.size());
        for (std::size_t i = own_factors.size(); i-- > 0;) {
            std::vector<Expr> args;
            for (int a : own_factors[i].axes) args.push_back(Expr::variable(a));
            const double guard =
                own_factors[i].radius * (1.0 - own_factors[i].power * nfac / 1380.0);
            psi = Expr::cutoff(guard, own_factors[i].centers, std::move(args), psi);
        }

        // Support box: per axis, the tightest factor interval clipped to the image.
        Box supp;
        for (int axis = 1; axis <= m.dim; ++axis) {
            double lo = ca->image.lo[axis - 1], hi = ca->image.hi[axis - 1];
            for (const BallFactor& f : own_factors)
                for (std::size_t k = 0; k < f.axes.size(); ++k)
                    if (f.axes[k] == axis) {
                        lo = std::max(lo, f.centers[k] - f.radius);
                        hi = std::min(hi, f.centers[k] + f.radius);
                    }
            supp.lo.push_back(lo);
            supp.hi.push_back(hi);
        }
        pou.terms.push_back(PartitionTerm{ca->id, std::move(psi), std::move(supp)});
    }
    return pou;
}

Expr partition_term_on_chart(const Manifold& m, const PartitionOfUnity& pou, std::size_t index,
                             std::string_view chart_id) {
    const PartitionTerm& term = pou.terms.at(index);
    if (term.chart == chart_id) return term.psi;
    const Transition t = compose_chart_map(m, chart_id, term.chart);
    return term.psi.substitute(t.map);
}

PartitionReport verify_partition(const Manifold& m, const PartitionOfUnity& pou, int samples,
                                 std::uint64_t seed) {
    PartitionReport rep;
    std::mt19937_64 rng(seed);

    // Sample every chart of the manifold, not only the charts the partition
    // uses, so target points the cover misses are still visited. Each ambient
    // sample inside the target is located in each term's chart through that
    // chart's inverse; terms whose chart does not contain the point contribute
    // zero, which is exact because every weight is supported strictly inside
    // its chart.
    for (const Chart& ch : m.charts) {
        int used = 0;
        for (int s = 0; s < samples && used < samples; ++s) {
            const std::vector<double> x = sample_point(ch.image, rng);
            std::vector<double> y;
            try {
                y = eval_all(ch.param, x);
            } catch (const EvalError&) {
                continue;
            }
            if (!pou.target_support.contains(y)) continue;
            ++used;
            double total = 0.0;
            for (const PartitionTerm& term : pou.terms) {
                if (term.chart == ch.id) {
                    total += term.psi.eval(x);
                } else if (const auto z = locate_in_chart(m.chart(term.chart), m.ambient, y)) {
                    total += term.psi.eval(*z);
                }
            }
            const double dev = std::abs(1.0 - total);
            if (dev > rep.max_unit_deviation) {
                rep.max_unit_deviation = dev;
                if (dev > 1e-9 && rep.detail.empty()) {
                    std::ostringstream os;
                    os << "weight sum deviates by " << dev << " near chart " << ch.id;
                    rep.detail = os.str();
                }
            }
            if (dev > 0.5) rep.covered = false;
        }
    }
    // Support containment: each weight vanishes outside its declared box.
    for (const PartitionTerm& host : pou.terms) {
        const Chart& ch = m.chart(host.chart);
        for (int s = 0; s < samples / 4; ++s) {
            const std::vector<double> x = sample_point(ch.image, rng);
            if (host.support.contains(x)) continue;
            rep.support_leak = std::max(rep.support_leak, std::abs(host.psi.eval(x)));
        }
    }
    return rep;
}

void require_covering(const Manifold& m, const PartitionOfUnity& pou, int samples,
                      std::uint64_t seed) {
    const PartitionReport rep = verify_partition(m, pou, samples, seed);
    if (!rep.covered || rep.max_unit_deviation > 1e-9)
        throw CoverageError("partition does not cover its target support: " +
                            (rep.detail.empty() ? std::string("weight sum short of one") : rep.detail));
}

Manifold boundary_manifold(const Manifold& m) {
    if (!m.has_boundary)
        throw std::invalid_argument("manifold '" + m.id + "' has no boundary charts");
    Manifold bd;
    bd.id = m.id + "_boundary";
    bd.dim = m.dim - 1;
    bd.ambient = m.ambient;
    bd.oriented = m.oriented;
    if (bd.dim < 1)
        throw std::invalid_argument("boundary of a 1-manifold is not representable as charts");

    const int face_sign = (m.dim % 2 == 0) ? +1 : -1;  // (-1)^N
    for (const Chart& c : m.charts) {
        if (!c.boundary) continue;
        Chart f;
        f.id = c.id + "_face";
        f.image.lo.assign(c.image.lo.begin(), c.image.lo.end() - 1);
        f.image.hi.assign(c.image.hi.begin(), c.image.hi.end() - 1);
        f.boundary = false;
        std::vector<Expr> incl;
        for (int i = 1; i < m.dim; ++i) incl.push_back(Expr::variable(i));
        incl.push_back(Expr::constant(0.0));
        for (const Expr& p : c.param) f.param.push_back(p.substitute(incl));
        f.coord.assign(c.coord.begin(), c.coord.end() - 1);
        f.gamma = c.gamma * face_sign;
        // The face inherits the tangential part of the parent's partition
        // recipe: factors lose the face axis (the face-axis bump is exactly 1
        // at x_N = 0); factors over the face axis alone drop out.
        if (const auto it = m.partition_recipes.find(c.id); it != m.partition_recipes.end()) {
            BumpRecipe face_recipe;
            for (const BumpFactor& fac : it->second) {
                BumpFactor g = fac;
                std::erase(g.axes, m.dim);
                if (!g.axes.empty()) face_recipe.push_back(std::move(g));
            }
            if (!face_recipe.empty()) bd.partition_recipes[f.id] = std::move(face_recipe);
        }
        bd.charts.push_back(std::move(f));
    }
    if (bd.charts.empty())
        throw std::invalid_argument("manifold '" + m.id + "' has no boundary charts");
    for (const auto& [a, b] : m.overlaps) {
        const Chart* ca = m.find_chart(a);
        const Chart* cb = m.find_chart(b);
        if (ca && cb && ca->boundary && cb->boundary)
            bd.overlaps.emplace_back(a + "_face", b + "_face");
    }
    return make_manifold(std::move(bd));
}

namespace detail {

double det(const std::vector<std::vector<double>>& a) {
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<double>> u = a;
    double d = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(u[r][c]) > std::abs(u[piv][c])) piv = r;
        if (u[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(u[piv], u[c]);
            d = -d;
        }
        d *= u[c][c];
        for (int r = c + 1; r < n; ++r) {
            const double f = u[r][c] / u[c][c];
            for (int k = c; k < n; ++k) u[r][k] -= f * u[c][k];
        }
    }
    return d;
}

std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a) {
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (a[piv][c] == 0.0) throw std::invalid_argument("singular matrix");
        std::swap(a[piv], a[c]);
        std::swap(inv[piv], inv[c]);
        const double f = a[c][c];
        for (int k = 0; k < n; ++k) {
            a[c][k] /= f;
            inv[c][k] /= f;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double g = a[r][c];
            if (g == 0.0) continue;
            for (int k = 0; k < n; ++k) {
                a[r][k] -= g * a[c][k];
                inv[r][k] -= g * inv[c][k];
            }
        }
    }
    return inv;
}

}  // namespace detail

}  // namespace vforms
