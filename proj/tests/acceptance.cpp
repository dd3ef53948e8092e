// Release gate: ten verdict lines, one per exit criterion, each judged from a
// fresh run of the bundled scenarios or from an independent re-computation.
// Exits nonzero when any criterion fails.
//
// The Monte-Carlo section re-estimates every chart-level quadrature appearing
// in the bundled integration scenarios with a seed-fixed uniform sampler
// (10^7 points per integral) and requires agreement within three standard
// errors. Forms are rebuilt from the bundled JSON documents themselves, so
// the oracle always follows the shipped definitions.

#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vforms/catalog.hpp"
#include "vforms/integrate.hpp"
#include "vforms/scenario.hpp"

using nlohmann::json;
using namespace vforms;

namespace {

// ----------------------------------------------------------------- verdicts

int g_line = 0;
bool g_all_ok = true;

void verdict(bool ok, const std::string& text) {
    ++g_line;
    if (!ok) g_all_ok = false;
    std::printf("[%2d/10] %s  %s\n", g_line, ok ? "PASS" : "FAIL", text.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

// -------------------------------------------------------- scenario wrappers

struct TimedRun {
    int exit_code = -1;
    double seconds = 0.0;
    json report;
    std::string error;
};

TimedRun run_bundle(const std::string& name) {
    TimedRun r;
    const auto t0 = std::chrono::steady_clock::now();
    const RunOutcome out = run_scenario_text(bundled_scenario_text(name));
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.exit_code = out.exit_code;
    r.error = out.error;
    if (!out.report_json.empty()) r.report = json::parse(out.report_json);
    return r;
}

struct KindStats {
    int count = 0;
    int passed = 0;
    double max_residual = 0.0;
};

KindStats stats_for(const json& report, const std::string& kind) {
    KindStats s;
    if (!report.contains("checks")) return s;
    for (const auto& c : report["checks"]) {
        if (c["kind"] != kind) continue;
        ++s.count;
        if (c["status"] == "pass") ++s.passed;
        s.max_residual = std::max(s.max_residual, c["residual"].get<double>());
    }
    return s;
}

bool failing_check_with_residual(const json& report, double floor) {
    if (!report.contains("checks")) return false;
    for (const auto& c : report["checks"])
        if (c["status"] == "fail" && c["residual"].get<double>() >= floor) return true;
    return false;
}

// ------------------------------------- rebuilding forms from bundled JSON

SpacePtr space_by_name(const std::string& n) {
    if (n == "R") return scalar_space(Scalar::real);
    if (n == "C") return scalar_space(Scalar::cplx);
    if (n == "R2") return make_space("R2", Scalar::real, 2);
    if (n == "R3") return make_space("R3", Scalar::real, 3);
    if (n == "C2") return make_space("C2", Scalar::cplx, 2);
    throw std::runtime_error("unknown space name " + n);
}

Expr expr_from(const json& j, int arity) {
    if (j.is_number()) return Expr::constant(j.get<double>());
    return parse_expr(j.get<std::string>(), arity);
}

CoeffComponent comp_from(const json& j, int arity, bool cplx) {
    if (cplx) return {expr_from(j.at(0), arity), expr_from(j.at(1), arity)};
    return CoeffComponent::real(expr_from(j, arity));
}

CoefficientFn coeff_from(const json& j, const SpacePtr& space, int arity) {
    const bool cplx = space->scalar == Scalar::cplx;
    std::vector<CoeffComponent> comps;
    if (space->dim == 1) {
        comps.push_back(comp_from(j, arity, cplx));
    } else {
        for (const auto& e : j) comps.push_back(comp_from(e, arity, cplx));
    }
    return make_coefficient(space, arity, std::move(comps));
}

FormIndex index_from(const std::string& key) {
    FormIndex idx;
    std::istringstream in(key);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) idx.idx.push_back(std::stoi(tok));
    return idx;
}

Box box_from(const json& j) {
    return Box{j.at(0).get<std::vector<double>>(), j.at(1).get<std::vector<double>>()};
}

Form form_from(const std::string& name, const json& fj, const Manifold& m) {
    const int degree = fj.at("degree").get<int>();
    const SpacePtr space = space_by_name(fj.value("space", "R"));
    std::optional<Box> support;
    if (fj.contains("support")) support = box_from(fj["support"]);
    if (fj.contains("ambient")) {
        FormTable table;
        for (const auto& [key, val] : fj["ambient"].items())
            table[index_from(key)] = coeff_from(val, space, m.ambient);
        return ambient_form(m, name, degree, space, table, FieldKind::smooth, support);
    }
    Form f;
    f.id = name;
    f.manifold = m.id;
    f.dim = m.dim;
    f.degree = degree;
    f.space = space;
    f.support = support;
    for (const auto& [chart, tbl] : fj.at("charts").items())
        for (const auto& [key, val] : tbl.items())
            f.tables[chart][index_from(key)] = coeff_from(val, space, m.dim);
    return make_form(std::move(f));
}

ScalarOnManifold scalar_from(const std::string& name, const json& sj, const Manifold& m) {
    ScalarOnManifold g;
    g.id = name;
    g.manifold = m.id;
    for (const auto& [chart, e] : sj.at("charts").items()) g.charts[chart] = expr_from(e, m.dim);
    if (sj.contains("support")) g.support = box_from(sj["support"]);
    return g;
}

// ------------------------------------------------------- Monte-Carlo replay

constexpr long long kMcSamples = 10'000'000;
constexpr std::uint64_t kMcSeed = 20260823;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct McChannel {
    int comp = 0;
    bool imag = false;
    double gl = 0.0;  // the engine's quadrature value for this channel
};

struct McJob {
    std::string label;
    double gamma = 1.0;
    Expr psi = Expr::constant(1.0);
    // Optional extra pointwise weight evaluated outside the symbolic tree
    // (used for transported partition weights, where numeric chart location
    // is both cheaper and a more independent evaluation than the composed
    // expression the engine integrates).
    std::function<double(const std::vector<double>&)> extra;
    std::vector<CoeffComponent> comps;  // top-index coefficient on the chart
    std::vector<McChannel> channels;
    Box box;  // the partition term's support box in chart coordinates
    std::uint64_t seed = 0;
};

struct McResult {
    bool ok = true;
    double worst_ratio = 0.0;
    std::string detail;
};

McResult run_job(const McJob& job) {
    const int dim = job.box.dim();
    double vol = 1.0;
    for (int d = 0; d < dim; ++d) vol *= job.box.hi[d] - job.box.lo[d];

    const std::size_t nch = job.channels.size();
    std::vector<double> tsum(nch, 0.0), tsq(nch, 0.0), bsum(nch, 0.0), bsq(nch, 0.0);
    std::vector<char> live(nch, 0);
    bool any_live = false;
    for (std::size_t c = 0; c < nch; ++c) {
        if (job.comps.empty()) continue;
        const CoeffComponent& cc = job.comps[job.channels[c].comp];
        const Expr& e = job.channels[c].imag ? cc.im : cc.re;
        live[c] = e.is_constant(0.0) ? 0 : 1;
        any_live = any_live || live[c];
    }

    std::mt19937_64 rng(job.seed);
    std::vector<double> p(dim);
    constexpr long long kBlock = 16384;
    if (any_live) {
        for (long long s = 0; s < kMcSamples; ++s) {
            for (int d = 0; d < dim; ++d) {
                const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                p[d] = job.box.lo[d] + (job.box.hi[d] - job.box.lo[d]) * u;
            }
            double w;
            try {
                w = job.psi.eval(p);
            } catch (const EvalError&) {
                w = 0.0;  // measure-zero singular set of a transported weight
            }
            if (w != 0.0 && job.extra) w *= job.extra(p);
            if (w != 0.0) {
                for (std::size_t c = 0; c < nch; ++c) {
                    if (!live[c]) continue;
                    const CoeffComponent& cc = job.comps[job.channels[c].comp];
                    const Expr& e = job.channels[c].imag ? cc.im : cc.re;
                    double v;
                    try {
                        v = e.eval(p);
                    } catch (const EvalError&) {
                        v = 0.0;
                    }
                    const double x = w * v;
                    bsum[c] += x;
                    bsq[c] += x * x;
                }
            }
            if ((s + 1) % kBlock == 0) {
                for (std::size_t c = 0; c < nch; ++c) {
                    tsum[c] += bsum[c];
                    tsq[c] += bsq[c];
                    bsum[c] = bsq[c] = 0.0;
                }
            }
        }
        for (std::size_t c = 0; c < nch; ++c) {
            tsum[c] += bsum[c];
            tsq[c] += bsq[c];
        }
    }

    McResult out;
    const double m = static_cast<double>(kMcSamples);
    for (std::size_t c = 0; c < nch; ++c) {
        const double mean = tsum[c] / m;
        const double var = std::max(0.0, tsq[c] / m - mean * mean);
        const double est = job.gamma * vol * mean;
        const double se = std::abs(vol) * std::sqrt(var / m);
        const double diff = std::abs(job.channels[c].gl - est);
        const bool ok = se > 0.0 ? diff <= 3.0 * se : diff <= 1e-12;
        const double ratio = se > 0.0 ? diff / se : 0.0;
        out.worst_ratio = std::max(out.worst_ratio, ratio);
        if (!ok) {
            out.ok = false;
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s[ch%zu]: rule %.10g vs mc %.10g (se %.3g); ",
                          job.label.c_str(), c, job.channels[c].gl, est, se);
            out.detail += buf;
        }
    }
    return out;
}

void add_jobs(std::vector<McJob>& jobs, const std::string& label, const Form& f,
              const Manifold& m, const PartitionOfUnity& pou, int quad_order,
              const std::function<double(const std::vector<double>&)>* extras = nullptr) {
    const std::vector<Vector> terms = integrate_terms(f, m, pou, quad_order);
    FormIndex top;
    for (int i = 1; i <= m.dim; ++i) top.idx.push_back(i);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        McJob job;
        job.label = label + "@" + pou.terms[i].chart;
        job.gamma = m.chart(pou.terms[i].chart).gamma;
        job.psi = pou.terms[i].psi;
        job.box = pou.terms[i].support;
        if (extras) job.extra = extras[i];
        const FormTable& table = form_table(f, m, pou.terms[i].chart);
        if (const auto it = table.find(top); it != table.end()) job.comps = it->second.comps;
        for (int cix = 0; cix < f.space->dim; ++cix) {
            job.channels.push_back({cix, false, terms[i].comps[cix].real()});
            if (f.space->scalar == Scalar::cplx)
                job.channels.push_back({cix, true, terms[i].comps[cix].imag()});
        }
        job.seed = splitmix64(kMcSeed + 0x9e3779b97f4a7c15ULL * (jobs.size() + 1));
        jobs.push_back(std::move(job));
    }
}

/// Pointwise value of partition term `index` at a point of `chart_id`,
/// computed by locating the ambient image in the term's own chart rather
/// than by composing expressions.
std::function<double(const std::vector<double>&)> located_weight(const Manifold& m,
                                                                 const PartitionOfUnity& pou,
                                                                 std::size_t index,
                                                                 const std::string& chart_id) {
    const Chart& host = m.chart(chart_id);
    const Chart& own = m.chart(pou.terms[index].chart);
    const Expr psi = pou.terms[index].psi;
    const int ambient = m.ambient;
    if (own.id == host.id) return [psi](const std::vector<double>& x) { return psi.eval(x); };
    std::vector<Expr> param = host.param;
    return [psi, param, own, ambient](const std::vector<double>& x) {
        std::vector<double> y(param.size());
        try {
            for (std::size_t i = 0; i < param.size(); ++i) y[i] = param[i].eval(x);
        } catch (const EvalError&) {
            return 0.0;
        }
        const auto z = locate_in_chart(own, ambient, y);
        if (!z) return 0.0;
        try {
            return psi.eval(*z);
        } catch (const EvalError&) {
            return 0.0;
        }
    };
}

/// The exact weighted form the measure machinery integrates: the scalar acts
/// on the density and the quadrature geometry stays pinned to the density's
/// support box.
Form measure_integrand(const ScalarOnManifold& g, const Form& density) {
    Form weighted = scalar_action(g, density);
    weighted.support = density.support;
    return weighted;
}

struct McSummary {
    int jobs = 0;
    int failed = 0;
    double worst_ratio = 0.0;
    double seconds = 0.0;
    std::string detail;
};

McSummary run_all_jobs(std::vector<McJob>& jobs) {
    McSummary sum;
    sum.jobs = static_cast<int>(jobs.size());
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<McResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(hw, jobs.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();)
                results[i] = run_job(jobs[i]);
        });
    for (auto& th : pool) th.join();
    for (const McResult& r : results) {
        sum.worst_ratio = std::max(sum.worst_ratio, r.worst_ratio);
        if (!r.ok) {
            ++sum.failed;
            if (sum.detail.size() < 600) sum.detail += r.detail;
        }
    }
    sum.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sum;
}

McSummary monte_carlo_replay() {
    std::vector<McJob> jobs;

    // Boundary identity on the disk, scalar and vector-valued.
    {
        const json doc = json::parse(bundled_scenario_text("disk_stokes"));
        const Manifold disk = catalog_manifold("disk");
        const Manifold bd = boundary_manifold(disk);
        const SmoothMap incl = boundary_inclusion(disk, bd);
        const int q = doc.at("quad_order").get<int>();
        for (const std::string name : {"theta", "theta_vec"}) {
            const Form theta = form_from(name, doc["forms"][name], disk);
            const Form dtheta = exterior_derivative(theta);
            add_jobs(jobs, "disk d(" + name + ")", dtheta, disk, default_partition(dtheta, disk),
                     q);
            const Form pulled = pullback(incl, bd, disk, theta);
            add_jobs(jobs, "circle " + name, pulled, bd, default_partition(pulled, bd), q);
        }
    }

    // Boundary identity on the half-plane.
    {
        const json doc = json::parse(bundled_scenario_text("halfplane_stokes"));
        const Manifold half = catalog_manifold("halfplane");
        const Manifold bd = boundary_manifold(half);
        const SmoothMap incl = boundary_inclusion(half, bd);
        const int q = doc.at("quad_order").get<int>();
        const Form theta = form_from("theta", doc["forms"]["theta"], half);
        const Form dtheta = exterior_derivative(theta);
        add_jobs(jobs, "halfplane d(theta)", dtheta, half, default_partition(dtheta, half), q);
        const Form pulled = pullback(incl, bd, half, theta);
        add_jobs(jobs, "halfplane edge", pulled, bd, default_partition(pulled, bd), q);
    }

    // Exact top forms over the closed manifolds.
    {
        const json doc = json::parse(bundled_scenario_text("stokes_closed"));
        const int q = doc.at("quad_order").get<int>();
        const Manifold s1 = catalog_manifold("s1");
        const Form g0 = form_from("g0", doc["forms"]["g0"], s1);
        const Form dg0 = exterior_derivative(g0);
        add_jobs(jobs, "s1 d(g0)", dg0, s1, default_partition(dg0, s1), q);
        const Manifold s2 = catalog_manifold("s2");
        const Form w1 = form_from("w1", doc["forms"]["w1"], s2);
        const Form dw1 = exterior_derivative(w1);
        add_jobs(jobs, "s2 d(w1)", dw1, s2, default_partition(dw1, s2), q);
    }

    // One compactly supported form through three different chart covers.
    {
        const json doc = json::parse(bundled_scenario_text("cover_independence"));
        const Manifold m = catalog_manifold("box2_split");
        const Form f = form_from("f", doc["forms"]["f"], m);
        const int q = doc.at("quad_order").get<int>();
        for (const auto& cover : doc["checks"].at(0).at("covers")) {
            const auto ids = cover.get<std::vector<std::string>>();
            std::string tag = "cover";
            for (const auto& id : ids) tag += "_" + id;
            const PartitionOfUnity pou = build_partition(m, *f.support, ids);
            add_jobs(jobs, tag, f, m, pou, q);
        }
    }

    // Additive measure pieces: the densities themselves plus every
    // weight-multiplied piece the additivity check integrates.
    {
        const json doc = json::parse(bundled_scenario_text("partition_additivity"));
        const int q = doc.at("quad_order").get<int>();
        const std::pair<const char*, const char*> cases[] = {{"fd", "disk"}, {"fa", "annulus"}};
        for (const auto& [fname, mname] : cases) {
            const Manifold m = catalog_manifold(mname);
            const Form f = form_from(fname, doc["forms"][fname], m);
            const PartitionOfUnity pou = default_partition(f, m);
            add_jobs(jobs, std::string(fname), f, m, pou, q);
            for (std::size_t i = 0; i < pou.terms.size(); ++i) {
                ScalarOnManifold psi;
                psi.id = "psi_" + pou.terms[i].chart;
                psi.manifold = m.id;
                for (const Chart& c : m.charts)
                    psi.charts[c.id] =
                        (c.id == pou.terms[i].chart ||
                         m.overlap_declared(c.id, pou.terms[i].chart))
                            ? partition_term_on_chart(m, pou, i, c.id)
                            : Expr::constant(0.0);
                // The engine integrates psi_i symbolically composed into each
                // chart; the sampler re-evaluates it by numeric chart location
                // instead, and the weighted coefficient carries the density
                // alone.
                const Form weighted = measure_integrand(psi, f);
                const PartitionOfUnity wpou = default_partition(weighted, m);
                std::vector<std::function<double(const std::vector<double>&)>> extras;
                for (const PartitionTerm& term : wpou.terms) {
                    const bool reachable = term.chart == pou.terms[i].chart ||
                                           m.overlap_declared(term.chart, pou.terms[i].chart);
                    if (reachable)
                        extras.push_back(located_weight(m, pou, i, term.chart));
                    else
                        extras.push_back([](const std::vector<double>&) { return 0.0; });
                }
                // Jobs sample the bare density's coefficient times the located
                // weight, while the quadrature reference integrates the
                // composed product; agreement validates both at once.
                std::vector<McJob> sub;
                add_jobs(sub, std::string(fname) + "*" + psi.id, weighted, m, wpou, q,
                         extras.data());
                for (std::size_t k = 0; k < sub.size(); ++k) {
                    const FormTable& bare = form_table(f, m, wpou.terms[k].chart);
                    FormIndex top;
                    for (int d = 1; d <= m.dim; ++d) top.idx.push_back(d);
                    if (const auto it = bare.find(top); it != bare.end())
                        sub[k].comps = it->second.comps;
                    else
                        sub[k].comps.clear();
                    jobs.push_back(std::move(sub[k]));
                }
            }
        }
    }

    // Weak-integral densities and the measure generators acting on scalars.
    {
        const json doc = json::parse(bundled_scenario_text("weak_reconstruction"));
        const Manifold m = catalog_manifold("box2");
        const int q = doc.at("quad_order").get<int>();
        const Form f2 = form_from("f2", doc["forms"]["f2"], m);
        const Form fc = form_from("fc", doc["forms"]["fc"], m);
        add_jobs(jobs, "f2", f2, m, default_partition(f2, m), q);
        add_jobs(jobs, "fc", fc, m, default_partition(fc, m), q);
        for (const std::string gname : {"g1", "g2"}) {
            const ScalarOnManifold g = scalar_from(gname, doc["scalars"][gname], m);
            const Form weighted = measure_integrand(g, f2);
            add_jobs(jobs, "f2*" + gname, weighted, m, default_partition(weighted, m), q);
        }
    }

    return run_all_jobs(jobs);
}

}  // namespace

int main() {
    std::printf("release gate: 10 criteria\n");

    // 1. Repeated exterior differential annihilates the smooth corpus; the
    //    same run carries the derivative spot-checks used by line 9.
    const TimedRun dd = run_bundle("ddzero_corpus");
    const KindStats ddz = stats_for(dd.report, "dd_zero");
    {
        const bool ok = dd.exit_code == 0 && ddz.count >= 10 && ddz.passed == ddz.count &&
                        ddz.max_residual <= 1e-12 && dd.seconds < 10.0;
        verdict(ok, "d(d f) = 0 across " + std::to_string(ddz.count) +
                        " smooth forms of mixed degree and value space on box, disk and sphere "
                        "atlases (max residual " +
                        fmt(ddz.max_residual) + ", " + fmt(dd.seconds) + "s)");
    }

    // 2. Product rule for the differential over wedge products.
    {
        const TimedRun r = run_bundle("leibniz_corpus");
        const KindStats s = stats_for(r.report, "leibniz");
        const bool ok = r.exit_code == 0 && s.count >= 5 && s.passed == s.count &&
                        s.max_residual <= 1e-10;
        verdict(ok, "graded product rule holds over " + std::to_string(s.count) +
                        " wedge pairs (max residual " + fmt(s.max_residual) + ")");
    }

    // 3. The differential commutes with value-map pushforward and smooth-map
    //    pullback, and pushforward distributes over the wedge.
    {
        const TimedRun r = run_bundle("naturality");
        const KindStats pf = stats_for(r.report, "pushforward_naturality");
        const KindStats pb = stats_for(r.report, "pullback_naturality");
        const KindStats wp = stats_for(r.report, "wedge_pushforward");
        const double worst =
            std::max({pf.max_residual, pb.max_residual, wp.max_residual});
        const bool ok = r.exit_code == 0 && pf.count >= 3 && pb.count >= 3 && wp.count >= 2 &&
                        pf.passed == pf.count && pb.passed == pb.count &&
                        wp.passed == wp.count && worst <= 1e-10;
        verdict(ok, "differential/pushforward/pullback naturality and the wedge product map (" +
                        std::to_string(pf.count + pb.count + wp.count) +
                        " checks, max residual " + fmt(worst) + ")");
    }

    // 4. Boundary identity: pi on the disk for the truncated area generator,
    //    componentwise for the vector variant, zero on closed manifolds.
    {
        const TimedRun disk = run_bundle("disk_stokes");
        const TimedRun closed = run_bundle("stokes_closed");
        const KindStats sd = stats_for(disk.report, "stokes");
        const KindStats sc = stats_for(closed.report, "stokes");
        const bool ok = disk.exit_code == 0 && sd.count == 2 && sd.passed == 2 &&
                        sd.max_residual <= 1e-6 && disk.seconds < 30.0 &&
                        closed.exit_code == 0 && sc.count == 2 && sc.passed == 2 &&
                        sc.max_residual <= 1e-8 && closed.seconds < 30.0;
        verdict(ok, "boundary identity: disk sides equal pi within 1e-6 (worst " +
                        fmt(sd.max_residual) + ", " + fmt(disk.seconds) +
                        "s), circle/sphere integrals of exact forms below 1e-8 (worst " +
                        fmt(sc.max_residual) + ", " + fmt(closed.seconds) + "s)");
    }

    // 5. The integral does not depend on the chart cover.
    {
        const TimedRun r = run_bundle("cover_independence");
        const KindStats s = stats_for(r.report, "cover_independence");
        const bool ok = r.exit_code == 0 && s.count == 1 && s.passed == 1 &&
                        s.max_residual <= 1e-8;
        verdict(ok, "three covers of the same compactly supported form agree (spread " +
                        fmt(s.max_residual) + ")");
    }

    // 6. The measure of a density is additive over partition weights.
    {
        const TimedRun r = run_bundle("partition_additivity");
        const KindStats s = stats_for(r.report, "partition_additivity");
        const bool ok = r.exit_code == 0 && s.count == 2 && s.passed == 2 &&
                        s.max_residual <= 1e-8;
        verdict(ok, "weighted measure pieces sum to the whole integral on disk and annulus "
                    "(max residual " +
                        fmt(s.max_residual) + ")");
    }

    // 7. Weak integrals reconstruct exactly and intertwine with value maps.
    {
        const TimedRun r = run_bundle("weak_reconstruction");
        const KindStats wk = stats_for(r.report, "weak_integral_pushforward");
        const KindStats ml = stats_for(r.report, "measure_linearity");
        double exact = -1.0;
        try {
            const json doc = json::parse(bundled_scenario_text("weak_reconstruction"));
            const Manifold m = catalog_manifold("box2");
            const Form f2 = form_from("f2", doc["forms"]["f2"], m);
            const WeakIntegral w = weak_integral(f2, m, 64);
            exact = max_abs_diff(reconstruct(w), integrate(f2, m, 64));
        } catch (const std::exception&) {
            exact = -1.0;
        }
        const bool ok = r.exit_code == 0 && wk.count == 2 && wk.passed == 2 &&
                        wk.max_residual <= 1e-10 && ml.passed == ml.count && exact == 0.0;
        verdict(ok, "coordinate functionals reconstruct the strong integral exactly (diff " +
                        fmt(exact) + ") and 5 random value maps intertwine (max residual " +
                        fmt(wk.max_residual) + ")");
    }

    // 8. Every chart quadrature in the bundled integration scenarios against
    //    a seed-fixed uniform Monte-Carlo estimate.
    {
        McSummary mc;
        std::string err;
        try {
            mc = monte_carlo_replay();
        } catch (const std::exception& e) {
            err = e.what();
        }
        const bool ok = err.empty() && mc.jobs > 0 && mc.failed == 0;
        std::string text = "chart quadratures vs seeded 1e7-sample Monte-Carlo: " +
                           std::to_string(mc.jobs) + " integrals within 3 standard errors";
        text += " (worst |diff|/se " + fmt(mc.worst_ratio) + ", " + fmt(mc.seconds) + "s)";
        if (!err.empty()) text += " [error: " + err + "]";
        if (mc.failed > 0)
            text += " [" + std::to_string(mc.failed) + " outside band: " + mc.detail + "]";
        verdict(ok, text);
    }

    // 9. Symbolic derivatives against centered finite differences.
    {
        const KindStats s = stats_for(dd.report, "fd_consistency");
        const bool ok = dd.exit_code == 0 && s.count >= 3 && s.passed == s.count &&
                        s.max_residual <= 1e-5;
        verdict(ok, "symbolic coefficients match finite-difference gradients at step 1e-5 (" +
                        std::to_string(s.count) + " forms, max relative residual " +
                        fmt(s.max_residual) + ")");
    }

    // 10. Deliberate defects must be caught loudly.
    {
        const TimedRun flip = run_bundle("inject_flipped_orientation");
        const TimedRun cover = run_bundle("inject_uncovered_support");
        const TimedRun sign = run_bundle("inject_boundary_sign");
        const bool ok = flip.exit_code == 1 && failing_check_with_residual(flip.report, 1e-2) &&
                        cover.exit_code == 1 && failing_check_with_residual(cover.report, 1e-2) &&
                        sign.exit_code == 1 && failing_check_with_residual(sign.report, 1e-2);
        const auto res = [](const TimedRun& t) {
            const KindStats all_stokes = stats_for(t.report, "stokes");
            const KindStats all_psum = stats_for(t.report, "partition_sum");
            return fmt(std::max(all_stokes.max_residual, all_psum.max_residual));
        };
        verdict(ok, "flipped orientation / uncovered support / wrong boundary sign each fail "
                    "with residuals " +
                        res(flip) + " / " + res(cover) + " / " + res(sign));
    }

    std::printf("%s\n", g_all_ok ? "release gate: all 10 criteria satisfied"
                                 : "release gate: FAILURES present");
    return g_all_ok ? 0 : 1;
}
