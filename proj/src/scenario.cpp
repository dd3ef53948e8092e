#include "vforms/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "vforms/catalog.hpp"

namespace vforms {
namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";
constexpr int kSchemaVersion = 1;
constexpr int kDefaultQuadOrder = 32;
constexpr double kDefaultFdStep = 1e-5;
constexpr std::uint64_t kDefaultSeed = 2026;
constexpr int kDefaultSamples = 100;
// Residual recorded when a check aborts before producing a number.
constexpr double kAbortedResidual = 9.9e99;

/// A scenario document that does not follow the schema; `what()` carries the
/// JSON-path-like location of the offending member.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] void fail_at(const std::string& where, const std::string& what) {
    throw SchemaError(where + ": " + what);
}

// ---------------------------------------------------------------------------
// typed member access with locations

const ojson* find_member(const ojson& o, const char* key) {
    const auto it = o.find(key);
    return it == o.end() ? nullptr : &*it;
}

const ojson& member(const ojson& o, const std::string& where, const char* key) {
    if (!o.is_object()) fail_at(where, "expected an object");
    const ojson* p = find_member(o, key);
    if (!p) fail_at(where, std::string("missing required member '") + key + "'");
    return *p;
}

std::string get_string(const ojson& o, const std::string& where, const char* key) {
    const ojson& v = member(o, where, key);
    if (!v.is_string()) fail_at(where + "." + key, "expected a string");
    return v.get<std::string>();
}

std::string get_string_or(const ojson& o, const std::string& where, const char* key,
                          const std::string& fallback) {
    const ojson* p = o.is_object() ? find_member(o, key) : nullptr;
    if (!p) return fallback;
    if (!p->is_string()) fail_at(where + "." + key, "expected a string");
    return p->get<std::string>();
}

int get_int(const ojson& o, const std::string& where, const char* key) {
    const ojson& v = member(o, where, key);
    if (!v.is_number_integer()) fail_at(where + "." + key, "expected an integer");
    return v.get<int>();
}

int get_int_or(const ojson& o, const std::string& where, const char* key, int fallback) {
    const ojson* p = o.is_object() ? find_member(o, key) : nullptr;
    if (!p) return fallback;
    if (!p->is_number_integer()) fail_at(where + "." + key, "expected an integer");
    return p->get<int>();
}

double get_double_or(const ojson& o, const std::string& where, const char* key, double fallback) {
    const ojson* p = o.is_object() ? find_member(o, key) : nullptr;
    if (!p) return fallback;
    if (!p->is_number()) fail_at(where + "." + key, "expected a number");
    return p->get<double>();
}

bool get_bool_or(const ojson& o, const std::string& where, const char* key, bool fallback) {
    const ojson* p = o.is_object() ? find_member(o, key) : nullptr;
    if (!p) return fallback;
    if (!p->is_boolean()) fail_at(where + "." + key, "expected a boolean");
    return p->get<bool>();
}

// ---------------------------------------------------------------------------
// deterministic per-check seeding (splitmix-style stir of seed and index)

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// expression / geometry / algebra loaders

Expr parse_in(const std::string& text, int arity, const std::string& where) {
    try {
        return parse_expr(text, arity);
    } catch (const ParseError& e) {
        fail_at(where, std::string(e.what()) + " in \"" + text + "\"");
    }
}

Expr load_expr(const ojson& j, int arity, const std::string& where) {
    if (j.is_number()) return Expr::constant(j.get<double>());
    if (j.is_string()) return parse_in(j.get<std::string>(), arity, where);
    fail_at(where, "expected an expression string or number");
}

CoeffComponent load_component(const ojson& j, int arity, const std::string& where) {
    if (j.is_array()) {
        if (j.size() != 2) fail_at(where, "a complex component is a [re, im] pair");
        return CoeffComponent{load_expr(j[0], arity, where + "[0]"),
                              load_expr(j[1], arity, where + "[1]")};
    }
    return CoeffComponent::real(load_expr(j, arity, where));
}

CoefficientFn load_coefficient(const ojson& j, const SpacePtr& space, int arity,
                               const std::string& where) {
    std::vector<CoeffComponent> comps;
    if (space->dim == 1) {
        comps.push_back(load_component(j, arity, where));
    } else {
        if (!j.is_array() || static_cast<int>(j.size()) != space->dim)
            fail_at(where, "expected an array of " + std::to_string(space->dim) +
                               " components for space '" + space->id + "'");
        for (int d = 0; d < space->dim; ++d)
            comps.push_back(load_component(j[d], arity, where + "[" + std::to_string(d) + "]"));
    }
    try {
        return make_coefficient(space, arity, std::move(comps));
    } catch (const std::exception& e) {
        fail_at(where, e.what());
    }
}

Box load_box(const ojson& j, int dim, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array())
        fail_at(where, "expected a box [[lo...],[hi...]]");
    if (static_cast<int>(j[0].size()) != dim || static_cast<int>(j[1].size()) != dim)
        fail_at(where, "box arity does not match dimension " + std::to_string(dim));
    std::vector<double> lo, hi;
    for (const auto& v : j[0]) {
        if (!v.is_number()) fail_at(where, "box corners must be numbers");
        lo.push_back(v.get<double>());
    }
    for (const auto& v : j[1]) {
        if (!v.is_number()) fail_at(where, "box corners must be numbers");
        hi.push_back(v.get<double>());
    }
    try {
        return make_box(std::move(lo), std::move(hi));
    } catch (const std::exception& e) {
        fail_at(where, e.what());
    }
}

std::vector<int> parse_index_list(const std::string& text, const std::string& where) {
    std::vector<int> out;
    std::string tok;
    std::istringstream in(text);
    while (std::getline(in, tok, ',')) {
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            fail_at(where, "bad index entry '" + tok + "'");
        }
    }
    return out;
}

std::vector<Expr> load_expr_list(const ojson& j, int arity, std::size_t count,
                                 const std::string& where) {
    if (!j.is_array() || j.size() != count)
        fail_at(where, "expected an array of " + std::to_string(count) + " expressions");
    std::vector<Expr> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(load_expr(j[i], arity, where + "[" + std::to_string(i) + "]"));
    return out;
}

// ---------------------------------------------------------------------------
// resolved declarations

struct World {
    std::map<std::string, SpacePtr> spaces;
    std::map<std::string, Manifold> manifolds;
    std::map<std::string, Form> forms;
    std::map<std::string, TensorField> tensors;
    std::map<std::string, ScalarOnManifold> scalars;
    std::map<std::string, LinearMap> maps;
    std::map<std::string, SmoothMap> smooth_maps;

    template <class T>
    static const T& named(const std::map<std::string, T>& m, const std::string& name,
                          const std::string& where, const char* what) {
        const auto it = m.find(name);
        if (it == m.end()) fail_at(where, std::string("unknown ") + what + " '" + name + "'");
        return it->second;
    }

    SpacePtr space(const std::string& name, const std::string& where) const {
        return named(spaces, name, where, "value space");
    }
    const Manifold& manifold(const std::string& name, const std::string& where) const {
        return named(manifolds, name, where, "manifold");
    }
    const Manifold& manifold_by_id(const std::string& id, const std::string& where) const {
        for (const auto& [k, m] : manifolds)
            if (m.id == id) return m;
        fail_at(where, "no declared manifold with id '" + id + "'");
    }
    const Form& form(const std::string& name, const std::string& where) const {
        return named(forms, name, where, "form");
    }
    const TensorField& tensor(const std::string& name, const std::string& where) const {
        return named(tensors, name, where, "tensor field");
    }
    const ScalarOnManifold& scalar(const std::string& name, const std::string& where) const {
        return named(scalars, name, where, "scalar");
    }
    const LinearMap& map(const std::string& name, const std::string& where) const {
        return named(maps, name, where, "linear map");
    }
    const SmoothMap& smooth_map(const std::string& name, const std::string& where) const {
        return named(smooth_maps, name, where, "smooth map");
    }
};

void load_spaces(World& w, const ojson& doc) {
    w.spaces["R"] = scalar_space(Scalar::real);
    w.spaces["C"] = scalar_space(Scalar::cplx);
    w.spaces["R2"] = make_space("R2", Scalar::real, 2);
    w.spaces["R3"] = make_space("R3", Scalar::real, 3);
    w.spaces["C2"] = make_space("C2", Scalar::cplx, 2);
    const ojson* spaces = find_member(doc, "spaces");
    if (!spaces) return;
    if (!spaces->is_object()) fail_at("spaces", "expected an object");
    for (const auto& [name, spec] : spaces->items()) {
        const std::string where = "spaces." + name;
        if (const ojson* prod = spec.is_object() ? find_member(spec, "product") : nullptr) {
            if (!prod->is_array() || prod->size() != 2)
                fail_at(where + ".product", "expected a pair of space names");
            const SpacePtr g = w.space((*prod)[0].get<std::string>(), where);
            const SpacePtr h = w.space((*prod)[1].get<std::string>(), where);
            w.spaces[name] = tensor_product_space(g, h);
            continue;
        }
        const std::string scalar = get_string(spec, where, "scalar");
        if (scalar != "real" && scalar != "complex")
            fail_at(where + ".scalar", "expected \"real\" or \"complex\"");
        const int dim = get_int(spec, where, "dim");
        if (dim < 1) fail_at(where + ".dim", "dimension must be >= 1");
        std::vector<std::string> labels;
        if (const ojson* lab = find_member(spec, "labels")) {
            if (!lab->is_array()) fail_at(where + ".labels", "expected an array of strings");
            for (const auto& l : *lab) labels.push_back(l.get<std::string>());
        }
        try {
            w.spaces[name] = make_space(name, scalar == "real" ? Scalar::real : Scalar::cplx, dim,
                                        std::move(labels));
        } catch (const std::exception& e) {
            fail_at(where, e.what());
        }
    }
}

Manifold load_inline_manifold(const std::string& name, const ojson& spec,
                              const std::string& where) {
    Manifold m;
    m.id = name;
    m.dim = get_int(spec, where, "dim");
    m.ambient = get_int_or(spec, where, "ambient", m.dim);
    m.oriented = get_bool_or(spec, where, "oriented", true);
    const ojson& charts = member(spec, where, "charts");
    if (!charts.is_array() || charts.empty()) fail_at(where + ".charts", "expected a chart array");
    for (std::size_t i = 0; i < charts.size(); ++i) {
        const std::string cw = where + ".charts[" + std::to_string(i) + "]";
        const ojson& cj = charts[i];
        Chart ch;
        ch.id = get_string(cj, cw, "id");
        ch.image = load_box(member(cj, cw, "image"), m.dim, cw + ".image");
        ch.boundary = get_bool_or(cj, cw, "boundary", false);
        ch.gamma = get_int_or(cj, cw, "gamma", 1);
        if (const ojson* p = find_member(cj, "param")) {
            ch.param = load_expr_list(*p, m.dim, static_cast<std::size_t>(m.ambient), cw + ".param");
        } else if (m.ambient == m.dim) {
            for (int k = 1; k <= m.dim; ++k) ch.param.push_back(Expr::variable(k));
        } else {
            fail_at(cw, "charts of an embedded manifold need an explicit param");
        }
        if (const ojson* c = find_member(cj, "coord")) {
            ch.coord = load_expr_list(*c, m.ambient, static_cast<std::size_t>(m.dim), cw + ".coord");
        } else if (m.ambient == m.dim) {
            for (int k = 1; k <= m.dim; ++k) ch.coord.push_back(Expr::variable(k));
        } else {
            fail_at(cw, "charts of an embedded manifold need an explicit coord inverse");
        }
        m.charts.push_back(std::move(ch));
    }
    if (const ojson* ov = find_member(spec, "overlaps")) {
        if (!ov->is_array()) fail_at(where + ".overlaps", "expected an array of chart-id pairs");
        for (const auto& pr : *ov) {
            if (!pr.is_array() || pr.size() != 2)
                fail_at(where + ".overlaps", "each overlap is a pair of chart ids");
            m.overlaps.emplace_back(pr[0].get<std::string>(), pr[1].get<std::string>());
        }
    }
    if (const ojson* rec = find_member(spec, "recipes")) {
        if (!rec->is_object()) fail_at(where + ".recipes", "expected an object");
        for (const auto& [chart_id, factors] : rec->items()) {
            const std::string rw = where + ".recipes." + chart_id;
            if (!factors.is_array()) fail_at(rw, "expected an array of bump factors");
            BumpRecipe recipe;
            for (const auto& fj : factors) {
                BumpFactor f;
                const ojson& axes = member(fj, rw, "axes");
                if (!axes.is_array() || axes.empty()) fail_at(rw + ".axes", "expected axis list");
                for (const auto& a : axes) f.axes.push_back(a.get<int>());
                f.scale = get_double_or(fj, rw, "scale", 1.0);
                f.power = get_int_or(fj, rw, "power", 1);
                recipe.push_back(std::move(f));
            }
            m.partition_recipes[chart_id] = std::move(recipe);
        }
    }
    try {
        return make_manifold(std::move(m));
    } catch (const std::exception& e) {
        fail_at(where, e.what());
    }
}

void load_manifolds(World& w, const ojson& doc) {
    const ojson* ms = find_member(doc, "manifolds");
    if (!ms) return;
    if (!ms->is_object()) fail_at("manifolds", "expected an object");
    for (const auto& [name, spec] : ms->items()) {
        const std::string where = "manifolds." + name;
        if (spec.is_string()) {
            try {
                w.manifolds.emplace(name, catalog_manifold(spec.get<std::string>()));
            } catch (const std::exception& e) {
                fail_at(where, e.what());
            }
        } else if (spec.is_object()) {
            w.manifolds.emplace(name, load_inline_manifold(name, spec, where));
        } else {
            fail_at(where, "expected a catalog name or an inline atlas object");
        }
    }
}

FieldKind load_kind(const ojson& o, const std::string& where) {
    const std::string k = get_string_or(o, where, "kind", "smooth");
    if (k == "smooth") return FieldKind::smooth;
    if (k == "integrable") return FieldKind::integrable;
    fail_at(where + ".kind", "expected \"smooth\" or \"integrable\"");
}

void load_forms(World& w, const ojson& doc) {
    const ojson* fs = find_member(doc, "forms");
    if (!fs) return;
    if (!fs->is_object()) fail_at("forms", "expected an object");
    for (const auto& [name, spec] : fs->items()) {
        const std::string where = "forms." + name;
        const Manifold& m = w.manifold(get_string(spec, where, "manifold"), where);
        const int degree = get_int(spec, where, "degree");
        const SpacePtr space = w.space(get_string_or(spec, where, "space", "R"), where);
        const FieldKind kind = load_kind(spec, where);
        std::optional<Box> support;
        if (const ojson* s = find_member(spec, "support"))
            support = load_box(*s, m.ambient, where + ".support");

        const ojson* ambient = find_member(spec, "ambient");
        const ojson* charts = find_member(spec, "charts");
        if ((ambient == nullptr) == (charts == nullptr))
            fail_at(where, "declare exactly one of 'ambient' or 'charts'");

        try {
            if (ambient) {
                FormTable table;
                for (const auto& [key, comps] : ambient->items()) {
                    FormIndex ix{parse_index_list(key, where + ".ambient")};
                    table[ix] = load_coefficient(comps, space, m.ambient,
                                                 where + ".ambient[\"" + key + "\"]");
                }
                w.forms.emplace(name,
                                ambient_form(m, name, degree, space, table, kind, support));
            } else {
                Form f;
                f.id = name;
                f.manifold = m.id;
                f.dim = m.dim;
                f.degree = degree;
                f.space = space;
                f.kind = kind;
                f.support = support;
                for (const auto& [chart_id, tj] : charts->items()) {
                    const std::string cw = where + ".charts." + chart_id;
                    FormTable table;
                    for (const auto& [key, comps] : tj.items()) {
                        FormIndex ix{parse_index_list(key, cw)};
                        table[ix] =
                            load_coefficient(comps, space, m.dim, cw + "[\"" + key + "\"]");
                    }
                    f.tables[chart_id] = std::move(table);
                }
                w.forms.emplace(name, make_form(std::move(f)));
            }
        } catch (const SchemaError&) {
            throw;
        } catch (const std::exception& e) {
            fail_at(where, e.what());
        }
    }
}

void load_tensors(World& w, const ojson& doc) {
    const ojson* ts = find_member(doc, "tensors");
    if (!ts) return;
    if (!ts->is_object()) fail_at("tensors", "expected an object");
    for (const auto& [name, spec] : ts->items()) {
        const std::string where = "tensors." + name;
        const Manifold& m = w.manifold(get_string(spec, where, "manifold"), where);
        TensorField t;
        t.id = name;
        t.manifold = m.id;
        t.dim = m.dim;
        t.r = get_int_or(spec, where, "r", 0);
        t.s = get_int_or(spec, where, "s", 0);
        t.space = w.space(get_string_or(spec, where, "space", "R"), where);
        t.kind = load_kind(spec, where);
        if (const ojson* s = find_member(spec, "support"))
            t.support = load_box(*s, m.ambient, where + ".support");
        const ojson& charts = member(spec, where, "charts");
        for (const auto& [chart_id, tj] : charts.items()) {
            const std::string cw = where + ".charts." + chart_id;
            TensorTable table;
            for (const auto& [key, comps] : tj.items()) {
                const std::size_t bar = key.find('|');
                if (bar == std::string::npos)
                    fail_at(cw, "tensor index keys look like \"up|lo\", e.g. \"1|2\"");
                TensorIndex ix{parse_index_list(key.substr(0, bar), cw),
                               parse_index_list(key.substr(bar + 1), cw)};
                table[ix] = load_coefficient(comps, t.space, m.dim, cw + "[\"" + key + "\"]");
            }
            t.tables[chart_id] = std::move(table);
        }
        try {
            w.tensors.emplace(name, make_tensor_field(std::move(t)));
        } catch (const std::exception& e) {
            fail_at(where, e.what());
        }
    }
}

void load_scalars(World& w, const ojson& doc) {
    const ojson* ss = find_member(doc, "scalars");
    if (!ss) return;
    if (!ss->is_object()) fail_at("scalars", "expected an object");
    for (const auto& [name, spec] : ss->items()) {
        const std::string where = "scalars." + name;
        const Manifold& m = w.manifold(get_string(spec, where, "manifold"), where);
        ScalarOnManifold g;
        g.id = name;
        g.manifold = m.id;
        const ojson& charts = member(spec, where, "charts");
        for (const auto& [chart_id, ej] : charts.items())
            g.charts[chart_id] = load_expr(ej, m.dim, where + ".charts." + chart_id);
        if (const ojson* s = find_member(spec, "support"))
            g.support = load_box(*s, m.ambient, where + ".support");
        w.scalars.emplace(name, std::move(g));
    }
}

Cx load_cx(const ojson& j, const std::string& where) {
    if (j.is_number()) return Cx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Cx(j[0].get<double>(), j[1].get<double>());
    fail_at(where, "expected a number or a [re, im] pair");
}

void load_maps(World& w, const ojson& doc) {
    const ojson* ms = find_member(doc, "maps");
    if (!ms) return;
    if (!ms->is_object()) fail_at("maps", "expected an object");
    for (const auto& [name, spec] : ms->items()) {
        const std::string where = "maps." + name;
        const SpacePtr source = w.space(get_string(spec, where, "source"), where);
        const SpacePtr target = w.space(get_string(spec, where, "target"), where);
        const ojson& entries = member(spec, where, "entries");
        if (!entries.is_array()) fail_at(where + ".entries", "expected a flat row-major array");
        std::vector<Cx> vals;
        for (std::size_t i = 0; i < entries.size(); ++i)
            vals.push_back(load_cx(entries[i], where + ".entries[" + std::to_string(i) + "]"));
        try {
            w.maps.emplace(name, make_map(source, target, std::move(vals)));
        } catch (const std::exception& e) {
            fail_at(where, e.what());
        }
    }
}

void load_smooth_maps(World& w, const ojson& doc) {
    const ojson* ms = find_member(doc, "smooth_maps");
    if (!ms) return;
    if (!ms->is_object()) fail_at("smooth_maps", "expected an object");
    for (const auto& [name, spec] : ms->items()) {
        const std::string where = "smooth_maps." + name;
        const Manifold& src = w.manifold(get_string(spec, where, "src"), where);
        const Manifold& dst = w.manifold(get_string(spec, where, "dst"), where);
        SmoothMap f;
        f.id = name;
        f.src_manifold = src.id;
        f.dst_manifold = dst.id;
        const ojson& pieces = member(spec, where, "pieces");
        if (!pieces.is_array() || pieces.empty()) fail_at(where + ".pieces", "expected pieces");
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const std::string pw = where + ".pieces[" + std::to_string(i) + "]";
            const ojson& pj = pieces[i];
            SmoothMapPiece piece;
            piece.src_chart = get_string(pj, pw, "src_chart");
            piece.dst_chart = get_string(pj, pw, "dst_chart");
            piece.exprs = load_expr_list(member(pj, pw, "exprs"), src.dim,
                                         static_cast<std::size_t>(dst.dim), pw + ".exprs");
            if (const ojson* inv = find_member(pj, "inverse"))
                piece.inverse = load_expr_list(*inv, dst.dim, static_cast<std::size_t>(src.dim),
                                               pw + ".inverse");
            f.pieces.push_back(std::move(piece));
        }
        w.smooth_maps.emplace(name, std::move(f));
    }
}

// ---------------------------------------------------------------------------
// check execution

struct CheckOutcome {
    std::string kind;
    std::vector<std::string> targets;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool aborted = false;
    ojson details = ojson::object();
    double wall_ms = 0.0;
};

double default_tolerance(const std::string& kind) {
    static const std::map<std::string, double> table = {
        {"dd_zero", 1e-12},
        {"leibniz", 1e-10},
        {"wedge_commutativity", 1e-12},
        {"pushforward_naturality", 1e-10},
        {"pullback_naturality", 1e-10},
        {"wedge_pushforward", 1e-10},
        {"tensor_overlap_compat", 1e-8},
        {"partition_sum", 1e-12},
        {"cover_independence", 1e-8},
        {"weak_integral_pushforward", 1e-10},
        {"measure_linearity", 1e-10},
        {"partition_additivity", 1e-8},
        {"stokes", 1e-6},
        {"fd_consistency", 1e-5},
    };
    const auto it = table.find(kind);
    if (it == table.end()) fail_at("checks", "unknown check kind '" + kind + "'");
    return it->second;
}

ojson vector_json(const Vector& v) {
    ojson out = ojson::array();
    const bool complex_space = v.space->scalar == Scalar::cplx;
    for (const Cx& c : v.comps) {
        if (complex_space)
            out.push_back(ojson::array({c.real(), c.imag()}));
        else
            out.push_back(c.real());
    }
    return out;
}

Vector load_vector(const ojson& j, const SpacePtr& space, const std::string& where) {
    std::vector<Cx> comps;
    if (space->dim == 1 && j.is_number()) {
        comps.push_back(Cx(j.get<double>(), 0.0));
    } else {
        if (!j.is_array() || static_cast<int>(j.size()) != space->dim)
            fail_at(where, "expected " + std::to_string(space->dim) + " components");
        for (std::size_t i = 0; i < j.size(); ++i)
            comps.push_back(load_cx(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return make_vector(space, std::move(comps));
}

/// Execution context shared by all checks of one run.
struct RunContext {
    const World& world;
    int quad_order;
    double fd_step;
    std::uint64_t seed;
    int samples;
};

const Manifold& form_manifold(const RunContext& ctx, const Form& f, const std::string& where) {
    return ctx.world.manifold_by_id(f.manifold, where);
}

LinearMap random_square_map(const SpacePtr& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Cx> entries;
    const bool cplx = g->scalar == Scalar::cplx;
    for (int i = 0; i < g->dim * g->dim; ++i) {
        const double re = u(rng);
        entries.push_back(cplx ? Cx(re, u(rng)) : Cx(re, 0.0));
    }
    return make_map(g, g, std::move(entries));
}

void check_dd_zero(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                   const std::string& where, std::uint64_t seed) {
    const Form& f = ctx.world.form(get_string(body, where, "form"), where);
    out.targets = {f.id};
    const Manifold& m = form_manifold(ctx, f, where);
    const Form ddf = exterior_derivative(exterior_derivative(f));
    out.residual = sampled_table_max(ddf, m, ctx.samples, seed);
    out.details["degree"] = f.degree;
    out.details["space"] = f.space->id;
}

void check_leibniz(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                   const std::string& where, std::uint64_t seed) {
    const Form& a = ctx.world.form(get_string(body, where, "left"), where);
    const Form& b = ctx.world.form(get_string(body, where, "right"), where);
    const int variant = get_int_or(body, where, "variant", 1);
    out.targets = {a.id, b.id};
    const Manifold& m = form_manifold(ctx, a, where);
    const Form lhs = exterior_derivative(wedge(a, b, variant));
    const double sign = a.degree % 2 == 0 ? 1.0 : -1.0;
    const Form rhs = add(wedge(exterior_derivative(a), b, variant),
                         scale(Cx(sign, 0.0), wedge(a, exterior_derivative(b), variant)));
    out.residual = sampled_difference(lhs, rhs, m, ctx.samples, seed);
    out.details["orders"] = ojson::array({a.degree, b.degree});
    out.details["sign"] = sign;
}

void check_wedge_commutativity(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                               const std::string& where, std::uint64_t seed) {
    const Form& a = ctx.world.form(get_string(body, where, "left"), where);
    const Form& b = ctx.world.form(get_string(body, where, "right"), where);
    const int variant = get_int_or(body, where, "variant", 1);
    out.targets = {a.id, b.id};
    const Manifold& m = form_manifold(ctx, a, where);
    const Form ab = wedge(a, b, variant);
    const Form ba = wedge(b, a, variant);
    const double sign = (a.degree * b.degree) % 2 == 0 ? 1.0 : -1.0;
    const Form flipped = scale(Cx(sign, 0.0), pushforward(swap_map(b.space, a.space), ba));
    out.residual = sampled_difference(ab, flipped, m, ctx.samples, seed);
    out.details["orders"] = ojson::array({a.degree, b.degree});
    out.details["sign"] = sign;
}

void check_pushforward_naturality(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                                  const std::string& where, std::uint64_t seed) {
    const LinearMap& psi = ctx.world.map(get_string(body, where, "map"), where);
    const Form& f = ctx.world.form(get_string(body, where, "form"), where);
    out.targets = {get_string(body, where, "map"), f.id};
    const Manifold& m = form_manifold(ctx, f, where);
    const Form lhs = pushforward(psi, exterior_derivative(f));
    const Form rhs = exterior_derivative(pushforward(psi, f));
    out.residual = sampled_difference(lhs, rhs, m, ctx.samples, seed);
}

void check_pullback_naturality(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                               const std::string& where, std::uint64_t seed) {
    const std::string map_name = get_string(body, where, "smooth_map");
    const SmoothMap& fm = ctx.world.smooth_map(map_name, where);
    const Form& f = ctx.world.form(get_string(body, where, "form"), where);
    out.targets = {map_name, f.id};
    const Manifold& src = ctx.world.manifold_by_id(fm.src_manifold, where);
    const Manifold& dst = ctx.world.manifold_by_id(fm.dst_manifold, where);
    const Form lhs = pullback(fm, src, dst, exterior_derivative(f));
    const Form rhs = exterior_derivative(pullback(fm, src, dst, f));
    out.residual = sampled_difference(lhs, rhs, src, ctx.samples, seed);
}

void check_wedge_pushforward(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                             const std::string& where, std::uint64_t seed) {
    const Form& a = ctx.world.form(get_string(body, where, "left"), where);
    const Form& b = ctx.world.form(get_string(body, where, "right"), where);
    const LinearMap& psi = ctx.world.map(get_string(body, where, "map_left"), where);
    const LinearMap& phi = ctx.world.map(get_string(body, where, "map_right"), where);
    const int variant = get_int_or(body, where, "variant", 1);
    out.targets = {a.id, b.id, get_string(body, where, "map_left"),
                   get_string(body, where, "map_right")};
    const Manifold& m = form_manifold(ctx, a, where);
    const Form lhs = pushforward(kronecker_map(psi, phi), wedge(a, b, variant));
    const Form rhs = wedge(pushforward(psi, a), pushforward(phi, b), variant);
    out.residual = sampled_difference(lhs, rhs, m, ctx.samples, seed);
}

void check_tensor_overlap_compat(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                                 const std::string& where, std::uint64_t seed) {
    OverlapReport rep;
    if (const ojson* t = find_member(body, "tensor")) {
        const TensorField& field = ctx.world.tensor(t->get<std::string>(), where);
        out.targets = {field.id};
        rep = overlap_compatibility(field, ctx.world.manifold_by_id(field.manifold, where),
                                    ctx.samples, seed);
    } else {
        const Form& f = ctx.world.form(get_string(body, where, "form"), where);
        out.targets = {f.id};
        rep = overlap_compatibility(f, form_manifold(ctx, f, where), ctx.samples, seed);
    }
    out.residual = rep.residual;
    out.details["sampled"] = rep.sampled;
    if (!rep.detail.empty()) out.details["note"] = rep.detail;
}

void check_partition_sum(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                         const std::string& where, std::uint64_t seed) {
    const Manifold& m = ctx.world.manifold(get_string(body, where, "manifold"), where);
    out.targets = {m.id};
    Box target = load_box(member(body, where, "target"), m.ambient, where + ".target");
    std::vector<std::string> chart_ids;
    if (const ojson* cj = find_member(body, "charts")) {
        for (const auto& c : *cj) chart_ids.push_back(c.get<std::string>());
    } else {
        for (const Chart& c : m.charts) chart_ids.push_back(c.id);
    }
    const double margin = get_double_or(body, where, "margin", 0.05);
    const PartitionOfUnity pou = build_partition(m, target, chart_ids, margin);
    const PartitionReport rep = verify_partition(m, pou, std::max(ctx.samples, 400), seed);
    out.residual = std::max(rep.max_unit_deviation, rep.support_leak);
    if (!rep.covered) out.residual = std::max(out.residual, 1.0);
    out.details["covered"] = rep.covered;
    out.details["max_unit_deviation"] = rep.max_unit_deviation;
    out.details["support_leak"] = rep.support_leak;
    out.details["terms"] = pou.terms.size();
    if (!rep.detail.empty()) out.details["note"] = rep.detail;
}

void check_cover_independence(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                              const std::string& where, std::uint64_t seed, int quad_order) {
    const Form& f = ctx.world.form(get_string(body, where, "form"), where);
    out.targets = {f.id};
    const Manifold& m = form_manifold(ctx, f, where);
    const ojson& covers = member(body, where, "covers");
    if (!covers.is_array() || covers.size() < 2)
        fail_at(where + ".covers", "expected at least two chart-id lists");
    Box target = [&]() {
        if (const ojson* t = find_member(body, "target"))
            return load_box(*t, m.ambient, where + ".target");
        const std::optional<Box> s = support_box(f, m);
        if (!s) fail_at(where, "form has no support box; declare 'target'");
        return *s;
    }();
    const double margin = get_double_or(body, where, "margin", 0.05);
    std::vector<Vector> results;
    ojson values = ojson::array();
    for (std::size_t i = 0; i < covers.size(); ++i) {
        std::vector<std::string> ids;
        for (const auto& c : covers[i]) ids.push_back(c.get<std::string>());
        const PartitionOfUnity pou =
            build_partition(m, target, ids, margin, "cover" + std::to_string(i));
        require_covering(m, pou, std::max(ctx.samples, 400), seed);
        results.push_back(integrate_with_partition(f, m, pou, quad_order));
        values.push_back(vector_json(results.back()));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i)
        for (std::size_t j = i + 1; j < results.size(); ++j)
            worst = std::max(worst, max_abs_diff(results[i], results[j]));
    out.residual = worst;
    out.details["values"] = std::move(values);
}

void check_weak_integral_pushforward(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                                     const std::string& where, std::uint64_t seed,
                                     int quad_order) {
    const Form& f = ctx.world.form(get_string(body, where, "form"), where);
    out.targets = {f.id};
    const Manifold& m = form_manifold(ctx, f, where);
    const int n_maps = get_int_or(body, where, "random_maps", 5);
    const PartitionOfUnity pou = default_partition(f, m);
    const Vector strong = integrate_with_partition(f, m, pou, quad_order);
    const WeakIntegral weak = weak_integral(f, m, pou, quad_order);
    const double exact = max_abs_diff(reconstruct(weak), strong);
    double worst = exact;
    std::mt19937_64 rng(seed);
    for (int j = 0; j < n_maps; ++j) {
        const LinearMap psi = random_square_map(f.space, rng);
        const WeakIntegral observed = weak_integral(pushforward(psi, f), m, pou, quad_order);
        const Vector expected = apply(psi, strong);
        for (int d = 0; d < f.space->dim; ++d)
            worst = std::max(worst, std::abs(observed.components[d] - expected.comps[d]));
    }
    out.residual = worst;
    out.details["reconstruction_residual"] = exact;
    out.details["maps"] = n_maps;
    out.details["integral"] = vector_json(strong);
}

void check_measure_linearity(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                             const std::string& where, std::uint64_t seed, int quad_order) {
    const Form& f = ctx.world.form(get_string(body, where, "form"), where);
    const ojson& sj = member(body, where, "scalars");
    if (!sj.is_array() || sj.size() != 2)
        fail_at(where + ".scalars", "expected a pair of scalar names");
    const ScalarOnManifold& g1 = ctx.world.scalar(sj[0].get<std::string>(), where);
    const ScalarOnManifold& g2 = ctx.world.scalar(sj[1].get<std::string>(), where);
    out.targets = {f.id, g1.id, g2.id};
    const Manifold& m = form_manifold(ctx, f, where);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double a = get_double_or(body, where, "a", u(rng));
    const double b = get_double_or(body, where, "b", u(rng));
    const VectorialMeasure mu{"mu_" + f.id, f};
    const Vector lhs = reconstruct(measure_apply(mu, scalar_combo(a, g1, b, g2), m, quad_order));
    const Vector rhs = add(scale(Cx(a, 0.0), reconstruct(measure_apply(mu, g1, m, quad_order))),
                           scale(Cx(b, 0.0), reconstruct(measure_apply(mu, g2, m, quad_order))));
    out.residual = max_abs_diff(lhs, rhs);
    out.details["a"] = a;
    out.details["b"] = b;
    out.details["combined"] = vector_json(lhs);
}

void check_partition_additivity(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                                const std::string& where, std::uint64_t seed, int quad_order) {
    (void)seed;
    const Form& f = ctx.world.form(get_string(body, where, "form"), where);
    out.targets = {f.id};
    const Manifold& m = form_manifold(ctx, f, where);
    const PartitionOfUnity pou = default_partition(f, m);
    const Vector total = integrate_with_partition(f, m, pou, quad_order);
    const VectorialMeasure mu{"mu_" + f.id, f};
    Vector sum = zero_vector(f.space);
    for (std::size_t i = 0; i < pou.terms.size(); ++i) {
        ScalarOnManifold psi;
        psi.id = "psi_" + pou.terms[i].chart;
        psi.manifold = m.id;
        // Express the weight on every chart: through the transition where an
        // overlap is declared, identically zero elsewhere (charts without a
        // declared overlap are disjoint from the weight's chart).
        for (const Chart& c : m.charts) {
            if (c.id == pou.terms[i].chart || m.overlap_declared(c.id, pou.terms[i].chart))
                psi.charts[c.id] = partition_term_on_chart(m, pou, i, c.id);
            else
                psi.charts[c.id] = Expr::constant(0.0);
        }
        sum = add(sum, reconstruct(measure_apply(mu, psi, m, quad_order)));
    }
    out.residual = max_abs_diff(sum, total);
    out.details["terms"] = pou.terms.size();
    out.details["total"] = vector_json(total);
    out.details["summed"] = vector_json(sum);
}

void check_stokes(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                  const std::string& where, int quad_order) {
    const Form& theta = ctx.world.form(get_string(body, where, "form"), where);
    out.targets = {theta.id};
    const Manifold& m = form_manifold(ctx, theta, where);
    const double boundary_sign = get_double_or(body, where, "boundary_sign", 1.0);
    const StokesResult sr = stokes_pair(theta, m, quad_order, boundary_sign);
    out.residual = sr.residual;
    if (const ojson* e = find_member(body, "expect")) {
        const Vector expect = load_vector(*e, theta.space, where + ".expect");
        out.residual = std::max(out.residual, max_abs_diff(sr.lhs, expect));
        out.residual = std::max(out.residual, max_abs_diff(sr.rhs, expect));
        out.details["expect"] = vector_json(expect);
    }
    out.details["lhs"] = vector_json(sr.lhs);
    out.details["rhs"] = vector_json(sr.rhs);
    out.details["boundary_sign"] = boundary_sign;
    out.details["quad_order"] = quad_order;
}

void check_fd_consistency(CheckOutcome& out, const RunContext& ctx, const ojson& body,
                          const std::string& where, std::uint64_t seed) {
    const Form& f = ctx.world.form(get_string(body, where, "form"), where);
    out.targets = {f.id};
    const Manifold& m = form_manifold(ctx, f, where);
    const double h = ctx.fd_step;
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    int points = 0;
    for (const auto& [chart_id, table] : f.tables) {
        const Chart& chart = m.chart(chart_id);
        std::vector<std::uniform_real_distribution<double>> dist;
        for (int i = 0; i < m.dim; ++i)
            dist.emplace_back(chart.image.lo[i], chart.image.hi[i]);
        for (const auto& [ix, coeff] : table) {
            for (const CoeffComponent& comp : coeff.comps) {
                for (const Expr* e : {&comp.re, &comp.im}) {
                    if (e->is_constant(0.0)) continue;
                    for (int s = 0; s < ctx.samples; ++s) {
                        std::vector<double> x(m.dim);
                        for (int i = 0; i < m.dim; ++i) x[i] = dist[i](rng);
                        const std::vector<double> fd = fd_gradient(*e, x, h);
                        ++points;
                        for (int i = 1; i <= m.dim; ++i) {
                            const double sym = e->diff(i).eval(x);
                            const double rel =
                                std::abs(sym - fd[i - 1]) / std::max(1.0, std::abs(sym));
                            worst = std::max(worst, rel);
                        }
                    }
                }
            }
        }
    }
    out.residual = worst;
    out.details["step"] = h;
    out.details["points"] = points;
}

CheckOutcome run_check(const RunContext& ctx, const ojson& body, std::size_t index) {
    const std::string where = "checks[" + std::to_string(index) + "]";
    CheckOutcome out;
    out.kind = get_string(body, where, "kind");
    out.tolerance = get_double_or(body, where, "tolerance", default_tolerance(out.kind));
    const std::uint64_t seed = mix_seed(ctx.seed, index);
    const int quad_order = get_int_or(body, where, "quad_order", ctx.quad_order);
    RunContext local = ctx;
    local.samples = get_int_or(body, where, "samples", ctx.samples);

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (out.kind == "dd_zero")
            check_dd_zero(out, local, body, where, seed);
        else if (out.kind == "leibniz")
            check_leibniz(out, local, body, where, seed);
        else if (out.kind == "wedge_commutativity")
            check_wedge_commutativity(out, local, body, where, seed);
        else if (out.kind == "pushforward_naturality")
            check_pushforward_naturality(out, local, body, where, seed);
        else if (out.kind == "pullback_naturality")
            check_pullback_naturality(out, local, body, where, seed);
        else if (out.kind == "wedge_pushforward")
            check_wedge_pushforward(out, local, body, where, seed);
        else if (out.kind == "tensor_overlap_compat")
            check_tensor_overlap_compat(out, local, body, where, seed);
        else if (out.kind == "partition_sum")
            check_partition_sum(out, local, body, where, seed);
        else if (out.kind == "cover_independence")
            check_cover_independence(out, local, body, where, seed, quad_order);
        else if (out.kind == "weak_integral_pushforward")
            check_weak_integral_pushforward(out, local, body, where, seed, quad_order);
        else if (out.kind == "measure_linearity")
            check_measure_linearity(out, local, body, where, seed, quad_order);
        else if (out.kind == "partition_additivity")
            check_partition_additivity(out, local, body, where, seed, quad_order);
        else if (out.kind == "stokes")
            check_stokes(out, local, body, where, quad_order);
        else if (out.kind == "fd_consistency")
            check_fd_consistency(out, local, body, where, seed);
        else
            fail_at(where, "unknown check kind '" + out.kind + "'");
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        // A check that cannot run counts as failed; the report records why.
        out.aborted = true;
        out.residual = kAbortedResidual;
        out.details["error"] = e.what();
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    if (!std::isfinite(out.residual)) {
        out.aborted = true;
        out.residual = kAbortedResidual;
        if (!out.details.contains("error")) out.details["error"] = "non-finite residual";
    }
    out.pass = !out.aborted && out.residual <= out.tolerance;
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

RunOutcome run_scenario_text(const std::string& json_text, const RunOptions& opts) {
    RunOutcome outcome;
    ojson doc;
    try {
        doc = ojson::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        outcome.exit_code = 2;
        outcome.error = std::string("schema violation: ") + e.what();
        return outcome;
    }

    std::string scenario_id;
    std::vector<CheckOutcome> results;
    int quad_order = kDefaultQuadOrder;
    double fd_step = kDefaultFdStep;
    std::uint64_t seed = kDefaultSeed;
    double tol_scale = opts.tolerance_scale;
    try {
        if (!doc.is_object()) fail_at("$", "scenario document must be an object");
        scenario_id = get_string(doc, "$", "id");
        quad_order = opts.quad_order.value_or(get_int_or(doc, "$", "quad_order", kDefaultQuadOrder));
        fd_step = opts.fd_step.value_or(get_double_or(doc, "$", "fd_step", kDefaultFdStep));
        if (opts.seed) {
            seed = *opts.seed;
        } else if (const ojson* sj = find_member(doc, "seed")) {
            if (!sj->is_number_integer() && !sj->is_number_unsigned())
                fail_at("$.seed", "expected an integer");
            seed = sj->get<std::uint64_t>();
        }
        const int samples = get_int_or(doc, "$", "samples", kDefaultSamples);
        if (quad_order < 1 || quad_order > 512) fail_at("$.quad_order", "order out of range 1..512");
        if (samples < 1) fail_at("$.samples", "samples must be positive");
        if (!(fd_step > 0.0)) fail_at("$.fd_step", "step must be positive");
        if (!(tol_scale > 0.0)) fail_at("$", "tolerance scale must be positive");

        World world;
        load_spaces(world, doc);
        load_manifolds(world, doc);
        load_maps(world, doc);
        load_smooth_maps(world, doc);
        load_scalars(world, doc);
        load_tensors(world, doc);
        load_forms(world, doc);

        const ojson& checks = member(doc, "$", "checks");
        if (!checks.is_array() || checks.empty()) fail_at("checks", "expected a non-empty array");

        const RunContext ctx{world, quad_order, fd_step, seed, samples};
        for (std::size_t i = 0; i < checks.size(); ++i) {
            CheckOutcome out = run_check(ctx, checks[i], i);
            out.tolerance *= tol_scale;
            out.pass = !out.aborted && out.residual <= out.tolerance;
            results.push_back(std::move(out));
        }
    } catch (const SchemaError& e) {
        outcome.exit_code = 2;
        outcome.error = std::string("schema violation at ") + e.what();
        return outcome;
    } catch (const std::exception& e) {
        outcome.exit_code = 3;
        outcome.error = std::string("internal error: ") + e.what();
        return outcome;
    }

    int passed = 0;
    ojson checks_json = ojson::array();
    std::ostringstream human;
    human << "scenario " << scenario_id << " (quad order " << quad_order << ", seed " << seed
          << ")\n";
    for (const CheckOutcome& c : results) {
        passed += c.pass ? 1 : 0;
        ojson cj;
        cj["kind"] = c.kind;
        cj["targets"] = c.targets;
        cj["status"] = c.pass ? "pass" : "fail";
        cj["residual"] = c.residual;
        cj["tolerance"] = c.tolerance;
        cj["details"] = c.details;
        checks_json.push_back(std::move(cj));

        std::ostringstream line;
        line << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(26) << c.kind << " [";
        for (std::size_t i = 0; i < c.targets.size(); ++i)
            line << (i ? ", " : "") << c.targets[i];
        line << "]  residual " << std::scientific << std::setprecision(3) << c.residual
             << "  tol " << c.tolerance << "  (" << std::fixed << std::setprecision(1) << c.wall_ms
             << " ms)";
        human << line.str() << "\n";
    }
    const int total = static_cast<int>(results.size());
    human << (passed == total ? "all " : "") << passed << "/" << total << " checks passed\n";

    ojson report;
    report["schema_version"] = kSchemaVersion;
    report["scenario"] = scenario_id;
    report["timestamp"] = opts.timestamp.empty() ? utc_timestamp() : opts.timestamp;
    report["environment"] = {{"version", kVersion},
                             {"seed", seed},
                             {"quad_order", quad_order},
                             {"fd_step", fd_step},
                             {"tolerance_scale", tol_scale}};
    report["checks"] = std::move(checks_json);
    report["summary"] = {{"total", total}, {"passed", passed}, {"failed", total - passed}};

    outcome.report_json = report.dump(2) + "\n";
    outcome.human_summary = human.str();
    outcome.exit_code = passed == total ? 0 : 1;
    return outcome;
}

RunOutcome run_scenario_file(const std::string& path, const RunOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        RunOutcome outcome;
        outcome.exit_code = 2;
        outcome.error = "schema violation: cannot open scenario file '" + path + "'";
        return outcome;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return run_scenario_text(buf.str(), opts);
}

}  // namespace vforms
