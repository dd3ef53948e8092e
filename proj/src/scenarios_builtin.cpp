#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vforms/scenario.hpp"

namespace vforms {
namespace {

// Bundled scenario documents. Each is a complete JSON scenario; the CLI can
// run them by name and the acceptance suite replays their integrals against
// independent estimates.

const char* kDdZeroCorpus = R"json({
  "id": "ddzero_corpus",
  "description": "d(d f) vanishes for a corpus of smooth forms over three atlases and two ambient-constructed ones, plus symbolic-vs-finite-difference derivative spot checks",
  "samples": 100,
  "manifolds": {"box2": "box2", "box3": "box3", "disk": "disk", "s2": "s2"},
  "forms": {
    "b0r":  {"manifold": "box2", "degree": 0, "space": "R",
             "charts": {"main": {"": "sin(x1) * cos(x2) + x1^2 * x2"}}},
    "b0c":  {"manifold": "box2", "degree": 0, "space": "C",
             "charts": {"main": {"": ["sin(x1 * x2)", "x1^3 + x2"]}}},
    "b1r":  {"manifold": "box2", "degree": 1, "space": "R",
             "charts": {"main": {"1": "exp(x1 - x2)", "2": "x1^2 * x2^2"}}},
    "b1r2": {"manifold": "box2", "degree": 1, "space": "R2",
             "charts": {"main": {"1": ["x1 * x2^2", "sin(x2)"], "2": ["cos(x1)", "x1 + x2^3"]}}},
    "c1r":  {"manifold": "box3", "degree": 1, "space": "R",
             "charts": {"main": {"1": "x1 * x2 * x3", "2": "sin(x1) * x3", "3": "x2^2"}}},
    "c0r2": {"manifold": "box3", "degree": 0, "space": "R2",
             "charts": {"main": {"": ["x1 * x3 + x2^2", "exp(x2) * x3"]}}},
    "d0r":  {"manifold": "disk", "degree": 0, "space": "R",
             "ambient": {"": "x1^2 + sin(x2)"}},
    "d0r2": {"manifold": "disk", "degree": 0, "space": "R2",
             "ambient": {"": ["x1 * x2", "cos(x1)"]}},
    "d1r":  {"manifold": "disk", "degree": 1, "space": "R",
             "ambient": {"1": "x1 * x2", "2": "x2^2 - x1"}},
    "d1c":  {"manifold": "disk", "degree": 1, "space": "C",
             "ambient": {"1": ["x2^2", "x1"], "2": ["sin(x1)", "x1 * x2"]}},
    "s0c":  {"manifold": "s2", "degree": 0, "space": "C",
             "ambient": {"": ["x1 * x2", "x3^2"]}},
    "s0r2": {"manifold": "s2", "degree": 0, "space": "R2",
             "ambient": {"": ["x1 + x2 * x3", "x2^2"]}},
    "s1r":  {"manifold": "s2", "degree": 1, "space": "R",
             "ambient": {"2": "x1", "3": "x1 * x2 * x3"}},
    "s1r2": {"manifold": "s2", "degree": 1, "space": "R2",
             "ambient": {"1": ["x2", "x3^2"], "2": ["x1 * x3", "x2"]}}
  },
  "checks": [
    {"kind": "dd_zero", "form": "b0r"},
    {"kind": "dd_zero", "form": "b0c"},
    {"kind": "dd_zero", "form": "b1r"},
    {"kind": "dd_zero", "form": "b1r2"},
    {"kind": "dd_zero", "form": "c1r"},
    {"kind": "dd_zero", "form": "c0r2"},
    {"kind": "dd_zero", "form": "d0r"},
    {"kind": "dd_zero", "form": "d0r2"},
    {"kind": "dd_zero", "form": "d1r"},
    {"kind": "dd_zero", "form": "d1c"},
    {"kind": "dd_zero", "form": "s0c"},
    {"kind": "dd_zero", "form": "s0r2"},
    {"kind": "dd_zero", "form": "s1r"},
    {"kind": "dd_zero", "form": "s1r2"},
    {"kind": "fd_consistency", "form": "b1r2", "samples": 40},
    {"kind": "fd_consistency", "form": "d1c", "samples": 40},
    {"kind": "fd_consistency", "form": "s1r2", "samples": 40}
  ]
})json";

const char* kLeibnizCorpus = R"json({
  "id": "leibniz_corpus",
  "description": "product rule for the exterior differential over wedge products, and graded commutativity up to the factor-swap isomorphism",
  "samples": 100,
  "manifolds": {"box2": "box2", "box3": "box3"},
  "forms": {
    "la":  {"manifold": "box2", "degree": 0, "space": "R",
            "charts": {"main": {"": "x1 + sin(x2)"}}},
    "lb":  {"manifold": "box2", "degree": 1, "space": "R2",
            "charts": {"main": {"1": ["x2", "x1^2"], "2": ["cos(x2)", "x1 * x2"]}}},
    "lc":  {"manifold": "box2", "degree": 1, "space": "C",
            "charts": {"main": {"1": ["x1", "x2"], "2": ["x1 * x2", "1"]}}},
    "le":  {"manifold": "box2", "degree": 1, "space": "C",
            "charts": {"main": {"1": ["x2", "1"], "2": ["x1", "x2^2"]}}},
    "ld":  {"manifold": "box2", "degree": 1, "space": "R",
            "charts": {"main": {"1": "x2^2", "2": "x1 * x2"}}},
    "ma":  {"manifold": "box3", "degree": 1, "space": "R",
            "charts": {"main": {"1": "x2 * x3", "2": "x1^2", "3": "sin(x2)"}}},
    "mb":  {"manifold": "box3", "degree": 1, "space": "R2",
            "charts": {"main": {"1": ["x3", "x1"], "2": ["x1 * x2", "x3^2"], "3": ["x2", "exp(x1)"]}}},
    "mc":  {"manifold": "box3", "degree": 0, "space": "R",
            "charts": {"main": {"": "x1 * x2 + x3^2"}}},
    "t2f": {"manifold": "box3", "degree": 2, "space": "R",
            "charts": {"main": {"1,2": "x3 + x1", "1,3": "x2^2", "2,3": "x1 * x3"}}}
  },
  "checks": [
    {"kind": "leibniz", "left": "la", "right": "lb"},
    {"kind": "leibniz", "left": "lb", "right": "ld"},
    {"kind": "leibniz", "left": "lc", "right": "le"},
    {"kind": "leibniz", "left": "ma", "right": "mb"},
    {"kind": "leibniz", "left": "mc", "right": "ma"},
    {"kind": "leibniz", "left": "mc", "right": "t2f"},
    {"kind": "wedge_commutativity", "left": "la", "right": "lb"},
    {"kind": "wedge_commutativity", "left": "lb", "right": "ld"},
    {"kind": "wedge_commutativity", "left": "ma", "right": "t2f"},
    {"kind": "wedge_commutativity", "left": "mb", "right": "ma"},
    {"kind": "wedge_commutativity", "left": "lc", "right": "le"}
  ]
})json";

const char* kNaturality = R"json({
  "id": "naturality",
  "description": "the exterior differential commutes with value-map pushforward and with pullback along smooth maps; pushforward distributes over wedge through the product map",
  "samples": 100,
  "manifolds": {"box2": "box2"},
  "maps": {
    "psiA": {"source": "R2", "target": "R2", "entries": [1, 2, 3, -1]},
    "psiB": {"source": "C", "target": "C", "entries": [[2, -1]]},
    "psiC": {"source": "R2", "target": "R", "entries": [1, -2]},
    "phiD": {"source": "R", "target": "R2", "entries": [1, 0.5]}
  },
  "smooth_maps": {
    "F": {"src": "box2", "dst": "box2",
          "pieces": [{"src_chart": "main", "dst_chart": "main", "exprs": ["x1^2", "x2^3"]}]}
  },
  "forms": {
    "na": {"manifold": "box2", "degree": 1, "space": "R2",
           "charts": {"main": {"1": ["x2", "x1"], "2": ["x1 * x2", "x2^2"]}}},
    "nb": {"manifold": "box2", "degree": 0, "space": "C",
           "charts": {"main": {"": ["x1 * x2", "x2"]}}},
    "nc": {"manifold": "box2", "degree": 0, "space": "R2",
           "charts": {"main": {"": ["sin(x1)", "x2^2"]}}},
    "nd": {"manifold": "box2", "degree": 1, "space": "R",
           "charts": {"main": {"1": "x2^3", "2": "x1^2"}}}
  },
  "checks": [
    {"kind": "pushforward_naturality", "map": "psiA", "form": "na"},
    {"kind": "pushforward_naturality", "map": "psiB", "form": "nb"},
    {"kind": "pushforward_naturality", "map": "psiC", "form": "nc"},
    {"kind": "pullback_naturality", "smooth_map": "F", "form": "na"},
    {"kind": "pullback_naturality", "smooth_map": "F", "form": "nb"},
    {"kind": "pullback_naturality", "smooth_map": "F", "form": "nd"},
    {"kind": "wedge_pushforward", "left": "nd", "right": "na", "map_left": "phiD", "map_right": "psiA"},
    {"kind": "wedge_pushforward", "left": "nb", "right": "nb", "map_left": "psiB", "map_right": "psiB"}
  ]
})json";

const char* kTensorSuite = R"json({
  "id": "tensor_suite",
  "description": "chart tables of tensor fields and forms obey the transformation law on declared chart overlaps",
  "samples": 200,
  "manifolds": {"box2_split": "box2_split", "annulus": "annulus", "s2": "s2"},
  "tensors": {
    "t11": {"manifold": "box2_split", "r": 1, "s": 1, "space": "R",
            "charts": {
              "left":  {"1|1": "x1 + x2", "1|2": "x1 * x2", "2|1": "1", "2|2": "x2^2"},
              "right": {"1|1": "x1 + x2", "1|2": "x1 * x2", "2|1": "1", "2|2": "x2^2"}}},
    "v10": {"manifold": "box2_split", "r": 1, "s": 0, "space": "R2",
            "charts": {
              "left":  {"1|": ["x1", "x2^2"], "2|": ["x1 * x2", "1"]},
              "right": {"1|": ["x1", "x2^2"], "2|": ["x1 * x2", "1"]}}},
    "dh01": {"manifold": "annulus", "r": 0, "s": 1, "space": "R",
             "charts": {
               "a0": {"|1": "cos(x2)", "|2": "-x1 * sin(x2)"},
               "a1": {"|1": "cos(x2)", "|2": "-x1 * sin(x2)"}}}
  },
  "forms": {
    "fann": {"manifold": "annulus", "degree": 1, "space": "R",
             "ambient": {"1": "x2", "2": "x1 * x2"}},
    "fs2":  {"manifold": "s2", "degree": 1, "space": "R2",
             "ambient": {"1": ["x2", "x3"], "2": ["x1", "0"], "3": ["x2 * x3", "x1"]}}
  },
  "checks": [
    {"kind": "tensor_overlap_compat", "tensor": "t11"},
    {"kind": "tensor_overlap_compat", "tensor": "v10"},
    {"kind": "tensor_overlap_compat", "tensor": "dh01"},
    {"kind": "tensor_overlap_compat", "form": "fann"},
    {"kind": "tensor_overlap_compat", "form": "fs2"}
  ]
})json";

const char* kCoverIndependence = R"json({
  "id": "cover_independence",
  "description": "the integral of a compactly supported top form does not depend on which admissible chart cover carries the weights",
  "quad_order": 128,
  "manifolds": {"box2_split": "box2_split"},
  "forms": {
    "f": {"manifold": "box2_split", "degree": 2, "space": "R",
          "charts": {
            "left":  {"1,2": "bump(0.07; 0.5; x1) * bump(0.4; 0.5; x2) * (1 + x1 + x2^2)"},
            "right": {"1,2": "bump(0.07; 0.5; x1) * bump(0.4; 0.5; x2) * (1 + x1 + x2^2)"}},
          "support": [[0.43, 0.1], [0.57, 0.9]]}
  },
  "checks": [
    {"kind": "cover_independence", "form": "f",
     "covers": [["left"], ["right"], ["left", "right"]]},
    {"kind": "partition_sum", "manifold": "box2_split",
     "target": [[0.1, 0.1], [0.9, 0.9]], "charts": ["left", "right"]},
    {"kind": "partition_sum", "manifold": "box2_split",
     "target": [[0.05, 0.05], [0.35, 0.95]], "charts": ["left"]}
  ]
})json";

const char* kPartitionAdditivity = R"json({
  "id": "partition_additivity",
  "description": "the vectorial measure of a top-degree density is additive over the partition weights: the weighted pieces sum to the whole integral",
  "quad_order": 96,
  "manifolds": {"disk": "disk", "annulus": "annulus"},
  "forms": {
    "fd": {"manifold": "disk", "degree": 2, "space": "R",
           "ambient": {"1,2": "1 + x1^2 + x2"},
           "support": [[-1, -1], [1, 1]]},
    "fa": {"manifold": "annulus", "degree": 2, "space": "R",
           "ambient": {"1,2": "bump(0.4; 0,1; x1,x2) * (2 + x1)"},
           "support": [[-0.4, 0.6], [0.4, 1.4]]}
  },
  "checks": [
    {"kind": "partition_sum", "manifold": "disk", "target": [[-1, -1], [1, 1]]},
    {"kind": "partition_sum", "manifold": "annulus", "target": [[-0.4, 0.6], [0.4, 1.4]]},
    {"kind": "partition_additivity", "form": "fd"},
    {"kind": "partition_additivity", "form": "fa"}
  ]
})json";

const char* kWeakReconstruction = R"json({
  "id": "weak_reconstruction",
  "description": "weak integrals observed through the dual basis reconstruct the strong integral exactly, intertwine with value-map pushforward, and act linearly on scalar densities",
  "quad_order": 64,
  "manifolds": {"box2": "box2"},
  "forms": {
    "f2": {"manifold": "box2", "degree": 2, "space": "R2",
           "charts": {"main": {"1,2": ["bump(0.45; 0.5,0.5; x1,x2) * (1 + x1)",
                                        "bump(0.45; 0.5,0.5; x1,x2) * x2"]}},
           "support": [[0.05, 0.05], [0.95, 0.95]]},
    "fc": {"manifold": "box2", "degree": 2, "space": "C2",
           "charts": {"main": {"1,2": [["bump(0.45; 0.5,0.5; x1,x2) * x1",
                                         "bump(0.45; 0.5,0.5; x1,x2) * x2"],
                                        ["bump(0.45; 0.5,0.5; x1,x2)",
                                         "bump(0.45; 0.5,0.5; x1,x2) * (x1 + x2)"]]}},
           "support": [[0.05, 0.05], [0.95, 0.95]]}
  },
  "scalars": {
    "g1": {"manifold": "box2", "charts": {"main": "bump(0.45; 0.5,0.5; x1,x2)"},
           "support": [[0.05, 0.05], [0.95, 0.95]]},
    "g2": {"manifold": "box2", "charts": {"main": "bump(0.4; 0.5,0.5; x1,x2) * (1 + x1^2)"},
           "support": [[0.1, 0.1], [0.9, 0.9]]}
  },
  "checks": [
    {"kind": "weak_integral_pushforward", "form": "f2", "random_maps": 5},
    {"kind": "weak_integral_pushforward", "form": "fc", "random_maps": 5},
    {"kind": "measure_linearity", "form": "f2", "scalars": ["g1", "g2"]}
  ]
})json";

const char* kDiskStokes = R"json({
  "id": "disk_stokes",
  "description": "boundary identity on the unit disk for the area form generator truncated by a plateau that is identically one on the closed disk; both sides equal pi",
  "quad_order": 32,
  "seed": 20260823,
  "manifolds": {"disk": "disk"},
  "forms": {
    "theta": {"manifold": "disk", "degree": 1, "space": "R",
              "ambient": {"2": "x1 * (bump(2; 0,0; x1,x2) / (bump(2; 0,0; x1,x2) + bump(1; 2.2,0; x1,x2) + bump(1; -2.2,0; x1,x2) + bump(1; 0,2.2; x1,x2) + bump(1; 0,-2.2; x1,x2)))"},
              "support": [[-1, -1], [1, 1]]},
    "theta_vec": {"manifold": "disk", "degree": 1, "space": "R2",
                  "ambient": {
                    "1": [0, "-x2 * (bump(2; 0,0; x1,x2) / (bump(2; 0,0; x1,x2) + bump(1; 2.2,0; x1,x2) + bump(1; -2.2,0; x1,x2) + bump(1; 0,2.2; x1,x2) + bump(1; 0,-2.2; x1,x2)))"],
                    "2": ["x1 * (bump(2; 0,0; x1,x2) / (bump(2; 0,0; x1,x2) + bump(1; 2.2,0; x1,x2) + bump(1; -2.2,0; x1,x2) + bump(1; 0,2.2; x1,x2) + bump(1; 0,-2.2; x1,x2)))", 0]},
                  "support": [[-1, -1], [1, 1]]}
  },
  "checks": [
    {"kind": "stokes", "form": "theta", "expect": [3.141592653589793], "tolerance": 1e-6},
    {"kind": "stokes", "form": "theta_vec",
     "expect": [3.141592653589793, 3.141592653589793], "tolerance": 1e-6}
  ]
})json";

const char* kHalfplaneStokes = R"json({
  "id": "halfplane_stokes",
  "description": "boundary identity on the upper half-plane chart for a boundary-crossing bump density",
  "quad_order": 64,
  "manifolds": {"halfplane": "halfplane"},
  "forms": {
    "theta": {"manifold": "halfplane", "degree": 1, "space": "R",
              "ambient": {"1": "bump(1.5; 0,0; x1,x2)"},
              "support": [[-1.5, -1.5], [1.5, 1.5]]}
  },
  "checks": [
    {"kind": "stokes", "form": "theta", "tolerance": 1e-6}
  ]
})json";

const char* kStokesClosed = R"json({
  "id": "stokes_closed",
  "description": "integrals of exact top forms vanish on boundaryless manifolds (circle and sphere)",
  "quad_order": 96,
  "manifolds": {"s1": "s1", "s2": "s2"},
  "forms": {
    "g0": {"manifold": "s1", "degree": 0, "space": "R",
           "ambient": {"": "x1 * x2 + x2^2"},
           "support": [[-2, -2], [2, 2]]},
    "w1": {"manifold": "s2", "degree": 1, "space": "R",
           "ambient": {"2": "x1", "3": "x2 * x3"},
           "support": [[-2, -2, -2], [2, 2, 2]]}
  },
  "checks": [
    {"kind": "stokes", "form": "g0", "expect": [0], "tolerance": 1e-8},
    {"kind": "stokes", "form": "w1", "expect": [0], "tolerance": 1e-8}
  ]
})json";

const char* kInjectFlippedOrientation = R"json({
  "id": "inject_flipped_orientation",
  "description": "failure injection: one collar chart carries the wrong orientation sign, so the boundary identity on the disk must miss pi by a wide margin",
  "quad_order": 32,
  "manifolds": {"disk_flipped": "disk_flipped"},
  "forms": {
    "theta": {"manifold": "disk_flipped", "degree": 1, "space": "R",
              "ambient": {"2": "x1 * (bump(2; 0,0; x1,x2) / (bump(2; 0,0; x1,x2) + bump(1; 2.2,0; x1,x2) + bump(1; -2.2,0; x1,x2) + bump(1; 0,2.2; x1,x2) + bump(1; 0,-2.2; x1,x2)))"},
              "support": [[-1, -1], [1, 1]]}
  },
  "checks": [
    {"kind": "stokes", "form": "theta", "expect": [3.141592653589793], "tolerance": 1e-6}
  ]
})json";

const char* kInjectUncoveredSupport = R"json({
  "id": "inject_uncovered_support",
  "description": "failure injection: a single-chart cover leaves part of the requested support box uncovered, so the weight-sum check must fail",
  "manifolds": {"box2_split": "box2_split"},
  "checks": [
    {"kind": "partition_sum", "manifold": "box2_split", "charts": ["left"],
     "target": [[0.05, 0.05], [0.95, 0.95]]}
  ]
})json";

const char* kInjectBoundarySign = R"json({
  "id": "inject_boundary_sign",
  "description": "failure injection: the boundary term enters with the wrong sign, so the half-plane boundary identity must miss by twice the boundary integral",
  "quad_order": 64,
  "manifolds": {"halfplane": "halfplane"},
  "forms": {
    "theta": {"manifold": "halfplane", "degree": 1, "space": "R",
              "ambient": {"1": "bump(1.5; 0,0; x1,x2)"},
              "support": [[-1.5, -1.5], [1.5, 1.5]]}
  },
  "checks": [
    {"kind": "stokes", "form": "theta", "boundary_sign": -1, "tolerance": 1e-6}
  ]
})json";

const std::vector<std::pair<std::string, const char*>>& registry() {
    static const std::vector<std::pair<std::string, const char*>> entries = {
        {"ddzero_corpus", kDdZeroCorpus},
        {"leibniz_corpus", kLeibnizCorpus},
        {"naturality", kNaturality},
        {"tensor_suite", kTensorSuite},
        {"cover_independence", kCoverIndependence},
        {"partition_additivity", kPartitionAdditivity},
        {"weak_reconstruction", kWeakReconstruction},
        {"disk_stokes", kDiskStokes},
        {"halfplane_stokes", kHalfplaneStokes},
        {"stokes_closed", kStokesClosed},
        {"inject_flipped_orientation", kInjectFlippedOrientation},
        {"inject_uncovered_support", kInjectUncoveredSupport},
        {"inject_boundary_sign", kInjectBoundarySign},
    };
    return entries;
}

}  // namespace

std::vector<std::string> bundled_scenario_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : registry()) names.push_back(name);
    return names;
}

const std::string& bundled_scenario_text(const std::string& name) {
    static std::map<std::string, std::string> cache = [] {
        std::map<std::string, std::string> m;
        for (const auto& [n, text] : registry()) m.emplace(n, text);
        return m;
    }();
    const auto it = cache.find(name);
    if (it == cache.end()) throw std::invalid_argument("no bundled scenario named '" + name + "'");
    return it->second;
}

}  // namespace vforms
