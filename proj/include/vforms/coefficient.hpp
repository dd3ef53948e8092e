#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vforms/box.hpp"
#include "vforms/expr.hpp"
#include "vforms/value_space.hpp"

namespace vforms {

/// Complex-valued expression stored as a (real, imaginary) pair; the imaginary
/// part is the constant zero for real-space coefficients.
struct CoeffComponent {
    Expr re;
    Expr im;

    static CoeffComponent real(Expr e) { return {std::move(e), Expr::constant(0.0)}; }
    bool real_only() const { return im.is_constant(0.0); }
};

CoeffComponent add(const CoeffComponent& a, const CoeffComponent& b);
CoeffComponent sub(const CoeffComponent& a, const CoeffComponent& b);
CoeffComponent mul(const CoeffComponent& a, const CoeffComponent& b);
CoeffComponent scale(Cx a, const CoeffComponent& c);
CoeffComponent mul_expr(const Expr& g, const CoeffComponent& c);
CoeffComponent diff(const CoeffComponent& c, int i);
CoeffComponent substitute(const CoeffComponent& c, std::span<const Expr> replacements);
Cx eval(const CoeffComponent& c, std::span<const double> point);

/// Smooth or integrable coefficient function of a fixed arity with values in a
/// value space. The optional support box (in the function's own coordinates)
/// marks compact support.
struct CoefficientFn {
    SpacePtr space;
    int arity = 0;
    std::vector<CoeffComponent> comps;  // one per space dimension
    std::optional<Box> support;
};

CoefficientFn make_coefficient(SpacePtr space, int arity, std::vector<CoeffComponent> comps,
                               std::optional<Box> support = std::nullopt);
CoefficientFn zero_coefficient(SpacePtr space, int arity);
std::vector<Cx> eval(const CoefficientFn& f, std::span<const double> point);
Vector eval_vector(const CoefficientFn& f, std::span<const double> point);
CoefficientFn add(const CoefficientFn& a, const CoefficientFn& b);
CoefficientFn scale(Cx a, const CoefficientFn& f);
CoefficientFn mul_expr(const Expr& g, const CoefficientFn& f);
CoefficientFn diff(const CoefficientFn& f, int i);
CoefficientFn substitute(const CoefficientFn& f, std::span<const Expr> replacements, int new_arity);
CoefficientFn kron(const CoefficientFn& f, const CoefficientFn& g);
CoefficientFn apply(const LinearMap& m, const CoefficientFn& f);
bool is_zero(const CoefficientFn& f);

}  // namespace vforms
