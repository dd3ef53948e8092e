#pragma once

#include "vforms/form.hpp"
#include "vforms/quadrature.hpp"

namespace vforms {

/// Integral of a top-degree form as the partition-weighted sum of chart-box
/// quadratures: sum over terms of gamma_chart * sum_i w_i psi(x_i) f(x_i).
/// Complex values split into real and imaginary integrals implicitly, since
/// the weights are real.
Vector integrate_with_partition(const Form& f, const Manifold& m, const PartitionOfUnity& pou,
                                int quad_order);

/// Per-term contributions of integrate_with_partition, in term order; the sum
/// over terms is the integral. Exposes the chart-level quadratures so
/// independent cross-checks (e.g. Monte-Carlo estimates) can target each one.
/// When the form declares a support box, each term's quadrature box is clipped
/// to a sampled chart-coordinate window of that box, which concentrates the
/// nodes where the coefficients can be nonzero.
std::vector<Vector> integrate_terms(const Form& f, const Manifold& m,
                                    const PartitionOfUnity& pou, int quad_order);

/// Builds the default partition of unity (all charts, box of the form's
/// support) and checks it covers the support before integrating.
Vector integrate(const Form& f, const Manifold& m, int quad_order);

PartitionOfUnity default_partition(const Form& f, const Manifold& m);

/// The integral observed through every coordinate functional of the value
/// space. Reconstruction assembles the member of the space with exactly those
/// coordinates, which by construction reproduces the strong integral.
struct WeakIntegral {
    SpacePtr space;
    std::vector<Cx> components;
};

WeakIntegral weak_integral(const Form& f, const Manifold& m, const PartitionOfUnity& pou,
                           int quad_order);
WeakIntegral weak_integral(const Form& f, const Manifold& m, int quad_order);
Vector reconstruct(const WeakIntegral& w);

/// Top-degree density acting on compactly supported scalars.
struct VectorialMeasure {
    std::string id;
    Form density;
};

WeakIntegral measure_apply(const VectorialMeasure& mu, const ScalarOnManifold& g, const Manifold& m,
                           int quad_order);

ScalarOnManifold scalar_combo(double a, const ScalarOnManifold& g1, double b,
                              const ScalarOnManifold& g2);

/// Both sides of the boundary identity for a compactly supported smooth
/// (N-1)-form: lhs integrates the exterior derivative over the manifold, rhs
/// integrates the pullback along the boundary inclusion over the boundary
/// (exactly zero when the boundary is empty). `boundary_sign` scales the rhs
/// and exists so a deliberately wrong sign is expressible.
struct StokesResult {
    Vector lhs, rhs;
    double residual = 0.0;
};

StokesResult stokes_pair(const Form& theta, const Manifold& m, int quad_order,
                         double boundary_sign = 1.0);

}  // namespace vforms
