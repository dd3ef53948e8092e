#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace vforms {

using Cx = std::complex<double>;

enum class Scalar : std::uint8_t { real, cplx };

/// Finite-dimensional coefficient space for field and form values. The dual
/// labels name the separating family of coordinate functionals; together with
/// the basis they are biorthogonal, so weak integrals reconstruct vectors
/// coordinate by coordinate.
struct ValueSpace {
    std::string id;
    Scalar scalar = Scalar::real;
    int dim = 0;
    std::vector<std::string> dual_labels;
};

using SpacePtr = std::shared_ptr<const ValueSpace>;

SpacePtr make_space(std::string id, Scalar scalar, int dim, std::vector<std::string> dual_labels = {});

/// Canonical one-dimensional space over the given scalar field ("R" / "C").
SpacePtr scalar_space(Scalar s);

/// G (x) H with lexicographic basis, left factor major; labels join pairwise.
SpacePtr tensor_product_space(const SpacePtr& g, const SpacePtr& h);

/// Structural equality; spaces constructed the same way compare equal.
bool same_space(const ValueSpace& a, const ValueSpace& b);
inline bool same_space(const SpacePtr& a, const SpacePtr& b) { return same_space(*a, *b); }

/// Element of a value space. Components are stored as complex pairs; real
/// spaces keep imaginary parts exactly zero.
struct Vector {
    SpacePtr space;
    std::vector<Cx> comps;
};

Vector make_vector(SpacePtr space, std::vector<Cx> comps);
Vector zero_vector(SpacePtr space);
Vector add(const Vector& a, const Vector& b);
Vector scale(Cx a, const Vector& v);
Vector kron(const Vector& u, const Vector& v);
double max_abs_diff(const Vector& a, const Vector& b);

/// Linear map between value spaces, dense row-major matrix.
///
/// Same-scalar maps act as v -> M v. A map from a complex source to a real
/// target is a realification projection: it acts as v -> Re(M v), which
/// covers every real-linear map into a real space.
struct LinearMap {
    SpacePtr source;
    SpacePtr target;
    std::vector<Cx> m;  // target->dim rows, source->dim columns

    bool realifying() const {
        return source->scalar == Scalar::cplx && target->scalar == Scalar::real;
    }
    Cx at(int row, int col) const { return m[static_cast<std::size_t>(row) * source->dim + col]; }
};

LinearMap make_map(SpacePtr source, SpacePtr target, std::vector<Cx> entries);
LinearMap identity_map(SpacePtr g);
Vector apply(const LinearMap& f, const Vector& v);
LinearMap compose(const LinearMap& f, const LinearMap& g);  // f after g

/// (f (x) g)(u (x) v) = f(u) (x) g(v) on the tensor product spaces.
LinearMap kronecker_map(const LinearMap& f, const LinearMap& g);

/// Basis transposition A (x) B -> B (x) A.
LinearMap swap_map(const SpacePtr& a, const SpacePtr& b);

/// Realification of a complex space: the real space of doubled dimension with
/// interleaved (Re, Im) labels plus the two component projections out of G.
struct Realification {
    SpacePtr real_space;
    LinearMap re;  // G -> R^dim, v -> Re(v)
    LinearMap im;  // G -> R^dim, v -> Im(v)
};

Realification realify(const SpacePtr& g);

/// Interleave a complex vector into realify(space).real_space and back.
Vector embed_realified(const Realification& r, const Vector& v);
Vector recombine_realified(const Realification& r, const SpacePtr& g, const Vector& w);

/// The coordinate functionals, one per dual label, with values in the scalar
/// field of g.
std::vector<LinearMap> dual_functionals(const SpacePtr& g);

}  // namespace vforms
