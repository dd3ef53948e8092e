#include <complex>

#include "doctest.h"
#include "vforms/value_space.hpp"

using namespace vforms;

TEST_CASE("space construction and structural equality") {
    const SpacePtr r2 = make_space("R2", Scalar::real, 2);
    const SpacePtr r3 = make_space("R3", Scalar::real, 3);
    CHECK(r2->dim == 2);
    CHECK(scalar_space(Scalar::real)->dim == 1);
    CHECK(scalar_space(Scalar::cplx)->scalar == Scalar::cplx);

    const SpacePtr p = tensor_product_space(r2, r3);
    CHECK(p->dim == 6);
    CHECK(same_space(p, tensor_product_space(r2, r3)));
    CHECK(!same_space(p, r2));

    // Tensor products require one common scalar field.
    CHECK_THROWS(tensor_product_space(r2, scalar_space(Scalar::cplx)));
}

TEST_CASE("kron expands in row-major order") {
    const SpacePtr r2 = make_space("R2", Scalar::real, 2);
    const Vector u = make_vector(r2, {1.0, 2.0});
    const Vector v = make_vector(r2, {3.0, 4.0});
    const Vector k = kron(u, v);
    REQUIRE(k.comps.size() == 4);
    CHECK(k.comps[0] == Cx(3.0));
    CHECK(k.comps[1] == Cx(4.0));
    CHECK(k.comps[2] == Cx(6.0));
    CHECK(k.comps[3] == Cx(8.0));
}

TEST_CASE("linear map application") {
    const SpacePtr r2 = make_space("R2", Scalar::real, 2);
    const LinearMap exchange = make_map(r2, r2, {0.0, 1.0, 1.0, 0.0});
    const Vector v = apply(exchange, make_vector(r2, {5.0, 7.0}));
    CHECK(v.comps[0] == Cx(7.0));
    CHECK(v.comps[1] == Cx(5.0));

    CHECK_THROWS(make_map(r2, r2, {1.0}));  // wrong entry count

    const Vector w = apply(identity_map(r2), make_vector(r2, {1.5, -2.0}));
    CHECK(w.comps[0] == Cx(1.5));
    CHECK(w.comps[1] == Cx(-2.0));
}

TEST_CASE("composition applies right map first") {
    const SpacePtr r2 = make_space("R2", Scalar::real, 2);
    const LinearMap a = make_map(r2, r2, {1.0, 1.0, 0.0, 1.0});
    const LinearMap b = make_map(r2, r2, {2.0, 0.0, 0.0, 3.0});
    const Vector v = make_vector(r2, {1.0, 1.0});
    const Vector left = apply(compose(a, b), v);
    const Vector right = apply(a, apply(b, v));
    CHECK(max_abs_diff(left, right) == 0.0);
    CHECK(left.comps[0] == Cx(5.0));  // a(b(1,1)) = a(2,3) = (5,3)
    CHECK(left.comps[1] == Cx(3.0));
}

TEST_CASE("kronecker map acts factorwise on simple tensors") {
    const SpacePtr r2 = make_space("R2", Scalar::real, 2);
    const LinearMap psi = make_map(r2, r2, {1.0, 2.0, 3.0, -1.0});
    const LinearMap phi = make_map(r2, r2, {0.0, 1.0, 1.0, 1.0});
    const Vector u = make_vector(r2, {1.0, -2.0});
    const Vector v = make_vector(r2, {0.5, 4.0});
    const Vector lhs = apply(kronecker_map(psi, phi), kron(u, v));
    const Vector rhs = kron(apply(psi, u), apply(phi, v));
    CHECK(max_abs_diff(lhs, rhs) <= 1e-14);
}

TEST_CASE("swap map exchanges tensor factors") {
    const SpacePtr r2 = make_space("R2", Scalar::real, 2);
    const SpacePtr r3 = make_space("R3", Scalar::real, 3);
    const Vector u = make_vector(r2, {1.0, 2.0});
    const Vector v = make_vector(r3, {-1.0, 0.5, 3.0});
    const Vector swapped = apply(swap_map(r2, r3), kron(u, v));
    CHECK(max_abs_diff(swapped, kron(v, u)) == 0.0);
}

TEST_CASE("dual functionals are biorthogonal coordinate maps") {
    const SpacePtr c2 = make_space("C2", Scalar::cplx, 2);
    const auto duals = dual_functionals(c2);
    REQUIRE(duals.size() == 2);
    const Vector v = make_vector(c2, {Cx(1.0, 2.0), Cx(-0.5, 0.25)});
    for (std::size_t j = 0; j < duals.size(); ++j) {
        const Vector obs = apply(duals[j], v);
        REQUIRE(obs.comps.size() == 1);
        CHECK(obs.comps[0] == v.comps[j]);  // exact coordinate extraction
    }
}

TEST_CASE("realification splits and recombines complex vectors") {
    const SpacePtr c1 = scalar_space(Scalar::cplx);
    const Realification r = realify(c1);
    CHECK(r.real_space->dim == 2);
    CHECK(r.real_space->scalar == Scalar::real);

    const Vector z = make_vector(c1, {Cx(3.0, -4.0)});
    CHECK(apply(r.re, z).comps[0] == Cx(3.0));   // real-part projection
    CHECK(apply(r.im, z).comps[0] == Cx(-4.0));  // imaginary-part projection
    const Vector w = embed_realified(r, z);
    CHECK(w.comps[0] == Cx(3.0));
    CHECK(w.comps[1] == Cx(-4.0));
    CHECK(max_abs_diff(recombine_realified(r, c1, w), z) == 0.0);
}

TEST_CASE("max_abs_diff is the sup over components") {
    const SpacePtr r2 = make_space("R2", Scalar::real, 2);
    const Vector a = make_vector(r2, {1.0, 5.0});
    const Vector b = make_vector(r2, {1.25, 5.0});
    CHECK(max_abs_diff(a, b) == 0.25);
    CHECK(max_abs_diff(zero_vector(r2), zero_vector(r2)) == 0.0);
}
