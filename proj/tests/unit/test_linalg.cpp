#include "hfree/linalg.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace hfree;
using namespace hfree::linalg;

TEST_CASE("lu_solve examples") {
    CHECK(lu_solve(DenseMat::Identity(3, 3), Vec((Vec(3) << 1, 2, 3).finished())) ==
          Vec((Vec(3) << 1, 2, 3).finished()));
    DenseMat a(2, 2);
    a << 2, 1, 1, 3;
    const Vec x = lu_solve(a, Vec((Vec(2) << 3, 4).finished()));
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));
    DenseMat s(2, 2);
    s << 1, 1, 1, 1;
    CHECK_THROWS_AS(lu_solve(s, Vec::Ones(2)), SingularMatrix);
}

TEST_CASE("lu_solve residual bound on well conditioned inputs") {
    RngStream rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 25;
        const DenseMat a = testing::gaussian(rng, n, n) + 3.0 * std::sqrt(n) * DenseMat::Identity(n, n);
        const Vec b = testing::gaussian_vec(rng, n);
        const Vec x = lu_solve(a, b);
        CHECK((a * x - b).norm() <= 1e-10 * (a.norm() * x.norm() + b.norm()));
    }
}

TEST_CASE("spd_solve examples") {
    const Vec x = spd_solve(4.0 * DenseMat::Identity(2, 2), Vec((Vec(2) << 8, 4).finished()));
    CHECK(x == Vec((Vec(2) << 2, 1).finished()));
    DenseMat a(2, 2);
    a << 2, 1, 1, 2;
    const Vec y = spd_solve(a, Vec((Vec(2) << 3, 3).finished()));
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(1.0));
    DenseMat s(2, 2);
    s << 1, 1, 1, 1;
    DenseMat l;
    CHECK_FALSE(cholesky(s, l));
    CHECK_THROWS_AS(spd_solve(s, Vec::Ones(2)), SingularMatrix);
}

TEST_CASE("spd_solve and lu_solve agree on random SPD systems") {
    RngStream rng(2);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 20;
        const DenseMat a = testing::random_spd(rng, n);
        const Vec b = testing::gaussian_vec(rng, n);
        CHECK(testing::rel_err(spd_solve(a, b), lu_solve(a, b)) <= 1e-8);
    }
}

TEST_CASE("cholesky reproduces the matrix") {
    RngStream rng(4);
    const DenseMat a = testing::random_spd(rng, 6);
    DenseMat l;
    REQUIRE(cholesky(a, l));
    CHECK((l * l.transpose() - a).norm() <= 1e-12 * a.norm());
    CHECK(l.isLowerTriangular());
}

TEST_CASE("cond2 examples") {
    CHECK(cond2(DenseMat::Identity(4, 4)) == doctest::Approx(1.0));
    DenseMat d = DenseMat::Zero(2, 2);
    d(0, 0) = 10;
    d(1, 1) = 1;
    CHECK(cond2(d) == doctest::Approx(10.0));
    d(0, 0) = 1;
    d(1, 1) = 1e-9;
    CHECK(cond2(d) >= 1e8);
    CHECK(std::isinf(cond2(DenseMat::Zero(3, 3))));
}

TEST_CASE("cond2 is invariant under orthogonal transforms") {
    RngStream rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 10;
        Eigen::HouseholderQR<DenseMat> q1(testing::gaussian(rng, n, n));
        Eigen::HouseholderQR<DenseMat> q2(testing::gaussian(rng, n, n));
        const DenseMat q = q1.householderQ();
        const DenseMat v = q2.householderQ();
        Vec diag(n);
        for (int i = 0; i < n; ++i) diag[i] = std::exp(3.0 * rng.uniform());
        const DenseMat dm = diag.asDiagonal();
        const double expect = diag.maxCoeff() / diag.minCoeff();
        CHECK(std::abs(cond2(q * dm * v.transpose()) / expect - 1.0) <= 1e-3);
        CHECK(std::abs(cond2(dm) / expect - 1.0) <= 1e-12);
    }
}
