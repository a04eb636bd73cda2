#include "hfree/cg.hpp"
#include "hfree/linalg.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace hfree;

namespace {

LinearOperator op(const DenseMat& a) {
    return [a](const Vec& v) -> Vec { return a * v; };
}

}  // namespace

TEST_CASE("cg examples") {
    const Vec g = (Vec(2) << 3, 4).finished();
    const CgResult id = truncated_cg(op(DenseMat::Identity(2, 2)), g, 0.5, 2);
    CHECK(id.d == -g);
    CHECK(id.iters == 1);
    CHECK(id.exit == CgExit::converged);

    const CgResult neg = truncated_cg(op(-DenseMat::Identity(2, 2)), g, 0.5, 2);
    CHECK(neg.d == -g);
    CHECK(neg.iters == 1);
    CHECK(neg.exit == CgExit::negative_curvature);

    DenseMat a = DenseMat::Zero(2, 2);
    a(0, 0) = 1;
    a(1, 1) = 10;
    const Vec ones = Vec::Ones(2);
    const CgResult diag = truncated_cg(op(a), ones, 1e-10, 2);
    CHECK(diag.iters <= 2);
    CHECK((diag.d - Vec((Vec(2) << -1.0, -0.1).finished())).norm() <= 1e-8);

    CHECK_THROWS_AS(truncated_cg(op(a), Vec::Zero(2), 0.5, 2), ZeroGradient);
}

TEST_CASE("forcing term") {
    CHECK(forcing_term(1.0) == 0.5);
    CHECK(forcing_term(1e-4) == doctest::Approx(1e-2));
    CHECK(forcing_term(0.09) == doctest::Approx(0.3));
    CHECK(ForceRule::parse("sqrt")(0.09) == doctest::Approx(0.3));
    CHECK(ForceRule::parse("const:0.1")(0.09) == 0.1);
    CHECK(ForceRule::parse("const:0.1").str() == "const:0.1");
    CHECK_THROWS_AS(ForceRule::parse("cubic"), InvalidArgument);
    CHECK_THROWS_AS(ForceRule::parse("const:2"), InvalidArgument);
}

TEST_CASE("cg matches direct solves on SPD systems") {
    RngStream rng(1);
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + trial % 30;
        const DenseMat a = testing::random_spd(rng, n);
        const Vec g = testing::gaussian_vec(rng, n);
        // Rounding delays finite termination a little past n steps.
        const CgResult res = truncated_cg(op(a), g, 1e-12, 5 * n);
        REQUIRE(res.exit == CgExit::converged);
        REQUIRE(g.dot(res.d) < 0.0);
        const Vec direct = -linalg::lu_solve(a, g);
        REQUIRE(testing::rel_err(res.d, direct) <= 1e-6);
    }
}

TEST_CASE("cg within n steps on well conditioned SPD systems") {
    RngStream rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 1 + trial % 30;
        Eigen::HouseholderQR<DenseMat> qr(testing::gaussian(rng, n, n));
        const DenseMat q = qr.householderQ();
        Vec eig(n);
        for (int i = 0; i < n; ++i) eig[i] = 1.0 + 9.0 * rng.uniform();
        const DenseMat a = q * eig.asDiagonal() * q.transpose();
        const Vec g = testing::gaussian_vec(rng, n);
        const CgResult res = truncated_cg(op(a), g, 1e-12, n);
        REQUIRE(res.iters <= n);
        REQUIRE(testing::rel_err(res.d, -linalg::lu_solve(a, g)) <= 1e-6);
    }
}

TEST_CASE("cg exits on indefinite systems still descend") {
    RngStream rng(2);
    int neg_exits = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + trial % 30;
        const DenseMat a = testing::random_symmetric(rng, n);
        const Vec g = testing::gaussian_vec(rng, n);
        const double force = trial % 2 ? 1e-12 : forcing_term(g.norm());
        const CgResult res = truncated_cg(op(a), g, force, n);
        REQUIRE(res.iters <= n);
        REQUIRE(res.d.allFinite());
        REQUIRE(g.dot(res.d) < 0.0);
        if (res.exit == CgExit::negative_curvature) ++neg_exits;
    }
    CHECK(neg_exits > 1000);
}
