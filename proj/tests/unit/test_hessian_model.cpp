#include "hfree/hessian_model.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace hfree;

namespace {

struct QuadData {
    DenseMat c;
    Vec b;
    double f(const Vec& y) const { return 0.5 * y.dot(c * y) + b.dot(y); }
    Vec grad(const Vec& y) const { return c * y + b; }
};

SampleSet samples(const QuadData& q, const Vec& x, const std::vector<Vec>& ys) {
    SampleSet s;
    s.center = x;
    for (const Vec& y : ys) s.points.push_back({y, q.f(y), std::nullopt, 0});
    return s;
}

SampleSet random_samples(const QuadData& q, const Vec& x, int p, double r, RngStream& rng) {
    std::vector<Vec> ys;
    for (int l = 0; l < p; ++l) ys.push_back(x + r * unit_ball_sample(rng, static_cast<int>(x.size())));
    return samples(q, x, ys);
}

QuadData example() {
    QuadData q;
    q.c = DenseMat(2, 2);
    q.c << 2, 1, 1, 3;
    q.b = Vec::Zero(2);
    return q;
}

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

double frob(const DenseMat& a) { return a.norm(); }

}  // namespace

TEST_CASE("assembly of the two-dimensional example") {
    const QuadData q = example();
    const Vec x = Vec::Zero(2);
    const Vec v = v2(0, 1);
    const EnrichedSystem sys = assemble(x, q.grad(x), q.f(x), samples(q, x, {v2(1, 0)}), v, q.c * v);
    REQUIRE(sys.m.rows() == 3);
    REQUIRE(sys.m.cols() == 3);
    CHECK(sys.p == 1);
    CHECK(sys.delta[0] == 1.0);
    CHECK(sys.m.row(0) == Eigen::RowVector3d(0.5, 0, 0));
    // h12 = w1 = 1 and h22 = w2 = 3.
    CHECK(sys.m.row(1) == Eigen::RowVector3d(0, 0, 1));
    CHECK(sys.m.row(2) == Eigen::RowVector3d(0, 1, 0));
    CHECK(sys.delta[1] == 1.0);
    CHECK(sys.delta[2] == 3.0);

    const HessianModel model = solve_determined(sys);
    CHECK(model.h == q.c);
    CHECK(model.mode == RecoveryMode::determined);
}

TEST_CASE("sparse diagonal pattern drops the off-diagonal column") {
    const QuadData q = example();
    const Vec x = Vec::Zero(2);
    const EnrichedSystem sys = assemble(x, q.grad(x), q.f(x), SampleSet{x, {}}, v2(1, 1), q.c * v2(1, 1),
                                        SparsityPattern::diagonal(2));
    CHECK(sys.m.cols() == 2);
    CHECK(sys.layout.is_sparse());
}

TEST_CASE("assembly rejects pending values and parallel v") {
    const QuadData q = example();
    const Vec x = Vec::Zero(2);
    SampleSet s = samples(q, x, {v2(1, 0)});
    CHECK_THROWS_AS(assemble(x, q.grad(x), 0.0, s, v2(-2, 0), q.c * v2(-2, 0)), DegenerateGeometry);
    s.points[0].fval.reset();
    CHECK_THROWS_AS(assemble(x, q.grad(x), 0.0, s, v2(0, 1), q.c * v2(0, 1)), InvalidArgument);
}

TEST_CASE("v along a displacement makes the system rank deficient") {
    // Bypass the geometry check: product rows for v = y1 - x taken from a second assembly.
    const QuadData q = example();
    const Vec x = Vec::Zero(2);
    EnrichedSystem sys = assemble(x, q.grad(x), 0.0, samples(q, x, {v2(1, 0)}), v2(0, 1), q.c * v2(0, 1));
    const EnrichedSystem other =
        assemble(x, q.grad(x), 0.0, samples(q, x, {v2(0, 1)}), v2(1, 0), q.c * v2(1, 0));
    sys.m.bottomRows(2) = other.m.bottomRows(2);
    sys.delta.tail(2) = other.delta.tail(2);
    Eigen::JacobiSVD<DenseMat> svd(sys.m);
    CHECK(svd.singularValues()[2] <= 1e-12 * svd.singularValues()[0]);
    CHECK_THROWS_AS(solve_determined(sys), SingularMatrix);
}

TEST_CASE("determined recovery is exact on random quadratics") {
    RngStream rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 5;
        QuadData q{testing::random_symmetric(rng, n), testing::gaussian_vec(rng, n)};
        const Vec x = testing::gaussian_vec(rng, n);
        const SampleSet s = random_samples(q, x, alpha_size(n) - n, 1.0, rng);
        const Vec v = unit_ball_sample(rng, n);
        const HessianModel model = solve_determined(assemble(x, q.grad(x), q.f(x), s, v, q.c * v));
        CHECK((model.h - q.c).norm() <= 1e-8 * q.c.norm());
    }
}

TEST_CASE("sparse determined recovery is exact on a banded quadratic") {
    RngStream rng(32);
    const int n = 8;
    std::vector<std::pair<int, int>> pairs;
    DenseMat c = DenseMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        pairs.emplace_back(i, i);
        c(i, i) = 4.0 + rng.uniform();
        if (i + 1 < n) {
            pairs.emplace_back(i, i + 1);
            c(i, i + 1) = c(i + 1, i) = rng.normal();
        }
    }
    const SparsityPattern pattern(n, pairs);
    QuadData q{c, testing::gaussian_vec(rng, n)};
    const Vec x = testing::gaussian_vec(rng, n);
    const SampleSet s = random_samples(q, x, static_cast<int>(pattern.nnz()) - n, 1e-2, rng);
    const Vec v = 1e-2 * unit_ball_sample(rng, n);
    const EnrichedSystem sys = assemble(x, q.grad(x), q.f(x), s, v, c * v, pattern);
    CHECK(sys.m.rows() == sys.m.cols());
    const HessianModel model = solve_determined(sys);
    CHECK(model.mode == RecoveryMode::sparse_determined);
    CHECK((model.h - c).norm() <= 1e-8 * c.norm());
}

TEST_CASE("least change with one row") {
    EnrichedSystem sys;
    sys.layout = AlphaLayout::dense(2);
    sys.m = DenseMat::Zero(1, 3);
    sys.m(0, 0) = 1.0;
    sys.delta = Vec::Constant(1, 5.0);
    const HessianModel model = solve_least_change(sys, Vec::Zero(3));
    CHECK(model.alpha == (Vec(3) << 5, 0, 0).finished());
    CHECK(model.mode == RecoveryMode::least_change);

    const Vec feasible = (Vec(3) << 5, -2, 7).finished();
    CHECK(solve_least_change(sys, feasible).alpha == feasible);
}

TEST_CASE("least change matches the pseudo-inverse oracle") {
    RngStream rng(33);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3;
        const int p = 1 + trial % 3;  // up to 3 rows + n = 6 unknowns
        QuadData q{testing::random_symmetric(rng, n), testing::gaussian_vec(rng, n)};
        const Vec x = testing::gaussian_vec(rng, n);
        const Vec v = unit_ball_sample(rng, n);
        const EnrichedSystem sys = assemble(x, q.grad(x), q.f(x), random_samples(q, x, p, 1.0, rng), v, q.c * v);
        const Vec prev = testing::gaussian_vec(rng, sys.m.cols());
        const Vec oracle = prev + testing::pinv(sys.m) * (sys.delta - sys.m * prev);
        const HessianModel model = solve_least_change(sys, prev);
        CHECK(testing::rel_err(model.alpha, oracle) <= 1e-8);
        CHECK((sys.m * model.alpha - sys.delta).norm() <= 1e-8 * std::max(1.0, sys.delta.norm()));
    }
}

TEST_CASE("least change never moves away from the true Hessian") {
    RngStream rng(34);
    int strict = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 6;
        const int p = static_cast<int>(rng.uniform() * (alpha_size(n) - n));
        QuadData q{testing::random_symmetric(rng, n), testing::gaussian_vec(rng, n)};
        const Vec x = testing::gaussian_vec(rng, n);
        const Vec v = unit_ball_sample(rng, n);
        const EnrichedSystem sys = assemble(x, q.grad(x), q.f(x), random_samples(q, x, p, 1.0, rng), v, q.c * v);
        const SymMat hprev = testing::random_symmetric(rng, n);
        const Vec aprev = sys.layout.from_sym(hprev);
        const Vec atrue = sys.layout.from_sym(q.c);
        const bool infeasible = (sys.m * aprev - sys.delta).norm() > 1e-8 * sys.delta.norm();

        // Coefficient-space projection: exact contraction in the coefficient norm.
        const HessianModel a = solve_least_change(sys, aprev, ChangeNorm::alpha);
        CHECK((a.alpha - atrue).norm() <= (aprev - atrue).norm() + 1e-10);
        // Weighted variant: contraction in the Frobenius norm.
        const HessianModel f = solve_least_change(sys, aprev, ChangeNorm::frobenius);
        const double after = frob(f.h - q.c);
        const double before = frob(hprev - q.c);
        CHECK(after <= before + 1e-10);
        if (infeasible) {
            CHECK(after < before);
            ++strict;
        }
        CHECK((sys.m * f.alpha - sys.delta).norm() <= 1e-8 * std::max(1.0, sys.delta.norm()));
    }
    CHECK(strict == 100);
}

TEST_CASE("recovered model interpolates the sample values") {
    const ProblemDef& p = find_problem("COSINE/10");
    RngStream rng(35);
    const Vec x = p.x0;
    const double fx = p.eval_f(x);
    const Vec g = p.eval_grad(x);
    SampleSet s;
    s.center = x;
    for (int l = 0; l < alpha_size(10) - 10; ++l) {
        const Vec y = x + 1e-2 * unit_ball_sample(rng, 10);
        s.points.push_back({y, p.eval_f(y), std::nullopt, 0});
    }
    const Vec v = 1e-2 * unit_ball_sample(rng, 10);
    const EnrichedSystem sys = assemble(x, g, fx, s, v, p.eval_hvp(x, v));
    for (const HessianModel& model : {solve_determined(sys), solve_least_change(sys, Vec::Zero(sys.m.cols()))}) {
        for (const auto& pt : s.points) {
            const Vec st = pt.y - x;
            const double m = fx + g.dot(st) + 0.5 * st.dot(model.h * st);
            CHECK(std::abs(m - *pt.fval) <= 1e-8 * (1.0 + std::abs(*pt.fval)));
        }
        CHECK((model.h * v - p.eval_hvp(x, v)).norm() <= 1e-8 * std::max(1.0, p.eval_hvp(x, v).norm()));
    }
}
