#include "hfree/drivers.hpp"
#include "hfree/linesearch.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace hfree;

namespace {

SolverConfig config(Method m, std::uint64_t seed = 1) {
    SolverConfig cfg;
    cfg.method = m;
    cfg.seed = seed;
    cfg.trace = true;
    return cfg;
}

const Method kAll[] = {Method::inexact_newton, Method::hessian_model, Method::hessian_model_sparse,
                       Method::newton_model};

struct Reference {
    Vec x;
    std::int64_t iters = 0;
    std::int64_t hvp = 0;
    std::int64_t fevals = 0;
};

// Inexact Newton written out independently of the shared driver loop.
Reference reference_inexact_newton(const ProblemDef& p, int max_iter) {
    Reference ref;
    Vec x = p.x0;
    double f = p.eval_f(x);
    ref.fevals = 1;
    Vec g = p.eval_grad(x);
    while (g.norm() >= 1e-5 && ref.iters < max_iter) {
        const CgResult cg = truncated_cg(
            [&](const Vec& v) {
                ++ref.hvp;
                return p.eval_hvp(x, v);
            },
            g, forcing_term(g.norm()), p.n);
        Vec d = cg.d;
        if (!(g.dot(d) < 0.0)) d = -g;
        const Vec xk = x;
        const LineSearchResult ls = cubic_search([&](double a) { return p.eval_f(xk + a * d); }, f, g.dot(d));
        ref.fevals += ls.n_feval;
        if (ls.status != LineSearchStatus::success) break;
        x = xk + ls.alpha * d;
        f = ls.f_new;
        g = p.eval_grad(x);
        ++ref.iters;
    }
    ref.x = x;
    return ref;
}

}  // namespace

TEST_CASE("method names round trip") {
    for (Method m : kAll) CHECK(parse_method(to_string(m)) == m);
    for (RunStatus s : {RunStatus::converged, RunStatus::max_iter, RunStatus::linesearch_failure,
                        RunStatus::numeric_failure, RunStatus::time_limit}) {
        CHECK(parse_status(to_string(s)) == s);
    }
    CHECK_THROWS_AS(parse_method("bfgs"), InvalidArgument);
}

TEST_CASE("x'x/2 converges in one iteration for every method") {
    const ProblemDef p = testing::quadratic(DenseMat::Identity(6, 6), Vec::Zero(6), Vec::Ones(6));
    for (Method m : kAll) {
        const RunRecord r = run(p, config(m));
        CHECK_MESSAGE(r.status == RunStatus::converged, to_string(m));
        CHECK_MESSAGE(r.counters.n_iter == 1, to_string(m));
        CHECK(r.x.norm() <= 1e-8);
    }
    CHECK(run(p, config(Method::inexact_newton)).counters.n_hvp == 1);
    CHECK(run(p, config(Method::newton_model)).counters.n_hvp == 6);
}

TEST_CASE("stationary start costs nothing") {
    RngStream rng(1);
    const DenseMat c = testing::random_spd(rng, 4);
    const Vec b = testing::gaussian_vec(rng, 4);
    const ProblemDef p = testing::quadratic(c, b, Vec(-c.ldlt().solve(b)));
    for (Method m : kAll) {
        const RunRecord r = run(p, config(m));
        CHECK(r.status == RunStatus::converged);
        CHECK(r.counters.n_iter == 0);
        CHECK(r.counters.n_hvp == 0);
    }
}

TEST_CASE("inexact Newton on TRIDIA(10)") {
    const RunRecord r = run(find_problem("TRIDIA/10"), config(Method::inexact_newton));
    CHECK(r.status == RunStatus::converged);
    CHECK(r.final_grad_norm < 1e-5);
    CHECK(r.counters.n_grad == r.counters.n_iter + 1);
}

TEST_CASE("shared loop matches a standalone inexact Newton") {
    for (const char* name : {"TRIDIA/10", "BEALE/2", "ENGVAL2/3", "ARWHEAD/10"}) {
        const ProblemDef& p = find_problem(name);
        const Reference ref = reference_inexact_newton(p, 2000);
        const RunRecord r = run(p, config(Method::inexact_newton));
        CHECK_MESSAGE(r.counters.n_iter == ref.iters, name);
        CHECK_MESSAGE(r.counters.n_hvp == ref.hvp, name);
        CHECK_MESSAGE(r.counters.n_f == ref.fevals, name);
        CHECK_MESSAGE(r.x == ref.x, name);
    }
}

TEST_CASE("interpolation counts") {
    CHECK(interpolation_count(find_problem("BEALE/2"), false) == 1);
    CHECK(interpolation_count(find_problem("TRIDIA/10"), true) == 9);
    CHECK(interpolation_count(find_problem("TRIDIA/10"), false) == 45);
    CHECK(interpolation_count(find_problem("DQRTIC/10"), true) == 0);
}

TEST_CASE("model-Hessian accounting on BEALE(2)") {
    const RunRecord r = run(find_problem("BEALE/2"), config(Method::hessian_model));
    REQUIRE(r.status == RunStatus::converged);
    CHECK(r.counters.n_hvp == r.counters.n_iter);
    // one start value, one interpolation value per iteration, at least one trial per line search
    CHECK(r.counters.n_f - 1 - r.counters.n_iter >= r.counters.n_iter);
}

TEST_CASE("HVP accounting identities") {
    for (const ProblemDef* p : problem_set("appB")) {
        for (std::uint64_t seed : {1u, 2u}) {
            const RunRecord b = run(*p, config(Method::hessian_model, seed));
            CHECK_MESSAGE(b.counters.n_hvp == b.counters.n_iter, p->key());
            const RunRecord c = run(*p, config(Method::newton_model, seed));
            if (c.status == RunStatus::converged && c.counters.n_iter > 0) {
                CHECK_MESSAGE(c.counters.n_hvp == p->n + (c.counters.n_iter - 1) + p->n * c.restarts, p->key());
            }
        }
    }
    const RunRecord s = run(find_problem("TRIDIA/200"), config(Method::hessian_model_sparse));
    CHECK(s.status == RunStatus::converged);
    CHECK(s.counters.n_hvp == s.counters.n_iter);
}

TEST_CASE("model-Hessian reproduces Newton on a quadratic") {
    const ProblemDef& p = find_problem("TRIDIA/10");
    const RunRecord a = run(p, config(Method::inexact_newton));
    const RunRecord b = run(p, config(Method::hessian_model));
    REQUIRE(a.status == RunStatus::converged);
    REQUIRE(b.status == RunStatus::converged);
    CHECK(a.counters.n_iter == b.counters.n_iter);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
        CHECK(b.trace[k].f == doctest::Approx(a.trace[k].f).epsilon(1e-6));
        CHECK(b.trace[k].alpha == doctest::Approx(a.trace[k].alpha).epsilon(1e-6));
    }
}

TEST_CASE("newton model solves a convex quadratic in one step with n products") {
    // Spectrum in [1, 1.5]: the Newton step is within the safeguard cone.
    RngStream rng(2);
    Eigen::HouseholderQR<DenseMat> qr(testing::gaussian(rng, 5, 5));
    const DenseMat q = qr.householderQ();
    const Vec eig = (Vec(5) << 1.0, 1.1, 1.2, 1.4, 1.5).finished();
    const DenseMat c = q * eig.asDiagonal() * q.transpose();
    const Vec b = testing::gaussian_vec(rng, 5);
    const ProblemDef p = testing::quadratic(c, b, testing::gaussian_vec(rng, 5));
    const RunRecord r = run(p, config(Method::newton_model));
    CHECK(r.status == RunStatus::converged);
    CHECK(r.counters.n_iter == 1);
    CHECK(r.counters.n_hvp == 5);
    CHECK(r.trace.at(0).alpha == 1.0);
}

TEST_CASE("forced restarts charge n products each") {
    const ProblemDef& p = find_problem("ARWHEAD/10");
    SolverConfig cfg = config(Method::newton_model);
    cfg.cond_restart = 1.0;  // every sample set is "ill conditioned"
    cfg.max_iter = 6;
    const RunRecord r = run(p, cfg);
    const std::int64_t k = r.counters.n_iter;
    REQUIRE(k >= 2);
    CHECK(r.restarts == k - 1);
    CHECK(r.counters.n_hvp == 10 + (k - 1) * 11);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        CHECK(r.trace[i].hvps - r.trace[i - 1].hvps == 11);
    }
}

TEST_CASE("accepted steps decrease f and runs are deterministic") {
    for (const ProblemDef* p : problem_set("appB")) {
        for (Method m : {Method::inexact_newton, Method::hessian_model, Method::newton_model}) {
            SolverConfig cfg = config(m, 3);
            cfg.max_iter = 300;
            const RunRecord r = run(*p, cfg);
            double prev = p->eval_f(p->x0);
            for (const TraceRecord& t : r.trace) {
                CHECK_MESSAGE(t.f < prev, p->key() << " " << to_string(m));
                prev = t.f;
            }
            if (r.status == RunStatus::converged) CHECK(r.final_grad_norm < cfg.grad_tol);
            const RunRecord again = run(*p, cfg);
            CHECK(again.x == r.x);
            CHECK(again.counters.n_hvp == r.counters.n_hvp);
            CHECK(again.counters.n_f == r.counters.n_f);
        }
    }
}

TEST_CASE("non-finite objective stops the run") {
    ProblemDef p = testing::quadratic(DenseMat::Identity(2, 2), Vec::Zero(2), Vec::Ones(2));
    p.eval_f = [](const Vec&) { return std::nan(""); };
    const RunRecord r = run(p, config(Method::inexact_newton));
    CHECK(r.status == RunStatus::numeric_failure);
}

TEST_CASE("iteration cap") {
    SolverConfig cfg = config(Method::inexact_newton);
    cfg.max_iter = 3;
    const RunRecord r = run(find_problem("CUBE/2"), cfg);
    CHECK(r.status == RunStatus::max_iter);
    CHECK(r.counters.n_iter == 3);
}
