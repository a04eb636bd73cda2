#ifndef HFREE_DRIVERS_HPP
#define HFREE_DRIVERS_HPP

#include "hfree/cg.hpp"
#include "hfree/newton_model.hpp"
#include "hfree/problems.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace hfree {

enum class Method { inexact_newton, hessian_model, hessian_model_sparse, newton_model };

std::string to_string(Method m);
Method parse_method(const std::string& text);

enum class RunStatus { converged, max_iter, linesearch_failure, numeric_failure, time_limit };

std::string to_string(RunStatus s);
RunStatus parse_status(const std::string& text);

struct SolverConfig {
    Method method = Method::inexact_newton;
    double grad_tol = 1e-5;
    int max_iter = 2000;
    std::uint64_t seed = 1;
    double cond_restart = kDefaultCondRestart;
    double eta = kDefaultEta;
    double c1 = 1e-4;
    double min_step = 1e-10;
    ForceRule force_rule = ForceRule::sqrt_rule();
    SafeguardMode safeguard = SafeguardMode::deficit;
    double wall_limit_s = 60.0;
    bool trace = false;
};

struct TraceRecord {
    int iter = 0;
    double f = 0.0;
    double grad_norm = 0.0;
    double alpha = 0.0;
    int inner_iters = 0;
    std::int64_t hvps = 0;
};

struct RunRecord {
    std::string problem;
    int n = 0;
    std::string method;
    std::uint64_t seed = 0;
    Counters counters;
    RunStatus status = RunStatus::max_iter;
    double final_grad_norm = 0.0;
    double final_f = 0.0;
    double wall_ms = 0.0;
    int restarts = 0;   // newton_model sample rebuilds after iteration 0
    int fallbacks = 0;  // iterations that fell back to steepest descent
    Vec x;
    std::vector<TraceRecord> trace;
};

/// What the shared loop sees of the current iterate.
struct IterateView {
    int k;
    const Vec& x;
    const Vec& x_prev;  // equals x at k == 0
    double f;
    const Vec& g;
};

struct Direction {
    Vec d;
    int inner_iters = 0;
    bool fallback = false;
};

/// Produces one search direction per iteration. Implementations may spend
/// oracle calls (counted) to build it.
class DirectionStrategy {
public:
    virtual ~DirectionStrategy() = default;
    virtual Direction next(Oracle& oracle, const IterateView& it) = 0;
    virtual int restarts() const { return 0; }
};

std::unique_ptr<DirectionStrategy> make_inexact_newton(const SolverConfig& cfg);
std::unique_ptr<DirectionStrategy> make_hessian_model(const ProblemDef& p, const SolverConfig& cfg, bool sparse);
std::unique_ptr<DirectionStrategy> make_newton_model(const ProblemDef& p, const SolverConfig& cfg);

/// Line-search loop shared by every method: stop when |g| < grad_tol, take the
/// strategy's direction, run cubic_search from a unit step, accept.
RunRecord run_line_search(const ProblemDef& p, const SolverConfig& cfg, DirectionStrategy& strategy,
                          const std::string& method_name);

RunRecord run_inexact_newton(const ProblemDef& p, const SolverConfig& cfg);
RunRecord run_hessian_model(const ProblemDef& p, const SolverConfig& cfg, bool sparse);
RunRecord run_newton_model(const ProblemDef& p, const SolverConfig& cfg);

/// Dispatches on cfg.method.
RunRecord run(const ProblemDef& p, const SolverConfig& cfg);

/// Number of interpolation points the model-Hessian method uses:
/// n(n+1)/2 - n dense, nnz - n sparse.
int interpolation_count(const ProblemDef& p, bool sparse);

}  // namespace hfree

#endif  // HFREE_DRIVERS_HPP
