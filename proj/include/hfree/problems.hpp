#ifndef HFREE_PROBLEMS_HPP
#define HFREE_PROBLEMS_HPP

#include "hfree/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hfree {

/// An unconstrained test problem with exact first and second order oracles.
struct ProblemDef {
    std::string name;
    int n = 0;
    Vec x0;
    std::function<double(const Vec&)> eval_f;
    std::function<Vec(const Vec&)> eval_grad;
    std::function<Vec(const Vec&, const Vec&)> eval_hvp;
    std::optional<SparsityPattern> pattern;

    /// "NAME/n", unique within the registry.
    std::string key() const { return name + "/" + std::to_string(n); }
};

struct Counters {
    std::int64_t n_f = 0;
    std::int64_t n_grad = 0;
    std::int64_t n_hvp = 0;
    std::int64_t n_iter = 0;
};

/// Counting view over a problem. Every oracle call made through it is tallied.
class Oracle {
public:
    explicit Oracle(const ProblemDef& problem) : problem_(&problem) {}

    const ProblemDef& problem() const { return *problem_; }
    int dim() const { return problem_->n; }

    double value(const Vec& x) {
        ++counters_.n_f;
        return problem_->eval_f(x);
    }
    Vec gradient(const Vec& x) {
        ++counters_.n_grad;
        return problem_->eval_grad(x);
    }
    Vec hess_vec(const Vec& x, const Vec& v) {
        ++counters_.n_hvp;
        return problem_->eval_hvp(x, v);
    }

    Counters& counters() { return counters_; }
    const Counters& counters() const { return counters_; }

private:
    const ProblemDef* problem_;
    Counters counters_;
};

/// f(x) = a + b'x + x'Cx/2 with C symmetric.
ProblemDef make_quadratic(std::string name, const SymMat& c, const Vec& b, double a, Vec x0);

/// Every built-in problem, one entry per (name, dimension).
const std::vector<ProblemDef>& registry();

/// Looks up "NAME" (first registered dimension) or "NAME/n". Throws InvalidArgument.
const ProblemDef& find_problem(const std::string& key);

/// Named suites: "appB" (very small dense), "appC" (sparse), "appD" (small).
std::vector<const ProblemDef*> problem_set(const std::string& set_name);

struct FdReport {
    double grad_rel_err = 0.0;
    double hvp_rel_err = 0.0;
    std::vector<int> grad_bad_components;
    std::vector<int> hvp_bad_components;

    bool ok() const { return grad_bad_components.empty() && hvp_bad_components.empty(); }
    std::string describe() const;
};

/// Checks eval_grad and eval_hvp against central differences at x
/// (h = 1e-6 (1 + |x|), gradient tolerance 1e-5, HVP tolerance 1e-4,
/// relative with a unit floor, 5 random directions).
FdReport fd_check(const ProblemDef& p, const Vec& x, std::uint64_t seed = 7);

}  // namespace hfree

#endif  // HFREE_PROBLEMS_HPP
