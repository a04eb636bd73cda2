#ifndef HFREE_CG_HPP
#define HFREE_CG_HPP

#include "hfree/core.hpp"

#include <functional>
#include <string>

namespace hfree {

enum class CgExit { converged, negative_curvature, max_iter };

struct CgResult {
    Vec d;
    int iters = 0;  // operator applications
    CgExit exit = CgExit::converged;
};

using LinearOperator = std::function<Vec(const Vec&)>;

/// Truncated CG on A d = -g from d = 0. Stops when |r| <= force |g|, after
/// max_iter products, or on nonpositive curvature (returning -g if that happens
/// on the first direction, the current iterate otherwise).
CgResult truncated_cg(const LinearOperator& apply_a, const Vec& g, double force, int max_iter);

/// min(0.5, sqrt(|g|)).
double forcing_term(double grad_norm);

/// Forcing sequence selector: "sqrt" or "const:<value>".
class ForceRule {
public:
    static ForceRule sqrt_rule() { return ForceRule(); }
    static ForceRule constant(double value);
    static ForceRule parse(const std::string& text);

    double operator()(double grad_norm) const;
    std::string str() const;

private:
    bool constant_ = false;
    double value_ = 0.0;
};

}  // namespace hfree

#endif  // HFREE_CG_HPP
