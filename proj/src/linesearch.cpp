#include "hfree/linesearch.hpp"

#include "hfree/core.hpp"

#include <algorithm>
#include <cmath>

namespace hfree {

namespace {

double quadratic_step(double phi0, double dphi0, double alpha, double phi_a) {
    const double denom = 2.0 * (phi_a - phi0 - dphi0 * alpha);
    return -dphi0 * alpha * alpha / denom;
}

// Minimizer of the cubic interpolating phi0, dphi0 at 0 and the trials (a0, f0), (a1, f1).
double cubic_step(double phi0, double dphi0, double a0, double f0, double a1, double f1) {
    const double r1 = f1 - phi0 - dphi0 * a1;
    const double r0 = f0 - phi0 - dphi0 * a0;
    const double denom = a0 * a0 * a1 * a1 * (a1 - a0);
    const double a = (a0 * a0 * r1 - a1 * a1 * r0) / denom;
    const double b = (-a0 * a0 * a0 * r1 + a1 * a1 * a1 * r0) / denom;
    if (a == 0.0) {
        return -dphi0 / (2.0 * b);
    }
    const double disc = b * b - 3.0 * a * dphi0;
    if (disc < 0.0) {
        return std::nan("");
    }
    // Equivalent to (-b + sqrt(disc)) / (3a) without cancellation when b > 0.
    const double sq = std::sqrt(disc);
    return b > 0.0 ? -dphi0 / (b + sq) : (-b + sq) / (3.0 * a);
}

}  // namespace

LineSearchResult cubic_search(const std::function<double(double)>& phi, double phi0, double dphi0,
                              const LineSearchOptions& opt) {
    if (!(dphi0 < 0.0)) {
        throw AscentDirection("cubic_search: direction is not a descent direction");
    }
    LineSearchResult res;
    auto eval = [&](double alpha) {
        ++res.n_feval;
        res.trials.push_back(alpha);
        return phi(alpha);
    };
    auto armijo = [&](double alpha, double f) { return f <= phi0 + opt.c1 * alpha * dphi0; };

    double alpha = 1.0;
    double f = eval(alpha);
    double alpha_prev = 0.0;
    double f_prev = 0.0;
    while (!armijo(alpha, f)) {
        double next = alpha_prev == 0.0 ? quadratic_step(phi0, dphi0, alpha, f)
                                        : cubic_step(phi0, dphi0, alpha_prev, f_prev, alpha, f);
        if (!std::isfinite(next) || !std::isfinite(f)) {
            next = 0.5 * alpha;
        }
        next = std::clamp(next, opt.shrink_lo * alpha, opt.shrink_hi * alpha);
        if (next < opt.min_step) {
            res.alpha = alpha;
            res.f_new = f;
            res.status = LineSearchStatus::step_too_small;
            return res;
        }
        alpha_prev = alpha;
        f_prev = f;
        alpha = next;
        f = eval(alpha);
    }
    res.alpha = alpha;
    res.f_new = f;
    res.status = LineSearchStatus::success;
    return res;
}

}  // namespace hfree
