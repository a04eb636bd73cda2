#ifndef HFREE_LINESEARCH_HPP
#define HFREE_LINESEARCH_HPP

#include <functional>
#include <vector>

namespace hfree {

enum class LineSearchStatus { success, step_too_small };

struct LineSearchResult {
    double alpha = 0.0;
    double f_new = 0.0;
    int n_feval = 0;
    LineSearchStatus status = LineSearchStatus::success;
    std::vector<double> trials;  // every evaluated step, in order
};

struct LineSearchOptions {
    double c1 = 1e-4;
    double min_step = 1e-10;
    double shrink_lo = 0.1;  // each trial lies in [shrink_lo, shrink_hi] * previous trial
    double shrink_hi = 0.5;
};

/// Backtracking from a unit step with Armijo sufficient decrease. The first
/// backtrack minimizes the quadratic through phi(0), phi'(0), phi(1); later
/// ones the cubic through phi(0), phi'(0) and the two latest trials. Throws
/// AscentDirection when dphi0 >= 0.
LineSearchResult cubic_search(const std::function<double(double)>& phi, double phi0, double dphi0,
                              const LineSearchOptions& opt = {});

}  // namespace hfree

#endif  // HFREE_LINESEARCH_HPP
