#ifndef HFREE_NEWTON_MODEL_HPP
#define HFREE_NEWTON_MODEL_HPP

#include "hfree/core.hpp"
#include "hfree/sampling.hpp"

#include <functional>
#include <optional>

namespace hfree {

inline constexpr double kDefaultEta = 0.95;
inline constexpr double kDefaultCondRestart = 1e8;

/// Rows z_l' and right-hand sides -f(y_l) + f(x) + (y_l - x)'z_l / 2 of the
/// linear conditions z_l' d = rhs_l on the model Newton direction d.
struct NewtonConditions {
    DenseMat z;
    Vec rhs;
};

struct NewtonModel {
    Vec d;
    DenseMat z;
    Vec rhs;
    double cond_z = 0.0;    // cond2 of the rows z_l' / delta_z
    int since_restart = 0;  // iterations since the sample set was rebuilt
    bool singular = false;  // last solve failed
};

struct Diagnostics {
    double delta_y = 0.0;
    double delta_z = 0.0;
    std::optional<double> ry_norm;
};

/// Requires every sample point to carry a function value and a z vector.
NewtonConditions build_conditions(const Vec& x, double f_x, const SampleSet& s);

/// p == n: direct solve (d_prev unused). p < n: least change from d_prev,
/// d = d_prev + Z' mu with Z Z' mu = rhs - Z d_prev. Throws SingularMatrix.
Vec solve_newton(const DenseMat& z, const Vec& rhs, const Vec& d_prev);

/// Moves a curvature vector taken at x_prev to x: z_prev + grad(x_prev) - grad(x).
Vec correct_z(const Vec& z_prev, const Vec& grad_prev, const Vec& grad_cur);

enum class SafeguardMode {
    deficit,  // only directions with cos(d, -g) < eta are modified
    always,   // every direction is moved to cos(d, -g) == eta
};

/// Returns d_n - beta g with beta chosen so that cos(d, -g) = eta. When d_n is
/// parallel to g no such beta exists; the result is then -g scaled to |d_n|
/// (cosine one). Throws ZeroGradient when g == 0.
Vec descent_safeguard(const Vec& d_n, const Vec& g, double eta = kDefaultEta,
                      SafeguardMode mode = SafeguardMode::deficit);

/// cos of the angle between d and -g.
double descent_cosine(const Vec& d, const Vec& g);

/// cond2 of Z with rows divided by delta_z = max_l |z_l|; +inf when delta_z == 0.
double scaled_condition(const DenseMat& z);

bool maybe_restart(const NewtonModel& model, double threshold = kDefaultCondRestart);

Diagnostics diagnostics(const Vec& x, const SampleSet& s);

using HvpOracle = std::function<Vec(const Vec& x, const Vec& v)>;

/// |R_y|_2 with R_y = (H L'L H)^-1 H L', L the rows (y_l - x)'/delta_y and
/// H the Hessian at x assembled column by column from n extra products.
/// Diagnostic only. Requires p >= n; throws SingularMatrix.
double ry_diagnostic(const Vec& x, const SampleSet& s, const HvpOracle& hvp);

}  // namespace hfree

#endif  // HFREE_NEWTON_MODEL_HPP
