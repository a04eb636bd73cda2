#ifndef HFREE_SAMPLING_HPP
#define HFREE_SAMPLING_HPP

#include "hfree/core.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace hfree {

inline constexpr double kRadiusMin = 1e-4;
inline constexpr double kRadiusMax = 1e-2;

/// Sampling radius min(1e-2, max(1e-4, |x_cur - x_prev|)).
double radius(const Vec& x_cur, const Vec& x_prev);

/// One interpolation point with its stored function value and, for direction
/// recovery, the curvature vector z = Hessian * (y - x).
struct SamplePoint {
    Vec y;
    std::optional<double> fval;  // empty while the evaluation is pending
    std::optional<Vec> z;
    int age = 0;
};

struct SampleSet {
    Vec center;
    std::vector<SamplePoint> points;

    int size() const { return static_cast<int>(points.size()); }
    bool has_zvecs() const;
    /// max_l |y_l - center|
    double delta_y() const;
};

struct FixedDirections {
    std::vector<Vec> y_dirs;
    Vec v_dir;
};

/// Source of unit-ball draws; the RngStream overload wraps unit_ball_sample.
using BallDraw = std::function<Vec(int n)>;

/// Smallest angle (radians) between the lines spanned by a and b.
double line_angle(const Vec& a, const Vec& b);

/// p directions and one Hessian-multiplication direction in the unit ball.
/// v is redrawn while it lies within 1e-6 rad of any y direction; after 100
/// rejected draws DegenerateGeometry is thrown.
FixedDirections fixed_directions(const BallDraw& draw, int n, int p);
FixedDirections fixed_directions(RngStream& rng, int n, int p);

/// Index of the point farthest from x (lowest index on ties).
int farthest_index(const SampleSet& s, const Vec& x);

/// Drops the point farthest from x_new and appends a fresh point drawn in
/// B(x_new, r) with a pending function value. The center moves to x_new.
SampleSet replace_farthest(SampleSet s, const Vec& x_new, double r, RngStream& rng);

/// p fresh points in B(x, r), all pending.
SampleSet sample_ball(const Vec& x, double r, int p, RngStream& rng);

}  // namespace hfree

#endif  // HFREE_SAMPLING_HPP
