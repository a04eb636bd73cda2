#include "hfree/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace hfree {

namespace {
constexpr double kMinAngle = 1e-6;
constexpr int kMaxRedraws = 100;
}  // namespace

double radius(const Vec& x_cur, const Vec& x_prev) {
    return std::min(kRadiusMax, std::max(kRadiusMin, (x_cur - x_prev).norm()));
}

bool SampleSet::has_zvecs() const {
    return !points.empty() &&
           std::all_of(points.begin(), points.end(), [](const SamplePoint& p) { return p.z.has_value(); });
}

double SampleSet::delta_y() const {
    double d = 0.0;
    for (const SamplePoint& p : points) {
        d = std::max(d, (p.y - center).norm());
    }
    return d;
}

double line_angle(const Vec& a, const Vec& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    // sin of the angle via the component of a orthogonal to b; stable near zero.
    const Vec bu = b / nb;
    const Vec perp = a - a.dot(bu) * bu;
    return std::asin(std::min(1.0, perp.norm() / na));
}

FixedDirections fixed_directions(const BallDraw& draw, int n, int p) {
    if (n < 1 || p < 0) {
        throw InvalidArgument("fixed_directions: need n >= 1 and p >= 0");
    }
    FixedDirections out;
    out.y_dirs.reserve(static_cast<std::size_t>(p));
    for (int l = 0; l < p; ++l) {
        out.y_dirs.push_back(draw(n));
    }
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        Vec v = draw(n);
        const bool ok = v.norm() > 0.0 &&
                        std::none_of(out.y_dirs.begin(), out.y_dirs.end(),
                                     [&](const Vec& y) { return line_angle(v, y) < kMinAngle; });
        if (ok) {
            out.v_dir = std::move(v);
            return out;
        }
    }
    throw DegenerateGeometry("fixed_directions: could not draw v independent of the y directions");
}

FixedDirections fixed_directions(RngStream& rng, int n, int p) {
    return fixed_directions([&rng](int dim) { return unit_ball_sample(rng, dim); }, n, p);
}

int farthest_index(const SampleSet& s, const Vec& x) {
    if (s.points.empty()) {
        throw InvalidArgument("farthest_index: empty sample set");
    }
    int best = 0;
    double best_d = -1.0;
    for (int l = 0; l < s.size(); ++l) {
        const double d = (s.points[static_cast<std::size_t>(l)].y - x).norm();
        if (d > best_d) {
            best_d = d;
            best = l;
        }
    }
    return best;
}

SampleSet replace_farthest(SampleSet s, const Vec& x_new, double r, RngStream& rng) {
    const int drop = farthest_index(s, x_new);
    s.points.erase(s.points.begin() + drop);
    for (SamplePoint& p : s.points) {
        ++p.age;
    }
    s.points.push_back(SamplePoint{x_new + r * unit_ball_sample(rng, static_cast<int>(x_new.size())),
                                   std::nullopt, std::nullopt, 0});
    s.center = x_new;
    return s;
}

SampleSet sample_ball(const Vec& x, double r, int p, RngStream& rng) {
    SampleSet s;
    s.center = x;
    s.points.reserve(static_cast<std::size_t>(p));
    for (int l = 0; l < p; ++l) {
        s.points.push_back(
            SamplePoint{x + r * unit_ball_sample(rng, static_cast<int>(x.size())), std::nullopt, std::nullopt, 0});
    }
    return s;
}

}  // namespace hfree
