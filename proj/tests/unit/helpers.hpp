#ifndef HFREE_TEST_HELPERS_HPP
#define HFREE_TEST_HELPERS_HPP

#include "hfree/core.hpp"
#include "hfree/problems.hpp"

#include <Eigen/SVD>

namespace testing {

using hfree::DenseMat;
using hfree::RngStream;
using hfree::Vec;

inline DenseMat gaussian(RngStream& rng, int rows, int cols) {
    DenseMat a(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) a(i, j) = rng.normal();
    }
    return a;
}

inline Vec gaussian_vec(RngStream& rng, int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

// G G' + I, comfortably positive definite.
inline DenseMat random_spd(RngStream& rng, int n) {
    const DenseMat g = gaussian(rng, n, n);
    return g * g.transpose() + DenseMat::Identity(n, n);
}

inline DenseMat random_symmetric(RngStream& rng, int n) {
    const DenseMat g = gaussian(rng, n, n);
    return 0.5 * (g + g.transpose());
}

// Moore-Penrose pseudo-inverse through a full SVD, independent of the
// factorizations under test.
inline DenseMat pinv(const DenseMat& a) {
    Eigen::JacobiSVD<DenseMat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    const double tol = 1e-12 * (s.size() ? s[0] : 0.0);
    DenseMat sinv = DenseMat::Zero(a.cols(), a.rows());
    for (int i = 0; i < s.size(); ++i) {
        if (s[i] > tol) sinv(i, i) = 1.0 / s[i];
    }
    return svd.matrixV() * sinv * svd.matrixU().transpose();
}

inline double rel_err(const Vec& a, const Vec& b) {
    return (a - b).norm() / std::max(1e-300, b.norm());
}

// f(x) = x'Cx/2 + b'x.
inline hfree::ProblemDef quadratic(const DenseMat& c, const Vec& b, Vec x0) {
    return hfree::make_quadratic("QUAD", c, b, 0.0, std::move(x0));
}

}  // namespace testing

#endif
