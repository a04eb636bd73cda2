#ifndef HFREE_LINALG_HPP
#define HFREE_LINALG_HPP

#include "hfree/core.hpp"

namespace hfree::linalg {

/// Relative pivot threshold: a pivot below kSingularTol * max|A| is treated as zero.
inline constexpr double kSingularTol = 1e-14;

/// Solves A x = b by LU with partial pivoting. Throws SingularMatrix.
Vec lu_solve(const DenseMat& a, const Vec& b);

/// Lower Cholesky factor of a symmetric matrix; returns false if a pivot is not positive.
bool cholesky(const DenseMat& a, DenseMat& lower);

/// Solves a symmetric system by Cholesky, falling back to LU when the matrix
/// is not numerically positive definite. Throws SingularMatrix.
Vec spd_solve(const DenseMat& a, const Vec& b);

/// 2-norm condition number sigma_max / sigma_min; +inf when sigma_min == 0.
double cond2(const DenseMat& a);

}  // namespace hfree::linalg

#endif  // HFREE_LINALG_HPP
