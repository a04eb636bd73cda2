#include "hfree/linalg.hpp"

#include <cmath>
#include <limits>

namespace hfree::linalg {

Vec lu_solve(const DenseMat& a, const Vec& b) {
    const Eigen::Index k = a.rows();
    if (a.cols() != k || b.size() != k) {
        throw InvalidArgument("lu_solve: dimension mismatch");
    }
    if (k == 0) {
        return Vec();
    }
    const double scale = a.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw SingularMatrix("lu_solve: zero or non-finite matrix");
    }
    const double tiny = kSingularTol * scale;

    DenseMat lu = a;
    Vec x = b;
    for (Eigen::Index col = 0; col < k; ++col) {
        Eigen::Index piv = col;
        lu.col(col).tail(k - col).cwiseAbs().maxCoeff(&piv);
        piv += col;
        if (std::abs(lu(piv, col)) < tiny) {
            throw SingularMatrix("lu_solve: matrix is numerically singular");
        }
        if (piv != col) {
            lu.row(piv).swap(lu.row(col));
            std::swap(x[piv], x[col]);
        }
        const double p = lu(col, col);
        for (Eigen::Index r = col + 1; r < k; ++r) {
            const double m = lu(r, col) / p;
            if (m != 0.0) {
                lu.row(r).tail(k - col - 1) -= m * lu.row(col).tail(k - col - 1);
                x[r] -= m * x[col];
            }
        }
    }
    for (Eigen::Index r = k - 1; r >= 0; --r) {
        double s = x[r];
        for (Eigen::Index c = r + 1; c < k; ++c) {
            s -= lu(r, c) * x[c];
        }
        x[r] = s / lu(r, r);
    }
    return x;
}

bool cholesky(const DenseMat& a, DenseMat& lower) {
    const Eigen::Index k = a.rows();
    if (a.cols() != k) {
        throw InvalidArgument("cholesky: matrix must be square");
    }
    lower = DenseMat::Zero(k, k);
    const double tiny = k > 0 ? kSingularTol * a.cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        double d = a(j, j) - lower.row(j).head(j).squaredNorm();
        if (!(d > tiny)) {
            return false;
        }
        const double ljj = std::sqrt(d);
        lower(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < k; ++i) {
            lower(i, j) = (a(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) / ljj;
        }
    }
    return true;
}

Vec spd_solve(const DenseMat& a, const Vec& b) {
    if (a.rows() != a.cols() || b.size() != a.rows()) {
        throw InvalidArgument("spd_solve: dimension mismatch");
    }
    DenseMat l;
    if (!cholesky(a, l)) {
        return lu_solve(a, b);
    }
    const Eigen::Index k = a.rows();
    Vec y = b;
    for (Eigen::Index i = 0; i < k; ++i) {
        y[i] = (y[i] - l.row(i).head(i).dot(y.head(i))) / l(i, i);
    }
    for (Eigen::Index i = k - 1; i >= 0; --i) {
        y[i] = (y[i] - l.col(i).tail(k - i - 1).dot(y.tail(k - i - 1))) / l(i, i);
    }
    return y;
}

double cond2(const DenseMat& a) {
    if (a.size() == 0) {
        throw InvalidArgument("cond2: empty matrix");
    }
    const Vec sv = Eigen::BDCSVD<DenseMat>(a).singularValues();
    // min(rows, cols) singular values, sorted descending.
    const double smax = sv[0];
    const double smin = sv[sv.size() - 1];
    if (smin <= 0.0 || smax / smin > 1.0 / std::numeric_limits<double>::min()) {
        return std::numeric_limits<double>::infinity();
    }
    return smax / smin;
}

}  // namespace hfree::linalg
