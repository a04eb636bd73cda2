#include "hfree/hessian_model.hpp"

#include "hfree/linalg.hpp"

#include <cmath>

namespace hfree {

namespace {
constexpr double kMinAngle = 1e-6;
}

AlphaLayout AlphaLayout::dense(int n) { return from_pattern(SparsityPattern::dense(n), false); }

AlphaLayout AlphaLayout::sparse(const SparsityPattern& pattern) { return from_pattern(pattern, true); }

AlphaLayout AlphaLayout::from_pattern(const SparsityPattern& pattern, bool sparse) {
    AlphaLayout out;
    out.n_ = pattern.dim();
    out.sparse_ = sparse;
    for (const auto& [i, j] : pattern.upper_pairs()) {
        if (i == j) out.columns_.emplace_back(i, j);
    }
    for (const auto& [i, j] : pattern.upper_pairs()) {
        if (i != j) out.columns_.emplace_back(i, j);
    }
    return out;
}

SymMat AlphaLayout::to_sym(const Vec& alpha) const {
    if (alpha.size() != ncols()) {
        throw InvalidArgument("AlphaLayout::to_sym: coefficient length mismatch");
    }
    SymMat h = SymMat::Zero(n_, n_);
    for (int k = 0; k < ncols(); ++k) {
        const auto [i, j] = columns_[static_cast<std::size_t>(k)];
        h(i, j) = alpha[k];
        h(j, i) = alpha[k];
    }
    return h;
}

Vec AlphaLayout::from_sym(const SymMat& h) const {
    Vec alpha(ncols());
    for (int k = 0; k < ncols(); ++k) {
        const auto [i, j] = columns_[static_cast<std::size_t>(k)];
        alpha[k] = h(i, j);
    }
    return alpha;
}

EnrichedSystem assemble(const Vec& x, const Vec& grad_x, double f_x, const SampleSet& s, const Vec& v,
                        const Vec& w, const std::optional<SparsityPattern>& pattern) {
    const auto n = static_cast<int>(x.size());
    if (grad_x.size() != n || v.size() != n || w.size() != n) {
        throw InvalidArgument("assemble: dimension mismatch");
    }
    if (pattern && pattern->dim() != n) {
        throw InvalidArgument("assemble: pattern dimension mismatch");
    }
    EnrichedSystem sys;
    sys.layout = pattern ? AlphaLayout::sparse(*pattern) : AlphaLayout::dense(n);
    sys.p = s.size();
    const int ncols = sys.layout.ncols();
    const auto& cols = sys.layout.columns();
    sys.m = DenseMat::Zero(sys.p + n, ncols);
    sys.delta.resize(sys.p + n);

    for (int l = 0; l < sys.p; ++l) {
        const SamplePoint& pt = s.points[static_cast<std::size_t>(l)];
        if (!pt.fval) {
            throw InvalidArgument("assemble: sample point has a pending function value");
        }
        const Vec step = pt.y - x;
        if (line_angle(v, step) < kMinAngle) {
            throw DegenerateGeometry("assemble: v is parallel to an interpolation displacement");
        }
        for (int k = 0; k < ncols; ++k) {
            const auto [i, j] = cols[static_cast<std::size_t>(k)];
            sys.m(l, k) = i == j ? 0.5 * step[i] * step[i] : step[i] * step[j];
        }
        sys.delta[l] = *pt.fval - f_x - grad_x.dot(step);
    }
    // (H v)_i = sum_j h_ij v_j: column (i, j) contributes v_j to row i and v_i to row j.
    for (int k = 0; k < ncols; ++k) {
        const auto [i, j] = cols[static_cast<std::size_t>(k)];
        if (i == j) {
            sys.m(sys.p + i, k) = v[i];
        } else {
            sys.m(sys.p + i, k) = v[j];
            sys.m(sys.p + j, k) = v[i];
        }
    }
    sys.delta.tail(n) = w;
    return sys;
}

HessianModel solve_determined(const EnrichedSystem& sys) {
    if (sys.m.rows() != sys.m.cols()) {
        throw InvalidArgument("solve_determined: system is not square");
    }
    // Interpolation rows scale like r^2 and product rows like r; equilibrate.
    DenseMat a = sys.m;
    Vec b = sys.delta;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        const double s = a.row(r).cwiseAbs().maxCoeff();
        if (s == 0.0) {
            throw SingularMatrix("solve_determined: zero row");
        }
        a.row(r) /= s;
        b[r] /= s;
    }
    HessianModel model;
    model.alpha = linalg::lu_solve(a, b);
    model.h = sys.layout.to_sym(model.alpha);
    model.mode = sys.layout.is_sparse() ? RecoveryMode::sparse_determined : RecoveryMode::determined;
    return model;
}

HessianModel solve_least_change(const EnrichedSystem& sys, const Vec& alpha_prev, ChangeNorm norm) {
    if (alpha_prev.size() != sys.m.cols()) {
        throw InvalidArgument("solve_least_change: alpha_prev length mismatch");
    }
    if (sys.m.rows() > sys.m.cols()) {
        throw InvalidArgument("solve_least_change: more conditions than unknowns");
    }
    Vec winv = Vec::Ones(sys.m.cols());
    if (norm == ChangeNorm::frobenius) {
        const auto& cols = sys.layout.columns();
        for (int k = 0; k < sys.layout.ncols(); ++k) {
            if (cols[static_cast<std::size_t>(k)].first != cols[static_cast<std::size_t>(k)].second) {
                winv[k] = 0.5;
            }
        }
    }
    const DenseMat mw = sys.m * winv.asDiagonal();
    const DenseMat normal = mw * sys.m.transpose();
    const Vec lambda = linalg::spd_solve(normal, sys.delta - sys.m * alpha_prev);
    HessianModel model;
    model.alpha = alpha_prev + mw.transpose() * lambda;
    model.h = sys.layout.to_sym(model.alpha);
    model.mode = RecoveryMode::least_change;
    return model;
}

}  // namespace hfree
