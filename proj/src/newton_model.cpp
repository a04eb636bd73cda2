#include "hfree/newton_model.hpp"

#include "hfree/linalg.hpp"

#include <cmath>
#include <limits>

namespace hfree {

NewtonConditions build_conditions(const Vec& x, double f_x, const SampleSet& s) {
    const auto n = x.size();
    NewtonConditions out;
    out.z.resize(s.size(), n);
    out.rhs.resize(s.size());
    for (int l = 0; l < s.size(); ++l) {
        const SamplePoint& pt = s.points[static_cast<std::size_t>(l)];
        if (!pt.fval || !pt.z) {
            throw InvalidArgument("build_conditions: sample point lacks a function value or z vector");
        }
        out.z.row(l) = pt.z->transpose();
        out.rhs[l] = -*pt.fval + f_x + 0.5 * (pt.y - x).dot(*pt.z);
    }
    return out;
}

Vec solve_newton(const DenseMat& z, const Vec& rhs, const Vec& d_prev) {
    const auto p = z.rows();
    const auto n = z.cols();
    if (rhs.size() != p || d_prev.size() != n) {
        throw InvalidArgument("solve_newton: dimension mismatch");
    }
    if (p > n) {
        throw InvalidArgument("solve_newton: more conditions than unknowns");
    }
    if (p == n) {
        return linalg::lu_solve(z, rhs);
    }
    const Vec mu = linalg::spd_solve(z * z.transpose(), rhs - z * d_prev);
    return d_prev + z.transpose() * mu;
}

Vec correct_z(const Vec& z_prev, const Vec& grad_prev, const Vec& grad_cur) {
    return z_prev + grad_prev - grad_cur;
}

double descent_cosine(const Vec& d, const Vec& g) {
    const double nd = d.norm();
    const double ng = g.norm();
    if (nd == 0.0 || ng == 0.0) {
        return 0.0;
    }
    return -g.dot(d) / (nd * ng);
}

Vec descent_safeguard(const Vec& d_n, const Vec& g, double eta, SafeguardMode mode) {
    const double gn = g.norm();
    if (gn == 0.0) {
        throw ZeroGradient("descent_safeguard: gradient is zero");
    }
    if (!(eta > 0.0 && eta < 1.0)) {
        throw InvalidArgument("descent_safeguard: eta must lie in (0, 1)");
    }
    if (mode == SafeguardMode::deficit && descent_cosine(d_n, g) >= eta) {
        return d_n;
    }
    // Split d_n along u = -g/|g|: d_n = a u + b_vec. Subtracting beta g only
    // changes the u-component, to t = a + beta |g|, and cos = t / sqrt(t^2 + b^2).
    const Vec u = -g / gn;
    const double a = d_n.dot(u);
    const double b = (d_n - a * u).norm();
    const double dn = d_n.norm();
    if (dn == 0.0) {
        return -g;
    }
    if (b <= 1e-14 * dn) {
        return dn * u;
    }
    const double t = eta * b / std::sqrt(1.0 - eta * eta);
    const double beta = (t - a) / gn;
    return d_n - beta * g;
}

double scaled_condition(const DenseMat& z) {
    double delta_z = 0.0;
    for (Eigen::Index l = 0; l < z.rows(); ++l) {
        delta_z = std::max(delta_z, z.row(l).norm());
    }
    if (delta_z == 0.0 || !std::isfinite(delta_z)) {
        return std::numeric_limits<double>::infinity();
    }
    return linalg::cond2(z / delta_z);
}

bool maybe_restart(const NewtonModel& model, double threshold) {
    return model.singular || !(model.cond_z < threshold);
}

Diagnostics diagnostics(const Vec& x, const SampleSet& s) {
    Diagnostics out;
    for (const SamplePoint& pt : s.points) {
        out.delta_y = std::max(out.delta_y, (pt.y - x).norm());
        if (pt.z) {
            out.delta_z = std::max(out.delta_z, pt.z->norm());
        }
    }
    return out;
}

double ry_diagnostic(const Vec& x, const SampleSet& s, const HvpOracle& hvp) {
    const auto n = static_cast<int>(x.size());
    const int p = s.size();
    if (p < n) {
        throw InvalidArgument("ry_diagnostic: needs at least n sample points");
    }
    const double delta_y = diagnostics(x, s).delta_y;
    if (delta_y == 0.0) {
        throw SingularMatrix("ry_diagnostic: all sample points coincide with x");
    }
    DenseMat hess(n, n);
    for (int j = 0; j < n; ++j) {
        hess.col(j) = hvp(x, Vec::Unit(n, j));
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    DenseMat l(p, n);
    for (int k = 0; k < p; ++k) {
        l.row(k) = (s.points[static_cast<std::size_t>(k)].y - x).transpose() / delta_y;
    }
    const DenseMat hl = hess * l.transpose();  // n x p
    const DenseMat a = hl * hl.transpose();     // H L'L H
    DenseMat r(n, p);
    for (int k = 0; k < p; ++k) {
        r.col(k) = linalg::lu_solve(a, hl.col(k));
    }
    return Eigen::BDCSVD<DenseMat>(r).singularValues()[0];
}

}  // namespace hfree
