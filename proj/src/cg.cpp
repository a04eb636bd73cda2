#include "hfree/cg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hfree {

CgResult truncated_cg(const LinearOperator& apply_a, const Vec& g, double force, int max_iter) {
    const double gnorm = g.norm();
    if (gnorm == 0.0) {
        throw ZeroGradient("truncated_cg: gradient is zero");
    }
    if (max_iter < 1) {
        throw InvalidArgument("truncated_cg: max_iter must be positive");
    }
    CgResult res;
    res.d = Vec::Zero(g.size());
    Vec r = g;
    Vec p = -g;
    double rr = r.squaredNorm();
    for (int j = 0; j < max_iter; ++j) {
        const Vec ap = apply_a(p);
        ++res.iters;
        const double curv = p.dot(ap);
        if (!(curv > 0.0)) {
            if (j == 0) {
                res.d = -g;
            }
            res.exit = CgExit::negative_curvature;
            return res;
        }
        const double step = rr / curv;
        res.d += step * p;
        r += step * ap;
        const double rr_new = r.squaredNorm();
        if (std::sqrt(rr_new) <= force * gnorm) {
            res.exit = CgExit::converged;
            return res;
        }
        p = -r + (rr_new / rr) * p;
        rr = rr_new;
    }
    res.exit = CgExit::max_iter;
    return res;
}

double forcing_term(double grad_norm) {
    if (grad_norm < 0.0) {
        throw InvalidArgument("forcing_term: negative gradient norm");
    }
    return std::min(0.5, std::sqrt(grad_norm));
}

ForceRule ForceRule::constant(double value) {
    if (!(value > 0.0 && value < 1.0)) {
        throw InvalidArgument("ForceRule: constant forcing term must lie in (0, 1)");
    }
    ForceRule r;
    r.constant_ = true;
    r.value_ = value;
    return r;
}

ForceRule ForceRule::parse(const std::string& text) {
    if (text == "sqrt") {
        return sqrt_rule();
    }
    const std::string prefix = "const:";
    if (text.rfind(prefix, 0) == 0) {
        try {
            return constant(std::stod(text.substr(prefix.size())));
        } catch (const std::logic_error&) {
        }
    }
    throw InvalidArgument("bad force rule '" + text + "' (expected sqrt or const:<value>)");
}

double ForceRule::operator()(double grad_norm) const {
    return constant_ ? value_ : forcing_term(grad_norm);
}

std::string ForceRule::str() const {
    if (!constant_) {
        return "sqrt";
    }
    std::ostringstream os;
    os << "const:" << value_;
    return os.str();
}

}  // namespace hfree
