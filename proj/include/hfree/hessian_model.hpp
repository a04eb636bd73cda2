#ifndef HFREE_HESSIAN_MODEL_HPP
#define HFREE_HESSIAN_MODEL_HPP

#include "hfree/core.hpp"
#include "hfree/sampling.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace hfree {

/// Which Hessian entries are unknowns, and in what order. Diagonal entries come
/// first, then the off-diagonal (i < j) pairs in row-major order. The dense
/// layout coincides with sym_from_alpha.
class AlphaLayout {
public:
    static AlphaLayout dense(int n);
    static AlphaLayout sparse(const SparsityPattern& pattern);

    int dim() const { return n_; }
    int ncols() const { return static_cast<int>(columns_.size()); }
    const std::vector<std::pair<int, int>>& columns() const { return columns_; }
    bool is_sparse() const { return sparse_; }

    SymMat to_sym(const Vec& alpha) const;
    Vec from_sym(const SymMat& h) const;

private:
    static AlphaLayout from_pattern(const SparsityPattern& pattern, bool sparse);

    int n_ = 0;
    bool sparse_ = false;
    std::vector<std::pair<int, int>> columns_;
};

/// Interpolation rows on top (one per sample point), then the n rows of H v = w.
struct EnrichedSystem {
    DenseMat m;
    Vec delta;
    AlphaLayout layout;
    int p = 0;
};

enum class RecoveryMode { determined, least_change, sparse_determined };

struct HessianModel {
    SymMat h;
    Vec alpha;
    RecoveryMode mode = RecoveryMode::determined;
};

/// Assembles the enriched interpolation system around x from sampled function
/// values and the single product w = Hessian(x) v. Every point of S must carry
/// its function value. Passing a pattern restricts the unknowns to it.
/// Throws DegenerateGeometry if v is within 1e-6 rad of some y_l - x.
EnrichedSystem assemble(const Vec& x, const Vec& grad_x, double f_x, const SampleSet& s, const Vec& v,
                        const Vec& w, const std::optional<SparsityPattern>& pattern = std::nullopt);

/// Solves the square system M alpha = delta (rows equilibrated first).
/// Throws SingularMatrix.
HessianModel solve_determined(const EnrichedSystem& sys);

/// Norm used to measure the change from the previous model. `alpha` is the
/// plain Euclidean norm of the coefficient vector; `frobenius` weighs the
/// off-diagonal coefficients by two so the objective is |H - H_prev|_F^2.
enum class ChangeNorm { alpha, frobenius };

/// min |alpha - alpha_prev|^2 s.t. M alpha = delta, through the multiplier
/// system (M W^-1 M') lambda = delta - M alpha_prev. Throws SingularMatrix.
HessianModel solve_least_change(const EnrichedSystem& sys, const Vec& alpha_prev,
                                ChangeNorm norm = ChangeNorm::alpha);

}  // namespace hfree

#endif  // HFREE_HESSIAN_MODEL_HPP
