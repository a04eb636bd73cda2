#ifndef HFREE_CORE_HPP
#define HFREE_CORE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hfree {

using Vec = Eigen::VectorXd;
using DenseMat = Eigen::MatrixXd;
/// Symmetric n x n matrix. Producers in this library always write both triangles.
using SymMat = Eigen::MatrixXd;

// Error types. Everything derives from std::runtime_error so callers that do
// not care about the distinction can catch one thing.
struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateGeometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroGradient : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AscentDirection : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Upper-triangle structural nonzeros of a Hessian, 0-based, i <= j.
/// Pairs are kept sorted and unique.
class SparsityPattern {
public:
    SparsityPattern() = default;
    SparsityPattern(int n, std::vector<std::pair<int, int>> upper_pairs);

    static SparsityPattern dense(int n);
    static SparsityPattern diagonal(int n);

    int dim() const { return n_; }
    std::size_t nnz() const { return pairs_.size(); }
    const std::vector<std::pair<int, int>>& upper_pairs() const { return pairs_; }
    bool contains(int i, int j) const;

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> pairs_;
};

/// Seeded pseudo-random stream. Identical seeds give identical draw sequences.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    double uniform();  // [0, 1)
    double normal();   // standard normal
    std::uint64_t next_u64() { return engine_(); }

    /// Independent stream for a sub-task, keyed by a label (e.g. "TRIDIA/10").
    static RngStream derive(std::uint64_t master, std::string_view label);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Uniform sample from the closed unit ball in R^n (Gaussian direction, U^{1/n} radius).
Vec unit_ball_sample(RngStream& rng, int n);

// Coefficient vector <-> symmetric matrix. Layout: the n diagonal entries
// first, then h_ij for i < j in row-major pair order (0,1),(0,2),...,(1,2),...
int alpha_size(int n);
SymMat sym_from_alpha(const Vec& alpha, int n);
Vec alpha_from_sym(const SymMat& h);

}  // namespace hfree

#endif  // HFREE_CORE_HPP
