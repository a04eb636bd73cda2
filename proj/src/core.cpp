#include "hfree/core.hpp"

#include <algorithm>
#include <cmath>

namespace hfree {

SparsityPattern::SparsityPattern(int n, std::vector<std::pair<int, int>> upper_pairs)
    : n_(n), pairs_(std::move(upper_pairs)) {
    if (n < 1) {
        throw InvalidArgument("SparsityPattern: dimension must be positive");
    }
    for (auto& [i, j] : pairs_) {
        if (i > j) {
            std::swap(i, j);
        }
        if (i < 0 || j >= n) {
            throw InvalidArgument("SparsityPattern: index pair out of range");
        }
    }
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

SparsityPattern SparsityPattern::dense(int n) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(alpha_size(n)));
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    return SparsityPattern(n, std::move(pairs));
}

SparsityPattern SparsityPattern::diagonal(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
        pairs.emplace_back(i, i);
    }
    return SparsityPattern(n, std::move(pairs));
}

bool SparsityPattern::contains(int i, int j) const {
    if (i > j) {
        std::swap(i, j);
    }
    return std::binary_search(pairs_.begin(), pairs_.end(), std::make_pair(i, j));
}

double RngStream::uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::normal() {
    return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

RngStream RngStream::derive(std::uint64_t master, std::string_view label) {
    // FNV-1a over the label, mixed with the master seed through splitmix64.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (h | 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return RngStream(z);
}

Vec unit_ball_sample(RngStream& rng, int n) {
    if (n < 1) {
        throw InvalidArgument("unit_ball_sample: n must be >= 1");
    }
    Vec u(n);
    double norm = 0.0;
    do {
        for (int i = 0; i < n; ++i) {
            u[i] = rng.normal();
        }
        norm = u.norm();
    } while (norm == 0.0);
    const double radius = std::pow(rng.uniform(), 1.0 / n);
    u *= radius / norm;
    // Guard against rounding pushing the norm a hair above one.
    const double un = u.norm();
    if (un > 1.0) {
        u /= un;
    }
    return u;
}

int alpha_size(int n) { return n * (n + 1) / 2; }

SymMat sym_from_alpha(const Vec& alpha, int n) {
    if (n < 1 || alpha.size() != alpha_size(n)) {
        throw InvalidArgument("sym_from_alpha: coefficient length does not match n(n+1)/2");
    }
    SymMat h(n, n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = alpha[i];
    }
    int k = n;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            h(i, j) = alpha[k];
            h(j, i) = alpha[k];
            ++k;
        }
    }
    return h;
}

Vec alpha_from_sym(const SymMat& h) {
    const auto n = static_cast<int>(h.rows());
    if (h.cols() != n || n < 1) {
        throw InvalidArgument("alpha_from_sym: matrix must be square and nonempty");
    }
    Vec alpha(alpha_size(n));
    for (int i = 0; i < n; ++i) {
        alpha[i] = h(i, i);
    }
    int k = n;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            alpha[k++] = h(i, j);
        }
    }
    return alpha;
}

}  // namespace hfree
