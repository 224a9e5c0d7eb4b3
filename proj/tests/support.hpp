#ifndef TDAQ_TESTS_SUPPORT_HPP
#define TDAQ_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tdaq/oracle.hpp"

namespace tdaq::testing {

inline double linf(const oracle::PersistencePair& p, const oracle::PersistencePair& q) {
    return std::max(std::abs(p.birth - q.birth), std::abs(p.death - q.death));
}

// Tries every bijection of a + diagonal(b) onto b + diagonal(a). Finite points only.
inline double exhaustive_bottleneck(const std::vector<oracle::PersistencePair>& a,
                                    const std::vector<oracle::PersistencePair>& b) {
    const std::size_t m = a.size(), n = b.size(), N = m + n;
    if (N == 0) return 0.0;
    const auto cost = [&](std::size_t i, std::size_t j) {
        const bool real_i = i < m, real_j = j < n;
        if (real_i && real_j) return linf(a[i], b[j]);
        if (real_i) return (a[i].death - a[i].birth) / 2;
        if (real_j) return (b[j].death - b[j].birth) / 2;
        return 0.0;
    };
    std::vector<std::size_t> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    double best = oracle::kInfinity;
    do {
        double worst = 0;
        for (std::size_t i = 0; i < N; ++i) worst = std::max(worst, cost(i, perm[i]));
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace tdaq::testing

#endif
