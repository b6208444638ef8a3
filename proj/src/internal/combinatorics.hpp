#pragma once

#include <cmath>
#include <numeric>
#include <vector>

namespace pcg::internal {

/// Calls f(idx) for every increasing k-subset of {0, ..., m-1} in lexicographic order.
template <class F>
void for_each_subset(int m, int k, F&& f) {
    if (k > m || k < 0) return;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        f(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == m - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline double binomial(int m, int k) {
    if (k < 0 || k > m) return 0.0;
    return std::round(std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0)));
}

}  // namespace pcg::internal
