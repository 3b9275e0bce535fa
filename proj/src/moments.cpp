#include "isingtest/moments.hpp"

#include <bit>
#include <stdexcept>

#include "isingtest/sampling.hpp"

namespace isingtest {

void MomentTable::recompute_covariances() {
    cov.assign(pair_count(n), 0.0);
    std::size_t idx = 0;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v, ++idx) cov[idx] = edge[idx] - node[u] * node[v];
}

MomentTable empirical_moments(const SampleBatch& batch) {
    const long long k = batch.k();
    if (k < 1) throw std::invalid_argument("empirical_moments: empty batch");
    const int n = batch.n();

    // Column bitsets (bit set <=> spin +1) so pair moments reduce to popcounts.
    const long long words = (k + 63) / 64;
    std::vector<std::uint64_t> cols(static_cast<std::size_t>(words) * n, 0);
    for (long long i = 0; i < k; ++i) {
        const Spin* row = batch.row_ptr(i);
        const std::uint64_t bit = std::uint64_t{1} << (i & 63);
        const long long word = i >> 6;
        for (int v = 0; v < n; ++v)
            if (row[v] > 0) cols[static_cast<std::size_t>(v) * words + word] |= bit;
    }

    MomentTable t;
    t.n = n;
    t.exact = false;
    t.sample_count = k;
    t.node.assign(n, 0.0);
    t.edge.assign(pair_count(n), 0.0);

    for (int v = 0; v < n; ++v) {
        long long pop = 0;
        const std::uint64_t* col = cols.data() + static_cast<std::size_t>(v) * words;
        for (long long w = 0; w < words; ++w) pop += std::popcount(col[w]);
        t.node[v] = static_cast<double>(2 * pop - k) / k;
    }
    std::size_t idx = 0;
    for (int u = 0; u < n; ++u) {
        const std::uint64_t* cu = cols.data() + static_cast<std::size_t>(u) * words;
        for (int v = u + 1; v < n; ++v, ++idx) {
            const std::uint64_t* cv = cols.data() + static_cast<std::size_t>(v) * words;
            long long differ = 0;
            for (long long w = 0; w < words; ++w) differ += std::popcount(cu[w] ^ cv[w]);
            t.edge[idx] = static_cast<double>(k - 2 * differ) / k;
        }
    }
    t.recompute_covariances();
    return t;
}

}  // namespace isingtest
