#include "isingtest/config.hpp"

#include <stdexcept>

namespace isingtest {

void TesterConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("TesterConfig: epsilon must be positive");
    if (!(fail_prob > 0.0 && fail_prob < 1.0))
        throw std::invalid_argument("TesterConfig: fail_prob in (0,1)");
    for (double c : {c_loc, c_f, c_pre, c_wl, c_rep, c_ch, c_thr})
        if (!(c > 0.0)) throw std::invalid_argument("TesterConfig: constants must be positive");
    if (budget < 0) throw std::invalid_argument("TesterConfig: budget must be nonnegative");
}

long long PromisedBounds::edge_bound(int n) const {
    if (m > 0) return m;
    return static_cast<long long>(n) * (n - 1) / 2;
}

}  // namespace isingtest
