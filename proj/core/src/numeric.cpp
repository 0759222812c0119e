#include "tripatch/numeric.hpp"

namespace tripatch {

namespace {
double pairwise_rec(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_rec(v, half) + pairwise_rec(v + half, n - half);
}
} // namespace

double pairwise_sum(std::span<const double> values) {
    return pairwise_rec(values.data(), values.size());
}

} // namespace tripatch
