#ifndef POLAR_NUMERIC_HPP
#define POLAR_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace polar {

// log(sum_i exp(values[i])), max-subtracted so large path metrics never
// overflow or underflow.
inline double log_sum_exp(std::span<const double> values) {
    if (values.empty())
        return -std::numeric_limits<double>::infinity();
    double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m))
        return m;
    double s = 0.0;
    for (double v : values)
        s += std::exp(v - m);
    return m + std::log(s);
}

// log(1 + exp(x)) without overflow for large |x|.
inline double log1p_exp(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a, used to fingerprint noise realizations in simulator output.
inline std::uint64_t fnv1a_init() { return 0xcbf29ce484222325ULL; }

inline std::uint64_t fnv1a_add(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace polar

#endif
