#ifndef POLAR_CNP_HPP
#define POLAR_CNP_HPP

#include <bit>
#include <cstdint>

namespace polar {

// Cumulative number of paths for one attempt that visited
// `visited_nonfrozen` non-frozen bits with list size L: the b-th warm-up
// bit contributes 2^b candidates, every later visited bit contributes L.
// A full L=4 attempt over 280 non-frozen bits gives 2 + 4*279 = 1118.
inline std::uint64_t count_cnp(int visited_nonfrozen, int list_size) {
    const int lg = std::countr_zero(static_cast<unsigned>(list_size));
    std::uint64_t total = 0;
    int warmup = visited_nonfrozen < lg ? visited_nonfrozen : lg;
    for (int b = 1; b <= warmup; ++b)
        total += std::uint64_t{1} << b;
    if (visited_nonfrozen > lg)
        total += static_cast<std::uint64_t>(visited_nonfrozen - lg) *
                 static_cast<std::uint64_t>(list_size);
    return total;
}

} // namespace polar

#endif
