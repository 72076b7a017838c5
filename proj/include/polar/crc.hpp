#ifndef POLAR_CRC_HPP
#define POLAR_CRC_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace polar {

// Cyclic redundancy check over GF(2), plain long division: zero initial
// state, no reflection, no final xor.  The generator is given with its
// leading term, e.g. x^16 + x^15 + x^2 + 1 is 0x18005.
class Crc {
public:
    Crc() = default;
    explicit Crc(std::uint64_t generator);

    int length() const { return length_; }
    std::uint64_t generator() const { return generator_; }

    // Check bits for `message`, appended so that message||crc divides g(x).
    std::vector<std::uint8_t> compute(std::span<const std::uint8_t> message) const;

    // True iff `word` (message followed by its check bits) has remainder zero.
    bool check(std::span<const std::uint8_t> word) const;

    // Generator polynomial as a coefficient vector, degree n_crc down to 0.
    std::vector<std::uint8_t> coefficients() const;

private:
    std::uint64_t generator_ = 0;
    int length_ = 0;
};

} // namespace polar

#endif
