#include "polar/crc.hpp"

#include <stdexcept>

namespace polar {

Crc::Crc(std::uint64_t generator) : generator_(generator) {
    if (generator < 2)
        throw std::invalid_argument("crc: generator polynomial must have degree >= 1");
    length_ = 63;
    while (!((generator >> length_) & 1))
        --length_;
    if (length_ > 57)
        throw std::invalid_argument("crc: generator degree too large");
}

std::vector<std::uint8_t> Crc::compute(std::span<const std::uint8_t> message) const {
    // Shift register holds the running remainder, message bit first.
    std::uint64_t reg = 0;
    const std::uint64_t top = std::uint64_t{1} << length_;
    const std::uint64_t mask = top - 1;
    for (std::uint8_t bit : message) {
        reg = (reg << 1) | (bit & 1);
        if (reg & top)
            reg = (reg ^ generator_) & mask;
    }
    for (int i = 0; i < length_; ++i) {
        reg <<= 1;
        if (reg & top)
            reg = (reg ^ generator_) & mask;
    }
    std::vector<std::uint8_t> out(length_);
    for (int i = 0; i < length_; ++i)
        out[i] = static_cast<std::uint8_t>((reg >> (length_ - 1 - i)) & 1);
    return out;
}

bool Crc::check(std::span<const std::uint8_t> word) const {
    std::uint64_t reg = 0;
    const std::uint64_t top = std::uint64_t{1} << length_;
    const std::uint64_t mask = top - 1;
    for (std::uint8_t bit : word) {
        reg = (reg << 1) | (bit & 1);
        if (reg & top)
            reg = (reg ^ generator_) & mask;
    }
    return reg == 0;
}

std::vector<std::uint8_t> Crc::coefficients() const {
    std::vector<std::uint8_t> out(length_ + 1);
    for (int i = 0; i <= length_; ++i)
        out[i] = static_cast<std::uint8_t>((generator_ >> (length_ - i)) & 1);
    return out;
}

} // namespace polar
