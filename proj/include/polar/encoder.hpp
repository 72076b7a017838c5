#ifndef POLAR_ENCODER_HPP
#define POLAR_ENCODER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "polar/construction.hpp"

namespace polar {

// Fills the length-N encoding vector: payload in A-order, check bits over
// the payload stream at the CRC tail, each PC position the xor of the
// positions it protects, zeros on frozen positions.
std::vector<std::uint8_t> assemble_u(std::span<const std::uint8_t> payload,
                                     const CodeSpec& spec);

// x = u * B_N * F^{otimes n}: bit-reversal permutation, then in-place
// butterfly stages.
std::vector<std::uint8_t> polar_transform(std::span<const std::uint8_t> u);

std::vector<std::uint8_t> encode(std::span<const std::uint8_t> payload,
                                 const CodeSpec& spec);

} // namespace polar

#endif
