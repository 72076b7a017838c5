#include "polar/encoder.hpp"

#include <bit>
#include <stdexcept>

namespace polar {

std::vector<std::uint8_t> assemble_u(std::span<const std::uint8_t> payload,
                                     const CodeSpec& spec) {
    if (static_cast<int>(payload.size()) != spec.k)
        throw std::invalid_argument("assemble_u: payload length must equal k");

    std::vector<std::uint8_t> u(spec.n, 0);
    std::vector<std::uint8_t> crc_bits;
    if (spec.n_crc > 0)
        crc_bits = spec.crc.compute(payload);

    std::size_t next_payload = 0, next_crc = 0;
    for (int i : spec.nonfrozen) {
        switch (spec.role[i]) {
        case BitRole::Payload:
            u[i] = payload[next_payload++] & 1;
            break;
        case BitRole::Crc:
            u[i] = crc_bits[next_crc++];
            break;
        case BitRole::Pc: {
            std::uint8_t x = 0;
            for (int p : spec.pc_map[spec.pc_ordinal[i]].protects)
                x ^= u[p];
            u[i] = x;
            break;
        }
        case BitRole::Frozen:
            throw std::logic_error("frozen position listed as non-frozen");
        }
    }
    return u;
}

std::vector<std::uint8_t> polar_transform(std::span<const std::uint8_t> u) {
    const int n = static_cast<int>(u.size());
    if (n < 1 || !std::has_single_bit(static_cast<unsigned>(n)))
        throw std::invalid_argument("polar_transform: length must be a power of two");
    const int stages = std::countr_zero(static_cast<unsigned>(n));

    std::vector<std::uint8_t> x(n);
    for (int i = 0; i < n; ++i) {
        unsigned rev = 0, v = static_cast<unsigned>(i);
        for (int b = 0; b < stages; ++b) {
            rev = (rev << 1) | (v & 1);
            v >>= 1;
        }
        x[i] = u[rev] & 1;
    }
    for (int inc = 1; inc < n; inc <<= 1)
        for (int j = 0; j < inc; ++j)
            for (int i = 0; i < n; i += 2 * inc)
                x[i + j] ^= x[i + j + inc];
    return x;
}

std::vector<std::uint8_t> encode(std::span<const std::uint8_t> payload,
                                 const CodeSpec& spec) {
    std::vector<std::uint8_t> u = assemble_u(payload, spec);
    return polar_transform(u);
}

} // namespace polar
