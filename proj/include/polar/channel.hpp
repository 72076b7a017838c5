#ifndef POLAR_CHANNEL_HPP
#define POLAR_CHANNEL_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace polar {

// LLR magnitude standing in for an infinite-reliability symbol when
// decoding without channel noise.
inline constexpr double kNoiselessLlr = 200.0;

// sigma^2 = 1 / (2 R 10^(EbN0/10)) for unit-energy BPSK; R counts
// information bits only.
double noise_sigma2(double ebno_db, double rate);

struct ChannelConfig {
    double ebno_db = 0.0;
    double rate = 0.5; // K/N
    std::uint64_t seed = 1;

    double sigma2() const { return noise_sigma2(ebno_db, rate); }
};

// bit 0 -> +1, bit 1 -> -1, so positive LLR favors bit 0.
std::vector<double> modulate(std::span<const std::uint8_t> bits);

// Per-frame random stream: every frame owns a generator seeded from
// (seed, frame index) alone, so any frame can be reproduced in isolation
// and frames can run on any worker in any order.
class FrameRng {
public:
    static FrameRng for_frame(std::uint64_t seed, std::uint64_t frame_index);

    std::uint64_t next_u64() { return engine_(); }
    // Uniform in (0, 1].
    double uniform();
    // Standard normal via Box-Muller; implementation-independent and
    // deterministic for a given stream.
    double gauss();
    void fill_bits(std::span<std::uint8_t> out);

private:
    explicit FrameRng(std::uint64_t state);
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::vector<double> add_noise(std::span<const double> symbols, double sigma2,
                              FrameRng& rng);

// lambda_i = 2 y_i / sigma^2.  Rejects sigma^2 <= 0; use noiseless_llrs
// for zero-noise tests.
std::vector<double> channel_llrs(std::span<const double> received, double sigma2);

std::vector<double> noiseless_llrs(std::span<const std::uint8_t> bits);

} // namespace polar

#endif
