#include "polar/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "polar/numeric.hpp"

namespace polar {

double noise_sigma2(double ebno_db, double rate) {
    if (!(rate > 0.0) || rate > 1.0)
        throw std::invalid_argument("noise_sigma2: rate must be in (0, 1]");
    return 1.0 / (2.0 * rate * std::pow(10.0, ebno_db / 10.0));
}

std::vector<double> modulate(std::span<const std::uint8_t> bits) {
    std::vector<double> s(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        s[i] = bits[i] ? -1.0 : 1.0;
    return s;
}

FrameRng::FrameRng(std::uint64_t state) : engine_(state) {}

FrameRng FrameRng::for_frame(std::uint64_t seed, std::uint64_t frame_index) {
    return FrameRng(splitmix64(seed ^ splitmix64(frame_index + 1)));
}

double FrameRng::uniform() {
    // 53-bit mantissa, shifted into (0, 1].
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
}

double FrameRng::gauss() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

void FrameRng::fill_bits(std::span<std::uint8_t> out) {
    std::uint64_t word = 0;
    int left = 0;
    for (auto& b : out) {
        if (left == 0) {
            word = engine_();
            left = 64;
        }
        b = static_cast<std::uint8_t>(word & 1);
        word >>= 1;
        --left;
    }
}

std::vector<double> add_noise(std::span<const double> symbols, double sigma2,
                              FrameRng& rng) {
    const double sigma = std::sqrt(sigma2);
    std::vector<double> y(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i)
        y[i] = symbols[i] + sigma * rng.gauss();
    return y;
}

std::vector<double> channel_llrs(std::span<const double> received, double sigma2) {
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("channel_llrs: sigma^2 must be positive");
    std::vector<double> llr(received.size());
    for (std::size_t i = 0; i < received.size(); ++i)
        llr[i] = 2.0 * received[i] / sigma2;
    return llr;
}

std::vector<double> noiseless_llrs(std::span<const std::uint8_t> bits) {
    std::vector<double> llr(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        llr[i] = bits[i] ? -kNoiselessLlr : kNoiselessLlr;
    return llr;
}

} // namespace polar
