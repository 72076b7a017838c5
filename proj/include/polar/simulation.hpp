#ifndef POLAR_SIMULATION_HPP
#define POLAR_SIMULATION_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polar/construction.hpp"
#include "polar/controller.hpp"

namespace polar {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One decoder entry of a sweep: label, decoder parameters and the code
// parameters it runs on (entries may override the file-level defaults).
struct DecoderSetup {
    std::string label;
    DecoderConfig decoder;
    CodeSpecParams code;
    std::shared_ptr<const CodeSpec> spec; // built by prepare()
};

// File-level defaults a decoder entry starts from before its own
// overrides are applied.
struct DecoderDefaults {
    DecoderConfig decoder;
    CodeSpecParams code;
    int declared_n_crc = -1; // optional cross-check against crc_poly
};

struct SimConfig {
    int n = 0;
    int k = 0;
    double ebno_start = 0.0;
    double ebno_stop = 0.0;
    double ebno_step = 0.5;
    double design_snr_db = 4.0;
    std::uint64_t seed = 1;
    std::int64_t max_frames = 10'000'000;
    std::int64_t target_errors = 100;
    DecoderDefaults defaults;
    std::vector<DecoderSetup> decoders;

    std::vector<double> ebno_grid() const;
    // Builds (and caches) the CodeSpec of every decoder entry.
    void prepare();
};

// `text` is a sequence of `key = value` lines; '#' starts a comment.
// `name` only labels diagnostics.  See README for the key list.
SimConfig parse_sim_config(const std::string& text, const std::string& name);
SimConfig load_sim_config(const std::string& path);

// Applies a `key=value` override on top of a parsed config (CLI flags).
void apply_override(SimConfig& config, const std::string& key,
                    const std::string& value);

struct SimRecord {
    std::string decoder;
    double ebno_db = 0.0;
    std::int64_t frames = 0;
    std::int64_t errors = 0;
    std::uint64_t cnp_sum = 0;
    std::uint64_t attempts_sum = 0;      // total SCL invocations
    std::int64_t early_terminations = 0; // attempts stopped by a PC check
    std::vector<std::int64_t> attempt_hist; // by additional attempts, 0..T
    std::uint64_t noise_checksum = 0;

    double fer() const { return frames ? double(errors) / double(frames) : 0.0; }
    double avg_cnp() const { return frames ? double(cnp_sum) / double(frames) : 0.0; }
    double avg_attempts() const {
        return frames ? double(attempts_sum) / double(frames) : 0.0;
    }
    double early_term_rate() const {
        return attempts_sum ? double(early_terminations) / double(attempts_sum) : 0.0;
    }
};

// Monte-Carlo sweep over (decoder, Eb/N0).  Frames are paired across
// decoders by index; each point stops at the first multiple of the check
// granularity where `target_errors` is reached (or at max_frames).  All
// accumulation is integral, so results are independent of thread count.
std::vector<SimRecord> run_sweep(const SimConfig& config, int threads,
                                 std::ostream* progress = nullptr);

void write_csv(const std::vector<SimRecord>& records, std::ostream& os);

// Decodes one frame of one decoder entry with trace output (used by the
// CLI --trace flag).
void trace_frame(const SimConfig& config, std::size_t decoder_index,
                 double ebno_db, std::int64_t frame, std::ostream& os,
                 bool trace_bits);

} // namespace polar

#endif
