#ifndef POLAR_SCL_HPP
#define POLAR_SCL_HPP

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "polar/construction.hpp"

namespace polar {

// Path-metric step: unchanged when the decision agrees with the hard
// decision delta(llr) = (1 - sign(llr)) / 2, otherwise penalized by |llr|.
inline double pm_update(double pm_prev, double llr, std::uint8_t decision) {
    std::uint8_t hard = llr < 0.0 ? 1 : 0;
    return decision == hard ? pm_prev : pm_prev + std::abs(llr);
}

struct SclOptions {
    // Run the parity-check hook at PC positions and stop the attempt when
    // no path satisfies every check so far.
    bool pc_checks = false;
    // Optional variant: drop individual paths that fail a PC check while
    // others pass (the default keeps them).
    bool prune_pc_failing_paths = false;
    // Record per-selection expansion data (slow; tests only).
    bool record_history = false;
    std::ostream* trace = nullptr; // per-bit trace lines when set
};

// Expansion snapshot at one list-selection bit.  Candidates are in
// canonical order: parent slot major, decision bit 0 before 1; `kept`
// lists the surviving candidates in the order the survivor list was
// rebuilt.
struct SelectionRecord {
    int bit = -1;
    std::vector<double> cand_pms;
    std::vector<int> kept;
    bool flipped = false;
    double e_value = 0.0;
};

struct DecodeOutcome {
    enum class Status { CrcPass, CrcFail, PcEarlyTermination };

    Status status = Status::CrcFail;
    int breakpoint = 0; // 0-based PC bit where the attempt stopped, or n
    std::vector<std::uint8_t> u_hat;   // n bits; zeros past the breakpoint
    std::vector<std::uint8_t> payload; // k bits extracted from u_hat
    std::vector<double> e_values;      // per bit, NaN where not recorded
    int visited_nonfrozen = 0;
    std::uint64_t cnp = 0;

    // Final survivor list, path-metric ascending.
    std::vector<double> final_pms;
    std::vector<std::vector<std::uint8_t>> final_paths;
    std::vector<std::uint8_t> final_crc_pass; // empty on early termination

    std::vector<SelectionRecord> history; // only with record_history
};

// LLR-domain successive cancellation list decoder with flip-aware path
// selection, per-bit parity checks and E-value bookkeeping.  One instance
// owns reusable buffers for a fixed (spec, L); decode() may be called
// repeatedly.  Not shareable across threads mid-decode.
class SclDecoder {
public:
    SclDecoder(const CodeSpec& spec, int list_size);

    // `flip_set`: strictly increasing non-frozen bit indices outside the
    // warm-up prefix; selection at those bits keeps the larger-PM half.
    DecodeOutcome decode(std::span<const double> channel_llrs,
                         std::span<const int> flip_set,
                         const SclOptions& opts = {});

    int list_size() const { return list_size_; }

private:
    struct Path {
        std::vector<double> llr;        // levels 1..stages, flattened
        std::vector<std::uint8_t> csum; // two-phase partial sums, levels 1..stages
        std::vector<std::uint8_t> u;    // decisions
        std::vector<std::uint8_t> pc_acc;
        std::uint8_t pc_ok = 1;
        double pm = 0.0;
    };

    void compute_llr(Path& p, int level, int phase,
                     std::span<const double> channel);
    void propagate_sums(Path& p, int level, int phase);
    void apply_decision(Path& p, int bit, std::uint8_t value, double penalty);

    const CodeSpec& spec_;
    int list_size_;
    int stages_;
    std::vector<Path> pool_;
    std::vector<int> active_; // slots in canonical (pm-ascending) order
};

} // namespace polar

#endif
