#ifndef POLAR_CONTROLLER_HPP
#define POLAR_CONTROLLER_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "polar/flip_metrics.hpp"
#include "polar/scl.hpp"

namespace polar {

enum class DecoderKind { CaScl, Dsclf, PcDsclf };

struct DecoderConfig {
    DecoderKind kind = DecoderKind::CaScl;
    int list_size = 4;
    int max_attempts = 0;   // T, additional attempts after the first
    int max_flip_order = 2; // omega
    MetricParams metric;
    bool prune_pc_failing_paths = false;
};

// Candidate flip sets ordered by metric (ties: smaller last index, then
// lexicographic), at most `capacity` entries.  Entries before the cursor
// of the running controller have been executed and keep their slots.
class FlipList {
public:
    explicit FlipList(int capacity) : capacity_(capacity) {}

    int capacity() const { return capacity_; }
    int size() const { return static_cast<int>(sets_.size()); }
    const FlipSet& at(int i) const { return sets_[i]; }
    const std::vector<FlipSet>& sets() const { return sets_; }

    // Sorted insert; when full, inserts only if the key beats the current
    // worst entry, which is evicted.
    void insert(FlipSet set);
    void clear() { sets_.clear(); }

    static bool key_less(const FlipSet& a, const FlipSet& b);

private:
    int capacity_;
    std::vector<FlipSet> sets_;
};

// One Algorithm-4 update after the failed attempt `t` (0 = the initial
// attempt).  Candidate indices run over the spec's flip-eligible bits up
// to `breakpoint` inclusive; for t >= 1 the executed set `executed` is
// extended by single indices past its last element.  E values are read
// from the failed attempt's own pass.
void update_flip_list(FlipList& list, int t, const FlipSet* executed,
                      std::span<const double> e_values, int breakpoint,
                      const CodeSpec& spec, const DecoderConfig& config);

struct AttemptRecord {
    std::vector<int> flips;
    double metric = 0.0;
    DecodeOutcome::Status status = DecodeOutcome::Status::CrcFail;
    int breakpoint = 0;
    int visited_nonfrozen = 0;
    std::uint64_t cnp = 0;
};

struct FrameResult {
    std::vector<std::uint8_t> payload;
    bool crc_ok = false;
    int additional_attempts = 0; // executed flip attempts, 0..T
    std::uint64_t cnp_total = 0;
    int early_terminations = 0; // attempts stopped by a PC check
    std::vector<AttemptRecord> attempts;
};

// Attempt orchestration: the initial pass, then up to T flip attempts
// drawn from the dynamically updated flip list.  One instance per thread;
// decode() may be called repeatedly.
class FrameDecoder {
public:
    FrameDecoder(const CodeSpec& spec, const DecoderConfig& config);

    FrameResult decode(std::span<const double> channel_llrs,
                       std::ostream* trace = nullptr,
                       bool trace_bits = false);

    const DecoderConfig& config() const { return config_; }

private:
    const CodeSpec& spec_;
    DecoderConfig config_;
    SclDecoder scl_;
    FlipList flip_list_;
};

std::string decoder_kind_name(DecoderKind kind);

} // namespace polar

#endif
