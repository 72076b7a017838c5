#include "polar/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace polar {

bool FlipList::key_less(const FlipSet& a, const FlipSet& b) {
    if (a.metric != b.metric)
        return a.metric < b.metric;
    if (a.indices.back() != b.indices.back())
        return a.indices.back() < b.indices.back();
    return a.indices < b.indices;
}

void FlipList::insert(FlipSet set) {
    if (capacity_ == 0)
        return;
    if (size() >= capacity_) {
        if (!key_less(set, sets_.back()))
            return;
        sets_.pop_back();
    }
    auto pos = std::upper_bound(sets_.begin(), sets_.end(), set, key_less);
    sets_.insert(pos, std::move(set));
}

void update_flip_list(FlipList& list, int t, const FlipSet* executed,
                      std::span<const double> e_values, int breakpoint,
                      const CodeSpec& spec, const DecoderConfig& config) {
    // With path pruning enabled, bits can go unselected and carry no E
    // value; score them as certainly-correct so they never attract a flip.
    std::vector<double> e_clean;
    std::span<const double> e = e_values;
    if (config.prune_pc_failing_paths) {
        e_clean.assign(e_values.begin(), e_values.end());
        for (double& v : e_clean)
            if (std::isnan(v))
                v = std::numeric_limits<double>::infinity();
        e = e_clean;
    }

    if (t == 0) {
        list.clear();
        for (int j : spec.flip_eligible) {
            if (j > breakpoint)
                break;
            FlipSet s;
            s.indices = {j};
            s.metric =
                flip_set_metric(s.indices, e, spec.selection_bits, config.metric);
            list.insert(std::move(s));
        }
        return;
    }

    if (executed == nullptr)
        throw std::invalid_argument("update_flip_list: missing executed set");
    if (executed->order() >= config.max_flip_order)
        return; // never extend a set already at the order cap

    // Extensions are scored incrementally: the executed set keeps the metric
    // it was ranked with and the fresh pass contributes only the tail
    // E(j) + sum of penalties over (i_t, j].  The E value recorded at a
    // flipped bit is the negation of the value its stored metric used, so
    // re-evaluating the whole set against this pass would let extensions
    // rank below already-executed entries.
    auto penalty = [&](double x) {
        return config.metric.kind == MetricKind::SimplifiedMstar
                   ? f_star(x, config.metric.z)
                   : f_beta(x, config.metric.beta);
    };
    const int last = executed->last();
    double tail = 0.0;
    std::size_t next_eligible = 0;
    for (int k : spec.selection_bits) {
        if (k <= last)
            continue;
        if (k > breakpoint)
            break;
        double ek = e[k];
        if (std::isnan(ek))
            throw std::invalid_argument("update_flip_list: missing E value");
        tail += penalty(ek);
        while (next_eligible < spec.flip_eligible.size() &&
               spec.flip_eligible[next_eligible] < k)
            ++next_eligible;
        if (next_eligible < spec.flip_eligible.size() &&
            spec.flip_eligible[next_eligible] == k) {
            FlipSet s;
            s.indices = executed->indices;
            s.indices.push_back(k);
            s.metric = executed->metric + ek + tail;
            list.insert(std::move(s));
        }
    }
}

FrameDecoder::FrameDecoder(const CodeSpec& spec, const DecoderConfig& config)
    : spec_(spec), config_(config), scl_(spec, config.list_size),
      flip_list_(config.max_attempts) {
    if (config.max_attempts < 0 || config.max_flip_order < 1)
        throw std::invalid_argument("frame decoder: need T >= 0 and omega >= 1");
    if (config.kind != DecoderKind::PcDsclf && spec.n_pc != 0)
        throw std::invalid_argument("frame decoder: PC bits require the pc-dsclf decoder");
    if (config.kind == DecoderKind::CaScl && config.max_attempts != 0)
        throw std::invalid_argument("frame decoder: ca-scl takes no flip attempts");
}

FrameResult FrameDecoder::decode(std::span<const double> channel_llrs,
                                 std::ostream* trace, bool trace_bits) {
    FrameResult res;
    flip_list_.clear();

    SclOptions opts;
    opts.pc_checks = config_.kind == DecoderKind::PcDsclf;
    opts.prune_pc_failing_paths = config_.prune_pc_failing_paths;
    if (trace && trace_bits)
        opts.trace = trace;

    const int T = config_.max_attempts;
    bool have_full = false;
    std::vector<std::uint8_t> last_full_payload;

    static const std::vector<int> no_flips;
    for (int t = 0; t <= T; ++t) {
        const FlipSet* executing = nullptr;
        if (t > 0) {
            if (flip_list_.size() < t)
                break; // candidate list exhausted
            executing = &flip_list_.at(t - 1);
        }

        DecodeOutcome outcome = scl_.decode(
            channel_llrs, executing ? std::span<const int>(executing->indices)
                                    : std::span<const int>(no_flips),
            opts);

        AttemptRecord rec;
        rec.flips = executing ? executing->indices : std::vector<int>{};
        rec.metric = executing ? executing->metric : 0.0;
        rec.status = outcome.status;
        rec.breakpoint = outcome.breakpoint;
        rec.visited_nonfrozen = outcome.visited_nonfrozen;
        rec.cnp = outcome.cnp;
        res.attempts.push_back(rec);
        res.cnp_total += outcome.cnp;
        res.additional_attempts = t;
        if (outcome.status == DecodeOutcome::Status::PcEarlyTermination)
            ++res.early_terminations;

        if (trace) {
            *trace << "attempt=" << t << " flips=[";
            for (std::size_t i = 0; i < rec.flips.size(); ++i)
                *trace << (i ? " " : "") << rec.flips[i] + 1;
            *trace << "] metric=" << rec.metric << " status="
                   << (outcome.status == DecodeOutcome::Status::CrcPass ? "crc_pass"
                       : outcome.status == DecodeOutcome::Status::CrcFail
                           ? "crc_fail"
                           : "pc_stop")
                   << " stop_bit="
                   << (outcome.breakpoint < spec_.n
                           ? std::to_string(outcome.breakpoint + 1)
                           : std::string("end"))
                   << " cnp=" << outcome.cnp << "\n";
        }

        if (outcome.status == DecodeOutcome::Status::CrcPass) {
            res.payload = std::move(outcome.payload);
            res.crc_ok = true;
            return res;
        }
        if (outcome.breakpoint == spec_.n) {
            have_full = true;
            last_full_payload = std::move(outcome.payload);
        } else if (!have_full) {
            // No full-length attempt yet; keep the truncated best guess.
            last_full_payload = std::move(outcome.payload);
        }

        if (t < T)
            update_flip_list(flip_list_, t, executing, outcome.e_values,
                             outcome.breakpoint, spec_, config_);
    }

    res.payload = std::move(last_full_payload);
    res.crc_ok = false;
    return res;
}

std::string decoder_kind_name(DecoderKind kind) {
    switch (kind) {
    case DecoderKind::CaScl:
        return "ca-scl";
    case DecoderKind::Dsclf:
        return "dsclf";
    case DecoderKind::PcDsclf:
        return "pc-dsclf";
    }
    return "?";
}

} // namespace polar
