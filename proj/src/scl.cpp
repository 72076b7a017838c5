#include "polar/scl.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "polar/cnp.hpp"
#include "polar/flip_metrics.hpp"

namespace polar {

namespace {

// Hardware-style check-node update: sign-min.
inline double f_node(double a, double b) {
    double m = std::min(std::abs(a), std::abs(b));
    return ((a < 0.0) != (b < 0.0)) ? -m : m;
}

// Exact variable-node update.
inline double g_node(double a, double b, std::uint8_t u) {
    return u ? b - a : b + a;
}

} // namespace

SclDecoder::SclDecoder(const CodeSpec& spec, int list_size)
    : spec_(spec), list_size_(list_size) {
    if (list_size < 1 || (list_size & (list_size - 1)) != 0)
        throw std::invalid_argument("scl: list size must be a power of two >= 1");
    stages_ = 0;
    while ((1 << stages_) < spec_.n)
        ++stages_;
    pool_.resize(2 * static_cast<std::size_t>(list_size_));
    for (Path& p : pool_) {
        p.llr.assign(spec_.n - 1, 0.0);
        p.csum.assign(2 * spec_.n - 2, 0);
        p.u.assign(spec_.n, 0);
        p.pc_acc.assign(std::max(spec_.n_pc, 1), 0);
    }
    active_.reserve(list_size_);
}

// Flattened level offsets; level is 1..stages_.
static inline int llr_off(int n, int level) { return n - (n >> (level - 1)); }
static inline int csum_off(int n, int level) { return 2 * (n - (n >> (level - 1))); }

void SclDecoder::compute_llr(Path& p, int level, int phase,
                             std::span<const double> channel) {
    if (level == 0)
        return;
    if ((phase & 1) == 0)
        compute_llr(p, level - 1, phase >> 1, channel);
    const int n = spec_.n;
    const double* src =
        level == 1 ? channel.data() : p.llr.data() + llr_off(n, level - 1);
    double* dst = p.llr.data() + llr_off(n, level);
    const int count = 1 << (stages_ - level);
    if ((phase & 1) == 0) {
        for (int b = 0; b < count; ++b)
            dst[b] = f_node(src[2 * b], src[2 * b + 1]);
    } else {
        const std::uint8_t* cs = p.csum.data() + csum_off(n, level);
        for (int b = 0; b < count; ++b)
            dst[b] = g_node(src[2 * b], src[2 * b + 1], cs[2 * b]);
    }
}

void SclDecoder::propagate_sums(Path& p, int level, int phase) {
    if (level <= 1)
        return; // level-0 sums are never read
    const int n = spec_.n;
    const int half = phase >> 1;
    const int ph = half & 1;
    const std::uint8_t* src = p.csum.data() + csum_off(n, level);
    std::uint8_t* dst = p.csum.data() + csum_off(n, level - 1);
    const int count = 1 << (stages_ - level);
    for (int b = 0; b < count; ++b) {
        dst[2 * (2 * b) + ph] = src[2 * b] ^ src[2 * b + 1];
        dst[2 * (2 * b + 1) + ph] = src[2 * b + 1];
    }
    if (ph == 1)
        propagate_sums(p, level - 1, half);
}

void SclDecoder::apply_decision(Path& p, int bit, std::uint8_t value, double pm) {
    p.u[bit] = value;
    p.csum[csum_off(spec_.n, stages_) + (bit & 1)] = value;
    p.pm = pm;
    if (spec_.protected_by[bit] >= 0)
        p.pc_acc[spec_.protected_by[bit]] ^= value;
}

DecodeOutcome SclDecoder::decode(std::span<const double> channel_llrs,
                                 std::span<const int> flip_set,
                                 const SclOptions& opts) {
    const int n = spec_.n;
    if (static_cast<int>(channel_llrs.size()) != n)
        throw std::invalid_argument("scl: channel LLR length mismatch");
    for (std::size_t i = 0; i < flip_set.size(); ++i) {
        int bit = flip_set[i];
        if (i > 0 && bit <= flip_set[i - 1])
            throw std::invalid_argument("scl: flip set must be strictly increasing");
        if (bit < 0 || bit >= n || spec_.frozen_mask[bit])
            throw std::invalid_argument("scl: flip index must be non-frozen");
        if (std::find(spec_.a_prime.begin(), spec_.a_prime.end(), bit) !=
            spec_.a_prime.end())
            throw std::invalid_argument("scl: flip index inside the warm-up prefix");
    }

    DecodeOutcome out;
    out.e_values.assign(n, std::numeric_limits<double>::quiet_NaN());

    Path& root = pool_[0];
    std::fill(root.u.begin(), root.u.end(), 0);
    std::fill(root.csum.begin(), root.csum.end(), 0);
    std::fill(root.pc_acc.begin(), root.pc_acc.end(), 0);
    root.pc_ok = 1;
    root.pm = 0.0;
    active_.assign(1, 0);

    const int top_llr = llr_off(n, stages_);
    std::size_t flip_ptr = 0;
    int visited = 0;

    // Selection scratch, reused across bits.
    std::vector<double> cand_pm(2 * list_size_);
    std::vector<int> order(2 * list_size_);
    std::vector<int> new_active;
    std::vector<int> free_slots;
    std::vector<std::uint8_t> first_taken(list_size_);
    std::vector<std::uint8_t> slot_busy(pool_.size());
    struct Pending {
        int slot;
        std::uint8_t bit_value;
        double pm;
    };
    std::vector<Pending> pending;

    auto finalize_list = [&] {
        for (int slot : active_) {
            out.final_pms.push_back(pool_[slot].pm);
            out.final_paths.push_back(pool_[slot].u);
        }
    };
    auto extract_payload = [&](const std::vector<std::uint8_t>& u) {
        std::vector<std::uint8_t> pay(spec_.k);
        for (int i = 0; i < spec_.k; ++i)
            pay[i] = u[spec_.payload_pos[i]];
        return pay;
    };

    for (int bit = 0; bit < n; ++bit) {
        for (int slot : active_)
            compute_llr(pool_[slot], stages_, bit, channel_llrs);

        if (spec_.frozen_mask[bit]) {
            for (int slot : active_) {
                Path& p = pool_[slot];
                apply_decision(p, bit, 0, pm_update(p.pm, p.llr[top_llr], 0));
            }
        } else {
            ++visited;
            bool flipped = flip_ptr < flip_set.size() && flip_set[flip_ptr] == bit;
            if (flipped)
                ++flip_ptr;

            const int parents = static_cast<int>(active_.size());
            const int n_cand = 2 * parents;
            for (int pi = 0; pi < parents; ++pi) {
                const Path& p = pool_[active_[pi]];
                double llr = p.llr[top_llr];
                cand_pm[2 * pi + 0] = pm_update(p.pm, llr, 0);
                cand_pm[2 * pi + 1] = pm_update(p.pm, llr, 1);
            }
            std::iota(order.begin(), order.begin() + n_cand, 0);
            std::stable_sort(order.begin(), order.begin() + n_cand,
                             [&](int a, int b) { return cand_pm[a] < cand_pm[b]; });

            int kept_begin = 0, kept_count = n_cand;
            if (n_cand > list_size_) {
                kept_count = list_size_;
                kept_begin = flipped ? list_size_ : 0; // flip keeps the larger half
                std::span<const int> kept(order.data() + kept_begin, kept_count);
                std::span<const int> dropped(order.data() + (list_size_ - kept_begin),
                                             kept_count);
                std::vector<double> pm_kept(kept_count), pm_drop(kept_count);
                for (int i = 0; i < kept_count; ++i) {
                    pm_kept[i] = cand_pm[kept[i]];
                    pm_drop[i] = cand_pm[dropped[i]];
                }
                out.e_values[bit] = e_metric(pm_kept, pm_drop, 1.0);
            }

            if (opts.record_history && n_cand > list_size_) {
                SelectionRecord rec;
                rec.bit = bit;
                rec.cand_pms.assign(cand_pm.begin(), cand_pm.begin() + n_cand);
                rec.kept.assign(order.begin() + kept_begin,
                                order.begin() + kept_begin + kept_count);
                rec.flipped = flipped;
                rec.e_value = out.e_values[bit];
                out.history.push_back(std::move(rec));
            }
            if (opts.trace && n_cand > list_size_) {
                *opts.trace << "bit=" << bit + 1 << (flipped ? " flip=1" : " flip=0")
                            << " e=" << out.e_values[bit] << " pm=[";
                for (int i = 0; i < kept_count; ++i)
                    *opts.trace << (i ? " " : "") << cand_pm[order[kept_begin + i]];
                *opts.trace << "]\n";
            }

            // Materialize survivors: the first surviving child of a parent
            // reuses its slot, further children copy it.
            std::fill(first_taken.begin(), first_taken.end(), 0);
            std::fill(slot_busy.begin(), slot_busy.end(), 0);
            for (int i = 0; i < kept_count; ++i)
                slot_busy[active_[order[kept_begin + i] >> 1]] = 1;
            free_slots.clear();
            for (int slot = 0; slot < static_cast<int>(pool_.size()); ++slot)
                if (!slot_busy[slot])
                    free_slots.push_back(slot);

            pending.clear();
            new_active.clear();
            for (int i = 0; i < kept_count; ++i) {
                int cand = order[kept_begin + i];
                int pi = cand >> 1;
                int slot;
                if (!first_taken[pi]) {
                    first_taken[pi] = 1;
                    slot = active_[pi];
                } else {
                    slot = free_slots.back();
                    free_slots.pop_back();
                    pool_[slot] = pool_[active_[pi]]; // copy before mutation
                }
                pending.push_back({slot, static_cast<std::uint8_t>(cand & 1),
                                   cand_pm[cand]});
                new_active.push_back(slot);
            }
            for (const Pending& pd : pending)
                apply_decision(pool_[pd.slot], bit, pd.bit_value, pd.pm);
            active_ = new_active;

            if (opts.pc_checks && spec_.role[bit] == BitRole::Pc) {
                const int ord = spec_.pc_ordinal[bit];
                bool any_ok = false;
                for (int slot : active_) {
                    Path& p = pool_[slot];
                    if (p.u[bit] != p.pc_acc[ord])
                        p.pc_ok = 0;
                    any_ok = any_ok || p.pc_ok;
                }
                if (!any_ok) {
                    out.status = DecodeOutcome::Status::PcEarlyTermination;
                    out.breakpoint = bit;
                    out.visited_nonfrozen = visited;
                    out.cnp = count_cnp(visited, list_size_);
                    int best = active_.front();
                    for (int slot : active_)
                        if (pool_[slot].pm < pool_[best].pm)
                            best = slot;
                    out.u_hat = pool_[best].u;
                    out.payload = extract_payload(out.u_hat);
                    finalize_list();
                    if (opts.trace)
                        *opts.trace << "pc_stop bit=" << bit + 1 << "\n";
                    return out;
                }
                if (opts.prune_pc_failing_paths) {
                    std::erase_if(active_,
                                  [&](int slot) { return !pool_[slot].pc_ok; });
                }
            }
        }

        if (bit & 1)
            for (int slot : active_)
                propagate_sums(pool_[slot], stages_, bit);
    }

    // CRC stage over the full list.
    out.breakpoint = n;
    out.visited_nonfrozen = visited;
    out.cnp = count_cnp(visited, list_size_);
    std::vector<std::uint8_t> word(spec_.crc_covered.size());
    int chosen = -1;      // smallest-PM path among those passing the check
    int smallest = -1;    // smallest-PM path overall
    for (int slot : active_) {
        const Path& p = pool_[slot];
        bool pass = true;
        if (spec_.n_crc > 0) {
            for (std::size_t i = 0; i < spec_.crc_covered.size(); ++i)
                word[i] = p.u[spec_.crc_covered[i]];
            pass = spec_.crc.check(word);
        }
        out.final_crc_pass.push_back(pass ? 1 : 0);
        if (smallest < 0 || p.pm < pool_[smallest].pm)
            smallest = slot;
        if (pass && (chosen < 0 || p.pm < pool_[chosen].pm))
            chosen = slot;
    }
    out.status = chosen >= 0 ? DecodeOutcome::Status::CrcPass
                             : DecodeOutcome::Status::CrcFail;
    if (chosen < 0)
        chosen = smallest;
    out.u_hat = pool_[chosen].u;
    out.payload = extract_payload(out.u_hat);
    finalize_list();
    return out;
}

} // namespace polar
