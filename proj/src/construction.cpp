#include "polar/construction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polar {

namespace {

// Two-branch approximation of phi(x) = 1 - E[tanh(L/2)] for L ~ N(x, 2x),
// split at x = 10.
constexpr double kPhiSplit = 10.0;
constexpr double kPhiA = 0.4527;
constexpr double kPhiB = 0.86;
constexpr double kPhiC = 0.0218;
// Mean assigned when phi underflows to zero (never reached for n <= 1024
// at the design SNRs used here).
constexpr double kMeanCap = 1e12;

double phi(double x) {
    if (x < kPhiSplit)
        return std::exp(-kPhiA * std::pow(x, kPhiB) + kPhiC);
    return std::sqrt(M_PI / x) * std::exp(-x / 4.0) * (1.0 - 10.0 / (7.0 * x));
}

double log_phi_large(double x) {
    return 0.5 * (std::log(M_PI) - std::log(x)) - x / 4.0 + std::log1p(-10.0 / (7.0 * x));
}

double phi_inv(double y) {
    if (y <= 0.0)
        return kMeanCap;
    static const double phi_at_split = std::exp(-kPhiA * std::pow(kPhiSplit, kPhiB) + kPhiC);
    if (y >= phi_at_split)
        return std::pow((kPhiC - std::log(y)) / kPhiA, 1.0 / kPhiB);
    const double log_y = std::log(y);
    double lo = kPhiSplit, hi = 20.0;
    while (log_phi_large(hi) > log_y)
        hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (log_phi_large(mid) > log_y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double check_combine(double m) {
    double z = phi(m);
    return phi_inv(2.0 * z - z * z); // stable form of 1-(1-z)^2 for tiny z
}

void collect_rate1_first_leaves(const std::vector<std::uint8_t>& frozen, int lo,
                                int size, std::vector<int>& out) {
    bool all_nonfrozen = true;
    for (int i = lo; i < lo + size; ++i) {
        if (frozen[i]) {
            all_nonfrozen = false;
            break;
        }
    }
    if (all_nonfrozen) {
        out.push_back(lo);
        return;
    }
    if (size == 1)
        return;
    collect_rate1_first_leaves(frozen, lo, size / 2, out);
    collect_rate1_first_leaves(frozen, lo + size / 2, size / 2, out);
}

void require_power_of_two(int n) {
    if (n < 2 || !std::has_single_bit(static_cast<unsigned>(n)))
        throw std::invalid_argument("code length must be a power of two >= 2");
}

} // namespace

int CodeSpec::log2_list() const { return std::countr_zero(static_cast<unsigned>(list_size)); }

std::vector<double> ga_mean_llrs(int n, double design_snr_db, double design_rate) {
    require_power_of_two(n);
    if (!std::isfinite(design_snr_db))
        throw std::invalid_argument("design snr must be finite");
    if (!(design_rate > 0.0) || design_rate > 1.0)
        throw std::invalid_argument("design rate must be in (0, 1]");
    std::vector<double> means{4.0 * design_rate *
                              std::pow(10.0, design_snr_db / 10.0)};
    while (static_cast<int>(means.size()) < n) {
        std::vector<double> next(means.size() * 2);
        for (std::size_t i = 0; i < means.size(); ++i) {
            next[2 * i] = check_combine(means[i]);
            next[2 * i + 1] = 2.0 * means[i];
        }
        means.swap(next);
    }
    return means;
}

std::vector<int> reliability_order(int n, double design_snr_db, double design_rate) {
    std::vector<double> means = ga_mean_llrs(n, design_snr_db, design_rate);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (means[a] != means[b])
            return means[a] > means[b];
        return a < b;
    });
    return order;
}

std::vector<int> critical_set(const std::vector<std::uint8_t>& frozen_mask) {
    require_power_of_two(static_cast<int>(frozen_mask.size()));
    std::vector<int> out;
    collect_rate1_first_leaves(frozen_mask, 0, static_cast<int>(frozen_mask.size()), out);
    return out;
}

SegmentPlan segment_plan(int n_ps, int n_pc, PcAllocation variant) {
    if (n_pc < 1 || n_ps < 1)
        throw std::invalid_argument("segment_plan: need n_pc >= 1 and n_ps >= 1");
    SegmentPlan plan;
    plan.segments = variant == PcAllocation::Improved ? n_pc + 1 : n_pc;
    plan.q_down = n_ps / plan.segments;
    plan.q_up = (n_ps + plan.segments - 1) / plan.segments;
    if (plan.q_down < 1)
        throw std::invalid_argument("segment_plan: empty segment, too many PC bits");
    plan.c1 = n_ps - plan.q_down * plan.segments;
    plan.c2 = plan.segments - plan.c1;
    return plan;
}

std::vector<PcConstraint> allocate_pc_bits(const std::vector<int>& critical,
                                           int n_pc, PcAllocation variant) {
    if (n_pc == 0)
        return {};
    SegmentPlan plan = segment_plan(static_cast<int>(critical.size()), n_pc, variant);
    std::vector<PcConstraint> map;
    map.reserve(n_pc);
    int off = 0;
    for (int i = 0; i < n_pc; ++i) {
        int len = i < plan.c1 ? plan.q_up : plan.q_down;
        PcConstraint pc;
        pc.position = critical[off + len - 1];
        pc.protects.assign(critical.begin() + off, critical.begin() + off + len - 1);
        map.push_back(std::move(pc));
        off += len;
    }
    return map;
}

CodeSpec build_code_spec(const CodeSpecParams& params) {
    require_power_of_two(params.n);
    if (params.list_size < 1 || !std::has_single_bit(static_cast<unsigned>(params.list_size)))
        throw std::invalid_argument("list size must be a power of two >= 1");

    CodeSpec spec;
    spec.n = params.n;
    spec.k = params.k;
    spec.n_pc = params.n_pc;
    spec.list_size = params.list_size;
    spec.variant = params.variant;
    spec.design_snr_db = params.design_snr_db;
    if (params.crc_poly != 0) {
        spec.crc = Crc(params.crc_poly);
        spec.n_crc = spec.crc.length();
    }

    const int n_a = spec.k + spec.n_crc + spec.n_pc;
    if (spec.k < 1 || params.n_pc < 0)
        throw std::invalid_argument("need k >= 1 and n_pc >= 0");
    if (n_a > spec.n)
        throw std::invalid_argument("rate too high: k + n_crc + n_pc exceeds code length");
    if (spec.log2_list() > n_a)
        throw std::invalid_argument("list size too large for the number of non-frozen bits");

    std::vector<int> order = reliability_order(
        spec.n, spec.design_snr_db, static_cast<double>(spec.k) / spec.n);
    spec.nonfrozen.assign(order.begin(), order.begin() + n_a);
    std::sort(spec.nonfrozen.begin(), spec.nonfrozen.end());
    spec.frozen_mask.assign(spec.n, 1);
    for (int i : spec.nonfrozen)
        spec.frozen_mask[i] = 0;

    spec.a_prime.assign(spec.nonfrozen.begin(), spec.nonfrozen.begin() + spec.log2_list());
    spec.crc_pos.assign(spec.nonfrozen.end() - spec.n_crc, spec.nonfrozen.end());

    spec.critical = critical_set(spec.frozen_mask);
    if (spec.n_pc > 0) {
        if (spec.n_pc >= static_cast<int>(spec.critical.size()))
            throw std::invalid_argument("n_pc exceeds critical-set capacity");
        spec.pc_map = allocate_pc_bits(spec.critical, spec.n_pc, spec.variant);
    }

    spec.role.assign(spec.n, BitRole::Frozen);
    spec.pc_ordinal.assign(spec.n, -1);
    spec.protected_by.assign(spec.n, -1);
    for (int i : spec.nonfrozen)
        spec.role[i] = BitRole::Payload;
    for (int i : spec.crc_pos)
        spec.role[i] = BitRole::Crc;
    for (std::size_t o = 0; o < spec.pc_map.size(); ++o) {
        const PcConstraint& pc = spec.pc_map[o];
        if (spec.role[pc.position] == BitRole::Crc)
            throw std::invalid_argument("PC position collides with a CRC position");
        if (spec.role[pc.position] == BitRole::Pc)
            throw std::invalid_argument("duplicate PC position");
        spec.role[pc.position] = BitRole::Pc;
        spec.pc_ordinal[pc.position] = static_cast<std::int16_t>(o);
        for (int p : pc.protects) {
            if (p >= pc.position)
                throw std::invalid_argument("PC bit must follow the positions it protects");
            spec.protected_by[p] = static_cast<std::int16_t>(o);
        }
    }
    for (int i : spec.a_prime)
        if (spec.role[i] == BitRole::Pc)
            throw std::invalid_argument("PC position falls inside the list warm-up prefix");

    for (int i : spec.nonfrozen) {
        if (spec.role[i] == BitRole::Payload)
            spec.payload_pos.push_back(i);
        if (spec.role[i] != BitRole::Pc)
            spec.crc_covered.push_back(i);
    }
    if (static_cast<int>(spec.payload_pos.size()) != spec.k)
        throw std::logic_error("payload position count mismatch");

    const int lg = spec.log2_list();
    for (std::size_t idx = 0; idx < spec.nonfrozen.size(); ++idx) {
        if (static_cast<int>(idx) < lg)
            continue;
        int i = spec.nonfrozen[idx];
        spec.selection_bits.push_back(i);
        if (spec.role[i] == BitRole::Payload)
            spec.flip_eligible.push_back(i);
    }
    return spec;
}

} // namespace polar
