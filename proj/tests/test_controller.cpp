#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "polar/channel.hpp"
#include "polar/cnp.hpp"
#include "polar/controller.hpp"
#include "polar/encoder.hpp"
#include "test_util.hpp"

using namespace polar;

namespace {

CodeSpec spec_n64(int n_pc, int list_size) {
    CodeSpecParams p;
    p.n = 64;
    p.k = 24;
    p.n_pc = n_pc;
    p.list_size = list_size;
    p.crc_poly = 0x13;
    return build_code_spec(p);
}

std::vector<double> noisy_frame(const CodeSpec& spec, double ebno_db,
                                std::uint64_t seed, std::uint64_t frame,
                                std::vector<std::uint8_t>* payload_out = nullptr) {
    FrameRng rng = FrameRng::for_frame(seed, frame);
    std::vector<std::uint8_t> payload(spec.k);
    rng.fill_bits(payload);
    auto x = encode(payload, spec);
    auto s = modulate(x);
    double sigma2 = noise_sigma2(ebno_db, double(spec.k) / spec.n);
    auto y = add_noise(s, sigma2, rng);
    if (payload_out)
        *payload_out = payload;
    return channel_llrs(y, sigma2);
}

struct ScoredSet {
    std::vector<int> indices;
    double metric;
};

bool key_less(const ScoredSet& a, const ScoredSet& b) {
    if (a.metric != b.metric)
        return a.metric < b.metric;
    if (a.indices.back() != b.indices.back())
        return a.indices.back() < b.indices.back();
    return a.indices < b.indices;
}

double oracle_penalty(double x, const MetricParams& params) {
    if (params.kind == MetricKind::SimplifiedMstar)
        return std::abs(x) <= params.z ? 1.0 : 0.0;
    return std::log(1.0 + std::exp(-params.beta * x)) / params.beta;
}

// Extension score: the executed set keeps its stored metric; the new pass
// contributes E(j) plus the penalties over the fresh tail (i_t, j].
double oracle_extend(const ScoredSet& base, int j, const std::vector<double>& e,
                     const CodeSpec& spec, const MetricParams& params) {
    double tail = 0.0;
    for (int k : spec.selection_bits)
        if (k > base.indices.back() && k <= j)
            tail += oracle_penalty(e[k], params);
    return base.metric + e[j] + tail;
}

// Reachable-family oracle for two update rounds: rank all eligible
// singletons (first-round E values), then all one-index extensions of the
// executed best singleton (scored incrementally with the second-round
// E values), and keep the T best.
std::vector<ScoredSet> two_round_oracle(const CodeSpec& spec,
                                        const std::vector<double>& e0,
                                        const std::vector<double>& e1,
                                        const MetricParams& params, int T,
                                        int omega) {
    std::vector<ScoredSet> singles;
    for (int j : spec.flip_eligible) {
        ScoredSet s{{j}, flip_set_metric(std::vector<int>{j}, e0,
                                         spec.selection_bits, params)};
        singles.push_back(std::move(s));
    }
    std::sort(singles.begin(), singles.end(), key_less);
    if (static_cast<int>(singles.size()) > T)
        singles.resize(T);
    REQUIRE(!singles.empty());
    ScoredSet executed = singles.front();

    std::vector<ScoredSet> family = singles;
    if (static_cast<int>(executed.indices.size()) < omega) {
        for (int j : spec.flip_eligible) {
            if (j <= executed.indices.back())
                continue;
            std::vector<int> ext = executed.indices;
            ext.push_back(j);
            double m = oracle_extend(executed, j, e1, spec, params);
            family.push_back(ScoredSet{std::move(ext), m});
        }
    }
    std::sort(family.begin(), family.end(), key_less);
    if (static_cast<int>(family.size()) > T)
        family.resize(T);
    return family;
}

DecoderConfig dsclf_config(int L, int T, MetricKind kind) {
    DecoderConfig c;
    c.kind = DecoderKind::Dsclf;
    c.list_size = L;
    c.max_attempts = T;
    c.max_flip_order = 2;
    c.metric.kind = kind;
    return c;
}

} // namespace

TEST_SUITE("controller") {

TEST_CASE("flip list keeps sorted order and capacity") {
    FlipList list(3);
    auto mk = [](std::vector<int> idx, double m) {
        FlipSet s;
        s.indices = std::move(idx);
        s.metric = m;
        return s;
    };
    list.insert(mk({5}, 3.0));
    list.insert(mk({7}, 1.0));
    list.insert(mk({9}, 2.0));
    CHECK(list.size() == 3);
    CHECK(list.at(0).metric == 1.0);
    CHECK(list.at(1).metric == 2.0);
    CHECK(list.at(2).metric == 3.0);

    // worse than the current worst: rejected
    list.insert(mk({11}, 4.0));
    CHECK(list.size() == 3);
    CHECK(list.at(2).metric == 3.0);

    // better: inserted, worst evicted
    list.insert(mk({11}, 1.5));
    CHECK(list.at(1).indices == std::vector<int>{11});
    CHECK(list.at(2).metric == 2.0);

    // ties break toward the smaller last index
    list.insert(mk({3}, 1.5));
    CHECK(list.at(1).indices == std::vector<int>{3});
}

TEST_CASE("first update with equal E values picks the earliest eligible bits") {
    auto spec = spec_n64(0, 4);
    DecoderConfig config = dsclf_config(4, 4, MetricKind::SimplifiedMstar);
    std::vector<double> e(spec.n, std::numeric_limits<double>::quiet_NaN());
    for (int j : spec.selection_bits)
        e[j] = 2.0; // all equal, below z
    FlipList list(4);
    update_flip_list(list, 0, nullptr, e, spec.n, spec, config);
    REQUIRE(list.size() == 4);
    for (int i = 0; i < 4; ++i)
        CHECK(list.at(i).indices == std::vector<int>{spec.flip_eligible[i]});
}

TEST_CASE("second-round insertion respects the current-worst threshold") {
    auto spec = spec_n64(0, 4);
    DecoderConfig config = dsclf_config(4, 3, MetricKind::SimplifiedMstar);
    // First round: singletons with distinct metrics.
    std::vector<double> e0(spec.n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < spec.selection_bits.size(); ++i)
        e0[spec.selection_bits[i]] = 6.0 + static_cast<double>(i); // all above z
    FlipList list(3);
    update_flip_list(list, 0, nullptr, e0, spec.n, spec, config);
    REQUIRE(list.size() == 3);
    double worst = list.at(2).metric;
    FlipSet executed = list.at(0);

    // Second round: make every extension worse than the current worst.
    std::vector<double> e1(spec.n, std::numeric_limits<double>::quiet_NaN());
    for (int j : spec.selection_bits)
        e1[j] = worst + 100.0;
    auto before = list.sets();
    update_flip_list(list, 1, &executed, e1, spec.n, spec, config);
    REQUIRE(list.size() == static_cast<int>(before.size()));
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(list.at(static_cast<int>(i)).indices == before[i].indices);
        CHECK(list.at(static_cast<int>(i)).metric == before[i].metric);
    }
}

TEST_CASE("two update rounds match the exhaustive order<=2 ranking") {
    auto spec = spec_n64(0, 4);
    std::mt19937_64 rng(2029);
    std::uniform_real_distribution<double> ev(0.01, 14.0);
    for (auto kind : {MetricKind::SimplifiedMstar, MetricKind::OriginalMbeta}) {
        DecoderConfig config = dsclf_config(4, 8, kind);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> e0(spec.n, std::numeric_limits<double>::quiet_NaN());
            std::vector<double> e1(spec.n, std::numeric_limits<double>::quiet_NaN());
            for (int j : spec.selection_bits) {
                e0[j] = ev(rng);
                e1[j] = ev(rng);
            }
            FlipList list(8);
            update_flip_list(list, 0, nullptr, e0, spec.n, spec, config);
            REQUIRE(list.size() > 0);
            FlipSet executed = list.at(0);
            update_flip_list(list, 1, &executed, e1, spec.n, spec, config);

            auto want = two_round_oracle(spec, e0, e1, config.metric, 8, 2);
            REQUIRE(list.size() == static_cast<int>(want.size()));
            for (int i = 0; i < list.size(); ++i) {
                CHECK(list.at(i).indices == want[i].indices);
                CHECK(list.at(i).metric ==
                      doctest::Approx(want[i].metric).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("updates never touch already-executed entries") {
    auto spec = spec_n64(0, 4);
    DecoderConfig config = dsclf_config(4, 6, MetricKind::SimplifiedMstar);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ev(0.01, 12.0);
    std::vector<double> e(spec.n, std::numeric_limits<double>::quiet_NaN());
    for (int j : spec.selection_bits)
        e[j] = ev(rng);
    FlipList list(6);
    update_flip_list(list, 0, nullptr, e, spec.n, spec, config);
    auto first = list.at(0);
    for (int t = 1; t <= 2; ++t) {
        FlipSet executed = list.at(t - 1);
        for (int j : spec.selection_bits)
            e[j] = ev(rng);
        update_flip_list(list, t, &executed, e, spec.n, spec, config);
        CHECK(list.at(0).indices == first.indices);
        // inserted sets rank strictly after the set they extend
        for (int i = t; i < list.size(); ++i)
            CHECK(list.at(i).metric >= executed.metric);
    }
}

TEST_CASE("breakpoint caps the candidate range") {
    auto spec = spec_n64(0, 4);
    DecoderConfig config = dsclf_config(4, 16, MetricKind::SimplifiedMstar);
    std::vector<double> e(spec.n, std::numeric_limits<double>::quiet_NaN());
    int cutoff = spec.flip_eligible[spec.flip_eligible.size() / 2];
    for (int j : spec.selection_bits) {
        if (j <= cutoff)
            e[j] = 1.0;
    }
    FlipList list(16);
    update_flip_list(list, 0, nullptr, e, cutoff, spec, config);
    CHECK(list.size() > 0);
    for (int i = 0; i < list.size(); ++i)
        CHECK(list.at(i).indices.back() <= cutoff);
}

TEST_CASE("noiseless frame: success on the initial attempt at baseline cost") {
    auto spec = spec_n64(3, 4);
    DecoderConfig config;
    config.kind = DecoderKind::PcDsclf;
    config.list_size = 4;
    config.max_attempts = 8;
    FrameDecoder dec(spec, config);
    std::mt19937_64 rng(55);
    auto payload = test_util::random_bits(rng, spec.k);
    auto llr = noiseless_llrs(encode(payload, spec));
    auto res = dec.decode(llr);
    CHECK(res.crc_ok);
    CHECK(res.payload == payload);
    CHECK(res.additional_attempts == 0);
    CHECK(res.cnp_total == count_cnp(static_cast<int>(spec.nonfrozen.size()), 4));
    CHECK(res.early_terminations == 0);
}

TEST_CASE("T=0 behaves exactly like CA-SCL") {
    auto spec = spec_n64(0, 4);
    DecoderConfig ca;
    ca.kind = DecoderKind::CaScl;
    ca.list_size = 4;
    DecoderConfig flip0 = dsclf_config(4, 0, MetricKind::SimplifiedMstar);
    FrameDecoder a(spec, ca);
    FrameDecoder b(spec, flip0);
    for (std::uint64_t f = 0; f < 200; ++f) {
        auto llr = noisy_frame(spec, 1.0, 99, f);
        auto ra = a.decode(llr);
        auto rb = b.decode(llr);
        CHECK(ra.payload == rb.payload);
        CHECK(ra.crc_ok == rb.crc_ok);
        CHECK(ra.cnp_total == rb.cnp_total);
        CHECK(ra.additional_attempts == 0);
        CHECK(rb.additional_attempts == 0);
    }
}

TEST_CASE("pc-dsclf with n_pc=0 equals dsclf bit for bit") {
    auto spec = spec_n64(0, 4);
    DecoderConfig d = dsclf_config(4, 6, MetricKind::SimplifiedMstar);
    DecoderConfig p = d;
    p.kind = DecoderKind::PcDsclf;
    FrameDecoder dsclf(spec, d);
    FrameDecoder pcdsclf(spec, p);
    for (std::uint64_t f = 0; f < 300; ++f) {
        auto llr = noisy_frame(spec, 0.5, 4242, f);
        auto ra = dsclf.decode(llr);
        auto rb = pcdsclf.decode(llr);
        CHECK(ra.payload == rb.payload);
        CHECK(ra.crc_ok == rb.crc_ok);
        CHECK(ra.additional_attempts == rb.additional_attempts);
        CHECK(ra.cnp_total == rb.cnp_total);
    }
}

TEST_CASE("both metric variants correct initial failures via flips") {
    auto spec = spec_n64(0, 4);
    FrameDecoder fb(spec, dsclf_config(4, 8, MetricKind::OriginalMbeta));
    FrameDecoder fs(spec, dsclf_config(4, 8, MetricKind::SimplifiedMstar));
    int corrected_b = 0, corrected_s = 0;
    for (std::uint64_t f = 0; f < 500; ++f) {
        std::vector<std::uint8_t> payload;
        auto llr = noisy_frame(spec, 1.5, 17, f, &payload);
        auto rb = fb.decode(llr);
        auto rs = fs.decode(llr);
        if (rb.crc_ok && rb.additional_attempts > 0 && rb.payload == payload)
            ++corrected_b;
        if (rs.crc_ok && rs.additional_attempts > 0 && rs.payload == payload)
            ++corrected_s;
    }
    CHECK(corrected_b > 0);
    CHECK(corrected_s > 0);
}

TEST_CASE("a frame whose top flip candidate is the true first error succeeds "
          "on attempt one, matching a step-by-step trace") {
    auto spec = spec_n64(0, 4);
    DecoderConfig config = dsclf_config(4, 8, MetricKind::SimplifiedMstar);
    SclDecoder scl(spec, 4);
    FrameDecoder dec(spec, config);

    bool found = false;
    for (std::uint64_t f = 0; f < 3000 && !found; ++f) {
        std::vector<std::uint8_t> payload;
        auto llr = noisy_frame(spec, 1.25, 20250808, f, &payload);
        auto first = scl.decode(llr, {}, {});
        if (first.status != DecodeOutcome::Status::CrcFail)
            continue;

        // hand-executed first update: rank eligible singletons by metric
        std::vector<ScoredSet> singles;
        for (int j : spec.flip_eligible) {
            singles.push_back(ScoredSet{
                {j}, flip_set_metric(std::vector<int>{j}, first.e_values,
                                     spec.selection_bits, config.metric)});
        }
        std::sort(singles.begin(), singles.end(), key_less);
        auto second = scl.decode(llr, singles.front().indices, {});
        if (second.status != DecodeOutcome::Status::CrcPass ||
            second.payload != payload)
            continue;

        found = true;
        auto res = dec.decode(llr);
        CHECK(res.crc_ok);
        CHECK(res.additional_attempts == 1);
        CHECK(res.payload == payload);
        REQUIRE(res.attempts.size() == 2);
        CHECK(res.attempts[1].flips == singles.front().indices);
        CHECK(res.attempts[1].metric == doctest::Approx(singles.front().metric));
        CHECK(res.cnp_total == first.cnp + second.cnp);
    }
    CHECK(found);
}

TEST_CASE("attempt metrics are non-decreasing and flip sets never repeat") {
    auto spec = spec_n64(3, 4);
    DecoderConfig config;
    config.kind = DecoderKind::PcDsclf;
    config.list_size = 4;
    config.max_attempts = 12;
    FrameDecoder dec(spec, config);
    int multi_attempt_frames = 0;
    for (std::uint64_t f = 0; f < 400; ++f) {
        auto llr = noisy_frame(spec, 0.5, 321, f);
        auto res = dec.decode(llr);
        if (res.attempts.size() > 2)
            ++multi_attempt_frames;
        std::set<std::vector<int>> seen;
        for (std::size_t t = 1; t < res.attempts.size(); ++t) {
            const auto& rec = res.attempts[t];
            CHECK(!seen.count(rec.flips));
            seen.insert(rec.flips);
            CHECK(static_cast<int>(rec.flips.size()) <= config.max_flip_order);
            if (t >= 2)
                CHECK(rec.metric >= res.attempts[t - 1].metric);
            for (int j : rec.flips) {
                CHECK(!spec.frozen_mask[j]);
                CHECK(spec.role[j] == BitRole::Payload);
                CHECK(std::find(spec.a_prime.begin(), spec.a_prime.end(), j) ==
                      spec.a_prime.end());
            }
        }
    }
    CHECK(multi_attempt_frames > 0);
}

TEST_CASE("early-terminated attempts cost only the visited prefix") {
    auto spec = spec_n64(3, 4);
    DecoderConfig config;
    config.kind = DecoderKind::PcDsclf;
    config.list_size = 4;
    config.max_attempts = 10;
    FrameDecoder dec(spec, config);
    int early_attempts = 0;
    for (std::uint64_t f = 0; f < 400; ++f) {
        auto llr = noisy_frame(spec, 0.0, 654, f);
        auto res = dec.decode(llr);
        std::uint64_t total = 0;
        for (const auto& rec : res.attempts) {
            CHECK(rec.cnp == count_cnp(rec.visited_nonfrozen, 4));
            if (rec.status == DecodeOutcome::Status::PcEarlyTermination) {
                CHECK(rec.cnp <
                      count_cnp(static_cast<int>(spec.nonfrozen.size()), 4));
                ++early_attempts;
            }
            total += rec.cnp;
        }
        CHECK(res.cnp_total == total);
        CHECK(res.early_terminations ==
              std::count_if(res.attempts.begin(), res.attempts.end(),
                            [](const AttemptRecord& r) {
                                return r.status ==
                                       DecodeOutcome::Status::PcEarlyTermination;
                            }));
    }
    CHECK(early_attempts > 0);
}

TEST_CASE("configuration validation") {
    auto plain = spec_n64(0, 4);
    auto with_pc = spec_n64(3, 4);
    DecoderConfig bad;
    bad.kind = DecoderKind::CaScl;
    bad.max_attempts = 3;
    CHECK_THROWS_AS(FrameDecoder(plain, bad), std::invalid_argument);

    DecoderConfig dsclf_on_pc = dsclf_config(4, 4, MetricKind::SimplifiedMstar);
    CHECK_THROWS_AS(FrameDecoder(with_pc, dsclf_on_pc), std::invalid_argument);
}

} // TEST_SUITE
