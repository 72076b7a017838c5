#include "polar/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "polar/channel.hpp"
#include "polar/encoder.hpp"
#include "polar/numeric.hpp"

namespace polar {

namespace {

constexpr std::int64_t kChunkFrames = 4096; // stopping-rule granularity

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
    throw ConfigError(name + ":" + std::to_string(line) + ": " + what);
}

std::int64_t parse_int(const std::string& v, const std::string& name, int line,
                       const std::string& key) {
    try {
        std::size_t used = 0;
        std::int64_t out = std::stoll(v, &used, 0);
        if (used != v.size())
            fail(name, line, "key '" + key + "': trailing characters in '" + v + "'");
        return out;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(name, line, "key '" + key + "': expected an integer, got '" + v + "'");
    }
}

double parse_real(const std::string& v, const std::string& name, int line,
                  const std::string& key) {
    try {
        std::size_t used = 0;
        double out = std::stod(v, &used);
        if (used != v.size())
            fail(name, line, "key '" + key + "': trailing characters in '" + v + "'");
        return out;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(name, line, "key '" + key + "': expected a number, got '" + v + "'");
    }
}

MetricKind parse_metric(const std::string& v, const std::string& name, int line) {
    if (v == "fstar")
        return MetricKind::SimplifiedMstar;
    if (v == "fbeta")
        return MetricKind::OriginalMbeta;
    fail(name, line, "metric_kind must be 'fstar' or 'fbeta', got '" + v + "'");
}

PcAllocation parse_variant(const std::string& v, const std::string& name, int line) {
    if (v == "improved")
        return PcAllocation::Improved;
    if (v == "original")
        return PcAllocation::Original;
    fail(name, line, "allocation_variant must be 'improved' or 'original', got '" + v + "'");
}

DecoderKind parse_kind(const std::string& v, const std::string& name, int line) {
    if (v == "ca-scl")
        return DecoderKind::CaScl;
    if (v == "dsclf")
        return DecoderKind::Dsclf;
    if (v == "pc-dsclf")
        return DecoderKind::PcDsclf;
    fail(name, line, "unknown decoder kind '" + v + "'");
}

// Keys settable both at file level and inside a decoder entry.
bool apply_shared_key(DecoderDefaults& d, const std::string& key,
                      const std::string& value, const std::string& name, int line) {
    if (key == "L") {
        int L = static_cast<int>(parse_int(value, name, line, key));
        d.decoder.list_size = L;
        d.code.list_size = L;
    } else if (key == "T") {
        d.decoder.max_attempts = static_cast<int>(parse_int(value, name, line, key));
    } else if (key == "omega") {
        d.decoder.max_flip_order = static_cast<int>(parse_int(value, name, line, key));
    } else if (key == "z") {
        d.decoder.metric.z = static_cast<int>(parse_int(value, name, line, key));
    } else if (key == "beta") {
        d.decoder.metric.beta = parse_real(value, name, line, key);
    } else if (key == "alpha") {
        d.decoder.metric.alpha = parse_real(value, name, line, key);
    } else if (key == "metric_kind") {
        d.decoder.metric.kind = parse_metric(value, name, line);
    } else if (key == "allocation_variant") {
        d.code.variant = parse_variant(value, name, line);
    } else if (key == "n_pc") {
        d.code.n_pc = static_cast<int>(parse_int(value, name, line, key));
    } else if (key == "n_crc") {
        d.declared_n_crc = static_cast<int>(parse_int(value, name, line, key));
    } else if (key == "crc_poly") {
        d.code.crc_poly = static_cast<std::uint64_t>(parse_int(value, name, line, key));
    } else if (key == "prune_pc_failing_paths") {
        d.decoder.prune_pc_failing_paths = parse_int(value, name, line, key) != 0;
    } else {
        return false;
    }
    return true;
}

std::string default_label(const DecoderSetup& s) {
    std::string label = decoder_kind_name(s.decoder.kind);
    label += "-L" + std::to_string(s.decoder.list_size);
    if (s.decoder.kind != DecoderKind::CaScl) {
        label += "-T" + std::to_string(s.decoder.max_attempts);
        label += s.decoder.metric.kind == MetricKind::SimplifiedMstar ? "-fstar"
                                                                      : "-fbeta";
    }
    return label;
}

// Splits "kind(k=v, ...), kind, ..." on top-level commas.
std::vector<std::string> split_entries(const std::string& text) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : text) {
        if (c == '(')
            ++depth;
        if (c == ')')
            --depth;
        if (c == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty())
        out.push_back(cur);
    return out;
}

DecoderSetup parse_decoder_entry(const std::string& entry,
                                 const DecoderDefaults& defaults,
                                 const std::string& name, int line) {
    DecoderSetup setup;
    DecoderDefaults d = defaults;
    std::string text = trim(entry);
    std::string kind = text;
    std::string label;

    std::size_t paren = text.find('(');
    if (paren != std::string::npos) {
        if (text.back() != ')')
            fail(name, line, "decoder entry '" + text + "': missing ')'");
        kind = trim(text.substr(0, paren));
        std::string inner = text.substr(paren + 1, text.size() - paren - 2);
        for (const std::string& item : split_entries(inner)) {
            std::string kv = trim(item);
            std::size_t eq = kv.find('=');
            if (eq == std::string::npos)
                fail(name, line, "decoder entry option '" + kv + "': expected key=value");
            std::string key = trim(kv.substr(0, eq));
            std::string value = trim(kv.substr(eq + 1));
            if (key == "label") {
                label = value;
            } else if (!apply_shared_key(d, key, value, name, line)) {
                fail(name, line, "decoder entry: unknown key '" + key + "'");
            }
        }
    }
    setup.decoder = d.decoder;
    setup.decoder.kind = parse_kind(kind, name, line);
    setup.code = d.code;
    if (setup.decoder.kind != DecoderKind::PcDsclf && setup.code.n_pc != 0)
        fail(name, line, "decoder '" + kind + "': PC bits require pc-dsclf");
    if (setup.decoder.kind == DecoderKind::CaScl)
        setup.decoder.max_attempts = 0;
    if (d.declared_n_crc >= 0) {
        int actual = setup.code.crc_poly ? Crc(setup.code.crc_poly).length() : 0;
        if (actual != d.declared_n_crc)
            fail(name, line, "n_crc does not match the degree of crc_poly");
    }
    setup.label = label.empty() ? default_label(setup) : label;
    return setup;
}

} // namespace

std::vector<double> SimConfig::ebno_grid() const {
    std::vector<double> grid;
    if (ebno_step <= 0.0)
        throw ConfigError("ebno_step must be positive");
    for (double e = ebno_start; e <= ebno_stop + 1e-9; e += ebno_step)
        grid.push_back(e);
    return grid;
}

void SimConfig::prepare() {
    for (DecoderSetup& s : decoders) {
        s.code.n = n;
        s.code.k = k;
        s.code.design_snr_db = design_snr_db;
        // Reuse an identical spec if one was already built.
        std::shared_ptr<const CodeSpec> found;
        for (const DecoderSetup& prev : decoders) {
            if (!prev.spec)
                continue;
            if (prev.code.n == s.code.n && prev.code.k == s.code.k &&
                prev.code.n_pc == s.code.n_pc &&
                prev.code.list_size == s.code.list_size &&
                prev.code.variant == s.code.variant &&
                prev.code.crc_poly == s.code.crc_poly &&
                prev.code.design_snr_db == s.code.design_snr_db) {
                found = prev.spec;
                break;
            }
        }
        s.spec = found ? found
                       : std::make_shared<const CodeSpec>(build_code_spec(s.code));
    }
}

SimConfig parse_sim_config(const std::string& text, const std::string& name) {
    SimConfig config;
    bool have_n = false, have_k = false, have_start = false, have_stop = false;
    std::string decoders_value;
    int decoders_line = 0;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        std::size_t hash = s.find('#');
        if (hash != std::string::npos)
            s = s.substr(0, hash);
        s = trim(s);
        if (s.empty())
            continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            fail(name, line, "expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty())
            fail(name, line, "expected 'key = value'");

        if (key == "N") {
            config.n = static_cast<int>(parse_int(value, name, line, key));
            have_n = true;
        } else if (key == "K") {
            config.k = static_cast<int>(parse_int(value, name, line, key));
            have_k = true;
        } else if (key == "ebno_start") {
            config.ebno_start = parse_real(value, name, line, key);
            have_start = true;
        } else if (key == "ebno_stop") {
            config.ebno_stop = parse_real(value, name, line, key);
            have_stop = true;
        } else if (key == "ebno_step") {
            config.ebno_step = parse_real(value, name, line, key);
        } else if (key == "design_snr_db") {
            config.design_snr_db = parse_real(value, name, line, key);
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(parse_int(value, name, line, key));
        } else if (key == "max_frames") {
            config.max_frames = parse_int(value, name, line, key);
        } else if (key == "target_errors") {
            config.target_errors = parse_int(value, name, line, key);
        } else if (key == "decoders") {
            decoders_value = value;
            decoders_line = line;
        } else if (apply_shared_key(config.defaults, key, value, name, line)) {
        } else {
            fail(name, line, "unknown key '" + key + "'");
        }
    }

    if (!have_n)
        fail(name, 0, "missing required key 'N'");
    if (!have_k)
        fail(name, 0, "missing required key 'K'");
    if (!have_start)
        fail(name, 0, "missing required key 'ebno_start'");
    if (!have_stop)
        config.ebno_stop = config.ebno_start;
    if (decoders_value.empty())
        fail(name, 0, "missing required key 'decoders'");

    for (const std::string& entry : split_entries(decoders_value))
        config.decoders.push_back(
            parse_decoder_entry(entry, config.defaults, name, decoders_line));
    for (std::size_t i = 0; i < config.decoders.size(); ++i)
        for (std::size_t j = i + 1; j < config.decoders.size(); ++j)
            if (config.decoders[i].label == config.decoders[j].label)
                fail(name, decoders_line,
                     "duplicate decoder label '" + config.decoders[i].label +
                         "' (disambiguate with label=...)");
    return config;
}

SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sim_config(ss.str(), path);
}

void apply_override(SimConfig& config, const std::string& key,
                    const std::string& value) {
    const std::string name = "<cli>";
    if (key == "decoders") {
        config.decoders.clear();
        for (const std::string& entry : split_entries(value))
            config.decoders.push_back(
                parse_decoder_entry(entry, config.defaults, name, 0));
        return;
    }
    if (key == "N" || key == "K" || key == "ebno_start" || key == "ebno_stop" ||
        key == "ebno_step" || key == "design_snr_db" || key == "seed" ||
        key == "max_frames" || key == "target_errors") {
        if (key == "N")
            config.n = static_cast<int>(parse_int(value, name, 0, key));
        else if (key == "K")
            config.k = static_cast<int>(parse_int(value, name, 0, key));
        else if (key == "ebno_start")
            config.ebno_start = parse_real(value, name, 0, key);
        else if (key == "ebno_stop")
            config.ebno_stop = parse_real(value, name, 0, key);
        else if (key == "ebno_step")
            config.ebno_step = parse_real(value, name, 0, key);
        else if (key == "design_snr_db")
            config.design_snr_db = parse_real(value, name, 0, key);
        else if (key == "seed")
            config.seed = static_cast<std::uint64_t>(parse_int(value, name, 0, key));
        else if (key == "max_frames")
            config.max_frames = parse_int(value, name, 0, key);
        else if (key == "target_errors")
            config.target_errors = parse_int(value, name, 0, key);
        return;
    }
    if (apply_shared_key(config.defaults, key, value, name, 0)) {
        // Shared keys propagate to every decoder entry.
        for (DecoderSetup& s : config.decoders) {
            DecoderDefaults d;
            d.decoder = s.decoder;
            d.code = s.code;
            apply_shared_key(d, key, value, name, 0);
            s.decoder = d.decoder;
            s.code = d.code;
        }
        return;
    }
    throw ConfigError("unknown config key '" + key + "'");
}

namespace {

struct PointAccumulator {
    std::int64_t frames = 0;
    std::int64_t errors = 0;
    std::uint64_t cnp_sum = 0;
    std::uint64_t attempts_sum = 0;
    std::int64_t early_terminations = 0;
    std::vector<std::int64_t> attempt_hist;
    std::uint64_t noise_checksum = 0;

    void merge(const PointAccumulator& o) {
        frames += o.frames;
        errors += o.errors;
        cnp_sum += o.cnp_sum;
        attempts_sum += o.attempts_sum;
        early_terminations += o.early_terminations;
        for (std::size_t i = 0; i < attempt_hist.size(); ++i)
            attempt_hist[i] += o.attempt_hist[i];
        noise_checksum ^= o.noise_checksum;
    }
};

void simulate_range(const DecoderSetup& setup, double sigma2, std::uint64_t seed,
                    std::int64_t first, std::int64_t last, FrameDecoder& dec,
                    PointAccumulator& acc) {
    const CodeSpec& spec = *setup.spec;
    std::vector<std::uint8_t> payload(spec.k);
    std::vector<double> noise(spec.n), llr(spec.n);

    for (std::int64_t frame = first; frame < last; ++frame) {
        FrameRng rng = FrameRng::for_frame(seed, static_cast<std::uint64_t>(frame));
        rng.fill_bits(payload);
        std::vector<std::uint8_t> x = encode(payload, spec);
        const double sigma = std::sqrt(sigma2);
        for (int i = 0; i < spec.n; ++i)
            noise[i] = sigma * rng.gauss();
        for (int i = 0; i < spec.n; ++i) {
            double y = (x[i] ? -1.0 : 1.0) + noise[i];
            llr[i] = 2.0 * y / sigma2;
        }
        FrameResult res = dec.decode(llr);

        acc.frames += 1;
        acc.errors += res.payload != payload ? 1 : 0;
        acc.cnp_sum += res.cnp_total;
        acc.attempts_sum += static_cast<std::uint64_t>(res.additional_attempts) + 1;
        acc.early_terminations += res.early_terminations;
        acc.attempt_hist[res.additional_attempts] += 1;
        acc.noise_checksum ^=
            fnv1a_add(fnv1a_init(), noise.data(), noise.size() * sizeof(double));
    }
}

SimRecord run_point(const DecoderSetup& setup, double ebno_db,
                    const SimConfig& config, int threads) {
    const CodeSpec& spec = *setup.spec;
    const double rate = static_cast<double>(spec.k) / spec.n;
    const double sigma2 = noise_sigma2(ebno_db, rate);
    const int hist_size = setup.decoder.max_attempts + 1;

    std::vector<FrameDecoder> workers;
    workers.reserve(threads);
    for (int w = 0; w < threads; ++w)
        workers.emplace_back(spec, setup.decoder);

    PointAccumulator total;
    total.attempt_hist.assign(hist_size, 0);

    std::int64_t done = 0;
    while (done < config.max_frames) {
        std::int64_t chunk_end = std::min(done + kChunkFrames, config.max_frames);
        std::int64_t count = chunk_end - done;
        std::vector<PointAccumulator> parts(threads);
        for (auto& p : parts)
            p.attempt_hist.assign(hist_size, 0);

        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) {
            std::int64_t a = done + count * w / threads;
            std::int64_t b = done + count * (w + 1) / threads;
            if (a == b)
                continue;
            pool.emplace_back([&, w, a, b] {
                simulate_range(setup, sigma2, config.seed, a, b, workers[w],
                               parts[w]);
            });
        }
        for (auto& th : pool)
            th.join();
        for (const auto& p : parts)
            total.merge(p);

        done = chunk_end;
        if (config.target_errors > 0 && total.errors >= config.target_errors)
            break;
    }

    SimRecord rec;
    rec.decoder = setup.label;
    rec.ebno_db = ebno_db;
    rec.frames = total.frames;
    rec.errors = total.errors;
    rec.cnp_sum = total.cnp_sum;
    rec.attempts_sum = total.attempts_sum;
    rec.early_terminations = total.early_terminations;
    rec.attempt_hist = total.attempt_hist;
    rec.noise_checksum = total.noise_checksum;
    return rec;
}

} // namespace

std::vector<SimRecord> run_sweep(const SimConfig& config, int threads,
                                 std::ostream* progress) {
    if (threads < 1)
        threads = 1;
    SimConfig cfg = config;
    cfg.prepare();
    std::vector<SimRecord> records;
    for (const DecoderSetup& setup : cfg.decoders) {
        for (double ebno : cfg.ebno_grid()) {
            records.push_back(run_point(setup, ebno, cfg, threads));
            if (progress) {
                const SimRecord& r = records.back();
                *progress << "# " << r.decoder << " ebno=" << r.ebno_db
                          << " frames=" << r.frames << " errors=" << r.errors
                          << " fer=" << r.fer() << " avg_cnp=" << r.avg_cnp()
                          << std::endl;
            }
        }
    }
    return records;
}

void write_csv(const std::vector<SimRecord>& records, std::ostream& os) {
    os << "decoder,ebno_db,frames,errors,fer,avg_cnp,avg_attempts,"
          "early_term_rate,noise_checksum\n";
    char buf[256];
    for (const SimRecord& r : records) {
        std::snprintf(buf, sizeof(buf), "%s,%g,%lld,%lld,%.6e,%.4f,%.6f,%.6e,%016llx",
                      r.decoder.c_str(), r.ebno_db,
                      static_cast<long long>(r.frames),
                      static_cast<long long>(r.errors), r.fer(), r.avg_cnp(),
                      r.avg_attempts(), r.early_term_rate(),
                      static_cast<unsigned long long>(r.noise_checksum));
        os << buf << "\n";
    }
}

void trace_frame(const SimConfig& config, std::size_t decoder_index,
                 double ebno_db, std::int64_t frame, std::ostream& os,
                 bool trace_bits) {
    SimConfig cfg = config;
    cfg.prepare();
    const DecoderSetup& setup = cfg.decoders.at(decoder_index);
    const CodeSpec& spec = *setup.spec;
    const double sigma2 = noise_sigma2(ebno_db, double(spec.k) / spec.n);

    FrameRng rng = FrameRng::for_frame(cfg.seed, static_cast<std::uint64_t>(frame));
    std::vector<std::uint8_t> payload(spec.k);
    rng.fill_bits(payload);
    std::vector<std::uint8_t> x = encode(payload, spec);
    std::vector<double> s = modulate(x);
    std::vector<double> y = add_noise(s, sigma2, rng);
    std::vector<double> llr = channel_llrs(y, sigma2);

    os << "# decoder=" << setup.label << " ebno=" << ebno_db << " frame=" << frame
       << "\n";
    FrameDecoder dec(spec, setup.decoder);
    FrameResult res = dec.decode(llr, &os, trace_bits);
    os << "result=" << (res.crc_ok ? "pass" : "fail")
       << " payload_errors=" << [&] {
              int d = 0;
              for (int i = 0; i < spec.k; ++i)
                  d += res.payload[i] != payload[i];
              return d;
          }()
       << " cnp=" << res.cnp_total << "\n";
}

} // namespace polar
