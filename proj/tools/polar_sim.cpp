// Monte-Carlo sweep driver: frame error rate and average path complexity
// for the decoders in a config file, CSV on stdout or --out.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "polar/simulation.hpp"

int main(int argc, char** argv) {
    CLI::App app{"polar list-flip decoding simulator"};

    std::string config_path;
    std::string out_path;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    long long trace_index = -1;
    bool trace_bits = false;
    bool emit_spec = false;

    app.add_option("-c,--config", config_path, "config file (key = value lines)");
    app.add_option("-o,--out", out_path, "write CSV here instead of stdout");
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--trace", trace_index,
                   "decode this frame index with a controller trace and exit");
    app.add_flag("--trace-bits", trace_bits, "include per-bit decoder lines in traces");
    app.add_flag("--emit-spec", emit_spec, "print each decoder's code spec as JSON and exit");

    // Every config key is also a flag and overrides the file.
    std::map<std::string, std::string> overrides;
    for (const char* key :
         {"N", "K", "n_crc", "n_pc", "crc_poly", "L", "T", "omega", "z", "beta",
          "alpha", "metric_kind", "allocation_variant", "decoders", "ebno_start",
          "ebno_stop", "ebno_step", "design_snr_db", "seed", "max_frames",
          "target_errors", "prune_pc_failing_paths"}) {
        app.add_option_function<std::string>(
            std::string("--") + key,
            [&overrides, key](const std::string& v) { overrides[key] = v; },
            std::string("override config key ") + key);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        polar::SimConfig config;
        if (!config_path.empty()) {
            config = polar::load_sim_config(config_path);
        } else {
            std::string minimal;
            for (const char* req : {"N", "K", "ebno_start", "decoders"})
                if (!overrides.count(req))
                    throw polar::ConfigError(
                        std::string("without --config, --") + req + " is required");
            minimal = "N = " + overrides["N"] + "\nK = " + overrides["K"] +
                      "\nebno_start = " + overrides["ebno_start"] +
                      "\ndecoders = " + overrides["decoders"] + "\n";
            config = polar::parse_sim_config(minimal, "<cli>");
            overrides.erase("N");
            overrides.erase("K");
            overrides.erase("ebno_start");
            overrides.erase("decoders");
        }
        for (const auto& [key, value] : overrides)
            polar::apply_override(config, key, value);

        if (emit_spec) {
            config.prepare();
            for (const auto& setup : config.decoders) {
                std::cout << "# " << setup.label << "\n"
                          << polar::code_spec_json(*setup.spec) << "\n";
            }
            return 0;
        }
        if (trace_index >= 0) {
            config.prepare();
            for (std::size_t d = 0; d < config.decoders.size(); ++d)
                for (double ebno : config.ebno_grid())
                    polar::trace_frame(config, d, ebno, trace_index, std::cout,
                                       trace_bits);
            return 0;
        }

        std::vector<polar::SimRecord> records =
            polar::run_sweep(config, threads, &std::cerr);
        if (out_path.empty()) {
            polar::write_csv(records, std::cout);
        } else {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "cannot open " << out_path << "\n";
                return 1;
            }
            polar::write_csv(records, out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
