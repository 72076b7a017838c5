#include "polar/construction.hpp"

#include <json.hpp>

namespace polar {

namespace {

// External documents use 1-based bit indices.
nlohmann::json one_based(const std::vector<int>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (int i : v)
        arr.push_back(i + 1);
    return arr;
}

} // namespace

std::string code_spec_json(const CodeSpec& spec) {
    nlohmann::json j;
    j["N"] = spec.n;
    j["K"] = spec.k;
    j["n_crc"] = spec.n_crc;
    j["n_pc"] = spec.n_pc;
    j["list_size"] = spec.list_size;
    j["design_snr_db"] = spec.design_snr_db;
    j["allocation_variant"] =
        spec.variant == PcAllocation::Improved ? "improved" : "original";

    std::vector<int> frozen;
    for (int i = 0; i < spec.n; ++i)
        if (spec.frozen_mask[i])
            frozen.push_back(i);
    j["frozen_set"] = one_based(frozen);
    j["nonfrozen_set"] = one_based(spec.nonfrozen);
    j["a_prime"] = one_based(spec.a_prime);
    j["critical_set"] = one_based(spec.critical);

    nlohmann::json pcs = nlohmann::json::array();
    for (const PcConstraint& pc : spec.pc_map) {
        nlohmann::json e;
        e["position"] = pc.position + 1;
        e["protects"] = one_based(pc.protects);
        pcs.push_back(e);
    }
    j["pc_map"] = pcs;

    j["crc_poly"] = spec.crc.generator() ? spec.crc.coefficients()
                                         : std::vector<std::uint8_t>{};
    char hex[32];
    std::snprintf(hex, sizeof(hex), "0x%llx",
                  static_cast<unsigned long long>(spec.crc.generator()));
    j["crc_poly_hex"] = std::string(hex);
    return j.dump(2);
}

} // namespace polar
