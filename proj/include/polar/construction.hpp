#ifndef POLAR_CONSTRUCTION_HPP
#define POLAR_CONSTRUCTION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "polar/crc.hpp"

namespace polar {

// Position of a parity-check bit and the earlier positions whose xor
// defines its value.  All indices are 0-based codeword bit indices.
struct PcConstraint {
    int position = -1;
    std::vector<int> protects;
};

enum class PcAllocation { Original, Improved };

enum class BitRole : std::uint8_t { Frozen, Payload, Pc, Crc };

// Segment layout used to spread parity-check bits over the critical set:
// `segments` contiguous chunks, the first c1 of length q_up, the rest of
// length q_down.  The improved layout uses n_pc+1 segments and leaves the
// last one unprotected; the original layout uses n_pc segments.
struct SegmentPlan {
    int q_up = 0;
    int q_down = 0;
    int c1 = 0;
    int c2 = 0;
    int segments = 0;
};

struct CodeSpecParams {
    int n = 0;            // code length, power of two
    int k = 0;            // payload bits
    int n_pc = 0;         // parity-check bits
    int list_size = 1;    // decoder list size L (fixes a_prime)
    PcAllocation variant = PcAllocation::Improved;
    std::uint64_t crc_poly = 0; // full generator incl. leading term; 0 = no crc
    double design_snr_db = 4.0;
};

// Immutable description of one code instance.  Built once, shared by the
// encoder, the decoders and the simulator.
struct CodeSpec {
    int n = 0;
    int k = 0;
    int n_crc = 0;
    int n_pc = 0;
    int list_size = 1;
    PcAllocation variant = PcAllocation::Improved;
    double design_snr_db = 4.0;

    std::vector<int> nonfrozen;        // ascending, size k + n_crc + n_pc
    std::vector<std::uint8_t> frozen_mask; // size n
    std::vector<int> a_prime;          // first log2(L) non-frozen bits
    std::vector<int> critical;         // critical (predetermined) set, ascending
    std::vector<PcConstraint> pc_map;  // ordered by position
    Crc crc;

    // Derived lookups.
    std::vector<BitRole> role;         // size n
    std::vector<std::int16_t> pc_ordinal;    // size n, -1 unless a PC position
    std::vector<std::int16_t> protected_by;  // size n, -1 unless covered by a PC bit
    std::vector<int> payload_pos;      // k positions, ascending
    std::vector<int> crc_pos;          // n_crc positions, ascending
    std::vector<int> crc_covered;      // payload + crc positions, ascending
    std::vector<int> selection_bits;   // nonfrozen minus a_prime
    std::vector<int> flip_eligible;    // selection_bits minus PC minus CRC positions

    int log2_list() const;
};

// Synthetic-channel indices ordered most to least reliable under the
// Gaussian-approximation recursion on mean LLRs.  design_snr_db is an
// Eb/N0, so the raw-channel mean is 4 * rate * 10^(design_snr_db/10);
// build_code_spec passes rate = k/n.  Ties (possible only when means
// saturate the internal cap) break toward the lower index.
std::vector<int> reliability_order(int n, double design_snr_db,
                                   double design_rate = 0.5);

// Mean-LLR vector underlying reliability_order, exposed for verification.
std::vector<double> ga_mean_llrs(int n, double design_snr_db,
                                 double design_rate = 0.5);

// First non-frozen leaf of every maximal all-non-frozen subtree of the
// decoding tree, ascending.
std::vector<int> critical_set(const std::vector<std::uint8_t>& frozen_mask);

SegmentPlan segment_plan(int n_ps, int n_pc, PcAllocation variant);

std::vector<PcConstraint> allocate_pc_bits(const std::vector<int>& critical,
                                           int n_pc, PcAllocation variant);

CodeSpec build_code_spec(const CodeSpecParams& params);

// JSON document describing the spec; bit indices are emitted 1-based.
std::string code_spec_json(const CodeSpec& spec);

} // namespace polar

#endif
