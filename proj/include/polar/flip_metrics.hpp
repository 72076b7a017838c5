#ifndef POLAR_FLIP_METRICS_HPP
#define POLAR_FLIP_METRICS_HPP

#include <span>
#include <vector>

namespace polar {

enum class MetricKind { OriginalMbeta, SimplifiedMstar };

struct MetricParams {
    MetricKind kind = MetricKind::SimplifiedMstar;
    double alpha = 1.0; // exponent compensating biased estimation in E
    double beta = 0.4;  // smooth-penalty coefficient
    int z = 5;          // threshold of the simplified penalty
};

// Ordered flip indices for one additional decoding attempt, with the
// metric that ranked them.
struct FlipSet {
    std::vector<int> indices; // strictly increasing bit indices
    double metric = 0.0;

    int last() const { return indices.back(); }
    int order() const { return static_cast<int>(indices.size()); }
};

// E = log sum exp(-PM) over survivors minus alpha * the same over the
// discarded half, taken at the moment of selection.
double e_metric(std::span<const double> pm_survivors,
                std::span<const double> pm_discarded, double alpha);

// Smooth penalty log(1 + exp(-beta x)) / beta.
double f_beta(double x, double beta);

// Threshold penalty: 1 when |x| <= z, else 0.
double f_star(double x, int z);

// Set-form flip metric: sum of E over the flip indices plus the penalty
// term over every selection bit up to the set's last element.
// `selection_bits` lists the non-frozen bits outside the warm-up prefix,
// ascending; `e_values` is indexed by bit and must be populated (non-NaN)
// at every selection bit <= indices.back().
double flip_set_metric(std::span<const int> indices,
                       std::span<const double> e_values,
                       std::span<const int> selection_bits,
                       const MetricParams& params);

} // namespace polar

#endif
