#include "polar/flip_metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "polar/numeric.hpp"

namespace polar {

double e_metric(std::span<const double> pm_survivors,
                std::span<const double> pm_discarded, double alpha) {
    if (pm_survivors.size() != pm_discarded.size() || pm_survivors.empty())
        throw std::invalid_argument("e_metric: need two equal, non-empty PM lists");
    auto lse_neg = [](std::span<const double> pms) {
        std::vector<double> neg(pms.size());
        for (std::size_t i = 0; i < pms.size(); ++i)
            neg[i] = -pms[i];
        return log_sum_exp(neg);
    };
    return lse_neg(pm_survivors) - alpha * lse_neg(pm_discarded);
}

double f_beta(double x, double beta) {
    if (!(beta > 0.0))
        throw std::invalid_argument("f_beta: beta must be positive");
    return log1p_exp(-beta * x) / beta;
}

double f_star(double x, int z) {
    if (z < 1)
        throw std::invalid_argument("f_star: z must be a positive integer");
    return std::abs(x) <= static_cast<double>(z) ? 1.0 : 0.0;
}

double flip_set_metric(std::span<const int> indices,
                       std::span<const double> e_values,
                       std::span<const int> selection_bits,
                       const MetricParams& params) {
    if (indices.empty())
        throw std::invalid_argument("flip_set_metric: empty flip set");

    auto at = [&](int bit) {
        double e = e_values[bit];
        if (std::isnan(e))
            throw std::invalid_argument("flip_set_metric: missing E value");
        return e;
    };

    double sum = 0.0;
    for (int bit : indices)
        sum += at(bit);
    const int last = indices.back();
    for (int bit : selection_bits) {
        if (bit > last)
            break;
        double e = at(bit);
        sum += params.kind == MetricKind::SimplifiedMstar ? f_star(e, params.z)
                                                          : f_beta(e, params.beta);
    }
    return sum;
}

} // namespace polar
