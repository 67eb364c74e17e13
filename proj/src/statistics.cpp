#include "kaclab/statistics.hpp"

#include <cmath>

namespace kaclab {

std::string method_name(EstimateMethod m) {
    switch (m) {
        case EstimateMethod::uniform_weighted: return "uniform-weighted";
        case EstimateMethod::self_sampled: return "self-sampled";
        case EstimateMethod::exact_reduction: return "exact-reduction";
        case EstimateMethod::closed_form: return "closed-form";
    }
    return "unknown";
}

void RunningStats::add(double x) {
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
}

void RunningStats::merge(const RunningStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
        *this = o;
        return;
    }
    double d = o.mean - mean;
    std::int64_t total = n + o.n;
    mean += d * static_cast<double>(o.n) / static_cast<double>(total);
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) /
                     static_cast<double>(total);
    n = total;
}

double RunningStats::variance() const {
    if (n < 2) return 0.0;
    return m2 / static_cast<double>(n - 1);
}

double RunningStats::std_error_of_mean() const {
    if (n < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n));
}

}  // namespace kaclab
