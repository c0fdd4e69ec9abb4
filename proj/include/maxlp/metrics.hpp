#ifndef MAXLP_METRICS_HPP
#define MAXLP_METRICS_HPP

// Sparsity and shape statistics of a sample sequence: Gini index, Hoyer
// measure, kurtosis, skewness, and the relative-improvement ratio.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "maxlp/errors.hpp"

namespace maxlp {

enum class SparsityMetric { kurtosis, hoyer, gini };

inline const char* to_string(SparsityMetric m) {
    switch (m) {
        case SparsityMetric::kurtosis: return "kurtosis";
        case SparsityMetric::hoyer: return "hoyer";
        case SparsityMetric::gini: return "gini";
    }
    return "?";
}

struct SparsityReport {
    double kurtosis = 0.0;
    double hoyer = 0.0;
    double gini = 0.0;
    std::size_t n = 0;
};

// Gini index of the magnitude distribution, in [0, 1). Sorts |x| ascending as
// c_1..c_N and returns 1 - 2 * sum_k (c_k/||x||_1) * ((N - k + 0.5)/N).
inline double gini_index(const std::vector<double>& x) {
    if (x.empty()) throw InvalidArgument("gini_index: empty input");
    const std::size_t N = x.size();

    std::vector<double> c(N);
    double l1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        c[i] = std::abs(x[i]);
        l1 += c[i];
    }
    if (!(l1 > 0.0)) throw UndefinedMetric("gini_index: all-zero input");
    std::sort(c.begin(), c.end());

    double acc = 0.0;
    for (std::size_t k = 1; k <= N; ++k)
        acc += (c[k - 1] / l1) * ((static_cast<double>(N - k) + 0.5) / static_cast<double>(N));
    return 1.0 - 2.0 * acc;
}

// (sqrt(N) - ||x||_1/||x||_2) / (sqrt(N) - 1), in [0, 1]. Sums run over the
// sorted magnitudes so the result is exactly permutation invariant.
inline double hoyer_measure(const std::vector<double>& x) {
    if (x.size() < 2) throw InvalidArgument("hoyer_measure: need at least 2 samples");
    const double N = static_cast<double>(x.size());
    std::vector<double> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c[i] = std::abs(x[i]);
    std::sort(c.begin(), c.end());

    double l1 = 0.0, l2sq = 0.0;
    for (double v : c) {
        l1 += v;
        l2sq += v * v;
    }
    if (!(l2sq > 0.0)) throw UndefinedMetric("hoyer_measure: all-zero input");
    return (std::sqrt(N) - l1 / std::sqrt(l2sq)) / (std::sqrt(N) - 1.0);
}

namespace detail {

struct CentralMoments {
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

// Accumulation runs over sorted values: same multiset in, bit-identical
// moments out, so the shape statistics are exactly permutation invariant.
// A constant input short-circuits to zero moments; the rounding of the mean
// would otherwise manufacture a spurious tiny variance.
inline CentralMoments central_moments(const std::vector<double>& x) {
    const double N = static_cast<double>(x.size());
    std::vector<double> sorted(x);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) return CentralMoments{};

    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= N;

    CentralMoments m;
    for (double v : sorted) {
        const double d = v - mean;
        const double d2 = d * d;
        m.m2 += d2;
        m.m3 += d2 * d;
        m.m4 += d2 * d2;
    }
    m.m2 /= N;
    m.m3 /= N;
    m.m4 /= N;
    return m;
}

}  // namespace detail

// Non-excess kurtosis m4/m2^2 (Gaussian -> 3).
inline double kurtosis(const std::vector<double>& x) {
    if (x.size() < 4) throw InvalidArgument("kurtosis: need at least 4 samples");
    const auto m = detail::central_moments(x);
    if (!(m.m2 > 0.0)) throw UndefinedMetric("kurtosis: zero variance");
    return m.m4 / (m.m2 * m.m2);
}

// m3 / m2^(3/2).
inline double skewness(const std::vector<double>& x) {
    if (x.size() < 3) throw InvalidArgument("skewness: need at least 3 samples");
    const auto m = detail::central_moments(x);
    if (!(m.m2 > 0.0)) throw UndefinedMetric("skewness: zero variance");
    return m.m3 / std::pow(m.m2, 1.5);
}

inline double metric_value(const std::vector<double>& x, SparsityMetric metric) {
    switch (metric) {
        case SparsityMetric::kurtosis: return kurtosis(x);
        case SparsityMetric::hoyer: return hoyer_measure(x);
        case SparsityMetric::gini: return gini_index(x);
    }
    throw InvalidArgument("metric_value: unknown metric");
}

inline SparsityReport sparsity_report(const std::vector<double>& x) {
    SparsityReport r;
    r.kurtosis = kurtosis(x);
    r.hoyer = hoyer_measure(x);
    r.gini = gini_index(x);
    r.n = x.size();
    return r;
}

// Relative improvement (SM(r) - SM(s)) / SM(s) of the residue r over the
// signal s; the CLI reports it in percent.
inline double sparsity_improvement(const std::vector<double>& s, const std::vector<double>& r,
                                   SparsityMetric metric) {
    const double sm_s = metric_value(s, metric);
    const double sm_r = metric_value(r, metric);
    if (sm_s == 0.0) throw UndefinedMetric("sparsity_improvement: SM(s) is zero");
    return (sm_r - sm_s) / sm_s;
}

}  // namespace maxlp

#endif
