#ifndef MAXLP_STATS_HPP
#define MAXLP_STATS_HPP

// Small statistics helpers for the benchmark report: sample moments and the
// paired t-test (two-sided p-value via the regularized incomplete beta).

#include <cmath>
#include <cstddef>
#include <vector>

#include "maxlp/errors.hpp"

namespace maxlp {

inline double mean(const std::vector<double>& x) {
    if (x.empty()) throw InvalidArgument("mean: empty input");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double sample_variance(const std::vector<double>& x) {
    if (x.size() < 2) throw InvalidArgument("sample_variance: need at least 2 samples");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz's method).
inline double betacf(double a, double b, double x) {
    const double eps = 3e-16, fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

inline double betainc(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

// Two-sided p-value of Student's t with `df` degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw InvalidArgument("student_t_two_sided_p: df must be positive");
    return detail::betainc(df / 2.0, 0.5, df / (df + t * t));
}

struct PairedTTest {
    double mean_difference = 0.0;
    double t_statistic = 0.0;
    double p_value = 1.0;  // two-sided
    std::size_t n = 0;
};

// Paired t-test on per-observation differences a[i] - b[i].
inline PairedTTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InvalidArgument("paired_t_test: length mismatch");
    if (a.size() < 2) throw InvalidArgument("paired_t_test: need at least 2 pairs");

    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];

    PairedTTest r;
    r.n = d.size();
    r.mean_difference = mean(d);
    const double var = sample_variance(d);
    if (var == 0.0) {
        r.t_statistic = r.mean_difference == 0.0 ? 0.0 : std::copysign(1e12, r.mean_difference);
        r.p_value = r.mean_difference == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.t_statistic = r.mean_difference / std::sqrt(var / static_cast<double>(r.n));
    r.p_value = student_t_two_sided_p(r.t_statistic, static_cast<double>(r.n - 1));
    return r;
}

}  // namespace maxlp

#endif
