#ifndef MAXLP_LP_HPP
#define MAXLP_LP_HPP

// Prediction-coefficient estimation under the l2, weighted-l2 and l1
// criteria, plus pole utilities (root finding, reflection).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "maxlp/errors.hpp"
#include "maxlp/lp_model.hpp"
#include "maxlp/signal.hpp"

namespace maxlp {

// Biased autocorrelation rho_0..rho_K (no lag normalization).
inline std::vector<double> autocorrelate(const std::vector<double>& x, std::size_t K) {
    if (x.size() <= K) throw InvalidArgument("autocorrelate: frame length must exceed order");
    std::vector<double> rho(K + 1, 0.0);
    for (std::size_t j = 0; j <= K; ++j) {
        double acc = 0.0;
        for (std::size_t n = j; n < x.size(); ++n) acc += x[n] * x[n - j];
        rho[j] = acc;
    }
    return rho;
}

inline std::vector<double> autocorrelate(const Frame& frame, std::size_t K) {
    return autocorrelate(frame.samples, K);
}

struct LevinsonResult {
    LpModel model;
    std::vector<double> reflection;
    bool exact_fit = false;  // prediction error hit zero, order truncated
};

// Levinson-Durbin recursion on the Toeplitz normal equations.
// residual_energy = rho_0 * prod(1 - k_i^2).
inline LevinsonResult levinson_durbin(const std::vector<double>& rho) {
    if (rho.empty() || !(rho[0] > 0.0))
        throw DegenerateInput("levinson_durbin: rho_0 must be positive");

    const std::size_t K = rho.size() - 1;
    LevinsonResult res;
    std::vector<double> a;
    a.reserve(K);
    double energy = rho[0];

    for (std::size_t m = 1; m <= K; ++m) {
        double acc = rho[m];
        for (std::size_t i = 1; i < m; ++i) acc -= a[i - 1] * rho[m - i];
        const double k = acc / energy;
        res.reflection.push_back(k);

        std::vector<double> next(a);
        next.push_back(k);
        for (std::size_t i = 1; i < m; ++i) next[i - 1] = a[i - 1] - k * a[m - i - 1];
        a = std::move(next);

        energy *= (1.0 - k * k);
        if (energy <= 0.0) {
            energy = 0.0;
            res.exact_fit = true;
            break;
        }
    }
    res.model = LpModel(std::move(a), energy);
    return res;
}

// Conventional l2 LP analysis: autocorrelation method.
inline LpModel lp2_analyze(const std::vector<double>& x, std::size_t K) {
    return levinson_durbin(autocorrelate(x, K)).model;
}

inline LpModel lp2_analyze(const Frame& frame, std::size_t K) {
    return lp2_analyze(frame.samples, K);
}

// Weight 1 everywhere except a raised-cosine dip to `floor` over
// +-dip_halfwidth_ms around each GCI sample index. Overlapping dips combine
// by pointwise minimum.
inline WeightVector gci_weighting(const Frame& frame, const std::vector<std::size_t>& gcis_in_frame,
                                  double dip_halfwidth_ms, double floor_value) {
    if (!(floor_value >= 0.0 && floor_value < 1.0))
        throw InvalidArgument("gci_weighting: floor must be in [0, 1)");
    const std::size_t L = frame.size();
    const long halfwidth =
        std::max(1L, std::lround(dip_halfwidth_ms * frame.rate / 1000.0));

    WeightVector w;
    w.weights.assign(L, 1.0);
    for (std::size_t gci : gcis_in_frame) {
        if (gci >= L) throw InvalidArgument("gci_weighting: GCI index outside frame");
        const long c = static_cast<long>(gci);
        for (long d = -halfwidth; d <= halfwidth; ++d) {
            const long n = c + d;
            if (n < 0 || n >= static_cast<long>(L)) continue;
            const double dip =
                floor_value + (1.0 - floor_value) *
                                  0.5 * (1.0 - std::cos(M_PI * static_cast<double>(std::abs(d)) /
                                                        static_cast<double>(halfwidth)));
            w.weights[static_cast<std::size_t>(n)] = std::min(w.weights[static_cast<std::size_t>(n)], dip);
        }
    }
    return w;
}

namespace detail {

// Weighted covariance-style normal equations over n in [K, L-1]:
//   M_{jk} = sum_n w(n) x(n-j) x(n-k),  b_j = sum_n w(n) x(n) x(n-j).
inline void weighted_normal_equations(const std::vector<double>& x, std::size_t K,
                                      const std::vector<double>& w, Eigen::MatrixXd& M,
                                      Eigen::VectorXd& b) {
    const std::size_t L = x.size();
    M.setZero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
    b.setZero(static_cast<Eigen::Index>(K));
    for (std::size_t n = K; n < L; ++n) {
        const double wn = w.empty() ? 1.0 : w[n];
        if (wn == 0.0) continue;
        for (std::size_t j = 1; j <= K; ++j) {
            const double xj = x[n - j];
            b(static_cast<Eigen::Index>(j - 1)) += wn * x[n] * xj;
            for (std::size_t k = j; k <= K; ++k)
                M(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k - 1)) +=
                    wn * xj * x[n - k];
        }
    }
    M = M.selfadjointView<Eigen::Upper>();
}

// Solve M a = b, retrying once with ridge 1e-9*trace(M) on the diagonal.
inline Eigen::VectorXd solve_normal_equations(Eigen::MatrixXd M, const Eigen::VectorXd& b) {
    const double trace = M.trace();
    if (!(trace > 0.0)) throw DegenerateInput("normal equations: zero-energy system");

    const double bnorm = std::max(b.norm(), 1e-300);
    Eigen::VectorXd a = M.ldlt().solve(b);
    if ((M * a - b).norm() <= 1e-8 * bnorm && a.allFinite()) return a;

    M.diagonal().array() += 1e-9 * trace;
    a = M.ldlt().solve(b);
    if ((M * a - b).norm() <= 1e-4 * bnorm && a.allFinite()) return a;
    throw DegenerateInput("normal equations: rank-deficient after ridge");
}

inline double weighted_sse(const std::vector<double>& x, std::size_t K,
                           const std::vector<double>& w, const Eigen::VectorXd& a) {
    double sse = 0.0;
    for (std::size_t n = K; n < x.size(); ++n) {
        double e = x[n];
        for (std::size_t k = 1; k <= K; ++k) e -= a(static_cast<Eigen::Index>(k - 1)) * x[n - k];
        sse += (w.empty() ? 1.0 : w[n]) * e * e;
    }
    return sse;
}

}  // namespace detail

// Weighted-l2 LP analysis, covariance-style conditioning on the first K samples.
inline LpModel wlp2_analyze(const std::vector<double>& x, std::size_t K, const WeightVector& w) {
    if (x.size() <= K) throw InvalidArgument("wlp2_analyze: frame length must exceed order");
    if (w.size() != x.size()) throw InvalidArgument("wlp2_analyze: weight/frame length mismatch");
    for (double wi : w.weights)
        if (!(wi >= 0.0 && wi <= 1.0)) throw InvalidArgument("wlp2_analyze: weights must be in [0, 1]");

    Eigen::MatrixXd M;
    Eigen::VectorXd b;
    detail::weighted_normal_equations(x, K, w.weights, M, b);
    const Eigen::VectorXd a = detail::solve_normal_equations(std::move(M), b);

    std::vector<double> coeffs(a.data(), a.data() + a.size());
    return LpModel(std::move(coeffs), detail::weighted_sse(x, K, w.weights, a));
}

inline LpModel wlp2_analyze(const Frame& frame, std::size_t K, const WeightVector& w) {
    return wlp2_analyze(frame.samples, K, w);
}

struct L1Result {
    LpModel model;          // residual_energy holds the (unweighted) SSE
    double objective = 0.0; // achieved sum of absolute residuals
    bool converged = false;
    std::size_t iterations = 0;
    // (epsilon, smoothed objective) per IRLS iteration, for diagnostics
    std::vector<std::pair<double, double>> trace;
};

// l1-norm LP analysis by iteratively reweighted least squares with smoothing
// epsilon annealed from 1e-2 down to 1e-8. Conditioning on the first K
// samples, like wlp2_analyze.
inline L1Result l1_analyze(const std::vector<double>& x, std::size_t K, double tol = 1e-9,
                           std::size_t max_iter = 400) {
    if (x.size() <= K) throw InvalidArgument("l1_analyze: frame length must exceed order");
    const std::size_t L = x.size();

    auto residuals = [&](const Eigen::VectorXd& a, std::vector<double>& e) {
        e.resize(L - K);
        for (std::size_t n = K; n < L; ++n) {
            double v = x[n];
            for (std::size_t k = 1; k <= K; ++k) v -= a(static_cast<Eigen::Index>(k - 1)) * x[n - k];
            e[n - K] = v;
        }
    };
    auto l1_objective = [&](const std::vector<double>& e) {
        double s = 0.0;
        for (double v : e) s += std::abs(v);
        return s;
    };

    // Unweighted least-squares start.
    Eigen::MatrixXd M;
    Eigen::VectorXd b;
    detail::weighted_normal_equations(x, K, {}, M, b);
    Eigen::VectorXd a = detail::solve_normal_equations(M, b);

    std::vector<double> e;
    residuals(a, e);

    L1Result res;
    Eigen::VectorXd best_a = a;
    double best_obj = l1_objective(e);

    std::vector<double> w(L, 0.0);
    bool budget_left = true;
    for (double eps = 1e-2; eps >= 0.999e-8 && budget_left; eps /= 10.0) {
        // each stage only needs accuracy on the order of its own smoothing
        const double stage_tol = std::max(tol, 1e-2 * eps);
        double smoothed_prev = std::numeric_limits<double>::infinity();
        while (true) {
            if (res.iterations >= max_iter) {
                budget_left = false;
                break;
            }
            ++res.iterations;

            double wmax = 0.0;
            for (std::size_t n = K; n < L; ++n) {
                w[n] = 1.0 / std::sqrt(e[n - K] * e[n - K] + eps * eps);
                wmax = std::max(wmax, w[n]);
            }
            for (std::size_t n = K; n < L; ++n) w[n] /= wmax;  // conditioning only
            detail::weighted_normal_equations(x, K, w, M, b);
            a = detail::solve_normal_equations(M, b);
            residuals(a, e);

            double smoothed = 0.0;
            for (double v : e) smoothed += std::sqrt(v * v + eps * eps);
            res.trace.emplace_back(eps, smoothed);

            const double obj = l1_objective(e);
            if (obj < best_obj) {
                best_obj = obj;
                best_a = a;
            }
            if (std::abs(smoothed_prev - smoothed) < stage_tol * std::max(1.0, smoothed)) break;
            smoothed_prev = smoothed;
        }
    }
    res.converged = budget_left;

    std::vector<double> coeffs(best_a.data(), best_a.data() + best_a.size());
    const double sse = detail::weighted_sse(x, K, {}, best_a);
    res.model = LpModel(std::move(coeffs), sse);
    res.objective = best_obj;
    return res;
}

inline L1Result l1_analyze(const Frame& frame, std::size_t K, double tol = 1e-8,
                           std::size_t max_iter = 200) {
    return l1_analyze(frame.samples, K, tol, max_iter);
}

// Roots of z^K - a_1 z^{K-1} - ... - a_K via companion-matrix eigenvalues.
// Roots are sorted by (real, imag) for reproducible output.
inline PoleReport polynomial_roots(const LpModel& model) {
    PoleReport report;
    const std::size_t K = model.order;
    if (K == 0) return report;

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K),
                                              static_cast<Eigen::Index>(K));
    for (std::size_t i = 0; i + 1 < K; ++i)
        C(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = 1.0;
    for (std::size_t i = 0; i < K; ++i)
        C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(K - 1)) =
            model.coefficients[K - 1 - i];

    Eigen::EigenSolver<Eigen::MatrixXd> solver(C, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw DegenerateInput("polynomial_roots: eigensolver failed");

    report.roots.resize(K);
    for (std::size_t i = 0; i < K; ++i)
        report.roots[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    std::sort(report.roots.begin(), report.roots.end(),
              [](const std::complex<double>& p, const std::complex<double>& q) {
                  if (p.real() != q.real()) return p.real() < q.real();
                  return p.imag() < q.imag();
              });
    for (const auto& r : report.roots) report.max_modulus = std::max(report.max_modulus, std::abs(r));
    return report;
}

struct ReflectionResult {
    LpModel model;
    std::size_t reflected_count = 0;
    bool unit_circle_roots = false;  // roots within 1e-9 of the circle, left untouched
};

// Replace every root with |z| > 1 by 1/conj(z). Preserves |A(e^{jw})| up to a
// constant gain. residual_energy is carried over unchanged.
inline ReflectionResult reflect_poles(const LpModel& model) {
    ReflectionResult res;
    if (model.order == 0) {
        res.model = model;
        return res;
    }

    PoleReport report = polynomial_roots(model);
    std::vector<std::complex<double>> roots = report.roots;
    for (auto& z : roots) {
        const double mod = std::abs(z);
        if (std::abs(mod - 1.0) < 1e-9) {
            res.unit_circle_roots = true;
        } else if (mod > 1.0) {
            z = std::complex<double>(1.0, 0.0) / std::conj(z);
            ++res.reflected_count;
        }
    }

    if (res.reflected_count == 0) {
        res.model = model;
        return res;
    }

    // Re-expand prod(z - z_i); the root set stays conjugate-closed so the
    // imaginary parts cancel.
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& z : roots) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= poly[i] * z;
        }
        poly = std::move(next);
    }

    std::vector<double> coeffs(model.order);
    for (std::size_t k = 1; k <= model.order; ++k) coeffs[k - 1] = -poly[k].real();
    res.model = LpModel(std::move(coeffs), model.residual_energy);
    return res;
}

}  // namespace maxlp

#endif
