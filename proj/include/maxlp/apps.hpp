#ifndef MAXLP_APPS_HPP
#define MAXLP_APPS_HPP

// The two downstream applications: speech polarity detection from the
// differenced skewness of two excitation estimates, and deterministic
// excitation modeling as the first eigenvector of PCA over GCI-synchronous
// normalized residual frames.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "maxlp/errors.hpp"
#include "maxlp/maxp.hpp"
#include "maxlp/metrics.hpp"
#include "maxlp/pitch.hpp"
#include "maxlp/signal.hpp"

namespace maxlp {

// Zero-phase low-pass approximation of the glottal waveform: the mean-removed
// signal through a forward-backward second-order Butterworth at `cutoff_hz`.
inline SampleBuffer glottal_approximation(const SampleBuffer& buffer, double cutoff_hz = 1000.0) {
    if (!(cutoff_hz > 0.0 && cutoff_hz < buffer.rate / 2.0))
        throw InvalidArgument("glottal_approximation: cutoff must be in (0, rate/2)");

    const double w0 = 2.0 * M_PI * cutoff_hz / buffer.rate;
    const double q = 1.0 / std::sqrt(2.0);
    const double alpha = std::sin(w0) / (2.0 * q);
    const double cw = std::cos(w0);
    const double a0 = 1.0 + alpha;
    const double b0 = (1.0 - cw) / 2.0 / a0, b1 = (1.0 - cw) / a0, b2 = b0;
    const double a1 = -2.0 * cw / a0, a2 = (1.0 - alpha) / a0;

    auto biquad = [&](const std::vector<double>& x) {
        std::vector<double> y(x.size(), 0.0);
        double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) {
            const double v = b0 * x[n] + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
            x2 = x1;
            x1 = x[n];
            y2 = y1;
            y1 = v;
            y[n] = v;
        }
        return y;
    };

    std::vector<double> x = buffer.samples;
    double mean = 0.0;
    for (double v : x) mean += v;
    if (!x.empty()) mean /= static_cast<double>(x.size());
    for (double& v : x) v -= mean;

    std::vector<double> y = time_reverse(biquad(time_reverse(biquad(x))));
    return SampleBuffer(std::move(y), buffer.rate);
}

struct PolarityVerdict {
    int polarity = +1;  // +1 or -1
    double differenced_skewness = 0.0;
    double skew_residual = 0.0;
    double skew_glottal = 0.0;
    bool low_confidence = false;
};

// Sign convention relating the differenced skewness to the polarity, fixed
// once against synthetic ground truth (see tests): positive-polarity speech
// yields a positive skew(glottal) - skew(residual).
inline constexpr int kPolaritySign = +1;

struct PolarityConfig {
    double f0_frame_ms = 40.0;
    double f0_hop_ms = 10.0;
    double win_ms = 25.0;
    double hop_ms = 5.0;
    double min_voiced_seconds = 0.5;
    unsigned jobs = 1;
};

// Differenced-skewness polarity detection. The residual of the requested
// method and a low-pass glottal approximation are gathered over voiced
// frames; the sign of skew(glottal) - skew(residual) gives the polarity.
inline PolarityVerdict detect_polarity(const SampleBuffer& buffer, ResidualMethod method,
                                       const MaxPConfig& cfg = MaxPConfig{},
                                       const GciTrack* gcis = nullptr,
                                       const PolarityConfig& pcfg = PolarityConfig{}) {
    const F0Track f0 = estimate_f0(buffer, pcfg.f0_frame_ms, pcfg.f0_hop_ms);

    std::size_t voiced_frames = 0;
    for (double v : f0.f0) voiced_frames += v > 0.0 ? 1 : 0;
    const double voiced_seconds = static_cast<double>(voiced_frames) * f0.hop;

    GciTrack detected;
    const GciTrack* gci_ptr = gcis;
    const bool needs_gcis =
        base_of(method) == BaseMethod::wlp2;
    if (needs_gcis && gci_ptr == nullptr) {
        detected = detect_gci(buffer, f0);
        gci_ptr = &detected;
    }

    const TrackResult track = residual_track(buffer, method, cfg, gci_ptr, pcfg.win_ms,
                                             pcfg.hop_ms, pcfg.jobs);
    const SampleBuffer glottal = glottal_approximation(buffer);

    std::vector<double> r_cat, g_cat;
    const FrameSequence fs = frame_signal(buffer, pcfg.win_ms, pcfg.hop_ms, WindowKind::hanning);
    for (std::size_t i = 0; i < fs.frames.size(); ++i) {
        const Frame& frame = fs.frames[i];
        const double center =
            (static_cast<double>(frame.start_index) + frame.size() / 2.0) / buffer.rate;
        if (f0.f0_at(center) <= 0.0) continue;
        if (i >= track.frames.size() || !track.frames[i].ok) continue;
        const std::vector<double>& res = track.frames[i].residual;
        r_cat.insert(r_cat.end(), res.begin(), res.end());
        g_cat.insert(g_cat.end(), glottal.samples.begin() + static_cast<std::ptrdiff_t>(frame.start_index),
                     glottal.samples.begin() + static_cast<std::ptrdiff_t>(frame.start_index + frame.size()));
    }

    if (r_cat.size() < 3 || g_cat.size() < 3)
        throw UnanalyzableFrame("detect_polarity: no analyzable voiced speech");

    PolarityVerdict verdict;
    try {
        verdict.skew_residual = skewness(r_cat);
        verdict.skew_glottal = skewness(g_cat);
    } catch (const UndefinedMetric& e) {
        throw UnanalyzableFrame(std::string("detect_polarity: ") + e.what());
    }
    verdict.differenced_skewness = verdict.skew_glottal - verdict.skew_residual;
    verdict.low_confidence = voiced_seconds < pcfg.min_voiced_seconds;
    if (verdict.differenced_skewness == 0.0) {
        verdict.polarity = +1;
        verdict.low_confidence = true;
    } else {
        verdict.polarity =
            kPolaritySign * (verdict.differenced_skewness > 0.0 ? +1 : -1);
    }
    return verdict;
}

// GCI-synchronous dataset for excitation modeling: two pitch periods around
// each interior GCI, Hanning-windowed, length-normalized by linear
// interpolation, scaled to unit energy. One row per usable GCI.
inline Eigen::MatrixXd extract_residual_frames(const SampleBuffer& residual, const GciTrack& gcis,
                                               const F0Track& f0, std::size_t norm_length = 64) {
    if (norm_length < 32 || norm_length % 2 != 0)
        throw InvalidArgument("extract_residual_frames: norm_length must be even and >= 32");

    std::vector<std::vector<double>> rows;
    for (double t : gcis.instants) {
        const double hz = f0.f0_at(t);
        if (hz <= 0.0) continue;
        const long period = std::lround(residual.rate / hz);
        if (period < 2) continue;
        const long center = std::lround(t * residual.rate);
        const long lo = center - period;
        const long hi = center + period;  // exclusive
        if (lo < 0 || hi > static_cast<long>(residual.size())) continue;

        const std::size_t len = static_cast<std::size_t>(hi - lo);
        std::vector<double> seg(len);
        const std::vector<double> w = hanning_window(len);
        for (std::size_t j = 0; j < len; ++j)
            seg[j] = residual.samples[static_cast<std::size_t>(lo) + j] * w[j];

        std::vector<double> row(norm_length);
        const double scale = static_cast<double>(len) / static_cast<double>(norm_length);
        for (std::size_t j = 0; j < norm_length; ++j) {
            const double p = static_cast<double>(j) * scale;
            const std::size_t k = std::min(len - 2, static_cast<std::size_t>(p));
            const double frac = p - static_cast<double>(k);
            row[j] = seg[k] * (1.0 - frac) + seg[k + 1] * frac;
        }

        double norm = 0.0;
        for (double v : row) norm += v * v;
        if (!(norm > 0.0)) continue;
        norm = std::sqrt(norm);
        for (double& v : row) v /= norm;
        rows.push_back(std::move(row));
    }

    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(norm_length));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < norm_length; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return out;
}

struct EigenModel {
    std::size_t frame_length = 0;
    std::vector<double> eigenvalues;                // descending, nonnegative
    std::vector<std::vector<double>> eigenvectors;  // aligned with eigenvalues
    std::vector<double> cumulative_variance;        // nondecreasing to 1
};

// Eigendecomposition of the second-moment matrix (1/M) F^T F. No mean
// subtraction: the pulse-shaped mean carries the structure of interest.
// Eigenvector signs are fixed so the largest-magnitude entry is positive.
inline EigenModel pca(const Eigen::MatrixXd& frames) {
    if (frames.rows() < 2)
        throw InsufficientData("pca: need at least 2 frames");

    const Eigen::Index D = frames.cols();
    const Eigen::MatrixXd second_moment =
        (frames.transpose() * frames) / static_cast<double>(frames.rows());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(second_moment);
    if (solver.info() != Eigen::Success) throw DegenerateInput("pca: eigensolver failed");

    EigenModel model;
    model.frame_length = static_cast<std::size_t>(D);
    double total = 0.0;
    for (Eigen::Index i = D - 1; i >= 0; --i) {  // Eigen sorts ascending
        const double lambda = std::max(0.0, solver.eigenvalues()(i));
        Eigen::VectorXd v = solver.eigenvectors().col(i);

        Eigen::Index argmax = 0;
        v.cwiseAbs().maxCoeff(&argmax);
        if (v(argmax) < 0.0) v = -v;

        model.eigenvalues.push_back(lambda);
        model.eigenvectors.emplace_back(v.data(), v.data() + v.size());
        total += lambda;
    }
    if (!(total > 0.0)) throw DegenerateInput("pca: zero total variance");

    double acc = 0.0;
    for (double lambda : model.eigenvalues) {
        acc += lambda;
        model.cumulative_variance.push_back(acc / total);
    }
    return model;
}

// Fraction of squared energy within +-center_halfwidth_ms of the vector
// midpoint (at the given sample rate).
inline double pulse_concentration(const std::vector<double>& eigenvector,
                                  double center_halfwidth_ms, double rate) {
    if (eigenvector.empty()) throw InvalidArgument("pulse_concentration: empty vector");
    const long L = static_cast<long>(eigenvector.size());
    const long mid = L / 2;
    const long h = std::lround(center_halfwidth_ms * rate / 1000.0);

    double total = 0.0, inside = 0.0;
    for (long i = 0; i < L; ++i) {
        const double e = eigenvector[static_cast<std::size_t>(i)] *
                         eigenvector[static_cast<std::size_t>(i)];
        total += e;
        if (std::abs(i - mid) <= h) inside += e;
    }
    if (!(total > 0.0)) throw UndefinedMetric("pulse_concentration: zero-energy vector");
    return inside / total;
}

// Eigenvectors needed to reach the given cumulative-variance fraction.
inline std::size_t eigenvectors_to_variance(const EigenModel& model, double fraction) {
    for (std::size_t i = 0; i < model.cumulative_variance.size(); ++i)
        if (model.cumulative_variance[i] >= fraction) return i + 1;
    return model.cumulative_variance.size();
}

}  // namespace maxlp

#endif
