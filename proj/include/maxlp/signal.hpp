#ifndef MAXLP_SIGNAL_HPP
#define MAXLP_SIGNAL_HPP

// Signal containers and the filtering/framing/reversal primitives the rest
// of the library composes. All filters run with zero initial state.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "maxlp/errors.hpp"
#include "maxlp/lp_model.hpp"

namespace maxlp {

// Uniformly sampled real-valued signal.
struct SampleBuffer {
    std::vector<double> samples;
    double rate = 0.0;  // Hz

    SampleBuffer() = default;
    SampleBuffer(std::vector<double> s, double r) : samples(std::move(s)), rate(r) {
        if (!(rate > 0.0)) throw InvalidArgument("SampleBuffer: rate must be > 0");
    }

    std::size_t size() const { return samples.size(); }
    double duration() const { return static_cast<double>(samples.size()) / rate; }
};

enum class WindowKind { hanning, rectangular };

// One analysis frame. For hanning frames the samples already carry the window.
struct Frame {
    std::vector<double> samples;
    std::size_t start_index = 0;  // offset in the source buffer
    WindowKind window_kind = WindowKind::rectangular;
    double rate = 0.0;  // rate of the source buffer, Hz

    std::size_t size() const { return samples.size(); }
};

struct FrameSequence {
    std::vector<Frame> frames;
    bool too_short = false;  // input shorter than one window
};

// Single real zero 1 + alpha*z^-1.
struct PreemphasisSpec {
    double alpha = -1.0;

    explicit PreemphasisSpec(double a = -1.0) : alpha(a) {
        if (!(alpha >= -1.0 && alpha <= 0.0))
            throw InvalidArgument("PreemphasisSpec: alpha must be in [-1, 0]");
    }
};

// Symmetric Hann window, w(0) = w(L-1) = 0.
inline std::vector<double> hanning_window(std::size_t length) {
    std::vector<double> w(length, 1.0);
    if (length < 2) return w;
    const double den = static_cast<double>(length - 1);
    for (std::size_t i = 0; i < length; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) / den));
    return w;
}

// Cut the buffer into fixed-length frames on a regular hop grid. Frames that
// would read past the end are dropped. A buffer shorter than one window gives
// an empty sequence with the too_short flag set.
inline FrameSequence frame_signal(const SampleBuffer& buffer, double win_ms, double hop_ms,
                                  WindowKind window_kind = WindowKind::hanning) {
    if (!(win_ms > 0.0) || !(hop_ms > 0.0))
        throw InvalidArgument("frame_signal: win_ms and hop_ms must be positive");

    const std::size_t frame_len =
        static_cast<std::size_t>(std::llround(win_ms * buffer.rate / 1000.0));
    const std::size_t hop =
        static_cast<std::size_t>(std::llround(hop_ms * buffer.rate / 1000.0));
    if (frame_len == 0 || hop == 0)
        throw InvalidArgument("frame_signal: window/hop rounds to zero samples");

    FrameSequence out;
    if (buffer.size() < frame_len) {
        out.too_short = true;
        return out;
    }

    const std::vector<double> window =
        window_kind == WindowKind::hanning ? hanning_window(frame_len) : std::vector<double>();

    for (std::size_t start = 0; start + frame_len <= buffer.size(); start += hop) {
        Frame f;
        f.start_index = start;
        f.window_kind = window_kind;
        f.rate = buffer.rate;
        f.samples.assign(buffer.samples.begin() + static_cast<std::ptrdiff_t>(start),
                         buffer.samples.begin() + static_cast<std::ptrdiff_t>(start + frame_len));
        if (window_kind == WindowKind::hanning)
            for (std::size_t i = 0; i < frame_len; ++i) f.samples[i] *= window[i];
        out.frames.push_back(std::move(f));
    }
    return out;
}

// s_p(n) = s(n) + alpha * s(n-1), s(-1) = 0.
inline std::vector<double> preemphasize(const std::vector<double>& x, double alpha) {
    if (!(std::abs(alpha) <= 1.0))
        throw InvalidArgument("preemphasize: |alpha| must be <= 1");
    std::vector<double> y(x.size());
    double prev = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        y[n] = x[n] + alpha * prev;
        prev = x[n];
    }
    return y;
}

inline SampleBuffer preemphasize(const SampleBuffer& buffer, const PreemphasisSpec& spec) {
    return SampleBuffer(preemphasize(buffer.samples, spec.alpha), buffer.rate);
}

// r(n) = s(n) - sum_k a_k s(n-k), zero initial state. A(z) is FIR so this is
// always well defined.
inline std::vector<double> inverse_filter(const std::vector<double>& x, const LpModel& model) {
    std::vector<double> r(x.size());
    const std::size_t K = model.order;
    for (std::size_t n = 0; n < x.size(); ++n) {
        double acc = x[n];
        const std::size_t kmax = std::min(K, n);
        for (std::size_t k = 1; k <= kmax; ++k) acc -= model.coefficients[k - 1] * x[n - k];
        r[n] = acc;
    }
    return r;
}

inline SampleBuffer inverse_filter(const SampleBuffer& signal, const LpModel& model) {
    return SampleBuffer(inverse_filter(signal.samples, model), signal.rate);
}

// y(n) = e(n) + sum_k a_k y(n-k), zero initial state. Guards against blow-up
// from unstable models on long inputs.
inline std::vector<double> synthesis_filter(const std::vector<double>& e, const LpModel& model) {
    std::vector<double> y(e.size());
    const std::size_t K = model.order;
    for (std::size_t n = 0; n < e.size(); ++n) {
        double acc = e[n];
        const std::size_t kmax = std::min(K, n);
        for (std::size_t k = 1; k <= kmax; ++k) acc += model.coefficients[k - 1] * y[n - k];
        if (std::abs(acc) > 1e12)
            throw NumericOverflow("synthesis_filter: output exceeded 1e12, model likely unstable");
        y[n] = acc;
    }
    return y;
}

inline SampleBuffer synthesis_filter(const SampleBuffer& excitation, const LpModel& model) {
    return SampleBuffer(synthesis_filter(excitation.samples, model), excitation.rate);
}

inline std::vector<double> time_reverse(std::vector<double> x) {
    std::reverse(x.begin(), x.end());
    return x;
}

inline SampleBuffer time_reverse(const SampleBuffer& buffer) {
    return SampleBuffer(time_reverse(buffer.samples), buffer.rate);
}

namespace detail {

// Modified Bessel function of the first kind, order zero (power series).
inline double bessel_i0(double x) {
    const double half = x / 2.0;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= (half / k) * (half / k);
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

inline double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

}  // namespace detail

// Band-limited resampling by direct windowed-sinc evaluation (Kaiser beta = 8,
// 32 taps per output phase). Duration is preserved within one output sample.
inline SampleBuffer resample(const SampleBuffer& buffer, double target_rate) {
    if (!(target_rate > 0.0)) throw InvalidArgument("resample: target_rate must be > 0");
    if (target_rate == buffer.rate) return buffer;

    const double scale = target_rate / buffer.rate;          // output samples per input sample
    const double fc = 0.5 * std::min(1.0, scale);            // cutoff, cycles per input sample
    const double half_width = 16.0 / std::min(1.0, scale);   // 32 taps at the lower rate
    const double beta = 8.0;
    const double i0_beta = detail::bessel_i0(beta);

    const std::size_t n_in = buffer.size();
    const std::size_t n_out =
        static_cast<std::size_t>(std::llround(static_cast<double>(n_in) * scale));
    std::vector<double> y(n_out, 0.0);

    for (std::size_t n = 0; n < n_out; ++n) {
        const double center = static_cast<double>(n) / scale;
        const long k0 = static_cast<long>(std::ceil(center - half_width));
        const long k1 = static_cast<long>(std::floor(center + half_width));
        double acc = 0.0;
        for (long k = std::max(0L, k0); k <= std::min(static_cast<long>(n_in) - 1, k1); ++k) {
            const double t = static_cast<double>(k) - center;
            const double u = t / half_width;  // in [-1, 1]
            const double w = detail::bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) / i0_beta;
            acc += buffer.samples[static_cast<std::size_t>(k)] *
                   2.0 * fc * detail::sinc(2.0 * fc * t) * w;
        }
        y[n] = acc;
    }
    return SampleBuffer(std::move(y), target_rate);
}

}  // namespace maxlp

#endif
