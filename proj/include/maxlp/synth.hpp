#ifndef MAXLP_SYNTH_HPP
#define MAXLP_SYNTH_HPP

// Synthetic mixed-phase speech with known glottal (anticausal) and vocal-tract
// (causal) filters, known GCIs and known polarity. This is the ground truth
// the test suites measure against.

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <vector>

#include "maxlp/errors.hpp"
#include "maxlp/lp_model.hpp"
#include "maxlp/pitch.hpp"
#include "maxlp/signal.hpp"

namespace maxlp {

// One conjugate pole pair at magnitude*e^{+-j*2*pi*frequency_hz/rate}.
struct PolePair {
    double magnitude = 0.0;
    double frequency_hz = 0.0;
};

struct SynthSpec {
    double rate = 8000.0;
    double duration = 0.8;          // seconds
    double f0_start = 120.0;        // Hz; linear ramp from f0_start to f0_end
    double f0_end = 120.0;
    double glottal_pole_mag = 0.9;  // 0 disables the anticausal stage
    double glottal_freq_hz = 240.0; // Fg, expected in [F0, 3*F0]
    // Minimum-phase spectral tilt of the source (the glottal return phase),
    // one causal real pole. 0 disables it.
    double tilt_pole = 0.85;
    // AC coupling of the recording chain: (1 - z^-1)/(1 - highpass_pole z^-1)
    // applied to the excitation. 0 disables it (the excitation then keeps its
    // DC component, unlike any real recording).
    double highpass_pole = 0.0;
    std::vector<PolePair> tract_poles;
    int polarity = +1;
    std::optional<double> snr_db;   // additive white noise; empty = noiseless
    std::uint64_t seed = 0;
};

struct SynthTruth {
    SampleBuffer signal;
    SampleBuffer excitation;    // the scaled, signed impulse train actually used
    GciTrack gcis;
    LpModel causal_filter;      // expanded vocal-tract polynomial
    LpModel anticausal_filter;  // glottal pair, coefficients in reversed time
    int polarity = +1;
};

namespace detail {

// Deterministic replacement for std::normal_distribution (whose output is
// implementation-defined). xorshift-free: mt19937_64 + explicit Box-Muller.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return mag * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t next() {  // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// 1 - a1 z^-1 - a2 z^-2 coefficients of one conjugate pole pair.
inline std::vector<double> pole_pair_coeffs(double mag, double freq_hz, double rate) {
    const double theta = 2.0 * M_PI * freq_hz / rate;
    return {2.0 * mag * std::cos(theta), -mag * mag};
}

// Expand a cascade of pole pairs (plus an optional real pole) into a single
// predictor polynomial.
inline LpModel expand_pole_pairs(const std::vector<PolePair>& pairs, double rate,
                                 double real_pole = 0.0) {
    // denominator D(z) = prod_i (1 - a1_i z^-1 - a2_i z^-2), stored as
    // d_0..d_2n with d_0 = 1; prediction coefficients are -d_1..-d_2n.
    std::vector<double> d{1.0};
    for (const auto& p : pairs) {
        const auto c = pole_pair_coeffs(p.magnitude, p.frequency_hz, rate);
        std::vector<double> next(d.size() + 2, 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            next[i] += d[i];
            next[i + 1] -= d[i] * c[0];
            next[i + 2] -= d[i] * c[1];
        }
        d = std::move(next);
    }
    if (real_pole != 0.0) {
        std::vector<double> next(d.size() + 1, 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            next[i] += d[i];
            next[i + 1] -= d[i] * real_pole;
        }
        d = std::move(next);
    }
    std::vector<double> a(d.size() - 1);
    for (std::size_t k = 1; k < d.size(); ++k) a[k - 1] = -d[k];
    return LpModel(std::move(a), 0.0);
}

}  // namespace detail

inline void validate(const SynthSpec& spec) {
    if (!(spec.rate > 0.0)) throw InvalidArgument("SynthSpec: rate must be > 0");
    if (!(spec.duration > 0.1)) throw InvalidArgument("SynthSpec: duration too short");
    if (!(spec.f0_start >= 50.0 && spec.f0_start <= 500.0) ||
        !(spec.f0_end >= 50.0 && spec.f0_end <= 500.0))
        throw InvalidArgument("SynthSpec: f0 must be in [50, 500] Hz");
    if (spec.glottal_pole_mag < 0.0 || spec.glottal_pole_mag >= 1.0)
        throw InvalidArgument("SynthSpec: glottal pole magnitude must be in [0, 1)");
    if (spec.glottal_pole_mag > 0.0) {
        const double f0_lo = std::min(spec.f0_start, spec.f0_end);
        const double f0_hi = std::max(spec.f0_start, spec.f0_end);
        if (spec.glottal_freq_hz < f0_lo || spec.glottal_freq_hz > 3.0 * f0_hi)
            throw InvalidArgument("SynthSpec: glottal formant must lie in [F0, 3*F0]");
    }
    for (const auto& p : spec.tract_poles)
        if (!(p.magnitude >= 0.0 && p.magnitude < 1.0))
            throw InvalidArgument("SynthSpec: tract pole magnitudes must be < 1");
    if (!(spec.tilt_pole >= 0.0 && spec.tilt_pole < 1.0))
        throw InvalidArgument("SynthSpec: tilt pole magnitude must be in [0, 1)");
    if (!(spec.highpass_pole >= 0.0 && spec.highpass_pole < 1.0))
        throw InvalidArgument("SynthSpec: highpass pole magnitude must be in [0, 1)");
    if (spec.polarity != 1 && spec.polarity != -1)
        throw InvalidArgument("SynthSpec: polarity must be +1 or -1");
}

// Impulse train -> anticausal glottal resonance -> causal tract filter ->
// polarity sign -> peak normalization -> optional noise.
inline SynthTruth synthesize(const SynthSpec& spec) {
    validate(spec);

    const double rate = spec.rate;
    const std::size_t n_total = static_cast<std::size_t>(std::llround(spec.duration * rate));

    SynthTruth truth;
    truth.polarity = spec.polarity;

    // Impulse train following the (possibly ramped) f0 contour; margins keep
    // the anticausal tail and the causal decay inside the buffer.
    std::vector<double> train(n_total, 0.0);
    const double t_end = spec.duration - 0.02;
    for (double t = 0.02; t < t_end;) {
        const std::size_t n = static_cast<std::size_t>(std::llround(t * rate));
        if (n >= n_total) break;
        train[n] = 1.0;
        truth.gcis.instants.push_back(static_cast<double>(n) / rate);
        const double f0 =
            spec.f0_start + (spec.f0_end - spec.f0_start) * (t / spec.duration);
        t += 1.0 / f0;
    }
    truth.gcis.source = GciSource::external;

    std::vector<double> e = train;
    if (spec.highpass_pole > 0.0) {
        // y(n) = x(n) - x(n-1) + p*y(n-1)
        double x1 = 0.0, y1 = 0.0;
        for (double& v : e) {
            const double y = v - x1 + spec.highpass_pole * y1;
            x1 = v;
            y1 = y;
            v = y;
        }
    }
    std::vector<double> effective_excitation = e;  // source after AC coupling
    if (spec.glottal_pole_mag > 0.0) {
        truth.anticausal_filter = LpModel(
            detail::pole_pair_coeffs(spec.glottal_pole_mag, spec.glottal_freq_hz, rate), 0.0);
        e = time_reverse(synthesis_filter(time_reverse(e), truth.anticausal_filter));
    }

    truth.causal_filter = detail::expand_pole_pairs(spec.tract_poles, rate, spec.tilt_pole);
    std::vector<double> x = synthesis_filter(e, truth.causal_filter);

    // Positive-polarity speech carries negative excitation spikes (the
    // glottal closure discontinuity), matching natural recordings.
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    const double scale = peak > 0.0 ? -0.7 / peak * spec.polarity : 1.0;
    for (double& v : x) v *= scale;

    for (double& v : effective_excitation) v *= scale;
    truth.excitation = SampleBuffer(std::move(effective_excitation), rate);

    if (spec.snr_db) {
        double rms = 0.0;
        for (double v : x) rms += v * v;
        rms = std::sqrt(rms / static_cast<double>(x.size()));
        const double sigma = rms * std::pow(10.0, -(*spec.snr_db) / 20.0);
        detail::Rng rng(spec.seed);
        for (double& v : x) v += sigma * rng.normal();
    }

    truth.signal = SampleBuffer(std::move(x), rate);
    return truth;
}

struct CorpusRanges {
    double rate = 8000.0;
    double duration_lo = 0.6, duration_hi = 0.9;
    double f0_lo = 80.0, f0_hi = 250.0;
    double fg_factor_lo = 1.2, fg_factor_hi = 2.6;  // Fg = factor * F0
    double glottal_mag_lo = 0.88, glottal_mag_hi = 0.95;
    int tract_pairs_lo = 2, tract_pairs_hi = 4;
    // formant bands (Hz); pair p draws from band p
    std::vector<std::pair<double, double>> formant_bands{
        {350.0, 800.0}, {900.0, 1800.0}, {1900.0, 2800.0}, {2900.0, 3600.0}};
    double bandwidth_lo = 50.0, bandwidth_hi = 120.0;
    double tilt_lo = 0.75, tilt_hi = 0.92;
    double highpass_pole = 0.97;
    std::optional<std::pair<double, double>> snr_db = std::make_pair(30.0, 60.0);
};

// Randomized utterance specs within the ranges; polarity alternates so the
// corpus splits 50/50. Reproducible from the seed.
inline std::vector<SynthSpec> make_corpus_specs(std::size_t n_utterances,
                                                const CorpusRanges& ranges,
                                                std::uint64_t seed) {
    if (n_utterances == 0) throw InvalidArgument("make_corpus: need at least one utterance");
    detail::Rng rng(seed);

    std::vector<SynthSpec> specs;
    specs.reserve(n_utterances);
    for (std::size_t i = 0; i < n_utterances; ++i) {
        SynthSpec s;
        s.rate = ranges.rate;
        s.duration = rng.uniform(ranges.duration_lo, ranges.duration_hi);
        s.f0_start = rng.uniform(ranges.f0_lo, ranges.f0_hi);
        s.f0_end = std::min(ranges.f0_hi,
                            std::max(ranges.f0_lo, s.f0_start * rng.uniform(0.92, 1.08)));
        s.glottal_pole_mag = rng.uniform(ranges.glottal_mag_lo, ranges.glottal_mag_hi);
        const double fg_factor = rng.uniform(ranges.fg_factor_lo, ranges.fg_factor_hi);
        s.glottal_freq_hz = fg_factor * std::min(s.f0_start, s.f0_end);

        const int n_pairs = std::min<int>(
            static_cast<int>(ranges.formant_bands.size()),
            ranges.tract_pairs_lo +
                static_cast<int>(rng.next() %
                                 static_cast<std::uint64_t>(ranges.tract_pairs_hi -
                                                            ranges.tract_pairs_lo + 1)));
        for (int p = 0; p < n_pairs; ++p) {
            PolePair pp;
            const auto& band = ranges.formant_bands[static_cast<std::size_t>(p)];
            pp.frequency_hz = rng.uniform(band.first, band.second);
            const double bw = rng.uniform(ranges.bandwidth_lo, ranges.bandwidth_hi);
            pp.magnitude = std::exp(-M_PI * bw / ranges.rate);
            s.tract_poles.push_back(pp);
        }

        s.tilt_pole = rng.uniform(ranges.tilt_lo, ranges.tilt_hi);
        s.highpass_pole = ranges.highpass_pole;
        s.polarity = (i % 2 == 0) ? +1 : -1;
        if (ranges.snr_db)
            s.snr_db = rng.uniform(ranges.snr_db->first, ranges.snr_db->second);
        s.seed = rng.next();
        specs.push_back(std::move(s));
    }
    return specs;
}

inline std::vector<SynthTruth> make_corpus(std::size_t n_utterances, const CorpusRanges& ranges,
                                           std::uint64_t seed) {
    std::vector<SynthTruth> corpus;
    corpus.reserve(n_utterances);
    for (const SynthSpec& s : make_corpus_specs(n_utterances, ranges, seed))
        corpus.push_back(synthesize(s));
    return corpus;
}

}  // namespace maxlp

#endif
