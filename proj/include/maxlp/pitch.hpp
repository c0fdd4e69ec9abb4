#ifndef MAXLP_PITCH_HPP
#define MAXLP_PITCH_HPP

// Minimal F0 tracking and GCI detection feeding the weighted-l2 analysis and
// the excitation-modeling frame extraction, plus the GCI text-file format.
// Any external GCI tool can be used instead through read_gci_file.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "maxlp/errors.hpp"
#include "maxlp/lp.hpp"
#include "maxlp/signal.hpp"

namespace maxlp {

struct F0Track {
    std::vector<double> times;  // frame centers, seconds
    std::vector<double> f0;     // Hz, 0 = unvoiced
    double hop = 0.0;           // seconds

    std::size_t size() const { return f0.size(); }

    // Nearest-frame lookup; 0 outside the tracked range or when unvoiced.
    double f0_at(double t) const {
        if (f0.empty() || hop <= 0.0) return 0.0;
        const double pos = (t - times.front()) / hop;
        if (pos < -0.5) return 0.0;
        std::size_t idx = static_cast<std::size_t>(std::llround(std::max(0.0, pos)));
        if (idx >= f0.size()) idx = f0.size() - 1;
        return f0[idx];
    }
};

enum class GciSource { detected, external };

struct GciTrack {
    std::vector<double> instants;  // seconds, strictly increasing
    GciSource source = GciSource::detected;
};

struct F0Config {
    double frame_ms = 40.0;
    double hop_ms = 10.0;
    double min_f0 = 50.0;
    double max_f0 = 500.0;
    double voicing_threshold = 0.3;  // on the normalized autocorrelation peak
};

// Per-frame normalized autocorrelation peak search with a sub-multiple check
// against octave errors and parabolic lag refinement.
inline F0Track estimate_f0(const SampleBuffer& buffer, double frame_ms = 40.0,
                           double hop_ms = 10.0, const F0Config& cfg_in = F0Config{}) {
    if (buffer.rate < 8000.0) throw InvalidArgument("estimate_f0: rate must be >= 8000 Hz");
    F0Config cfg = cfg_in;
    cfg.frame_ms = frame_ms;
    cfg.hop_ms = hop_ms;

    F0Track track;
    track.hop = hop_ms / 1000.0;

    const FrameSequence fs = frame_signal(buffer, frame_ms, hop_ms, WindowKind::rectangular);
    const long lag_min = std::max(2L, std::lround(buffer.rate / cfg.max_f0));

    for (const Frame& frame : fs.frames) {
        const std::size_t L = frame.size();
        const long lag_max =
            std::min(static_cast<long>(L) - 2, std::lround(buffer.rate / cfg.min_f0));
        track.times.push_back((static_cast<double>(frame.start_index) + L / 2.0) / buffer.rate);

        std::vector<double> x = frame.samples;
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(L);
        for (double& v : x) v -= mean;

        double r0 = 0.0;
        for (double v : x) r0 += v * v;
        if (!(r0 > 0.0) || lag_max <= lag_min) {
            track.f0.push_back(0.0);
            continue;
        }

        std::vector<double> r(static_cast<std::size_t>(lag_max) + 2, 0.0);
        for (long tau = lag_min - 1; tau <= lag_max + 1; ++tau) {
            if (tau < 1 || tau >= static_cast<long>(L)) continue;
            double acc = 0.0;
            for (std::size_t n = static_cast<std::size_t>(tau); n < L; ++n)
                acc += x[n] * x[n - static_cast<std::size_t>(tau)];
            r[static_cast<std::size_t>(tau)] = acc / r0;
        }

        long best = lag_min;
        for (long tau = lag_min; tau <= lag_max; ++tau)
            if (r[static_cast<std::size_t>(tau)] > r[static_cast<std::size_t>(best)]) best = tau;

        if (r[static_cast<std::size_t>(best)] < cfg.voicing_threshold) {
            track.f0.push_back(0.0);
            continue;
        }

        // Prefer a sub-multiple lag nearly as strong as the peak.
        for (int div = 4; div >= 2; --div) {
            const long sub = best / div;
            if (sub >= lag_min && r[static_cast<std::size_t>(sub)] >=
                                      0.9 * r[static_cast<std::size_t>(best)]) {
                best = sub;
                break;
            }
        }

        // Parabolic refinement around the integer peak.
        double lag = static_cast<double>(best);
        if (best > lag_min && best < lag_max) {
            const double ym = r[static_cast<std::size_t>(best) - 1];
            const double y0 = r[static_cast<std::size_t>(best)];
            const double yp = r[static_cast<std::size_t>(best) + 1];
            const double den = ym - 2.0 * y0 + yp;
            if (std::abs(den) > 1e-12) {
                const double delta = 0.5 * (ym - yp) / den;
                if (std::abs(delta) <= 1.0) lag += delta;
            }
        }

        double f0 = buffer.rate / lag;
        f0 = std::min(cfg.max_f0, std::max(cfg.min_f0, f0));
        track.f0.push_back(f0);
    }
    return track;
}

namespace detail {

// Full-length LP2 residual assembled from the central hop segment of each
// analysis frame (leading/trailing edges come from the first/last frame).
inline std::vector<double> lp2_residual_track(const SampleBuffer& buffer, std::size_t K,
                                              double win_ms = 25.0, double hop_ms = 5.0) {
    std::vector<double> out(buffer.size(), 0.0);
    const FrameSequence fs = frame_signal(buffer, win_ms, hop_ms, WindowKind::hanning);
    if (fs.frames.empty()) return out;

    const std::size_t L = fs.frames.front().size();
    const std::size_t hop = fs.frames.size() > 1
                                ? fs.frames[1].start_index - fs.frames[0].start_index
                                : L;
    const std::size_t c0 = (L - hop) / 2;

    for (std::size_t i = 0; i < fs.frames.size(); ++i) {
        const Frame& frame = fs.frames[i];
        std::vector<double> res;
        try {
            res = inverse_filter(frame.samples, lp2_analyze(frame.samples, K));
        } catch (const DegenerateInput&) {
            res.assign(frame.size(), 0.0);  // silent frame
        }
        std::size_t lo = i == 0 ? 0 : c0;
        std::size_t hi = i + 1 == fs.frames.size() ? frame.size() : c0 + hop;
        for (std::size_t j = lo; j < hi && frame.start_index + j < out.size(); ++j)
            out[frame.start_index + j] = res[j];
    }
    return out;
}

}  // namespace detail

struct GciConfig {
    std::size_t lp_order = 13;
    double min_spacing_periods = 0.8;
};

// Within each voiced region, pick the strongest-magnitude LP2-residual
// extremum per pitch period, with minimum spacing 0.8/f0. After a first free
// search the walk tracks the expected next instant (previous + period) inside
// a +-0.35 period window, falling back to free search when the pick is weak.
inline GciTrack detect_gci(const SampleBuffer& buffer, const F0Track& f0,
                           const GciConfig& cfg = GciConfig{}) {
    GciTrack track;
    track.source = GciSource::detected;

    bool any_voiced = false;
    for (double v : f0.f0) any_voiced |= v > 0.0;
    if (!any_voiced) return track;

    const std::vector<double> residual = detail::lp2_residual_track(buffer, cfg.lp_order);
    const double rate = buffer.rate;
    const std::size_t N = buffer.size();

    auto local_f0 = [&](std::size_t n) { return f0.f0_at(static_cast<double>(n) / rate); };

    std::size_t region_start = 0;
    while (region_start < N) {
        if (local_f0(region_start) <= 0.0) {
            ++region_start;
            continue;
        }
        std::size_t region_end = region_start;
        while (region_end < N && local_f0(region_end) > 0.0) ++region_end;

        double region_max = 0.0;
        for (std::size_t m = region_start; m < region_end; ++m)
            region_max = std::max(region_max, std::abs(residual[m]));
        if (region_max <= 0.0) {
            region_start = region_end;
            continue;
        }

        long prev = -1;
        std::size_t cursor = region_start;
        while (cursor < region_end) {
            const double hz = local_f0(cursor);
            const double period = rate / hz;
            std::size_t lo, hi;
            if (prev >= 0) {
                lo = static_cast<std::size_t>(
                    std::max<long>(static_cast<long>(cursor),
                                   prev + std::lround(0.65 * period)));
                hi = static_cast<std::size_t>(prev + std::lround(1.35 * period));
            } else {
                lo = cursor;
                hi = cursor + static_cast<std::size_t>(std::llround(1.5 * period));
            }
            hi = std::min(hi, region_end);
            if (lo >= hi) break;

            std::size_t best = lo;
            for (std::size_t m = lo; m < hi; ++m)
                if (std::abs(residual[m]) > std::abs(residual[best])) best = m;

            const bool strong = std::abs(residual[best]) >= 0.1 * region_max;
            const double t = static_cast<double>(best) / rate;
            const bool spaced = track.instants.empty() ||
                                t - track.instants.back() >= cfg.min_spacing_periods / hz;
            if (strong && spaced) {
                track.instants.push_back(t);
                prev = static_cast<long>(best);
                cursor = best + 1;
            } else if (prev >= 0) {
                prev = -1;  // lost the pulse train, resume free search
                cursor = hi;
            } else {
                cursor += static_cast<std::size_t>(std::max(1L, std::lround(period)));
            }
        }
        region_start = region_end;
    }
    return track;
}

inline void validate(const GciTrack& track) {
    for (std::size_t i = 1; i < track.instants.size(); ++i)
        if (!(track.instants[i] > track.instants[i - 1]))
            throw InvalidArgument("GciTrack: instants must be strictly increasing");
}

// Plain text, one instant in seconds per line, 6-decimal fixed format.
inline GciTrack read_gci_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open GCI file: " + path);

    GciTrack track;
    track.source = GciSource::external;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        char* end = nullptr;
        const double t = std::strtod(line.c_str(), &end);
        while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
        if (end == line.c_str() || (end && *end != '\0'))
            throw ParseError("malformed GCI line: '" + line + "'", lineno);
        if (!track.instants.empty() && !(t > track.instants.back()))
            throw ParseError("non-monotone GCI instant", lineno);
        track.instants.push_back(t);
    }
    return track;
}

inline void write_gci_file(const GciTrack& track, const std::string& path) {
    validate(track);
    std::ofstream out(path);
    if (!out) throw Error("cannot write GCI file: " + path);
    char buf[32];
    for (double t : track.instants) {
        std::snprintf(buf, sizeof(buf), "%.6f\n", t);
        out << buf;
    }
}

// Frame-local sample indices of the instants that fall inside the frame.
inline std::vector<std::size_t> gcis_in_frame(const GciTrack& track, const Frame& frame) {
    std::vector<std::size_t> idx;
    const double t0 = static_cast<double>(frame.start_index) / frame.rate;
    const double t1 = static_cast<double>(frame.start_index + frame.size()) / frame.rate;
    for (double t : track.instants) {
        if (t < t0) continue;
        if (t >= t1) break;
        idx.push_back(static_cast<std::size_t>(std::llround((t - t0) * frame.rate)));
    }
    for (std::size_t& i : idx) i = std::min(i, frame.size() - 1);
    return idx;
}

}  // namespace maxlp

#endif
