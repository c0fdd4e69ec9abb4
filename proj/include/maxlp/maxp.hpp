#ifndef MAXLP_MAXP_HPP
#define MAXLP_MAXP_HPP

// Maximum-phase residual extraction: a preemphasis-guided causal LP pass,
// causality inversion by time reversal, an anticausal LP pass on the reversed
// signal, and per-frame preemphasis-coefficient selection by Gini
// maximization. Works on top of any of the three base LP criteria.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "maxlp/errors.hpp"
#include "maxlp/lp.hpp"
#include "maxlp/metrics.hpp"
#include "maxlp/parallel.hpp"
#include "maxlp/pitch.hpp"
#include "maxlp/signal.hpp"

namespace maxlp {

enum class BaseMethod { lp2, wlp2, lp1 };

enum class ResidualMethod { lp2, wlp2, lp1, maxp_lp2, maxp_wlp2, maxp_lp1 };

inline const char* to_string(ResidualMethod m) {
    switch (m) {
        case ResidualMethod::lp2: return "lp2";
        case ResidualMethod::wlp2: return "wlp2";
        case ResidualMethod::lp1: return "lp1";
        case ResidualMethod::maxp_lp2: return "maxp_lp2";
        case ResidualMethod::maxp_wlp2: return "maxp_wlp2";
        case ResidualMethod::maxp_lp1: return "maxp_lp1";
    }
    return "?";
}

inline bool is_maxp(ResidualMethod m) {
    return m == ResidualMethod::maxp_lp2 || m == ResidualMethod::maxp_wlp2 ||
           m == ResidualMethod::maxp_lp1;
}

inline BaseMethod base_of(ResidualMethod m) {
    switch (m) {
        case ResidualMethod::lp2:
        case ResidualMethod::maxp_lp2: return BaseMethod::lp2;
        case ResidualMethod::wlp2:
        case ResidualMethod::maxp_wlp2: return BaseMethod::wlp2;
        case ResidualMethod::lp1:
        case ResidualMethod::maxp_lp1: return BaseMethod::lp1;
    }
    return BaseMethod::lp2;
}

struct MaxPConfig {
    std::size_t total_order = 13;                    // K = Kc + Ka
    std::size_t anticausal_order = 2;                // Ka
    std::vector<double> alpha_candidates{-1.0, -0.7};
    BaseMethod base_method = BaseMethod::lp2;
    // When set, the first inverse filter consumes the preemphasized frame
    // instead of the original one.
    bool filter_preemphasized = false;
    // Weighting dip around GCIs for the wlp2 base.
    double dip_halfwidth_ms = 2.0;
    double dip_floor = 0.1;
    // l1 solver knobs.
    double l1_tol = 1e-8;
    std::size_t l1_max_iter = 200;
};

inline void validate(const MaxPConfig& cfg) {
    if (!(cfg.anticausal_order > 0 && cfg.anticausal_order < cfg.total_order))
        throw InvalidArgument("MaxPConfig: need 0 < Ka < K");
    if (cfg.alpha_candidates.empty())
        throw InvalidArgument("MaxPConfig: alpha_candidates must be non-empty");
    for (double a : cfg.alpha_candidates)
        if (!(a >= -1.0 && a <= 0.0))
            throw InvalidArgument("MaxPConfig: alpha candidates must be in [-1, 0]");
}

struct MaxPResult {
    SampleBuffer residual;
    LpModel causal_model;      // order Kc
    LpModel anticausal_model;  // order Ka, expressed in reversed time
    double alpha_chosen = 0.0;
    double gini = 0.0;
};

namespace detail {

// Zero-pad coefficients when an exact-fit truncation shrank the order; the
// filter is unchanged and the Kc + Ka accounting stays intact.
inline LpModel pad_to_order(LpModel model, std::size_t order) {
    if (model.order < order) {
        model.coefficients.resize(order, 0.0);
        model.order = order;
    }
    return model;
}

// One base-criterion LP analysis. For the l1 criterion, poles outside the
// unit circle are reflected back inside, as is customary before inverse
// filtering.
inline LpModel base_lp_model(const Frame& frame, const std::vector<double>& x, std::size_t K,
                             const MaxPConfig& cfg, const GciTrack* gcis) {
    switch (cfg.base_method) {
        case BaseMethod::lp2:
            return pad_to_order(lp2_analyze(x, K), K);
        case BaseMethod::wlp2: {
            if (gcis == nullptr)
                throw InvalidArgument("wlp2 base requires a GCI track");
            const WeightVector w =
                gci_weighting(frame, gcis_in_frame(*gcis, frame), cfg.dip_halfwidth_ms,
                              cfg.dip_floor);
            return wlp2_analyze(x, K, w);
        }
        case BaseMethod::lp1: {
            LpModel m = l1_analyze(x, K, cfg.l1_tol, cfg.l1_max_iter).model;
            if (polynomial_roots(m).max_modulus > 1.0) m = reflect_poles(m).model;
            return m;
        }
    }
    throw InvalidArgument("unknown base method");
}

}  // namespace detail

// The full two-pass pipeline for one preemphasis coefficient:
//   1. preemphasize the frame with alpha
//   2. estimate the causal model (order Kc = K - Ka) on the preemphasized frame
//   3. inverse-filter the original frame with it
//   4. reverse the time axis
//   5. estimate the anticausal model (order Ka, l2) on the reversed signal
//   6. inverse-filter and reverse back
inline MaxPResult maxp_residual_for_alpha(const Frame& frame, double alpha, const MaxPConfig& cfg,
                                          const GciTrack* gcis = nullptr) {
    validate(cfg);
    if (frame.size() <= cfg.total_order)
        throw InvalidArgument("maxp: frame length must exceed total order");

    const std::size_t causal_order = cfg.total_order - cfg.anticausal_order;
    MaxPResult result;
    result.alpha_chosen = alpha;

    try {
        const std::vector<double> sp = preemphasize(frame.samples, alpha);
        result.causal_model = detail::base_lp_model(frame, sp, causal_order, cfg, gcis);

        const std::vector<double>& first_input = cfg.filter_preemphasized ? sp : frame.samples;
        const std::vector<double> r_a = inverse_filter(first_input, result.causal_model);
        const std::vector<double> q = time_reverse(r_a);

        result.anticausal_model =
            detail::pad_to_order(lp2_analyze(q, cfg.anticausal_order), cfg.anticausal_order);
        const std::vector<double> r_rev = inverse_filter(q, result.anticausal_model);

        result.residual = SampleBuffer(time_reverse(r_rev), frame.rate);
        result.gini = gini_index(result.residual.samples);
    } catch (const DegenerateInput& e) {
        throw UnanalyzableFrame(std::string("maxp: degenerate frame: ") + e.what());
    } catch (const UndefinedMetric& e) {
        throw UnanalyzableFrame(std::string("maxp: degenerate residual: ") + e.what());
    }
    return result;
}

// Run the pipeline for every candidate alpha and keep the sparsest result
// (maximal Gini). Ties go to the earlier candidate. Individual candidates may
// fail; only when every candidate fails is the frame unanalyzable.
inline MaxPResult maxp_analyze(const Frame& frame, const MaxPConfig& cfg,
                               const GciTrack* gcis = nullptr) {
    validate(cfg);

    std::optional<MaxPResult> best;
    std::string first_error;
    for (double alpha : cfg.alpha_candidates) {
        try {
            MaxPResult r = maxp_residual_for_alpha(frame, alpha, cfg, gcis);
            if (!best || r.gini > best->gini) best = std::move(r);
        } catch (const UnanalyzableFrame& e) {
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (!best)
        throw UnanalyzableFrame("maxp: every alpha candidate failed; first error: " + first_error);
    return *std::move(best);
}

// Uniform dispatch: conventional methods run a single LP of the total order
// followed by inverse filtering, maxp methods run the two-pass pipeline.
inline SampleBuffer residual_by_method(const Frame& frame, ResidualMethod method,
                                       const MaxPConfig& cfg, const GciTrack* gcis = nullptr) {
    if (is_maxp(method)) {
        MaxPConfig c = cfg;
        c.base_method = base_of(method);
        return maxp_analyze(frame, c, gcis).residual;
    }
    MaxPConfig c = cfg;
    c.base_method = base_of(method);
    try {
        const LpModel model = detail::base_lp_model(frame, frame.samples, cfg.total_order, c, gcis);
        return SampleBuffer(inverse_filter(frame.samples, model), frame.rate);
    } catch (const DegenerateInput& e) {
        throw UnanalyzableFrame(std::string("degenerate frame: ") + e.what());
    }
}

// Per-frame outcome of a whole-utterance analysis pass.
struct FrameOutcome {
    std::size_t frame_index = 0;
    std::size_t start_index = 0;
    bool ok = false;
    std::vector<double> residual;  // windowed-frame residual
    // Conventional methods fill `model`; maxp methods fill the other three.
    std::optional<LpModel> model;
    std::optional<LpModel> causal_model;
    std::optional<LpModel> anticausal_model;
    std::optional<double> alpha_chosen;
    std::optional<double> gini;
};

struct TrackResult {
    SampleBuffer residual;             // stitched from central hop segments
    std::vector<FrameOutcome> frames;
    bool too_short = false;
};

// Analyze every frame of a buffer with one method and stitch a full-length
// residual from the central hop segment of each frame (edges come from the
// first/last frame). Unanalyzable frames leave zeros.
inline TrackResult residual_track(const SampleBuffer& buffer, ResidualMethod method,
                                  const MaxPConfig& cfg, const GciTrack* gcis = nullptr,
                                  double win_ms = 25.0, double hop_ms = 5.0, unsigned jobs = 1) {
    TrackResult out;
    out.residual = SampleBuffer(std::vector<double>(buffer.size(), 0.0), buffer.rate);

    const FrameSequence fs = frame_signal(buffer, win_ms, hop_ms, WindowKind::hanning);
    out.too_short = fs.too_short;
    if (fs.frames.empty()) return out;

    out.frames.resize(fs.frames.size());
    parallel_for(fs.frames.size(), jobs, [&](std::size_t i) {
        const Frame& frame = fs.frames[i];
        FrameOutcome& fo = out.frames[i];
        fo.frame_index = i;
        fo.start_index = frame.start_index;
        try {
            if (is_maxp(method)) {
                MaxPConfig c = cfg;
                c.base_method = base_of(method);
                MaxPResult r = maxp_analyze(frame, c, gcis);
                fo.residual = std::move(r.residual.samples);
                fo.causal_model = std::move(r.causal_model);
                fo.anticausal_model = std::move(r.anticausal_model);
                fo.alpha_chosen = r.alpha_chosen;
                fo.gini = r.gini;
            } else {
                MaxPConfig c = cfg;
                c.base_method = base_of(method);
                LpModel model =
                    detail::base_lp_model(frame, frame.samples, cfg.total_order, c, gcis);
                fo.residual = inverse_filter(frame.samples, model);
                fo.model = std::move(model);
            }
            fo.ok = true;
        } catch (const Error&) {
            fo.ok = false;
            fo.residual.assign(frame.size(), 0.0);
        }
    });

    const std::size_t L = fs.frames.front().size();
    const std::size_t hop =
        fs.frames.size() > 1 ? fs.frames[1].start_index - fs.frames[0].start_index : L;
    const std::size_t c0 = (L - hop) / 2;
    for (std::size_t i = 0; i < fs.frames.size(); ++i) {
        const std::size_t start = fs.frames[i].start_index;
        const std::size_t lo = i == 0 ? 0 : c0;
        const std::size_t hi = i + 1 == fs.frames.size() ? L : c0 + hop;
        for (std::size_t j = lo; j < hi && start + j < out.residual.size(); ++j)
            out.residual.samples[start + j] = out.frames[i].residual[j];
    }
    return out;
}

}  // namespace maxlp

#endif
