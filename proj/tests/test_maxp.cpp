#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "maxlp/maxp.hpp"
#include "maxlp/synth.hpp"
#include "test_util.hpp"

using namespace maxlp;
using Catch::Approx;

namespace {

SynthTruth make_utterance(bool mixed_phase, std::uint64_t seed = 7) {
    SynthSpec s;
    s.rate = 8000.0;
    s.duration = 0.6;
    s.f0_start = s.f0_end = 110.0;
    s.glottal_pole_mag = mixed_phase ? 0.92 : 0.0;
    s.glottal_freq_hz = 220.0;
    s.tract_poles = {{0.96, 550.0}, {0.94, 1400.0}, {0.9, 2500.0}};
    s.seed = seed;
    return synthesize(s);
}

Frame interior_frame(const SynthTruth& t, std::size_t index = 40) {
    const FrameSequence fs = frame_signal(t.signal, 25.0, 5.0, WindowKind::hanning);
    REQUIRE(fs.frames.size() > index);
    return fs.frames[index];
}

double energy(const std::vector<double>& x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

}  // namespace

TEST_CASE("maxp config validation") {
    MaxPConfig cfg;
    CHECK(cfg.anticausal_order == 2);          // shipped default
    CHECK(cfg.total_order == 13);
    CHECK(cfg.alpha_candidates == std::vector<double>{-1.0, -0.7});

    cfg.anticausal_order = 13;
    CHECK_THROWS_AS(validate(cfg), InvalidArgument);
    cfg = MaxPConfig{};
    cfg.alpha_candidates = {};
    CHECK_THROWS_AS(validate(cfg), InvalidArgument);
    cfg = MaxPConfig{};
    cfg.alpha_candidates = {0.5};
    CHECK_THROWS_AS(validate(cfg), InvalidArgument);
}

TEST_CASE("order accounting and basic result shape") {
    const SynthTruth t = make_utterance(true);
    const Frame frame = interior_frame(t);
    const MaxPConfig cfg;

    const MaxPResult res = maxp_analyze(frame, cfg);
    CHECK(res.causal_model.order + res.anticausal_model.order == cfg.total_order);
    CHECK(res.residual.size() == frame.size());
    CHECK(res.gini >= 0.0);
    CHECK(res.gini <= 1.0);
    CHECK((res.alpha_chosen == -1.0 || res.alpha_chosen == -0.7));
}

TEST_CASE("minimum-phase input leaves the anticausal stage near identity") {
    const SynthTruth t = make_utterance(false);  // causal-only
    const Frame frame = interior_frame(t);
    const MaxPResult res = maxp_analyze(frame, MaxPConfig{});
    for (double c : res.anticausal_model.coefficients) CHECK(std::abs(c) < 0.15);
}

TEST_CASE("mixed-phase input: maxp residual is sparser than lp2 residual") {
    const SynthTruth t = make_utterance(true);
    const Frame frame = interior_frame(t);
    const MaxPConfig cfg;

    const MaxPResult maxp = maxp_analyze(frame, cfg);
    const SampleBuffer lp2 = residual_by_method(frame, ResidualMethod::lp2, cfg);
    CHECK(maxp.gini > gini_index(lp2.samples));
}

TEST_CASE("residual energy does not exceed the intermediate first-pass energy") {
    const SynthTruth t = make_utterance(true);
    const MaxPConfig cfg;
    const FrameSequence fs = frame_signal(t.signal, 25.0, 5.0, WindowKind::hanning);

    for (std::size_t i = 10; i < fs.frames.size(); i += 17) {
        const Frame& frame = fs.frames[i];
        for (double alpha : cfg.alpha_candidates) {
            const MaxPResult res = maxp_residual_for_alpha(frame, alpha, cfg);
            const auto r_a = inverse_filter(frame.samples, res.causal_model);
            CHECK(energy(res.residual.samples) <= energy(r_a) + 1e-9);
        }
    }
}

TEST_CASE("alpha selection maximizes gini with first-candidate ties") {
    const SynthTruth t = make_utterance(true);
    const Frame frame = interior_frame(t);
    MaxPConfig cfg;

    const MaxPResult both = maxp_analyze(frame, cfg);
    cfg.alpha_candidates = {-1.0};
    const MaxPResult only_m1 = maxp_residual_for_alpha(frame, -1.0, cfg);
    const MaxPResult single = maxp_analyze(frame, cfg);
    CHECK(single.gini == only_m1.gini);
    CHECK(single.alpha_chosen == -1.0);

    cfg.alpha_candidates = {-1.0, -0.7};
    const MaxPResult a1 = maxp_residual_for_alpha(frame, -1.0, cfg);
    const MaxPResult a2 = maxp_residual_for_alpha(frame, -0.7, cfg);
    CHECK(both.gini == Approx(std::max(a1.gini, a2.gini)));

    // duplicated candidate: tie resolves to the first occurrence
    cfg.alpha_candidates = {-0.7, -0.7};
    const MaxPResult tie = maxp_analyze(frame, cfg);
    CHECK(tie.alpha_chosen == -0.7);
}

TEST_CASE("maxp is deterministic and alpha choice is scale invariant") {
    const SynthTruth t = make_utterance(true, 13);
    Frame frame = interior_frame(t);
    const MaxPConfig cfg;

    const MaxPResult a = maxp_analyze(frame, cfg);
    const MaxPResult b = maxp_analyze(frame, cfg);
    CHECK(a.residual.samples == b.residual.samples);
    CHECK(a.alpha_chosen == b.alpha_chosen);
    CHECK(a.gini == b.gini);

    Frame scaled = frame;
    for (double& v : scaled.samples) v *= 3.7;
    const MaxPResult c = maxp_analyze(scaled, cfg);
    CHECK(c.alpha_chosen == a.alpha_chosen);
    CHECK(c.gini == Approx(a.gini).margin(1e-9));
}

TEST_CASE("degenerate frames are unanalyzable") {
    Frame zero;
    zero.samples.assign(200, 0.0);
    zero.rate = 8000.0;
    CHECK_THROWS_AS(maxp_analyze(zero, MaxPConfig{}), UnanalyzableFrame);

    Frame tiny;
    tiny.samples.assign(10, 1.0);
    tiny.rate = 8000.0;
    CHECK_THROWS_AS(maxp_analyze(tiny, MaxPConfig{}), InvalidArgument);
}

TEST_CASE("residual_by_method dispatch identities") {
    const SynthTruth t = make_utterance(true, 21);
    const Frame frame = interior_frame(t);
    const MaxPConfig cfg;

    const SampleBuffer lp2 = residual_by_method(frame, ResidualMethod::lp2, cfg);
    const auto direct = inverse_filter(frame.samples, lp2_analyze(frame.samples, cfg.total_order));
    CHECK(lp2.samples == direct);

    const SampleBuffer mx = residual_by_method(frame, ResidualMethod::maxp_lp2, cfg);
    const MaxPResult res = maxp_analyze(frame, cfg);
    CHECK(mx.samples == res.residual.samples);

    // wlp2 without GCIs must refuse
    CHECK_THROWS_AS(residual_by_method(frame, ResidualMethod::wlp2, cfg), InvalidArgument);
}

TEST_CASE("wlp2 and lp1 variants run end to end") {
    const SynthTruth t = make_utterance(true, 33);
    const Frame frame = interior_frame(t);
    const MaxPConfig cfg;

    const SampleBuffer w = residual_by_method(frame, ResidualMethod::wlp2, cfg, &t.gcis);
    CHECK(w.size() == frame.size());
    const SampleBuffer mw = residual_by_method(frame, ResidualMethod::maxp_wlp2, cfg, &t.gcis);
    CHECK(mw.size() == frame.size());

    const SampleBuffer l1 = residual_by_method(frame, ResidualMethod::lp1, cfg);
    CHECK(l1.size() == frame.size());
    const SampleBuffer ml1 = residual_by_method(frame, ResidualMethod::maxp_lp1, cfg);
    CHECK(ml1.size() == frame.size());
}

TEST_CASE("filter_preemphasized switch changes the first-pass input") {
    const SynthTruth t = make_utterance(true, 55);
    const Frame frame = interior_frame(t);
    MaxPConfig cfg;

    const MaxPResult plain = maxp_residual_for_alpha(frame, -0.7, cfg);
    cfg.filter_preemphasized = true;
    const MaxPResult pre = maxp_residual_for_alpha(frame, -0.7, cfg);
    CHECK(plain.residual.samples != pre.residual.samples);
}

TEST_CASE("residual_track stitches a full-length residual deterministically") {
    const SynthTruth t = make_utterance(true, 77);
    const MaxPConfig cfg;

    const TrackResult serial = residual_track(t.signal, ResidualMethod::maxp_lp2, cfg, nullptr,
                                              25.0, 5.0, 1);
    const TrackResult parallel = residual_track(t.signal, ResidualMethod::maxp_lp2, cfg, nullptr,
                                                25.0, 5.0, 4);
    CHECK(serial.residual.samples == parallel.residual.samples);
    CHECK(serial.residual.size() == t.signal.size());
    REQUIRE(!serial.frames.empty());
    for (const auto& fo : serial.frames) {
        CHECK(fo.ok);
        REQUIRE(fo.alpha_chosen.has_value());
        CHECK((*fo.alpha_chosen == -1.0 || *fo.alpha_chosen == -0.7));
    }

    // the track is nonzero somewhere in the voiced interior
    double peak = 0.0;
    for (double v : serial.residual.samples) peak = std::max(peak, std::abs(v));
    CHECK(peak > 0.0);
}
