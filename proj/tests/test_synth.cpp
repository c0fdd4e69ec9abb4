#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "maxlp/lp.hpp"
#include "maxlp/synth.hpp"
#include "test_util.hpp"

using namespace maxlp;
using Catch::Approx;

namespace {

SynthSpec basic_spec() {
    SynthSpec s;
    s.rate = 8000.0;
    s.duration = 0.6;
    s.f0_start = s.f0_end = 100.0;
    s.glottal_pole_mag = 0.9;
    s.glottal_freq_hz = 200.0;
    s.tract_poles = {{0.95, 600.0}, {0.93, 1500.0}, {0.9, 2600.0}};
    s.polarity = +1;
    s.seed = 12345;
    return s;
}

}  // namespace

TEST_CASE("synthesize is deterministic") {
    SynthSpec s = basic_spec();
    s.snr_db = 40.0;
    const SynthTruth a = synthesize(s);
    const SynthTruth b = synthesize(s);
    CHECK(a.signal.samples == b.signal.samples);
    CHECK(a.gcis.instants == b.gcis.instants);
}

TEST_CASE("gci spacing follows f0") {
    const SynthTruth t = synthesize(basic_spec());
    REQUIRE(t.gcis.instants.size() > 10);
    for (std::size_t i = 1; i < t.gcis.instants.size(); ++i) {
        const double spacing = t.gcis.instants[i] - t.gcis.instants[i - 1];
        CHECK(std::abs(spacing * 8000.0 - 80.0) <= 1.0);  // rate/f0 +- 1 sample
    }
}

TEST_CASE("causal-only spec gives an impulse-train lp2 residual") {
    SynthSpec s = basic_spec();
    s.glottal_pole_mag = 0.0;  // no anticausal stage
    const SynthTruth t = synthesize(s);
    CHECK(t.anticausal_filter.order == 0);

    // the construction is exactly invertible at matched order
    const auto r = inverse_filter(t.signal.samples, t.causal_filter);
    double peak = 0.0;
    for (double v : r) peak = std::max(peak, std::abs(v));
    REQUIRE(peak > 0.0);

    std::vector<bool> is_gci(t.signal.size(), false);
    for (double g : t.gcis.instants)
        is_gci[static_cast<std::size_t>(std::llround(g * 8000.0))] = true;
    for (std::size_t n = 0; n < r.size(); ++n)
        if (!is_gci[n]) CHECK(std::abs(r[n]) < 1e-6 * peak);
}

TEST_CASE("oracle identity: true-filter chain recovers the excitation") {
    const SynthTruth t = synthesize(basic_spec());

    const auto r_a = inverse_filter(t.signal.samples, t.causal_filter);
    const auto q = time_reverse(r_a);
    const auto r_rev = inverse_filter(q, t.anticausal_filter);
    const auto r = time_reverse(r_rev);

    double err = 0.0, ref = 0.0;
    for (std::size_t n = 0; n < r.size(); ++n) {
        err += (r[n] - t.excitation.samples[n]) * (r[n] - t.excitation.samples[n]);
        ref += t.excitation.samples[n] * t.excitation.samples[n];
    }
    REQUIRE(ref > 0.0);
    CHECK(std::sqrt(err / ref) < 1e-6);
}

TEST_CASE("glottal-only reversal symmetry") {
    SynthSpec s = basic_spec();
    s.tract_poles.clear();
    const SynthTruth t = synthesize(s);

    // reversing the signal must equal causal filtering of the reversed train
    const auto reversed_excitation = time_reverse(t.excitation.samples);
    const auto want = synthesis_filter(reversed_excitation, t.anticausal_filter);
    const auto got = time_reverse(t.signal.samples);
    // noiseless, so this is exact up to float round-off
    for (std::size_t n = 0; n < got.size(); ++n)
        CHECK(got[n] == Approx(want[n]).margin(1e-9));
}

TEST_CASE("polarity flag flips the waveform") {
    SynthSpec s = basic_spec();
    const SynthTruth pos = synthesize(s);
    s.polarity = -1;
    const SynthTruth neg = synthesize(s);
    REQUIRE(pos.signal.size() == neg.signal.size());
    for (std::size_t n = 0; n < pos.signal.size(); ++n)
        CHECK(pos.signal.samples[n] == Approx(-neg.signal.samples[n]).margin(1e-12));
}

TEST_CASE("spec validation") {
    SynthSpec s = basic_spec();
    s.glottal_freq_hz = 1000.0;  // > 3 * f0
    CHECK_THROWS_AS(synthesize(s), InvalidArgument);

    s = basic_spec();
    s.tract_poles[0].magnitude = 1.2;
    CHECK_THROWS_AS(synthesize(s), InvalidArgument);

    s = basic_spec();
    s.polarity = 0;
    CHECK_THROWS_AS(synthesize(s), InvalidArgument);
}

TEST_CASE("make_corpus is reproducible, alternates polarity, stays stable") {
    const CorpusRanges ranges;
    const auto specs_a = make_corpus_specs(20, ranges, 777);
    const auto specs_b = make_corpus_specs(20, ranges, 777);
    REQUIRE(specs_a.size() == 20);

    int pos = 0;
    for (std::size_t i = 0; i < specs_a.size(); ++i) {
        CHECK(specs_a[i].seed == specs_b[i].seed);
        CHECK(specs_a[i].f0_start == specs_b[i].f0_start);
        pos += specs_a[i].polarity > 0 ? 1 : 0;
        CHECK(std::abs(specs_a[i].glottal_pole_mag) < 1.0);
        for (const auto& p : specs_a[i].tract_poles) CHECK(p.magnitude < 1.0);
        CHECK(specs_a[i].f0_start >= ranges.f0_lo);
        CHECK(specs_a[i].f0_start <= ranges.f0_hi);
        CHECK(specs_a[i].glottal_freq_hz >=
              std::min(specs_a[i].f0_start, specs_a[i].f0_end) - 1e-9);
        CHECK(specs_a[i].glottal_freq_hz <=
              3.0 * std::max(specs_a[i].f0_start, specs_a[i].f0_end) + 1e-9);
    }
    CHECK(pos == 10);  // alternating assignment

    // corpus signals hash identically across two generations
    const auto corpus_a = make_corpus(5, ranges, 42);
    const auto corpus_b = make_corpus(5, ranges, 42);
    for (std::size_t i = 0; i < corpus_a.size(); ++i)
        CHECK(corpus_a[i].signal.samples == corpus_b[i].signal.samples);
}
