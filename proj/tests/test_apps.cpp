#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "maxlp/apps.hpp"
#include "maxlp/synth.hpp"
#include "test_util.hpp"

using namespace maxlp;
using Catch::Approx;

namespace {

SynthTruth voiced_utterance(int polarity = +1, std::uint64_t seed = 3) {
    SynthSpec s;
    s.rate = 8000.0;
    s.duration = 0.8;
    s.f0_start = s.f0_end = 105.0;
    s.glottal_pole_mag = 0.92;
    s.glottal_freq_hz = 210.0;
    s.tract_poles = {{0.96, 600.0}, {0.93, 1500.0}, {0.9, 2700.0}};
    s.polarity = polarity;
    s.seed = seed;
    return synthesize(s);
}

}  // namespace

TEST_CASE("glottal_approximation attenuates above 1.5 kHz") {
    test_util::Rng rng(44);
    std::vector<double> noise(8192);
    for (double& v : noise) v = rng.normal();
    const SampleBuffer in(noise, 8000.0);
    const SampleBuffer out = glottal_approximation(in);

    const auto mag_in = test_util::dft_magnitude(in.samples);
    const auto mag_out = test_util::dft_magnitude(out.samples);
    const double bin_hz = 8000.0 / 8192.0;

    double e_in = 0.0, e_out = 0.0;
    for (std::size_t k = static_cast<std::size_t>(1500.0 / bin_hz); k < mag_in.size(); ++k) {
        e_in += mag_in[k] * mag_in[k];
        e_out += mag_out[k] * mag_out[k];
    }
    REQUIRE(e_in > 0.0);
    CHECK(10.0 * std::log10(e_in / e_out) > 20.0);
}

TEST_CASE("glottal_approximation is odd and kills DC") {
    const SynthTruth t = voiced_utterance();
    SampleBuffer neg = t.signal;
    for (double& v : neg.samples) v = -v;

    const SampleBuffer g = glottal_approximation(t.signal);
    const SampleBuffer gn = glottal_approximation(neg);
    for (std::size_t n = 0; n < g.size(); ++n)
        CHECK(gn.samples[n] == Approx(-g.samples[n]).margin(1e-12));

    const SampleBuffer dc(std::vector<double>(4000, 0.35), 8000.0);
    const SampleBuffer gdc = glottal_approximation(dc);
    for (double v : gdc.samples) CHECK(v == Approx(0.0).margin(1e-12));
}

TEST_CASE("detect_polarity on synthetic ground truth") {
    const SynthTruth pos = voiced_utterance(+1);
    const PolarityVerdict vp = detect_polarity(pos.signal, ResidualMethod::maxp_lp2);
    CHECK(vp.polarity == +1);
    CHECK_FALSE(vp.low_confidence);

    SampleBuffer negated = pos.signal;
    for (double& v : negated.samples) v = -v;
    const PolarityVerdict vn = detect_polarity(negated, ResidualMethod::maxp_lp2);
    CHECK(vn.polarity == -1);

    // antisymmetry of the differenced skewness
    CHECK(vn.differenced_skewness == Approx(-vp.differenced_skewness).margin(1e-9));
}

TEST_CASE("detect_polarity with the lp2 method also works on clean synthetic speech") {
    const SynthTruth pos = voiced_utterance(+1, 11);
    CHECK(detect_polarity(pos.signal, ResidualMethod::lp2).polarity == +1);
    const SynthTruth neg = voiced_utterance(-1, 12);
    CHECK(detect_polarity(neg.signal, ResidualMethod::lp2).polarity == -1);
}

TEST_CASE("maxp_lp2 pushes the differenced skewness further from zero") {
    double sum_maxp = 0.0, sum_lp2 = 0.0;
    CorpusRanges ranges;
    ranges.snr_db = std::make_pair(40.0, 60.0);
    const auto corpus = make_corpus(8, ranges, 2025);
    for (const auto& t : corpus) {
        sum_maxp += std::abs(
            detect_polarity(t.signal, ResidualMethod::maxp_lp2).differenced_skewness);
        sum_lp2 +=
            std::abs(detect_polarity(t.signal, ResidualMethod::lp2).differenced_skewness);
    }
    CHECK(sum_maxp > sum_lp2);
}

TEST_CASE("detect_polarity rejects silence") {
    const SampleBuffer silence(std::vector<double>(8000, 0.0), 8000.0);
    CHECK_THROWS_AS(detect_polarity(silence, ResidualMethod::lp2), UnanalyzableFrame);
}

TEST_CASE("extract_residual_frames yields unit rows and skips edge GCIs") {
    const SynthTruth t = voiced_utterance();
    const F0Track f0 = estimate_f0(t.signal);
    const SampleBuffer residual = t.excitation;  // ideal impulse-train residual

    const Eigen::MatrixXd frames = extract_residual_frames(residual, t.gcis, f0, 64);
    REQUIRE(frames.rows() >= 2);
    CHECK(frames.cols() == 64);
    for (Eigen::Index i = 0; i < frames.rows(); ++i)
        CHECK(frames.row(i).norm() == Approx(1.0).margin(1e-9));

    // constant f0 and an exact impulse-train residual: every row identical
    for (Eigen::Index i = 1; i < frames.rows(); ++i)
        CHECK((frames.row(i) - frames.row(0)).cwiseAbs().maxCoeff() < 1e-6);

    // GCIs whose two-period window overruns the buffer are dropped
    CHECK(static_cast<std::size_t>(frames.rows()) <= t.gcis.instants.size());

    CHECK_THROWS_AS(extract_residual_frames(residual, t.gcis, f0, 63), InvalidArgument);
    CHECK_THROWS_AS(extract_residual_frames(residual, t.gcis, f0, 16), InvalidArgument);
}

TEST_CASE("pca rank-1 and trace properties") {
    Eigen::MatrixXd frames(5, 32);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(32);
    v(10) = 0.6;
    v(11) = -0.8;
    for (int i = 0; i < 5; ++i) frames.row(i) = v.transpose();

    const EigenModel model = pca(frames);
    CHECK(model.eigenvalues[0] == Approx(1.0).margin(1e-9));
    for (std::size_t i = 1; i < model.eigenvalues.size(); ++i)
        CHECK(model.eigenvalues[i] == Approx(0.0).margin(1e-9));

    // sign normalization: the largest-magnitude entry is positive
    CHECK(model.eigenvectors[0][11] == Approx(0.8).margin(1e-9));
    CHECK(model.eigenvectors[0][10] == Approx(-0.6).margin(1e-9));
    CHECK(model.cumulative_variance[0] == Approx(1.0).margin(1e-9));

    CHECK_THROWS_AS(pca(Eigen::MatrixXd::Zero(1, 32)), InsufficientData);
}

TEST_CASE("pca reconstructs the second-moment matrix") {
    test_util::Rng rng(70);
    Eigen::MatrixXd frames(100, 64);
    for (Eigen::Index i = 0; i < frames.rows(); ++i) {
        for (Eigen::Index j = 0; j < frames.cols(); ++j) frames(i, j) = rng.normal();
        frames.row(i) /= frames.row(i).norm();
    }
    const EigenModel model = pca(frames);

    // eigenvalue sum = mean row energy = 1 for unit rows
    double total = 0.0;
    for (double l : model.eigenvalues) total += l;
    CHECK(total == Approx(1.0).margin(1e-9));

    // orthonormality
    const std::size_t D = model.frame_length;
    for (std::size_t a = 0; a < D; a += 7)
        for (std::size_t b = a; b < D; b += 7) {
            double dot = 0.0;
            for (std::size_t j = 0; j < D; ++j)
                dot += model.eigenvectors[a][j] * model.eigenvectors[b][j];
            CHECK(dot == Approx(a == b ? 1.0 : 0.0).margin(1e-8));
        }

    // full reconstruction of (1/M) F^T F
    Eigen::MatrixXd recon = Eigen::MatrixXd::Zero(frames.cols(), frames.cols());
    for (std::size_t i = 0; i < D; ++i) {
        Eigen::VectorXd u(static_cast<Eigen::Index>(D));
        for (std::size_t j = 0; j < D; ++j) u(static_cast<Eigen::Index>(j)) = model.eigenvectors[i][j];
        recon += model.eigenvalues[i] * u * u.transpose();
    }
    const Eigen::MatrixXd want = frames.transpose() * frames / static_cast<double>(frames.rows());
    CHECK((recon - want).cwiseAbs().maxCoeff() < 1e-8);

    // descending eigenvalues, nondecreasing cumulative variance
    for (std::size_t i = 1; i < model.eigenvalues.size(); ++i) {
        CHECK(model.eigenvalues[i] <= model.eigenvalues[i - 1] + 1e-12);
        CHECK(model.cumulative_variance[i] >= model.cumulative_variance[i - 1] - 1e-12);
    }
    CHECK(model.cumulative_variance.back() == Approx(1.0).margin(1e-9));
}

TEST_CASE("pulse_concentration") {
    std::vector<double> impulse(64, 0.0);
    impulse[32] = 1.0;
    CHECK(pulse_concentration(impulse, 0.5, 8000.0) == Approx(1.0));

    // flat vector with a window covering ~10% of the length
    std::vector<double> flat(200, 1.0);
    // halfwidth 1.25 ms at 8 kHz = 10 samples -> 21 of 200 samples inside
    CHECK(pulse_concentration(flat, 1.25, 8000.0) == Approx(21.0 / 200.0).margin(1e-12));

    CHECK_THROWS_AS(pulse_concentration({}, 0.5, 8000.0), InvalidArgument);
}

TEST_CASE("eigenvectors_to_variance") {
    EigenModel m;
    m.cumulative_variance = {0.5, 0.8, 0.95, 1.0};
    CHECK(eigenvectors_to_variance(m, 0.9) == 3);
    CHECK(eigenvectors_to_variance(m, 0.5) == 1);
    CHECK(eigenvectors_to_variance(m, 1.0) == 4);
}
