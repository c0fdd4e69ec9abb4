#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "maxlp/wav.hpp"
#include "test_util.hpp"

using namespace maxlp;
using Catch::Approx;

namespace {

std::vector<double> ramp_signal(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = -0.9 + 1.8 * static_cast<double>(i) / static_cast<double>(n - 1);
    return x;
}

}  // namespace

TEST_CASE("float32 wav round trip is lossless at float precision") {
    const std::string path = "maxlp_wav_test_f32.wav";
    const SampleBuffer buf(ramp_signal(1000), 8000.0);
    write_wav(path, buf, WavFormat::float32);

    const WavReadResult r = read_wav(path);
    CHECK(r.buffer.rate == 8000.0);
    CHECK_FALSE(r.multichannel_warning);
    REQUIRE(r.buffer.size() == buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i)
        CHECK(r.buffer.samples[i] == Approx(buf.samples[i]).margin(1e-7));
    std::remove(path.c_str());
}

TEST_CASE("pcm16 wav round trip is lossless at 16-bit precision") {
    const std::string path = "maxlp_wav_test_pcm.wav";
    const SampleBuffer buf(ramp_signal(500), 16000.0);
    write_wav(path, buf, WavFormat::pcm16);

    const WavReadResult r = read_wav(path);
    CHECK(r.buffer.rate == 16000.0);
    REQUIRE(r.buffer.size() == buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i)
        CHECK(r.buffer.samples[i] == Approx(buf.samples[i]).margin(1.0 / 32768.0));
    std::remove(path.c_str());
}

TEST_CASE("stereo input collapses to the first channel with a warning") {
    const std::string path = "maxlp_wav_test_stereo.wav";
    // hand-built 2-channel PCM16 file: L = i, R = -i
    std::vector<unsigned char> bytes;
    auto u32 = [&](std::uint32_t v) {
        for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xff));
    };
    auto u16 = [&](std::uint16_t v) {
        bytes.push_back(static_cast<unsigned char>(v & 0xff));
        bytes.push_back(static_cast<unsigned char>(v >> 8));
    };
    const std::uint32_t n = 64;
    bytes.insert(bytes.end(), {'R', 'I', 'F', 'F'});
    u32(36 + n * 4);
    bytes.insert(bytes.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    u32(16);
    u16(1);      // PCM
    u16(2);      // stereo
    u32(8000);
    u32(8000 * 4);
    u16(4);
    u16(16);
    bytes.insert(bytes.end(), {'d', 'a', 't', 'a'});
    u32(n * 4);
    for (std::uint32_t i = 0; i < n; ++i) {
        u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(i * 100)));
        u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(-static_cast<int>(i) * 100)));
    }
    {
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    }

    const WavReadResult r = read_wav(path);
    CHECK(r.multichannel_warning);
    CHECK(r.source_channels == 2);
    REQUIRE(r.buffer.size() == n);
    for (std::uint32_t i = 0; i < n; ++i)
        CHECK(r.buffer.samples[i] == Approx(static_cast<double>(i) * 100.0 / 32768.0));
    std::remove(path.c_str());
}

TEST_CASE("wav reader rejects garbage") {
    const std::string path = "maxlp_wav_test_bad.wav";
    {
        std::ofstream out(path, std::ios::binary);
        out << "this is not a wav file at all";
    }
    CHECK_THROWS_AS(read_wav(path), ParseError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_wav("nonexistent_file.wav"), ParseError);
}

TEST_CASE("pcm16 write clamps out-of-range samples") {
    const std::string path = "maxlp_wav_test_clip.wav";
    const SampleBuffer buf({1.5, -1.5, 0.0}, 8000.0);
    write_wav(path, buf, WavFormat::pcm16);
    const WavReadResult r = read_wav(path);
    CHECK(r.buffer.samples[0] == Approx(32767.0 / 32768.0));
    CHECK(r.buffer.samples[1] == Approx(-1.0));
    CHECK(r.buffer.samples[2] == Approx(0.0));
    std::remove(path.c_str());
}
