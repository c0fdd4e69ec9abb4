#ifndef MAXLP_WAV_HPP
#define MAXLP_WAV_HPP

// Minimal RIFF/WAVE reader and writer: PCM 16-bit and IEEE float 32-bit,
// mono. Multi-channel input collapses to the first channel with a warning
// flag. Samples are normalized to [-1, 1] on read.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "maxlp/errors.hpp"
#include "maxlp/signal.hpp"

namespace maxlp {

struct WavReadResult {
    SampleBuffer buffer;
    int source_channels = 1;
    bool multichannel_warning = false;
};

enum class WavFormat { pcm16, float32 };

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
    return static_cast<std::uint16_t>(static_cast<std::uint16_t>(p[0]) |
                                      (static_cast<std::uint16_t>(p[1]) << 8));
}

inline void push_u32le(std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back(static_cast<unsigned char>(x & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 8) & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 16) & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 24) & 0xff));
}

inline void push_u16le(std::vector<unsigned char>& v, std::uint16_t x) {
    v.push_back(static_cast<unsigned char>(x & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 8) & 0xff));
}

}  // namespace detail

inline WavReadResult read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open WAV file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw ParseError("not a RIFF/WAVE file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::uint32_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t size = detail::read_u32le(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size()) throw ParseError("truncated WAV chunk: " + path);

        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16) throw ParseError("fmt chunk too small: " + path);
            format = detail::read_u16le(bytes.data() + body);
            channels = detail::read_u16le(bytes.data() + body + 2);
            rate = detail::read_u32le(bytes.data() + body + 4);
            bits = detail::read_u16le(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = size;
        }
        pos = body + size + (size % 2);  // chunks are word-aligned
    }

    if (!have_fmt || data == nullptr) throw ParseError("missing fmt/data chunk: " + path);
    if (channels == 0 || rate == 0) throw ParseError("bad fmt chunk: " + path);

    const bool pcm16 = format == 1 && bits == 16;
    const bool f32 = format == 3 && bits == 32;
    if (!pcm16 && !f32)
        throw ParseError("unsupported WAV encoding (need PCM16 or float32): " + path);

    const std::size_t bytes_per_sample = bits / 8;
    const std::size_t frame_bytes = bytes_per_sample * channels;
    const std::size_t n_frames = data_size / frame_bytes;

    WavReadResult result;
    result.source_channels = channels;
    result.multichannel_warning = channels > 1;

    std::vector<double> samples(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        const unsigned char* p = data + i * frame_bytes;  // first channel
        if (pcm16) {
            const std::int16_t v = static_cast<std::int16_t>(detail::read_u16le(p));
            samples[i] = static_cast<double>(v) / 32768.0;
        } else {
            const std::uint32_t u = detail::read_u32le(p);
            float f;
            std::memcpy(&f, &u, sizeof(f));
            samples[i] = static_cast<double>(f);
        }
    }
    result.buffer = SampleBuffer(std::move(samples), static_cast<double>(rate));
    return result;
}

inline void write_wav(const std::string& path, const SampleBuffer& buffer,
                      WavFormat format = WavFormat::float32) {
    const std::uint32_t rate = static_cast<std::uint32_t>(buffer.rate);
    const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
    const std::uint16_t fmt_code = format == WavFormat::pcm16 ? 1 : 3;
    const std::uint32_t data_size =
        static_cast<std::uint32_t>(buffer.size() * (bits / 8));

    std::vector<unsigned char> out;
    out.reserve(44 + data_size);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    detail::push_u32le(out, 36 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    detail::push_u32le(out, 16);
    detail::push_u16le(out, fmt_code);
    detail::push_u16le(out, 1);  // mono
    detail::push_u32le(out, rate);
    detail::push_u32le(out, rate * (bits / 8));
    detail::push_u16le(out, static_cast<std::uint16_t>(bits / 8));
    detail::push_u16le(out, bits);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    detail::push_u32le(out, data_size);

    for (double v : buffer.samples) {
        if (format == WavFormat::pcm16) {
            long s = std::lround(v * 32768.0);
            if (s > 32767) s = 32767;
            if (s < -32768) s = -32768;
            detail::push_u16le(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(s)));
        } else {
            const float f = static_cast<float>(v);
            std::uint32_t u;
            std::memcpy(&u, &f, sizeof(u));
            detail::push_u32le(out, u);
        }
    }

    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write WAV file: " + path);
    os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

}  // namespace maxlp

#endif
