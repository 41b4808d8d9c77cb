#include "ahpipe/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ahpipe/error.hpp"

namespace ahpipe {

namespace {

uint32_t read_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace

AudioBuffer load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open wav file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw_data("not a RIFF/WAVE file: " + path);

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t sample_rate = 0;
    size_t data_off = 0, data_len = 0;

    size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        uint32_t chunk_len = read_u32(hdr + 4);
        if (std::memcmp(hdr, "fmt ", 4) == 0 && pos + 8 + 16 <= bytes.size()) {
            const unsigned char* f = hdr + 8;
            format = read_u16(f);
            channels = read_u16(f + 2);
            sample_rate = read_u32(f + 4);
            bits = read_u16(f + 14);
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data_off = pos + 8;
            data_len = std::min<size_t>(chunk_len, bytes.size() - data_off);
        }
        pos += 8 + chunk_len + (chunk_len & 1);
    }

    if (format != 1 || bits != 16) throw_data("unsupported wav format (need 16-bit PCM): " + path);
    if (channels != 1 && channels != 2) throw_data("unsupported channel count in " + path);
    if (sample_rate == 0) throw_data("wav file has zero sample rate: " + path);
    if (data_off == 0) throw_data("wav file has no data chunk: " + path);

    AudioBuffer buf;
    buf.sample_rate = static_cast<double>(sample_rate);
    const size_t frame_bytes = 2u * channels;
    const size_t frames = data_len / frame_bytes;
    buf.samples.resize(frames);
    const unsigned char* d = bytes.data() + data_off;
    for (size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (uint16_t c = 0; c < channels; ++c) {
            int16_t s;
            std::memcpy(&s, d + i * frame_bytes + 2u * c, 2);
            acc += static_cast<double>(s) / 32768.0;
        }
        buf.samples[i] = acc / channels;
    }
    return buf;
}

void write_wav(const std::string& path, const AudioBuffer& buf) {
    if (buf.sample_rate <= 0) throw_data("write_wav: sample rate must be positive");
    std::vector<unsigned char> out;
    const uint32_t sr = static_cast<uint32_t>(buf.sample_rate);
    const uint32_t data_len = static_cast<uint32_t>(buf.samples.size() * 2);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, 36 + data_len);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    put_u32(out, 16);
    put_u16(out, 1);   // PCM
    put_u16(out, 1);   // mono
    put_u32(out, sr);
    put_u32(out, sr * 2);  // byte rate
    put_u16(out, 2);       // block align
    put_u16(out, 16);      // bits
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, data_len);
    for (double v : buf.samples) {
        double clamped = std::clamp(v, -1.0, 1.0);
        auto s = static_cast<int16_t>(std::lrint(clamped * 32767.0));
        put_u16(out, static_cast<uint16_t>(s));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw_data("cannot write wav file: " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

}  // namespace ahpipe
