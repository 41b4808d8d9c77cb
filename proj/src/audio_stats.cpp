#include "ahpipe/audio_stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ahpipe/csv.hpp"
#include "ahpipe/dsp.hpp"
#include "ahpipe/error.hpp"

namespace ahpipe {

std::vector<std::span<const double>> chunk_audio(std::span<const double> samples, double sample_rate) {
    if (sample_rate <= 0.0) throw_data("chunk_audio: sample_rate must be positive");
    std::vector<std::span<const double>> chunks;
    const size_t chunk_len = static_cast<size_t>(std::llround(sample_rate));
    if (chunk_len == 0) throw_data("chunk_audio: sample_rate too small");
    size_t pos = 0;
    while (pos + chunk_len <= samples.size()) {
        chunks.push_back(samples.subspan(pos, chunk_len));
        pos += chunk_len;
    }
    const size_t rest = samples.size() - pos;
    if (rest * 4 >= chunk_len) chunks.push_back(samples.subspan(pos, rest));
    return chunks;
}

namespace {

struct SpectralAccumulator {
    double centroid = 0.0, bandwidth = 0.0, rolloff = 0.0;
};

SpectralAccumulator frame_spectral(const double* frame, size_t frame_len, double sample_rate,
                                   const AudioFeatureConfig& cfg) {
    SpectralAccumulator out;
    const auto mag = dsp::magnitude_spectrum(frame, frame_len, cfg.fft_size);
    const double bin_hz = sample_rate / static_cast<double>(cfg.fft_size);

    double mag_sum = 0.0, weighted = 0.0;
    for (size_t i = 0; i < mag.size(); ++i) {
        mag_sum += mag[i];
        weighted += mag[i] * bin_hz * static_cast<double>(i);
    }
    if (mag_sum <= 0.0) return out;  // silent frame: all spectral fields 0

    out.centroid = weighted / mag_sum;
    double spread = 0.0;
    for (size_t i = 0; i < mag.size(); ++i) {
        double f = bin_hz * static_cast<double>(i);
        spread += mag[i] * (f - out.centroid) * (f - out.centroid);
    }
    out.bandwidth = std::sqrt(spread / mag_sum);

    double energy_total = 0.0;
    for (double m : mag) energy_total += m * m;
    double cum = 0.0;
    for (size_t i = 0; i < mag.size(); ++i) {
        cum += mag[i] * mag[i];
        if (cum >= cfg.rolloff_percent * energy_total) {
            out.rolloff = bin_hz * static_cast<double>(i);
            break;
        }
    }
    return out;
}

}  // namespace

AudioChunkFeatures compute_chunk_features(std::span<const double> chunk, double sample_rate,
                                          const AudioFeatureConfig& cfg) {
    if (chunk.size() < 256)
        throw_data("compute_chunk_features: insufficient samples (" + std::to_string(chunk.size()) +
                   " < 256)");
    AudioChunkFeatures f;

    double sq = 0.0;
    for (double v : chunk) sq += v * v;
    f.rms = std::sqrt(sq / static_cast<double>(chunk.size()));

    // sign changes per sample, with sign(x) = x >= 0
    size_t crossings = 0;
    for (size_t i = 1; i < chunk.size(); ++i)
        if ((chunk[i] >= 0.0) != (chunk[i - 1] >= 0.0)) ++crossings;
    f.zero_crossing_rate = static_cast<double>(crossings) / static_cast<double>(chunk.size() - 1);

    // frame starts; only full frames, except a single zero-padded frame for
    // chunks shorter than the frame size
    std::vector<size_t> starts;
    if (chunk.size() >= cfg.fft_size) {
        for (size_t pos = 0; pos + cfg.fft_size <= chunk.size(); pos += cfg.hop) starts.push_back(pos);
    } else {
        starts.push_back(0);
    }

    double cen = 0.0, bw = 0.0, roll = 0.0;
    std::vector<double> pitches;
    for (size_t pos : starts) {
        const size_t len = std::min(cfg.fft_size, chunk.size() - pos);
        auto spec = frame_spectral(chunk.data() + pos, len, sample_rate, cfg);
        cen += spec.centroid;
        bw += spec.bandwidth;
        roll += spec.rolloff;
        YinResult yin = yin_pitch(chunk.data() + pos, len, sample_rate, cfg.yin);
        if (yin.voiced) pitches.push_back(yin.f0_hz);
    }
    const double nframes = static_cast<double>(starts.size());
    f.spectral_centroid = cen / nframes;
    f.spectral_bandwidth = bw / nframes;
    f.spectral_rolloff = roll / nframes;
    f.voiced_fraction = static_cast<double>(pitches.size()) / nframes;
    if (!pitches.empty()) {
        double mean = 0.0;
        for (double p : pitches) mean += p;
        mean /= static_cast<double>(pitches.size());
        double var = 0.0;
        for (double p : pitches) var += (p - mean) * (p - mean);
        f.pitch_mean = mean;
        f.pitch_std = std::sqrt(var / static_cast<double>(pitches.size()));
    }

    // silence ratio over short non-overlapping windows
    const double silence_rms = std::pow(10.0, cfg.silence_db / 20.0);
    size_t win = static_cast<size_t>(std::llround(cfg.silence_frame_seconds * sample_rate));
    win = std::max<size_t>(win, 1);
    size_t n_windows = chunk.size() / win;
    if (n_windows == 0) {
        n_windows = 1;
        win = chunk.size();
    }
    size_t silent = 0;
    for (size_t w = 0; w < n_windows; ++w) {
        double acc = 0.0;
        for (size_t i = w * win; i < (w + 1) * win; ++i) acc += chunk[i] * chunk[i];
        if (std::sqrt(acc / static_cast<double>(win)) < silence_rms) ++silent;
    }
    f.silence_ratio = static_cast<double>(silent) / static_cast<double>(n_windows);
    return f;
}

PooledStats video_audio_stats(const std::vector<AudioChunkFeatures>& features) {
    if (features.empty()) throw_data("empty input: video_audio_stats needs at least one chunk");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(features.size()), 8);
    for (size_t i = 0; i < features.size(); ++i) {
        const auto& f = features[i];
        m.row(static_cast<Eigen::Index>(i)) << f.rms, f.spectral_centroid, f.spectral_bandwidth,
            f.spectral_rolloff, f.zero_crossing_rate, f.silence_ratio, f.pitch_mean, f.pitch_std;
    }
    return stat_pool(m);
}

void write_audio_features_csv(const std::string& path, const std::vector<AudioChunkFeatures>& features) {
    std::ofstream out(path);
    if (!out) throw_data("cannot write file: " + path);
    out << kAudioFeatureCsvHeader << '\n';
    for (size_t i = 0; i < features.size(); ++i) {
        const auto& f = features[i];
        out << i;
        for (double v : {f.rms, f.spectral_centroid, f.spectral_bandwidth, f.spectral_rolloff,
                         f.zero_crossing_rate, f.silence_ratio, f.pitch_mean, f.pitch_std})
            out << ',' << csv::format_double(v);
        out << '\n';
    }
}

}  // namespace ahpipe
