#pragma once

#include <span>
#include <string>
#include <vector>

#include "ahpipe/feature_ops.hpp"
#include "ahpipe/yin.hpp"

namespace ahpipe {

struct AudioFeatureConfig {
    size_t fft_size = 2048;
    size_t hop = 512;
    double rolloff_percent = 0.85;       // fraction of cumulative spectral energy
    double silence_db = -30.0;           // dBFS threshold, full scale = 1.0
    double silence_frame_seconds = 0.01;
    YinConfig yin;
};

// Per-one-second acoustic statistics of a chunk.
struct AudioChunkFeatures {
    double rms = 0.0;
    double spectral_centroid = 0.0;   // Hz
    double spectral_bandwidth = 0.0;  // Hz
    double spectral_rolloff = 0.0;    // Hz
    double zero_crossing_rate = 0.0;  // sign changes per sample
    double silence_ratio = 0.0;
    double pitch_mean = 0.0;          // Hz, over voiced frames; 0 when none
    double pitch_std = 0.0;
    double voiced_fraction = 0.0;     // fraction of analysis frames with a pitch
};

inline constexpr const char* kAudioFeatureCsvHeader =
    "chunk,rms,centroid,bandwidth,rolloff,zcr,silence_ratio,pitch_mean,pitch_std";

// Consecutive non-overlapping one-second windows; a final partial window of
// at least 0.25 s is kept, anything shorter is dropped.
std::vector<std::span<const double>> chunk_audio(std::span<const double> samples, double sample_rate);

AudioChunkFeatures compute_chunk_features(std::span<const double> chunk, double sample_rate,
                                          const AudioFeatureConfig& cfg = {});

// Pooled min/max/mean/std per field, field order matching the CSV header.
PooledStats video_audio_stats(const std::vector<AudioChunkFeatures>& features);

void write_audio_features_csv(const std::string& path, const std::vector<AudioChunkFeatures>& features);

}  // namespace ahpipe
