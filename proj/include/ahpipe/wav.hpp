#pragma once

#include <string>
#include <vector>

namespace ahpipe {

struct AudioBuffer {
    std::vector<double> samples;  // mono, normalized to [-1, 1]
    double sample_rate = 0.0;
};

// 16-bit PCM WAV; stereo is downmixed by averaging the channels.
AudioBuffer load_wav(const std::string& path);
void write_wav(const std::string& path, const AudioBuffer& buf);

}  // namespace ahpipe
