#pragma once

#include <cstddef>

namespace ahpipe {

struct YinConfig {
    double threshold = 0.1;  // harmonicity threshold on the CMND function
    double f_min = 65.0;     // Hz
    double f_max = 2093.0;   // Hz
};

struct YinResult {
    bool voiced = false;
    double f0_hz = 0.0;
    double cmnd_min = 1.0;  // smallest CMND value in the search range
};

// Fundamental frequency of one frame: difference function over lags, cumulative
// mean normalization, absolute threshold with local-minimum refinement, and
// parabolic interpolation around the chosen lag. A frame is unvoiced when no
// lag in [sr/f_max, sr/f_min] dips below the threshold.
YinResult yin_pitch(const double* frame, size_t n, double sample_rate, const YinConfig& cfg = {});

}  // namespace ahpipe
