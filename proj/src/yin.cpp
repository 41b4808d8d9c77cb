#include "ahpipe/yin.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ahpipe/error.hpp"

namespace ahpipe {

namespace {

// Parabolic interpolation of the minimum around lag tau; returns a fractional lag.
double refine_lag(const std::vector<double>& d, size_t tau) {
    if (tau == 0 || tau + 1 >= d.size()) return static_cast<double>(tau);
    double a = d[tau - 1], b = d[tau], c = d[tau + 1];
    double denom = a - 2.0 * b + c;
    if (denom == 0.0) return static_cast<double>(tau);
    double delta = 0.5 * (a - c) / denom;
    if (delta < -1.0 || delta > 1.0) return static_cast<double>(tau);
    return static_cast<double>(tau) + delta;
}

}  // namespace

YinResult yin_pitch(const double* frame, size_t n, double sample_rate, const YinConfig& cfg) {
    if (sample_rate <= 0.0) throw_data("yin_pitch: sample_rate must be positive");
    if (cfg.f_min <= 0.0 || cfg.f_max <= cfg.f_min) throw_data("yin_pitch: invalid search range");

    const size_t tau_min = std::max<size_t>(2, static_cast<size_t>(std::floor(sample_rate / cfg.f_max)));
    const size_t tau_max = static_cast<size_t>(std::ceil(sample_rate / cfg.f_min));
    // Integration window: half the frame, and the frame must cover window + tau_max.
    const size_t window = n / 2;
    YinResult out;
    if (window == 0 || tau_max + window > n || tau_min >= tau_max) return out;

    // d(tau) = sum_j (x[j] - x[j+tau])^2 over the integration window
    std::vector<double> diff(tau_max + 1, 0.0);
    for (size_t tau = 1; tau <= tau_max; ++tau) {
        double acc = 0.0;
        for (size_t j = 0; j < window; ++j) {
            double delta = frame[j] - frame[j + tau];
            acc += delta * delta;
        }
        diff[tau] = acc;
    }

    // cumulative mean normalized difference
    std::vector<double> cmnd(tau_max + 1, 1.0);
    double running = 0.0;
    for (size_t tau = 1; tau <= tau_max; ++tau) {
        running += diff[tau];
        cmnd[tau] = running > 0.0 ? diff[tau] * static_cast<double>(tau) / running : 1.0;
    }

    for (size_t tau = tau_min; tau <= tau_max; ++tau)
        out.cmnd_min = std::min(out.cmnd_min, cmnd[tau]);

    // absolute threshold: first lag below it, then descend to the local minimum
    size_t tau = tau_min;
    while (tau <= tau_max && cmnd[tau] >= cfg.threshold) ++tau;
    if (tau > tau_max) return out;  // unvoiced
    while (tau + 1 <= tau_max && cmnd[tau + 1] < cmnd[tau]) ++tau;

    double lag = refine_lag(cmnd, tau);
    if (lag <= 0.0) return out;
    out.voiced = true;
    out.f0_hz = sample_rate / lag;
    return out;
}

}  // namespace ahpipe
