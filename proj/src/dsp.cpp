#include "ahpipe/dsp.hpp"

#include <cmath>
#include <numbers>

#include "ahpipe/error.hpp"

namespace ahpipe::dsp {

void fft(std::vector<std::complex<double>>& buf) {
    const size_t n = buf.size();
    if (n == 0 || (n & (n - 1)) != 0) throw_numeric("fft: size must be a power of two");

    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(buf[i], buf[j]);
    }

    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = buf[i + k];
                std::complex<double> v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::vector<double> hann_window(size_t n) {
    std::vector<double> w(n);
    if (n == 1) {
        w[0] = 1.0;
        return w;
    }
    for (size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(n - 1)));
    return w;
}

std::vector<double> magnitude_spectrum(const double* frame, size_t frame_len, size_t fft_size) {
    std::vector<std::complex<double>> buf(fft_size, {0.0, 0.0});
    const auto window = hann_window(frame_len);
    for (size_t i = 0; i < frame_len && i < fft_size; ++i) buf[i] = frame[i] * window[i];
    fft(buf);
    std::vector<double> mag(fft_size / 2 + 1);
    for (size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(buf[i]);
    return mag;
}

}  // namespace ahpipe::dsp
