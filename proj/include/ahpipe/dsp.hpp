#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ahpipe::dsp {

// In-place iterative radix-2 FFT; buf.size() must be a power of two.
void fft(std::vector<std::complex<double>>& buf);

std::vector<double> hann_window(size_t n);

// Magnitude spectrum (fft_size/2 + 1 bins) of one Hann-windowed frame,
// zero-padded to fft_size when the frame is shorter.
std::vector<double> magnitude_spectrum(const double* frame, size_t frame_len, size_t fft_size);

}  // namespace ahpipe::dsp
