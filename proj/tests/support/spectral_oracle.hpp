#pragma once

#include <span>
#include <vector>

// Frequency-domain references for the wavelet band energies, computed with
// FFTW and never with the transform under test.
namespace wnn::testing {

// |X_k|^2 for k = 0..N-1 of the full DFT. Sums to N * ||x||^2.
std::vector<double> dft_power(std::span<const double> samples);

// Ideal (brick-wall) band shares, ordered D1..D_levels, A_levels. A DFT bin at
// frequency f belongs to detail level l when fs/2^(l+1) < f <= fs/2^l and to
// the approximation when f <= fs/2^(levels+1).
std::vector<double> ideal_band_shares(std::span<const double> samples, double sampling_rate, int levels);

// Band shares of the periodic DWT computed entirely in the frequency domain.
// Level l applies the equivalent correlation filter
//   F_l(w) = Hc(w) Hc(2w) ... Hc(2^(l-2) w) Gc(2^(l-1) w),  Hc(w) = sum h[k] e^{+ikw},
// to the DFT of x and folds the 2^l aliases of the downsampler. Exact up to
// rounding, so it should agree with the time-domain transform to ~1e-12.
std::vector<double> dwt_band_shares(std::span<const double> samples, std::span<const double> lowpass,
                                    std::span<const double> highpass, int levels);

}  // namespace wnn::testing
