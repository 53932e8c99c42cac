#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wnn {

inline constexpr double kBonnSamplingRate = 173.61;

// Uniformly sampled real-valued segment. Samples are non-empty and the
// sampling rate is positive; the constructor enforces both.
class Signal {
 public:
  Signal(std::vector<double> samples, double sampling_rate);

  std::span<const double> samples() const noexcept { return samples_; }
  double sampling_rate() const noexcept { return sampling_rate_; }
  std::size_t size() const noexcept { return samples_.size(); }

 private:
  std::vector<double> samples_;
  double sampling_rate_;
};

// Orthonormal two-channel filter pair. The highpass is always derived from
// the lowpass through the quadrature-mirror relation
//   highpass[k] = (-1)^k * lowpass[L-1-k].
struct WaveletFilter {
  std::string name;
  std::vector<double> lowpass;
  std::vector<double> highpass;

  std::size_t length() const noexcept { return lowpass.size(); }
};

// Builds a filter from scaling coefficients and checks it: lowpass sums to
// sqrt(2), highpass sums to 0, unit norms, orthogonality to even shifts.
// Throws Error(InvalidArgument) if any check fails beyond `tolerance`.
WaveletFilter make_orthogonal_filter(std::string name, std::vector<double> lowpass,
                                     double tolerance = 1e-12);

// 8-tap Daubechies wavelet with 4 vanishing moments (MATLAB/PyWavelets "db4").
// Validated once on first use.
const WaveletFilter& db4_filter();

struct StepResult {
  std::vector<double> approximation;
  std::vector<double> detail;
};

// One analysis stage with periodic extension:
//   approximation[n] = sum_k lowpass[k]  * x[(2n + k) mod N]
//   detail[n]        = sum_k highpass[k] * x[(2n + k) mod N]
// Throws TooShort for N < 2 and OddLength for odd N.
StepResult dwt_step(std::span<const double> input, const WaveletFilter& filter);

// Exact inverse of dwt_step (the transpose of the orthogonal analysis map).
std::vector<double> idwt_step(std::span<const double> approximation,
                              std::span<const double> detail, const WaveletFilter& filter);

// Multi-level decomposition. details[0] is D1 (finest); approximation is A_levels.
struct Decomposition {
  std::vector<std::vector<double>> details;
  std::vector<double> approximation;
  int levels = 0;
  std::size_t source_length = 0;

  // 1-based level accessor, D_level.
  const std::vector<double>& detail(int level) const { return details.at(level - 1); }
};

Decomposition decompose(std::span<const double> samples, const WaveletFilter& filter, int levels);
Decomposition decompose(const Signal& signal, const WaveletFilter& filter, int levels);

// Inverts decompose. Throws ShapeMismatch when coefficient lengths do not
// match levels/source_length.
std::vector<double> reconstruct(const Decomposition& decomposition, const WaveletFilter& filter);

// Sum of squares.
double energy(std::span<const double> values) noexcept;

}  // namespace wnn
