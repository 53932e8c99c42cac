#include "wnn/dwt.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "wnn/error.hpp"

namespace wnn {

Signal::Signal(std::vector<double> samples, double sampling_rate)
    : samples_(std::move(samples)), sampling_rate_(sampling_rate) {
  if (samples_.empty()) throw Error(ErrorCode::InvalidArgument, "signal has no samples");
  if (!(sampling_rate_ > 0.0) || !std::isfinite(sampling_rate_)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("sampling rate must be positive, got {}", sampling_rate_));
  }
}

namespace {

void require(bool ok, const std::string& name, const char* what, double residual) {
  if (!ok) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("filter '{}' fails {} (residual {:.3e})", name, what, residual));
  }
}

}  // namespace

WaveletFilter make_orthogonal_filter(std::string name, std::vector<double> lowpass,
                                     double tolerance) {
  const std::size_t len = lowpass.size();
  if (len < 2 || len % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("filter '{}' needs an even tap count >= 2, got {}", name, len));
  }
  std::vector<double> highpass(len);
  for (std::size_t k = 0; k < len; ++k) {
    highpass[k] = (k % 2 == 0 ? 1.0 : -1.0) * lowpass[len - 1 - k];
  }

  const double lo_sum = std::accumulate(lowpass.begin(), lowpass.end(), 0.0);
  const double hi_sum = std::accumulate(highpass.begin(), highpass.end(), 0.0);
  require(std::abs(lo_sum - std::numbers::sqrt2) <= tolerance, name, "lowpass sum = sqrt(2)",
          lo_sum - std::numbers::sqrt2);
  require(std::abs(hi_sum) <= tolerance, name, "highpass zero mean", hi_sum);
  require(std::abs(energy(lowpass) - 1.0) <= tolerance, name, "unit lowpass norm",
          energy(lowpass) - 1.0);
  require(std::abs(energy(highpass) - 1.0) <= tolerance, name, "unit highpass norm",
          energy(highpass) - 1.0);

  for (std::size_t shift = 2; shift < len; shift += 2) {
    double lo_dot = 0.0;
    double cross = 0.0;
    for (std::size_t k = 0; k + shift < len; ++k) {
      lo_dot += lowpass[k] * lowpass[k + shift];
      cross += lowpass[k] * highpass[k + shift] + highpass[k] * lowpass[k + shift];
    }
    require(std::abs(lo_dot) <= tolerance, name, "orthogonality to even shifts", lo_dot);
    require(std::abs(cross) <= tolerance, name, "lowpass/highpass orthogonality", cross);
  }
  return WaveletFilter{std::move(name), std::move(lowpass), std::move(highpass)};
}

const WaveletFilter& db4_filter() {
  // Scaling coefficients from Daubechies' table (4 vanishing moments).
  static const WaveletFilter filter = make_orthogonal_filter(
      "db4", {0.2303778133088964, 0.7148465705529154, 0.6308807679298587, -0.0279837694168599,
              -0.1870348117190931, 0.0308413818355607, 0.0328830116668852,
              -0.0105974017850690});
  return filter;
}

StepResult dwt_step(std::span<const double> input, const WaveletFilter& filter) {
  const std::size_t n = input.size();
  if (n < 2) throw Error(ErrorCode::TooShort, fmt::format("dwt step needs >= 2 samples, got {}", n));
  if (n % 2 != 0) throw Error(ErrorCode::OddLength, fmt::format("dwt step input length {} is odd", n));

  const std::size_t half = n / 2;
  const std::size_t taps = filter.length();
  StepResult out{std::vector<double>(half, 0.0), std::vector<double>(half, 0.0)};
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t k = 0; k < taps; ++k) {
      const double x = input[(2 * i + k) % n];
      a += filter.lowpass[k] * x;
      d += filter.highpass[k] * x;
    }
    out.approximation[i] = a;
    out.detail[i] = d;
  }
  return out;
}

std::vector<double> idwt_step(std::span<const double> approximation,
                              std::span<const double> detail, const WaveletFilter& filter) {
  if (approximation.size() != detail.size() || approximation.empty()) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("approximation/detail lengths {} and {} do not pair",
                            approximation.size(), detail.size()));
  }
  const std::size_t half = approximation.size();
  const std::size_t n = 2 * half;
  const std::size_t taps = filter.length();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    for (std::size_t k = 0; k < taps; ++k) {
      out[(2 * i + k) % n] += filter.lowpass[k] * approximation[i] + filter.highpass[k] * detail[i];
    }
  }
  return out;
}

Decomposition decompose(std::span<const double> samples, const WaveletFilter& filter, int levels) {
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("levels must be >= 1, got {}", levels));
  const std::size_t n = samples.size();
  if (levels >= 63 || n < (std::size_t{1} << levels)) {
    throw Error(ErrorCode::TooShort,
                fmt::format("{} samples cannot be decomposed to {} levels", n, levels));
  }

  Decomposition result;
  result.levels = levels;
  result.source_length = n;
  result.details.reserve(static_cast<std::size_t>(levels));
  std::vector<double> running(samples.begin(), samples.end());
  for (int level = 1; level <= levels; ++level) {
    auto step = dwt_step(running, filter);
    result.details.push_back(std::move(step.detail));
    running = std::move(step.approximation);
  }
  result.approximation = std::move(running);
  return result;
}

Decomposition decompose(const Signal& signal, const WaveletFilter& filter, int levels) {
  return decompose(signal.samples(), filter, levels);
}

std::vector<double> reconstruct(const Decomposition& decomposition, const WaveletFilter& filter) {
  const int levels = decomposition.levels;
  if (levels < 1 || decomposition.details.size() != static_cast<std::size_t>(levels)) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("decomposition declares {} levels but holds {} detail bands", levels,
                            decomposition.details.size()));
  }
  const std::size_t n = decomposition.source_length;
  if (levels >= 63 || n % (std::size_t{1} << levels) != 0 || n == 0) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("source length {} is not divisible by 2^{}", n, levels));
  }
  for (int level = 1; level <= levels; ++level) {
    const std::size_t expected = n >> level;
    if (decomposition.detail(level).size() != expected) {
      throw Error(ErrorCode::ShapeMismatch,
                  fmt::format("D{} has {} coefficients, expected {}", level,
                              decomposition.detail(level).size(), expected));
    }
  }
  if (decomposition.approximation.size() != (n >> levels)) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("A{} has {} coefficients, expected {}", levels,
                            decomposition.approximation.size(), n >> levels));
  }

  std::vector<double> running = decomposition.approximation;
  for (int level = levels; level >= 1; --level) {
    running = idwt_step(running, decomposition.detail(level), filter);
  }
  return running;
}

double energy(std::span<const double> values) noexcept {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return sum;
}

}  // namespace wnn
