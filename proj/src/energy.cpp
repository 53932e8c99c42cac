#include "wnn/energy.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wnn/error.hpp"

namespace wnn {

namespace {

constexpr std::array<const char*, kFeatureLevels> kDetailRhythms = {"noises", "gamma", "beta",
                                                                     "alpha", "theta"};

}  // namespace

std::vector<Band> band_table(double sampling_rate, int levels) {
  if (!(sampling_rate > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("sampling rate must be positive, got {}", sampling_rate));
  }
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("levels must be >= 1, got {}", levels));

  std::vector<Band> bands;
  bands.reserve(static_cast<std::size_t>(levels) + 1);
  double high = sampling_rate / 2.0;
  for (int level = 1; level <= levels; ++level) {
    const double low = high / 2.0;
    std::string rhythm = level <= kFeatureLevels ? kDetailRhythms[static_cast<std::size_t>(level - 1)] : "";
    bands.push_back(Band{fmt::format("D{}", level), low, high, std::move(rhythm)});
    high = low;
  }
  bands.push_back(Band{fmt::format("A{}", levels), 0.0, high, levels == kFeatureLevels ? "delta" : ""});
  return bands;
}

std::vector<double> level_energies(const Decomposition& decomposition) {
  std::vector<double> out;
  out.reserve(decomposition.details.size() + 1);
  for (const auto& d : decomposition.details) out.push_back(energy(d));
  out.push_back(energy(decomposition.approximation));
  return out;
}

BandEnergy band_energies(const Decomposition& decomposition) {
  if (decomposition.levels != kFeatureLevels ||
      decomposition.details.size() != static_cast<std::size_t>(kFeatureLevels)) {
    throw Error(ErrorCode::WrongLevels,
                fmt::format("band energies need a {}-level decomposition, got {}", kFeatureLevels,
                            decomposition.levels));
  }
  BandEnergy result;
  for (std::size_t i = 0; i < result.detail.size(); ++i) {
    result.detail[i] = energy(decomposition.details[i]);
    result.total += result.detail[i];
  }
  result.approximation = energy(decomposition.approximation);
  result.total += result.approximation;
  return result;
}

FeatureVector feature_vector(const BandEnergy& energies) {
  if (!(energies.total > 0.0) || !std::isfinite(energies.total)) {
    throw Error(ErrorCode::ZeroEnergy,
                fmt::format("cannot form energy shares from total energy {}", energies.total));
  }
  FeatureVector fv;
  for (std::size_t k = 0; k < kFeatureCount; ++k) fv.shares[k] = energies.component(k) / energies.total;
  return fv;
}

FeatureVector extract_features(const Signal& signal) {
  return feature_vector(band_energies(decompose(signal, db4_filter(), kFeatureLevels)));
}

}  // namespace wnn
