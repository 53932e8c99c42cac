#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wnn/classes.hpp"
#include "wnn/dwt.hpp"

namespace wnn {

inline constexpr int kFeatureLevels = 5;
inline constexpr std::size_t kFeatureCount = 6;

// Feature order everywhere: D1, D2, D3, D4, D5, A5.
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {"D1", "D2", "D3",
                                                                          "D4", "D5", "A5"};

// Per-band coefficient energies of a 5-level decomposition.
struct BandEnergy {
  std::array<double, kFeatureLevels> detail{};  // ED_1 .. ED_5
  double approximation = 0.0;                   // EA_5
  double total = 0.0;

  double component(std::size_t k) const { return k < detail.size() ? detail[k] : approximation; }
};

// Fractional energy shares in [0, 1], summing to 1.
struct FeatureVector {
  std::array<double, kFeatureCount> shares{};
  std::optional<EegClass> label;
};

struct Band {
  std::string name;    // "D1" .. "Dl", "Al"
  double low_hz = 0;   // exclusive
  double high_hz = 0;  // inclusive
  std::string rhythm;  // noises, gamma, beta, alpha, theta, delta (empty beyond level 5)
};

// Detail level l covers (fs/2^(l+1), fs/2^l]; the final approximation covers
// (0, fs/2^(levels+1)]. Entries are ordered D1..D_levels, A_levels.
std::vector<Band> band_table(double sampling_rate, int levels = kFeatureLevels);

// Squared-coefficient sums per band for any level count, ordered D1..Dl, Al.
std::vector<double> level_energies(const Decomposition& decomposition);

// Throws WrongLevels unless the decomposition has exactly 5 levels.
BandEnergy band_energies(const Decomposition& decomposition);

// Throws ZeroEnergy when total is zero.
FeatureVector feature_vector(const BandEnergy& energies);

// decompose(db4, 5) -> band_energies -> feature_vector.
FeatureVector extract_features(const Signal& signal);

}  // namespace wnn
