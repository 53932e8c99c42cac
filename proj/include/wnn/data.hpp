#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wnn/classes.hpp"
#include "wnn/dwt.hpp"
#include "wnn/energy.hpp"
#include "wnn/error.hpp"
#include "wnn/random.hpp"

namespace wnn {

// Bonn recording sets used here: A (healthy), C (interictal, epileptogenic
// zone), E (ictal).
enum class SetTag { A, C, E };

inline constexpr std::array<SetTag, 3> kAllSets = {SetTag::A, SetTag::C, SetTag::E};
inline constexpr std::size_t kSegmentLength = 4096;
inline constexpr std::size_t kSegmentsPerSet = 100;

char to_char(SetTag tag) noexcept;
std::optional<SetTag> parse_set(std::string_view text) noexcept;
EegClass label_for(SetTag tag) noexcept;
SetTag set_for(EegClass label) noexcept;

struct Segment {
  std::string id;
  SetTag set;
  Signal signal;

  EegClass label() const noexcept { return label_for(set); }
};

// set tag -> subdirectory of the dataset root.
using SetMapping = std::map<SetTag, std::filesystem::path>;

// Z/N/S, the directory names of the public archive.
SetMapping default_set_mapping();

// One integer sample per line; surrounding whitespace and trailing blank lines
// are accepted. Throws MissingFile or ParseError (with the 1-based line).
std::vector<double> read_samples(const std::filesystem::path& path);

// Reads one segment file and truncates it to `length` samples. Throws
// ShortSegment when the file holds fewer.
Segment load_segment(const std::filesystem::path& path, SetTag set, double sampling_rate,
                     std::size_t length = kSegmentLength);

// Loads every regular, non-hidden file of each mapped subdirectory. Order is
// A, C, E and lexicographic by file name within a set. Segment ids are
// "<set>/<file name>". Throws MissingFile for an absent directory and
// WrongSegmentCount when a set does not hold exactly `per_set` files.
std::vector<Segment> load_bonn(const std::filesystem::path& root, const SetMapping& mapping,
                               double sampling_rate = kBonnSamplingRate,
                               std::size_t per_set = kSegmentsPerSet);

// Drops trailing samples so the length is a multiple of 2^levels.
std::vector<double> truncate_dyadic(std::vector<double> samples, int levels);

// Expected band shares (D1..D5, A5) of the synthetic surrogate classes.
const std::array<double, kFeatureCount>& archetype(EegClass label);

// Surrogate corpus: per_class segments of each class (in A, C, E order),
// 4096 samples each. Each segment is band-limited Gaussian noise built in the
// db4 coefficient domain: every band gets white Gaussian coefficients rescaled
// to an exact per-segment target energy, then the signal is synthesized with
// the inverse transform. Per-segment targets are the archetype plus a bounded
// random jitter, so realized shares stay within 0.08 of the archetype.
std::vector<Segment> synth_corpus(std::uint64_t seed, int per_class,
                                  double sampling_rate = kBonnSamplingRate);

struct SplitSpec {
  std::size_t train_count = 250;
  std::size_t test_count = 50;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Fisher-Yates shuffle driven by Rng(seed), then the first train_count
// indices train and the rest test. Throws CountMismatch unless
// train_count + test_count == total.
SplitIndices split_indices(std::size_t total, const SplitSpec& spec);

template <typename T>
struct Partition {
  std::vector<T> train;
  std::vector<T> test;
};

template <typename T>
Partition<T> split(const std::vector<T>& items, const SplitSpec& spec) {
  const auto idx = split_indices(items.size(), spec);
  Partition<T> out;
  out.train.reserve(idx.train.size());
  out.test.reserve(idx.test.size());
  for (auto i : idx.train) out.train.push_back(items[i]);
  for (auto i : idx.test) out.test.push_back(items[i]);
  return out;
}

}  // namespace wnn
