#include "wnn/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>

#include <fmt/format.h>

#include "wnn/parallel.hpp"

namespace wnn {

namespace fs = std::filesystem;

char to_char(SetTag tag) noexcept {
  switch (tag) {
    case SetTag::A: return 'A';
    case SetTag::C: return 'C';
    case SetTag::E: return 'E';
  }
  return '?';
}

std::optional<SetTag> parse_set(std::string_view text) noexcept {
  if (text == "A") return SetTag::A;
  if (text == "C") return SetTag::C;
  if (text == "E") return SetTag::E;
  return std::nullopt;
}

EegClass label_for(SetTag tag) noexcept {
  switch (tag) {
    case SetTag::A: return EegClass::Healthy;
    case SetTag::C: return EegClass::EpilepsySyndrome;
    case SetTag::E: return EegClass::Seizure;
  }
  return EegClass::Healthy;
}

SetTag set_for(EegClass label) noexcept {
  switch (label) {
    case EegClass::Healthy: return SetTag::A;
    case EegClass::EpilepsySyndrome: return SetTag::C;
    case EegClass::Seizure: return SetTag::E;
  }
  return SetTag::A;
}

SetMapping default_set_mapping() {
  return {{SetTag::A, "Z"}, {SetTag::C, "N"}, {SetTag::E, "S"}};
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<double> read_samples(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, fmt::format("cannot open '{}'", path.string()));

  std::vector<double> samples;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> first_blank;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) {
      if (!first_blank) first_blank = line_no;
      continue;
    }
    if (first_blank) throw ParseError(path, *first_blank, "blank line inside sample data");
    long long value = 0;
    // from_chars rejects a leading '+', which some exporters write.
    const std::string_view digits = text.front() == '+' ? text.substr(1) : text;
    const char* end = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(digits.data(), end, value);
    if (ec != std::errc{} || ptr != end || digits.empty()) {
      throw ParseError(path, line_no, fmt::format("not an integer sample: '{}'", text));
    }
    samples.push_back(static_cast<double>(value));
  }
  return samples;
}

Segment load_segment(const fs::path& path, SetTag set, double sampling_rate, std::size_t length) {
  auto samples = read_samples(path);
  if (samples.size() < length) {
    throw Error(ErrorCode::ShortSegment, fmt::format("'{}' has {} samples, need at least {}",
                                                     path.string(), samples.size(), length));
  }
  samples.resize(length);
  return Segment{fmt::format("{}/{}", to_char(set), path.filename().string()), set,
                 Signal(std::move(samples), sampling_rate)};
}

std::vector<Segment> load_bonn(const fs::path& root, const SetMapping& mapping, double sampling_rate,
                               std::size_t per_set) {
  std::vector<Segment> all;
  for (SetTag set : kAllSets) {
    const auto it = mapping.find(set);
    if (it == mapping.end()) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("no subdirectory mapped for set {}", to_char(set)));
    }
    const fs::path dir = root / it->second;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
      throw Error(ErrorCode::MissingFile,
                  fmt::format("set {} directory '{}' does not exist", to_char(set), dir.string()));
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && !name.empty() && name.front() != '.') files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    if (files.size() != per_set) {
      throw Error(ErrorCode::WrongSegmentCount,
                  fmt::format("set {} directory '{}' holds {} files, expected {}", to_char(set),
                              dir.string(), files.size(), per_set));
    }

    std::vector<std::optional<Segment>> loaded(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
      loaded[i].emplace(load_segment(files[i], set, sampling_rate));
    });
    for (auto& seg : loaded) all.push_back(std::move(*seg));
  }
  return all;
}

std::vector<double> truncate_dyadic(std::vector<double> samples, int levels) {
  if (levels < 1 || levels >= 63) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("levels must be in [1, 62], got {}", levels));
  }
  const std::size_t block = std::size_t{1} << levels;
  samples.resize(samples.size() - samples.size() % block);
  return samples;
}

const std::array<double, kFeatureCount>& archetype(EegClass label) {
  // Shaped after the qualitative per-class energy distributions reported for
  // the Bonn sets; these are engineering choices, not measured values.
  static const std::array<double, kFeatureCount> healthy = {0.01, 0.05, 0.20, 0.20, 0.10, 0.44};
  static const std::array<double, kFeatureCount> syndrome = {0.005, 0.02, 0.08, 0.10, 0.17, 0.625};
  static const std::array<double, kFeatureCount> seizure = {0.01, 0.06, 0.25, 0.27, 0.26, 0.15};
  switch (label) {
    case EegClass::Healthy: return healthy;
    case EegClass::EpilepsySyndrome: return syndrome;
    case EegClass::Seizure: return seizure;
  }
  return healthy;
}

namespace {

constexpr double kMaxShareDeviation = 0.07;

std::array<double, kFeatureCount> jittered_shares(const std::array<double, kFeatureCount>& base, Rng& rng) {
  while (true) {
    std::array<double, kFeatureCount> shares{};
    double sum = 0.0;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      const double spread = std::min(0.04, 0.5 * base[k]);
      shares[k] = base[k] + spread * rng.uniform(-1.0, 1.0);
      sum += shares[k];
    }
    bool ok = true;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      shares[k] /= sum;
      ok = ok && std::abs(shares[k] - base[k]) <= kMaxShareDeviation;
    }
    if (ok) return shares;
  }
}

double typical_rms(EegClass label) {
  switch (label) {
    case EegClass::Healthy: return 40.0;
    case EegClass::EpilepsySyndrome: return 60.0;
    case EegClass::Seizure: return 200.0;
  }
  return 50.0;
}

std::vector<double> band_noise(std::size_t count, double target_energy, Rng& rng) {
  std::vector<double> coeffs(count);
  for (auto& c : coeffs) c = rng.normal();
  const double e = energy(coeffs);
  const double scale = e > 0.0 ? std::sqrt(target_energy / e) : 0.0;
  for (auto& c : coeffs) c *= scale;
  return coeffs;
}

}  // namespace

std::vector<Segment> synth_corpus(std::uint64_t seed, int per_class, double sampling_rate) {
  if (per_class < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("per_class must be >= 1, got {}", per_class));
  Rng rng(seed);
  const WaveletFilter& filter = db4_filter();
  std::vector<Segment> out;
  out.reserve(3 * static_cast<std::size_t>(per_class));
  for (SetTag set : kAllSets) {
    const EegClass label = label_for(set);
    for (int i = 0; i < per_class; ++i) {
      const auto shares = jittered_shares(archetype(label), rng);
      const double rms = typical_rms(label) * rng.uniform(0.8, 1.2);
      const double total = rms * rms * static_cast<double>(kSegmentLength);

      Decomposition d;
      d.levels = kFeatureLevels;
      d.source_length = kSegmentLength;
      for (int level = 1; level <= kFeatureLevels; ++level) {
        d.details.push_back(band_noise(kSegmentLength >> level, shares[static_cast<std::size_t>(level - 1)] * total, rng));
      }
      d.approximation = band_noise(kSegmentLength >> kFeatureLevels, shares[kFeatureCount - 1] * total, rng);

      out.push_back(Segment{fmt::format("{}/synth-{:03d}", to_char(set), i), set,
                            Signal(reconstruct(d, filter), sampling_rate)});
    }
  }
  return out;
}

SplitIndices split_indices(std::size_t total, const SplitSpec& spec) {
  if (spec.train_count + spec.test_count != total) {
    throw Error(ErrorCode::CountMismatch,
                fmt::format("split {} + {} does not cover {} items", spec.train_count, spec.test_count, total));
  }
  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  Rng rng(spec.seed);
  for (std::size_t i = total; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.train_count));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(spec.train_count), order.end());
  return out;
}

}  // namespace wnn
