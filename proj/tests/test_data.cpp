#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spectral_oracle.hpp"
#include "wnn/data.hpp"
#include "wnn/error.hpp"
#include "wnn/pipeline.hpp"

using namespace wnn;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("wnn-data-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_lines(const fs::path& file, std::size_t count, int offset = 0) {
  std::ofstream out(file);
  for (std::size_t i = 0; i < count; ++i) out << static_cast<int>(i % 97) - 48 + offset << '\n';
}

void make_tree(const fs::path& root, std::size_t per_set, std::size_t lines = 4097) {
  int offset = 0;
  for (const char* dir : {"Z", "N", "S"}) {
    fs::create_directories(root / dir);
    for (std::size_t i = 0; i < per_set; ++i) {
      char name[16];
      std::snprintf(name, sizeof name, "%s%03zu.txt", dir, i + 1);
      write_lines(root / dir / name, lines, offset);
    }
    ++offset;
  }
}

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ReadSamples, AcceptsWhitespaceSignsAndTrailingBlanks) {
  TempDir tmp;
  const auto file = tmp.path() / "seg.txt";
  {
    std::ofstream out(file);
    out << "  12\n-7\r\n+3\t\n0\n\n\n";
  }
  EXPECT_EQ(read_samples(file), (std::vector<double>{12, -7, 3, 0}));
}

TEST(ReadSamples, NamesFileAndLineOfBadSample) {
  TempDir tmp;
  const auto file = tmp.path() / "bad.txt";
  {
    std::ofstream out(file);
    for (int i = 1; i <= 60; ++i) out << (i == 40 ? "12a7" : std::to_string(i)) << '\n';
  }
  try {
    read_samples(file);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 40u);
    EXPECT_EQ(e.path(), file);
    EXPECT_NE(std::string(e.what()).find("bad.txt:40"), std::string::npos) << e.what();
  }
}

TEST(ReadSamples, RejectsInteriorBlankLineAndDecimals) {
  TempDir tmp;
  {
    std::ofstream out(tmp.path() / "gap.txt");
    out << "1\n2\n\n3\n";
  }
  {
    std::ofstream out(tmp.path() / "dec.txt");
    out << "1\n2.5\n";
  }
  EXPECT_EQ(code_of([&] { read_samples(tmp.path() / "gap.txt"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { read_samples(tmp.path() / "dec.txt"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { read_samples(tmp.path() / "absent.txt"); }), ErrorCode::MissingFile);
}

TEST(LoadSegment, TruncatesToSegmentLength) {
  TempDir tmp;
  write_lines(tmp.path() / "Z001.txt", 4097);
  const auto seg = load_segment(tmp.path() / "Z001.txt", SetTag::A, kBonnSamplingRate);
  EXPECT_EQ(seg.signal.size(), 4096u);
  EXPECT_EQ(seg.id, "A/Z001.txt");
  EXPECT_EQ(seg.label(), EegClass::Healthy);
  write_lines(tmp.path() / "short.txt", 4000);
  EXPECT_EQ(code_of([&] { load_segment(tmp.path() / "short.txt", SetTag::A, kBonnSamplingRate); }),
            ErrorCode::ShortSegment);
}

TEST(LoadBonn, ReadsFullTreeInOrder) {
  TempDir tmp;
  make_tree(tmp.path(), 100);
  // Hidden files are ignored.
  write_lines(tmp.path() / "Z" / ".DS_Store", 3);
  const auto segs = load_bonn(tmp.path(), default_set_mapping());
  ASSERT_EQ(segs.size(), 300u);
  std::map<EegClass, int> per_label;
  for (const auto& s : segs) ++per_label[s.label()];
  for (EegClass c : kAllClasses) EXPECT_EQ(per_label[c], 100);
  EXPECT_EQ(segs[0].id, "A/Z001.txt");
  EXPECT_EQ(segs[99].id, "A/Z100.txt");
  EXPECT_EQ(segs[100].id, "C/N001.txt");
  EXPECT_EQ(segs[299].id, "E/S100.txt");
  EXPECT_EQ(segs[150].signal.samples()[0], -48 + 1);
  for (const auto& s : segs) EXPECT_EQ(s.signal.size(), 4096u);
}

TEST(LoadBonn, CustomMappingAndErrors) {
  TempDir tmp;
  make_tree(tmp.path(), 3, 4096);
  SetMapping swapped = default_set_mapping();
  swapped[SetTag::A] = "S";
  swapped[SetTag::E] = "Z";
  const auto segs = load_bonn(tmp.path(), swapped, kBonnSamplingRate, 3);
  EXPECT_EQ(segs[0].id, "A/S001.txt");
  EXPECT_EQ(code_of([&] { load_bonn(tmp.path(), default_set_mapping()); }), ErrorCode::WrongSegmentCount);
  EXPECT_EQ(code_of([&] { load_bonn(tmp.path() / "nowhere", default_set_mapping(), kBonnSamplingRate, 3); }),
            ErrorCode::MissingFile);
  {
    std::ofstream out(tmp.path() / "N" / "N002.txt");
    out << "5\nx\n";
  }
  EXPECT_EQ(code_of([&] { load_bonn(tmp.path(), default_set_mapping(), kBonnSamplingRate, 3); }),
            ErrorCode::ParseError);
}

TEST(TruncateDyadic, DropsTrailingRemainder) {
  EXPECT_EQ(truncate_dyadic(std::vector<double>(4097, 1.0), 5).size(), 4096u);
  EXPECT_EQ(truncate_dyadic(std::vector<double>(100, 1.0), 3).size(), 96u);
  EXPECT_THROW(truncate_dyadic({}, 0), Error);
}

TEST(SynthCorpus, SizesLabelsAndIds) {
  const auto one = synth_corpus(1, 1);
  ASSERT_EQ(one.size(), 3u);
  EXPECT_EQ(one[0].label(), EegClass::Healthy);
  EXPECT_EQ(one[1].label(), EegClass::EpilepsySyndrome);
  EXPECT_EQ(one[2].label(), EegClass::Seizure);
  EXPECT_EQ(one[2].id, "E/synth-000");
  for (const auto& s : one) EXPECT_EQ(s.signal.size(), kSegmentLength);
  EXPECT_THROW(synth_corpus(1, 0), Error);
}

TEST(SynthCorpus, DeterministicPerSeed) {
  const auto a = synth_corpus(5, 2), b = synth_corpus(5, 2), c = synth_corpus(6, 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(std::ranges::equal(a[i].signal.samples(), b[i].signal.samples()));
    EXPECT_FALSE(std::ranges::equal(a[i].signal.samples(), c[i].signal.samples()));
  }
}

TEST(SynthCorpus, SharesFollowArchetypes) {
  const auto segs = synth_corpus(2024, 100);
  ASSERT_EQ(segs.size(), 300u);
  const auto records = featurize(segs);
  std::map<EegClass, std::array<double, 6>> mean, oracle_mean;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const EegClass c = segs[i].label();
    const auto& arch = archetype(c);
    const auto model = wnn::testing::dwt_band_shares(segs[i].signal.samples(), db4_filter().lowpass,
                                                            db4_filter().highpass, 5);
    for (std::size_t k = 0; k < 6; ++k) {
      const double s = records[i].features.shares[k];
      EXPECT_LE(std::abs(s - arch[k]), 0.08) << segs[i].id << " band " << k;
      mean[c][k] += s / 100.0;
      oracle_mean[c][k] += model[k] / 100.0;
    }
  }
  for (EegClass c : kAllClasses) {
    for (std::size_t k = 0; k < 6; ++k) {
      EXPECT_NEAR(mean[c][k], archetype(c)[k], 0.03) << to_string(c) << " band " << k;
      EXPECT_NEAR(oracle_mean[c][k], archetype(c)[k], 0.03) << "oracle " << to_string(c) << " band " << k;
    }
  }
  // Healthy profile: little D1, modest D2, D3 and D4 comparable.
  const auto& h = mean[EegClass::Healthy];
  EXPECT_LT(h[0], 0.05);
  EXPECT_LT(h[1], 0.12);
  EXPECT_GT(h[2], 0.1);
  EXPECT_GT(h[3], 0.1);
  EXPECT_LT(std::abs(h[2] - h[3]), 0.05);
}

TEST(Split, PartitionsIndices) {
  const auto idx = split_indices(300, SplitSpec{250, 50, 9});
  ASSERT_EQ(idx.train.size(), 250u);
  ASSERT_EQ(idx.test.size(), 50u);
  std::set<std::size_t> all(idx.train.begin(), idx.train.end());
  all.insert(idx.test.begin(), idx.test.end());
  EXPECT_EQ(all.size(), 300u);
  EXPECT_EQ(*all.rbegin(), 299u);
}

TEST(Split, DeterministicAndSeedSensitive) {
  EXPECT_EQ(split_indices(300, {250, 50, 4}).test, split_indices(300, {250, 50, 4}).test);
  EXPECT_NE(split_indices(300, {250, 50, 4}).test, split_indices(300, {250, 50, 5}).test);
  const std::vector<int> items = {10, 11, 12, 13};
  const auto part = split(items, SplitSpec{3, 1, 2});
  EXPECT_EQ(part.train.size(), 3u);
  EXPECT_EQ(part.test.size(), 1u);
}

TEST(Split, RejectsCountsThatDoNotCover) {
  EXPECT_EQ(code_of([] { split_indices(300, {250, 49, 1}); }), ErrorCode::CountMismatch);
  EXPECT_EQ(code_of([] { split_indices(300, {250, 51, 1}); }), ErrorCode::CountMismatch);
}

TEST(Split, TestClassCountsAreHypergeometric) {
  // 50 draws without replacement from 100/100/100: mean 50/3, variance
  // 50 * (1/3) * (2/3) * (250/299).
  const int runs = 1000;
  double sum = 0, sum_sq = 0;
  for (int s = 0; s < runs; ++s) {
    const auto idx = split_indices(300, SplitSpec{250, 50, static_cast<std::uint64_t>(s)});
    const double healthy = static_cast<double>(std::ranges::count_if(idx.test, [](std::size_t i) { return i < 100; }));
    sum += healthy;
    sum_sq += healthy * healthy;
  }
  const double mean = sum / runs;
  const double var = (sum_sq - runs * mean * mean) / (runs - 1);
  const double expected_var = 50.0 * (1.0 / 3.0) * (2.0 / 3.0) * (250.0 / 299.0);
  EXPECT_NEAR(mean, 50.0 / 3.0, 0.3);
  EXPECT_NEAR(var, expected_var, 0.15 * expected_var);
}

TEST(Split, FirstElementIsUniform) {
  const int runs = 10000;
  std::array<int, 10> counts{};
  for (int s = 0; s < runs; ++s) ++counts[split_indices(10, SplitSpec{5, 5, static_cast<std::uint64_t>(s)}).train[0]];
  double chi2 = 0;
  for (int c : counts) chi2 += (c - runs / 10.0) * (c - runs / 10.0) / (runs / 10.0);
  EXPECT_LT(chi2, 27.88);  // 99.9th percentile of chi-square with 9 degrees of freedom
}

TEST(Pipeline, StageSeedsAreDistinct) {
  EXPECT_NE(stage_seed(0, SeedStream::Split), stage_seed(0, SeedStream::Init));
  EXPECT_NE(stage_seed(0, SeedStream::Split), stage_seed(1, SeedStream::Split));
  EXPECT_EQ(stage_seed(7, SeedStream::Synthetic), derive_seed(7, 0));
}

TEST(Pipeline, FeatureCsvRoundTrips) {
  const auto records = featurize(synth_corpus(3, 2));
  std::stringstream buf;
  write_features_csv(buf, records);
  const auto back = read_features_csv(buf, "f.csv");
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].segment_id, records[i].segment_id);
    EXPECT_EQ(back[i].features.shares, records[i].features.shares);
    EXPECT_EQ(back[i].features.label, records[i].features.label);
  }
}

TEST(Pipeline, FeatureCsvErrorsCarryLines) {
  std::istringstream bad_header("id,set\n");
  EXPECT_THROW(read_features_csv(bad_header, "f.csv"), ParseError);
  std::istringstream bad_row(
      "segment_id,set,D1,D2,D3,D4,D5,A5,label\n"
      "A/x,A,0.1,0.1,0.1,0.1,0.1,0.5,healthy\n"
      "C/y,C,0.1,0.1,0.1,0.1,1.5,0.5,epilepsy_syndrome\n");
  try {
    read_features_csv(bad_row, "f.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream mislabeled(
      "segment_id,set,D1,D2,D3,D4,D5,A5,label\n"
      "A/x,A,0.1,0.1,0.1,0.1,0.1,0.5,seizure\n");
  EXPECT_THROW(read_features_csv(mislabeled, "f.csv"), ParseError);
}
