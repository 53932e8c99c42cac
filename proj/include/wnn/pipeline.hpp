#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wnn/data.hpp"
#include "wnn/energy.hpp"
#include "wnn/eval.hpp"
#include "wnn/net.hpp"

namespace wnn {

// One row of the feature CSV.
struct FeatureRecord {
  std::string segment_id;
  SetTag set;
  FeatureVector features;  // label always equals label_for(set)
};

// Sub-streams of the single user-facing seed.
enum class SeedStream : std::uint64_t { Synthetic = 0, Split = 1, Init = 2 };

inline std::uint64_t stage_seed(std::uint64_t seed, SeedStream stream) {
  return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

// db4 / 5-level features for every segment, computed in parallel, returned in input order.
std::vector<FeatureRecord> featurize(const std::vector<Segment>& segments);

// Header: segment_id,set,D1,D2,D3,D4,D5,A5,label. Shares use 17 significant digits.
void write_features_csv(std::ostream& out, std::span<const FeatureRecord> records);
std::vector<FeatureRecord> read_features_csv(std::istream& in, std::string_view source_name);

struct ClassSummary {
  EegClass label;
  std::size_t count = 0;
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> min{};
  std::array<double, kFeatureCount> max{};
};

// Per-class mean/min/max share of each band; classes without records are omitted.
std::vector<ClassSummary> summarize(std::span<const FeatureRecord> records);
// label,band,count,mean_percent,min_percent,max_percent
std::string summary_csv(std::span<const ClassSummary> summary);
// Grouped bar chart of class-mean shares (percent) per band.
std::string summary_svg(std::span<const ClassSummary> summary);

Eigen::MatrixXd feature_matrix(std::span<const FeatureRecord> records);
Eigen::VectorXd target_vector(std::span<const FeatureRecord> records);
std::vector<FeatureVector> feature_vectors(std::span<const FeatureRecord> records);

struct Experiment {
  Partition<FeatureRecord> data;
  Network net;
  TrainReport report;
  ConfusionMatrix test_confusion;
  ConfusionMatrix train_confusion;
};

// split -> init_network -> lm_train -> evaluate. The split and the initial
// weights are seeded from config.rng_seed through stage_seed.
Experiment run_experiment(const std::vector<FeatureRecord>& records, std::size_t train_count,
                          std::size_t test_count, const TrainConfig& config, int hidden = 5);

}  // namespace wnn
