#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wnn/data.hpp"
#include "wnn/error.hpp"
#include "wnn/net.hpp"

namespace wnn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) noexcept;

struct RunConfig {
  std::optional<std::filesystem::path> data_root;
  bool synthetic = false;
  int per_class = 100;
  SetMapping mapping = default_set_mapping();
  double sampling_rate = kBonnSamplingRate;
  int levels = 5;
  int hidden = 5;
  std::optional<std::size_t> train_count;  // unset: 250/50 for 300 segments, else a 5:1 split
  std::optional<std::size_t> test_count;
  std::uint64_t seed = 0;
  TrainConfig train;
  std::filesystem::path out = "wnn-out";
};

// Applies `key = value` lines onto `config`. '#' starts a comment. Keys:
// data_root, synthetic, per_class, set_a, set_c, set_e, sampling_rate, levels,
// hidden, mse_goal, max_epochs, train_count, test_count, seed, out.
// Throws UsageError naming the line on unknown keys or bad values.
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

// Resolves train/test counts for `total` segments.
std::pair<std::size_t, std::size_t> resolve_split_counts(const RunConfig& config, std::size_t total);

// Collects files in memory and publishes them into a directory only on
// commit(): each is written to a temporary name, then renamed. Nothing is
// left behind when commit() is never reached.
class OutputStage {
 public:
  explicit OutputStage(std::filesystem::path directory) : directory_(std::move(directory)) {}

  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  void commit();

 private:
  std::filesystem::path directory_;
  std::map<std::string, std::string> files_;
};

// Entry point of the `wnn` tool. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wnn::cli
