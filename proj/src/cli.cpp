#include "wnn/cli.hpp"

#include <chrono>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "wnn/dwt.hpp"
#include "wnn/energy.hpp"
#include "wnn/eval.hpp"
#include "wnn/pipeline.hpp"

namespace wnn::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return kExitUsage;
    case ErrorCode::SingularSystem: return kExitNumeric;
    default: return kExitData;
  }
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_value(const std::string& text, const std::string& where) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError(fmt::format("{}: invalid value '{}'", where, text));
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& where) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw UsageError(fmt::format("{}: expected a boolean, got '{}'", where, text));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void apply_config_file(const fs::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("cannot open config file '{}'", path.string()));
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = fmt::format("{}:{}", path.string(), line_no);
    if (eq == std::string::npos) throw UsageError(fmt::format("{}: expected 'key = value'", where));
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));

    if (key == "data_root") config.data_root = value;
    else if (key == "synthetic") config.synthetic = parse_bool(value, where);
    else if (key == "per_class") config.per_class = parse_value<int>(value, where);
    else if (key == "set_a") config.mapping[SetTag::A] = value;
    else if (key == "set_c") config.mapping[SetTag::C] = value;
    else if (key == "set_e") config.mapping[SetTag::E] = value;
    else if (key == "sampling_rate") config.sampling_rate = parse_value<double>(value, where);
    else if (key == "levels") config.levels = parse_value<int>(value, where);
    else if (key == "hidden") config.hidden = parse_value<int>(value, where);
    else if (key == "mse_goal") config.train.mse_goal = parse_value<double>(value, where);
    else if (key == "max_epochs") config.train.max_epochs = parse_value<int>(value, where);
    else if (key == "train_count") config.train_count = parse_value<std::size_t>(value, where);
    else if (key == "test_count") config.test_count = parse_value<std::size_t>(value, where);
    else if (key == "seed") config.seed = parse_value<std::uint64_t>(value, where);
    else if (key == "out") config.out = value;
    else throw UsageError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

std::pair<std::size_t, std::size_t> resolve_split_counts(const RunConfig& config, std::size_t total) {
  if (config.train_count && config.test_count) return {*config.train_count, *config.test_count};
  if (config.train_count) {
    if (*config.train_count > total) {
      throw Error(ErrorCode::CountMismatch, fmt::format("train count {} exceeds {} segments", *config.train_count, total));
    }
    return {*config.train_count, total - *config.train_count};
  }
  if (config.test_count) {
    if (*config.test_count > total) {
      throw Error(ErrorCode::CountMismatch, fmt::format("test count {} exceeds {} segments", *config.test_count, total));
    }
    return {total - *config.test_count, *config.test_count};
  }
  const std::size_t test = (total + 3) / 6;  // 50 of 300
  return {total - test, test};
}

void OutputStage::commit() {
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (ec) {
    throw Error(ErrorCode::MissingFile,
                fmt::format("cannot create output directory '{}': {}", directory_.string(), ec.message()));
  }
  std::vector<std::pair<fs::path, fs::path>> staged;
  auto discard = [&] {
    for (const auto& [tmp, _] : staged) fs::remove(tmp, ec);
  };
  for (const auto& [name, content] : files_) {
    const fs::path final_path = directory_ / name;
    const fs::path tmp = directory_ / fmt::format(".{}.partial", name);
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    staged.emplace_back(tmp, final_path);
    f << content;
    f.close();
    if (!f) {
      discard();
      throw Error(ErrorCode::MissingFile, fmt::format("failed writing '{}'", tmp.string()));
    }
  }
  for (const auto& [tmp, final_path] : staged) {
    fs::rename(tmp, final_path, ec);
    if (ec) {
      discard();
      throw Error(ErrorCode::MissingFile, fmt::format("cannot rename into '{}': {}", final_path.string(), ec.message()));
    }
  }
}

namespace {

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> data_root;
  bool synthetic = false;
  std::optional<int> per_class;
  std::optional<int> levels;
  std::optional<int> hidden;
  std::optional<int> max_epochs;
  std::optional<double> mse_goal;
  std::optional<double> sampling_rate;
  std::optional<std::size_t> train_count;
  std::optional<std::size_t> test_count;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  std::string features;
  std::string model;
  std::string segment;
  std::string counts;
  bool svg = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value config file (flags override it)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "seed for synthesis, split and initial weights");
}

void add_dataset(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--data-root", o.data_root, "root of the A/C/E segment tree");
  cmd->add_flag("--synthetic", o.synthetic, "use the synthetic surrogate corpus");
  cmd->add_option("--per-class", o.per_class, "synthetic segments per class (default 100)");
  cmd->add_option("--sampling-rate", o.sampling_rate, "sampling rate in Hz (default 173.61)");
  cmd->add_option("--levels", o.levels, "decomposition levels (default 5)");
}

void add_training(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--hidden", o.hidden, "hidden neurons (default 5)");
  cmd->add_option("--mse-goal", o.mse_goal, "training MSE goal (default 0.1)");
  cmd->add_option("--max-epochs", o.max_epochs, "maximum LM epochs (default 1000)");
  cmd->add_option("--train-count", o.train_count, "training segments (default 250)");
  cmd->add_option("--test-count", o.test_count, "test segments (default 50)");
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg;
  if (o.config) apply_config_file(*o.config, cfg);
  if (o.data_root) cfg.data_root = *o.data_root;
  if (o.synthetic) cfg.synthetic = true;
  if (o.per_class) cfg.per_class = *o.per_class;
  if (o.levels) cfg.levels = *o.levels;
  if (o.hidden) cfg.hidden = *o.hidden;
  if (o.max_epochs) cfg.train.max_epochs = *o.max_epochs;
  if (o.mse_goal) cfg.train.mse_goal = *o.mse_goal;
  if (o.sampling_rate) cfg.sampling_rate = *o.sampling_rate;
  if (o.train_count) cfg.train_count = *o.train_count;
  if (o.test_count) cfg.test_count = *o.test_count;
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out = *o.out;
  cfg.train.rng_seed = cfg.seed;

  if (cfg.levels < 1) throw UsageError(fmt::format("--levels must be >= 1, got {}", cfg.levels));
  if (cfg.hidden < 1) throw UsageError(fmt::format("--hidden must be >= 1, got {}", cfg.hidden));
  if (cfg.per_class < 1) throw UsageError(fmt::format("--per-class must be >= 1, got {}", cfg.per_class));
  if (!(cfg.sampling_rate > 0.0)) throw UsageError("--sampling-rate must be > 0");
  return cfg;
}

void require_feature_levels(const RunConfig& cfg) {
  if (cfg.levels != kFeatureLevels) {
    throw UsageError(fmt::format("feature extraction uses {} levels; --levels {} applies only to 'decompose'",
                                 kFeatureLevels, cfg.levels));
  }
}

std::vector<Segment> load_segments(const RunConfig& cfg) {
  if (cfg.synthetic && cfg.data_root) throw UsageError("--synthetic and --data-root are mutually exclusive");
  if (cfg.synthetic) return synth_corpus(stage_seed(cfg.seed, SeedStream::Synthetic), cfg.per_class, cfg.sampling_rate);
  if (cfg.data_root) return load_bonn(*cfg.data_root, cfg.mapping, cfg.sampling_rate);
  throw UsageError("a dataset is required: pass --data-root PATH or --synthetic");
}

std::string features_to_csv(std::span<const FeatureRecord> records) {
  std::ostringstream ss;
  write_features_csv(ss, records);
  return ss.str();
}

std::vector<FeatureRecord> read_features_file(const fs::path& path) {
  std::istringstream in(read_file(path));
  return read_features_csv(in, path.string());
}

std::string format_summary_table(std::span<const ClassSummary> summary) {
  std::string out = fmt::format("{:<20}{:>6}", "Class (mean %)", "n");
  for (const char* name : kFeatureNames) out += fmt::format("{:>9}", name);
  out += '\n';
  for (const auto& s : summary) {
    out += fmt::format("{:<20}{:>6}", display_name(s.label), s.count);
    for (double m : s.mean) out += fmt::format("{:>9.2f}", 100.0 * m);
    out += '\n';
  }
  return out;
}

int cmd_featurize(const Overrides& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  require_feature_levels(cfg);
  const auto records = featurize(load_segments(cfg));
  const auto summary = summarize(records);

  OutputStage stage(cfg.out);
  stage.add("features.csv", features_to_csv(records));
  stage.add("summary.csv", summary_csv(summary));
  if (o.svg) stage.add("energy.svg", summary_svg(summary));
  stage.commit();

  out << format_summary_table(summary);
  out << fmt::format("wrote {} feature rows to {}\n", records.size(), (cfg.out / "features.csv").string());
  return kExitOk;
}

int cmd_train(const Overrides& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  std::vector<FeatureRecord> records;
  std::string source;
  if (!o.features.empty()) {
    records = read_features_file(o.features);
    source = o.features;
  } else {
    require_feature_levels(cfg);
    records = featurize(load_segments(cfg));
    source = cfg.synthetic ? "synthetic" : cfg.data_root->string();
  }
  const auto [train_count, test_count] = resolve_split_counts(cfg, records.size());
  Experiment exp = run_experiment(records, train_count, test_count, cfg.train, cfg.hidden);

  std::ostringstream model;
  save_model(exp.net, model);
  std::string history = "epoch,mse\n";
  for (std::size_t e = 0; e < exp.report.mse_history.size(); ++e) {
    history += fmt::format("{},{:.17g}\n", e, exp.report.mse_history[e]);
  }

  const auto now = std::chrono::system_clock::now();
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  nlohmann::ordered_json manifest = {
      {"seed", cfg.seed},
      {"source", source},
      {"split", {{"train_count", train_count}, {"test_count", test_count},
                 {"split_seed", stage_seed(cfg.seed, SeedStream::Split)}}},
      {"init_seed", stage_seed(cfg.seed, SeedStream::Init)},
      {"layers", exp.net.layer_sizes()},
      {"train_config", {{"mse_goal", cfg.train.mse_goal}, {"max_epochs", cfg.train.max_epochs},
                        {"mu_init", cfg.train.mu_init}, {"mu_decrease", cfg.train.mu_decrease},
                        {"mu_increase", cfg.train.mu_increase}, {"mu_max", cfg.train.mu_max},
                        {"min_gradient", cfg.train.min_gradient}}},
      {"result", {{"final_mse", exp.report.final_mse}, {"epochs_run", exp.report.epochs_run},
                  {"stop_reason", std::string(to_string(exp.report.stop_reason))}}},
      {"created_unix_seconds", seconds},
  };

  OutputStage stage(cfg.out);
  stage.add("model.txt", model.str());
  stage.add("train.csv", features_to_csv(exp.data.train));
  stage.add("test.csv", features_to_csv(exp.data.test));
  stage.add("history.csv", history);
  stage.add("manifest.json", manifest.dump(2) + "\n");
  stage.commit();

  out << fmt::format("stop_reason={} epochs={} final_mse={:.6g}\n", to_string(exp.report.stop_reason),
                     exp.report.epochs_run, exp.report.final_mse);
  if (exp.test_confusion.total() > 0) {
    out << fmt::format("held-out accuracy {}% ({} of {})\n", format_percent(accuracies(exp.test_confusion).overall),
                       exp.test_confusion.trace(), exp.test_confusion.total());
  }
  out << fmt::format("wrote model to {}\n", (cfg.out / "model.txt").string());
  return kExitOk;
}

Network read_model_file(const fs::path& path) {
  std::istringstream in(read_file(path));
  return load_model(in, path.string());
}

int cmd_evaluate(const Overrides& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  if (o.model.empty() || o.features.empty()) throw UsageError("evaluate needs --model and --features");
  const Network net = read_model_file(o.model);
  const auto records = read_features_file(o.features);
  const ConfusionMatrix cm = evaluate(net, feature_vectors(records));
  const std::string table = format_report(cm);

  OutputStage stage(cfg.out);
  stage.add("report.txt", table);
  stage.add("report.csv", format_report_csv(cm));
  stage.commit();
  out << table;
  return kExitOk;
}

int cmd_decompose(const Overrides& o, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  if (o.segment.empty()) throw UsageError("decompose needs --segment FILE");
  auto samples = truncate_dyadic(read_samples(o.segment), cfg.levels);
  if (samples.empty()) {
    throw Error(ErrorCode::TooShort, fmt::format("'{}' holds fewer than 2^{} samples", o.segment, cfg.levels));
  }
  const Signal signal(std::move(samples), cfg.sampling_rate);
  const Decomposition d = decompose(signal, db4_filter(), cfg.levels);
  const auto energies = level_energies(d);
  double total = 0.0;
  for (double e : energies) total += e;
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroEnergy, fmt::format("'{}' has zero energy", o.segment));
  const auto bands = band_table(cfg.sampling_rate, cfg.levels);

  OutputStage stage(cfg.out);
  auto dump = [](const std::vector<double>& coeffs) {
    std::string csv = "index,value\n";
    for (std::size_t i = 0; i < coeffs.size(); ++i) csv += fmt::format("{},{:.17g}\n", i, coeffs[i]);
    return csv;
  };
  std::string summary = "band,low_hz,high_hz,rhythm,coefficients,energy,share\n";
  std::string table = fmt::format("{:<5}{:>18}{:>10}{:>8}{:>16}{:>10}\n", "band", "range (Hz)", "rhythm", "coeffs",
                                  "energy", "share %");
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto& coeffs = b < d.details.size() ? d.details[b] : d.approximation;
    stage.add(bands[b].name + ".csv", dump(coeffs));
    const double share = energies[b] / total;
    summary += fmt::format("{},{:.4f},{:.4f},{},{},{:.17g},{:.17g}\n", bands[b].name, bands[b].low_hz,
                           bands[b].high_hz, bands[b].rhythm, coeffs.size(), energies[b], share);
    table += fmt::format("{:<5}{:>18}{:>10}{:>8}{:>16.6g}{:>10.2f}\n", bands[b].name,
                         fmt::format("{:.2f}-{:.2f}", bands[b].low_hz, bands[b].high_hz), bands[b].rhythm,
                         coeffs.size(), energies[b], 100.0 * share);
  }
  stage.add("bands.csv", summary);
  stage.commit();
  out << table << fmt::format("total energy {:.6g} over {} samples\n", total, signal.size());
  return kExitOk;
}

ConfusionMatrix parse_counts(const std::string& text) {
  ConfusionMatrix::Counts counts{};
  std::size_t i = 0;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string field = trim(rest.substr(0, comma));
    if (i >= 9) throw UsageError("--counts takes exactly 9 comma-separated integers");
    counts[i / 3][i % 3] = parse_value<std::size_t>(field, "--counts");
    ++i;
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (i != 9) throw UsageError("--counts takes exactly 9 comma-separated integers");
  return ConfusionMatrix(counts);
}

int cmd_report(const Overrides& o, std::ostream& out) {
  if (o.counts.empty() && o.features.empty()) throw UsageError("report needs --counts and/or --features");
  std::optional<OutputStage> stage;
  if (o.out || o.config) stage.emplace(resolve(o).out);

  if (!o.counts.empty()) {
    const ConfusionMatrix cm = parse_counts(o.counts);
    const std::string table = format_report(cm);
    out << table;
    if (stage) {
      stage->add("report.txt", table);
      stage->add("report.csv", format_report_csv(cm));
    }
  }
  if (!o.features.empty()) {
    const auto summary = summarize(read_features_file(o.features));
    out << format_summary_table(summary);
    if (stage) {
      stage->add("summary.csv", summary_csv(summary));
      if (o.svg) stage->add("energy.svg", summary_svg(summary));
    }
  }
  if (stage) stage->commit();
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"EEG classification with wavelet energy features and a Levenberg-Marquardt trained network", "wnn"};
  app.require_subcommand(1);
  Overrides o;

  auto* featurize_cmd = app.add_subcommand("featurize", "extract D1..D5/A5 energy shares for every segment");
  add_common(featurize_cmd, o);
  add_dataset(featurize_cmd, o);
  featurize_cmd->add_flag("--svg", o.svg, "also write energy.svg (class-mean shares)");

  auto* train_cmd = app.add_subcommand("train", "split, train the network and save the model");
  add_common(train_cmd, o);
  add_dataset(train_cmd, o);
  add_training(train_cmd, o);
  train_cmd->add_option("--features", o.features, "feature CSV to train from instead of a dataset");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "confusion matrix and accuracies of a model on a feature CSV");
  add_common(evaluate_cmd, o);
  evaluate_cmd->add_option("--model", o.model, "model file written by 'train'")->required();
  evaluate_cmd->add_option("--features", o.features, "feature CSV, e.g. test.csv from 'train'")->required();

  auto* decompose_cmd = app.add_subcommand("decompose", "dump the wavelet coefficients of one segment file");
  add_common(decompose_cmd, o);
  decompose_cmd->add_option("--segment", o.segment, "ASCII segment file, one sample per line")->required();
  decompose_cmd->add_option("--levels", o.levels, "decomposition levels (default 5)");
  decompose_cmd->add_option("--sampling-rate", o.sampling_rate, "sampling rate in Hz (default 173.61)");

  auto* report_cmd = app.add_subcommand("report", "format a confusion matrix and/or a per-class energy summary");
  add_common(report_cmd, o);
  report_cmd->add_option("--counts", o.counts, "9 counts, row-major, rows = true class");
  report_cmd->add_option("--features", o.features, "feature CSV to summarize per class");
  report_cmd->add_flag("--svg", o.svg, "also write energy.svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (featurize_cmd->parsed()) return cmd_featurize(o, out);
    if (train_cmd->parsed()) return cmd_train(o, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(o, out);
    if (decompose_cmd->parsed()) return cmd_decompose(o, out);
    if (report_cmd->parsed()) return cmd_report(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace wnn::cli
