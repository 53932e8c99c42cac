#include "wnn/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "wnn/error.hpp"
#include "wnn/parallel.hpp"

namespace wnn {

std::vector<FeatureRecord> featurize(const std::vector<Segment>& segments) {
  std::vector<std::optional<FeatureRecord>> slots(segments.size());
  parallel_for(segments.size(), [&](std::size_t i) {
    const Segment& seg = segments[i];
    FeatureVector fv;
    try {
      fv = extract_features(seg.signal);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("segment {}: {}", seg.id, e.what()));
    }
    fv.label = seg.label();
    slots[i].emplace(FeatureRecord{seg.id, seg.set, fv});
  });
  std::vector<FeatureRecord> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

namespace {

constexpr std::string_view kFeatureHeader = "segment_id,set,D1,D2,D3,D4,D5,A5,label";

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

}  // namespace

void write_features_csv(std::ostream& out, std::span<const FeatureRecord> records) {
  out << kFeatureHeader << '\n';
  for (const auto& r : records) {
    std::string line = fmt::format("{},{}", r.segment_id, to_char(r.set));
    for (double s : r.features.shares) line += fmt::format(",{:.17g}", s);
    line += fmt::format(",{}\n", r.features.label ? to_string(*r.features.label) : "");
    out << line;
  }
}

std::vector<FeatureRecord> read_features_csv(std::istream& in, std::string_view source_name) {
  const std::filesystem::path source{std::string(source_name)};
  std::string line;
  std::size_t line_no = 0;
  auto strip_cr = [&] {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header line");
  ++line_no;
  strip_cr();
  if (line != kFeatureHeader) {
    throw ParseError(source, line_no, fmt::format("expected header '{}'", kFeatureHeader));
  }

  std::vector<FeatureRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != 9) {
      throw ParseError(source, line_no, fmt::format("expected 9 fields, found {}", fields.size()));
    }
    if (fields[0].empty()) throw ParseError(source, line_no, "empty segment_id");
    const auto set = parse_set(fields[1]);
    if (!set) throw ParseError(source, line_no, fmt::format("unknown set '{}'", fields[1]));

    FeatureRecord rec{std::string(fields[0]), *set, {}};
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      const auto text = fields[2 + k];
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc{} || ptr != text.data() + text.size() || !(value >= 0.0 && value <= 1.0)) {
        throw ParseError(source, line_no,
                         fmt::format("{} share '{}' is not a number in [0, 1]", kFeatureNames[k], text));
      }
      rec.features.shares[k] = value;
    }
    if (!fields[8].empty()) {
      const auto label = parse_class(fields[8]);
      if (!label) throw ParseError(source, line_no, fmt::format("unknown label '{}'", fields[8]));
      if (*label != label_for(*set)) {
        throw ParseError(source, line_no,
                         fmt::format("label '{}' does not match set {}", fields[8], fields[1]));
      }
      rec.features.label = label;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ClassSummary> summarize(std::span<const FeatureRecord> records) {
  std::vector<ClassSummary> out;
  for (EegClass c : kAllClasses) {
    ClassSummary s{c};
    s.min.fill(INFINITY);
    s.max.fill(-INFINITY);
    for (const auto& r : records) {
      if (label_for(r.set) != c) continue;
      ++s.count;
      for (std::size_t k = 0; k < kFeatureCount; ++k) {
        const double v = r.features.shares[k];
        s.mean[k] += v;
        s.min[k] = std::min(s.min[k], v);
        s.max[k] = std::max(s.max[k], v);
      }
    }
    if (s.count == 0) continue;
    for (auto& m : s.mean) m /= static_cast<double>(s.count);
    out.push_back(s);
  }
  return out;
}

std::string summary_csv(std::span<const ClassSummary> summary) {
  std::string out = "label,band,count,mean_percent,min_percent,max_percent\n";
  for (const auto& s : summary) {
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      out += fmt::format("{},{},{},{:.4f},{:.4f},{:.4f}\n", to_string(s.label), kFeatureNames[k], s.count,
                         100.0 * s.mean[k], 100.0 * s.min[k], 100.0 * s.max[k]);
    }
  }
  return out;
}

std::string summary_svg(std::span<const ClassSummary> summary) {
  constexpr double width = 720, height = 360, left = 60, bottom = 40, top = 30, right = 150;
  constexpr std::array<const char*, 3> colors = {"#4c72b0", "#dd8452", "#c44e52"};
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  double peak = 0.0;
  for (const auto& s : summary) {
    for (double m : s.mean) peak = std::max(peak, m);
  }
  const double y_max = std::max(10.0, std::ceil(peak * 10.0) * 10.0);  // percent, rounded up to 10
  const double group_w = plot_w / kFeatureCount;
  const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(1, summary.size()));

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n",
      width, height);
  svg += fmt::format("<text x=\"{}\" y=\"18\">Mean energy share per band (%)</text>\n", left);
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = y_max * tick / 5.0;
    const double y = top + plot_h * (1.0 - v / y_max);
    svg += fmt::format("<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n", left, y,
                       left + plot_w, y);
    svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.0f}</text>\n", left - 6, y + 4, v);
  }
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    const double gx = left + group_w * static_cast<double>(k) + group_w * 0.1;
    for (std::size_t c = 0; c < summary.size(); ++c) {
      const double pct = 100.0 * summary[c].mean[k];
      const double h = plot_h * pct / y_max;
      svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\"/>\n",
                         gx + bar_w * static_cast<double>(c), top + plot_h - h, bar_w, h,
                         colors[index_of(summary[c].label)]);
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       left + group_w * (static_cast<double>(k) + 0.5), height - bottom + 18, kFeatureNames[k]);
  }
  for (std::size_t c = 0; c < summary.size(); ++c) {
    const double y = top + 20.0 * static_cast<double>(c);
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", width - right + 15, y,
                       colors[index_of(summary[c].label)]);
    svg += fmt::format("<text x=\"{}\" y=\"{}\">{} (n={})</text>\n", width - right + 32, y + 11,
                       display_name(summary[c].label), summary[c].count);
  }
  svg += "</svg>\n";
  return svg;
}

Eigen::MatrixXd feature_matrix(std::span<const FeatureRecord> records) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t n = 0; n < records.size(); ++n) {
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = records[n].features.shares[k];
    }
  }
  return m;
}

Eigen::VectorXd target_vector(std::span<const FeatureRecord> records) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(records.size()));
  for (std::size_t n = 0; n < records.size(); ++n) {
    t(static_cast<Eigen::Index>(n)) = class_target(label_for(records[n].set));
  }
  return t;
}

std::vector<FeatureVector> feature_vectors(std::span<const FeatureRecord> records) {
  std::vector<FeatureVector> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    FeatureVector fv = r.features;
    fv.label = label_for(r.set);
    out.push_back(fv);
  }
  return out;
}

Experiment run_experiment(const std::vector<FeatureRecord>& records, std::size_t train_count,
                          std::size_t test_count, const TrainConfig& config, int hidden) {
  auto parts = split(records, SplitSpec{train_count, test_count, stage_seed(config.rng_seed, SeedStream::Split)});
  Network net = init_network(stage_seed(config.rng_seed, SeedStream::Init),
                             {static_cast<int>(kFeatureCount), hidden, 1});
  TrainReport report = lm_train(net, feature_matrix(parts.train), target_vector(parts.train), config);

  ConfusionMatrix train_cm;
  if (!parts.train.empty()) train_cm = evaluate(net, feature_vectors(parts.train));
  ConfusionMatrix test_cm;
  if (!parts.test.empty()) test_cm = evaluate(net, feature_vectors(parts.test));
  return Experiment{std::move(parts), std::move(net), std::move(report), test_cm, train_cm};
}

}  // namespace wnn
