#include "wnn/net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "wnn/error.hpp"
#include "wnn/random.hpp"

namespace wnn {

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(ErrorCode::InvalidArgument, "network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (layer.weights.rows() < 1 || layer.weights.cols() < 1) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("layer {} has an empty weight matrix", l + 1));
    }
    if (layer.biases.size() != layer.weights.rows()) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("layer {} has {} biases for {} neurons", l + 1, layer.biases.size(),
                              layer.weights.rows()));
    }
    if (l > 0 && layer.weights.cols() != layers_[l - 1].weights.rows()) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("layer {} expects {} inputs but layer {} has {} neurons", l + 1,
                              layer.weights.cols(), l, layers_[l - 1].weights.rows()));
    }
    if (!layer.weights.allFinite() || !layer.biases.allFinite()) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("layer {} has non-finite parameters", l + 1));
    }
  }
  if (layers_.back().weights.rows() != 1) {
    throw Error(ErrorCode::InvalidArgument, "output layer must have exactly one neuron");
  }
}

std::vector<int> Network::layer_sizes() const {
  std::vector<int> sizes{input_size()};
  for (const auto& layer : layers_) sizes.push_back(static_cast<int>(layer.weights.rows()));
  return sizes;
}

std::size_t Network::parameter_count() const noexcept {
  std::size_t count = 0;
  for (const auto& layer : layers_) count += static_cast<std::size_t>(layer.weights.size() + layer.biases.size());
  return count;
}

std::vector<double> Network::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) out.push_back(layer.weights(r, c));
    }
    for (Eigen::Index r = 0; r < layer.biases.size(); ++r) out.push_back(layer.biases(r));
  }
  return out;
}

void Network::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("expected {} parameters, got {}",
                                                      parameter_count(), values.size()));
  }
  std::size_t p = 0;
  for (auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = values[p++];
    }
    for (Eigen::Index r = 0; r < layer.biases.size(); ++r) layer.biases(r) = values[p++];
  }
}

double Network::forward(std::span<const double> input) const {
  if (static_cast<Eigen::Index>(input.size()) != input_size()) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("network expects {} inputs, got {}", input_size(), input.size()));
  }
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  for (const auto& layer : layers_) a = (layer.weights * a + layer.biases).array().tanh().matrix();
  return a(0);
}

Network init_network(std::uint64_t seed, const std::vector<int>& layer_sizes) {
  if (layer_sizes.size() < 2 ||
      std::any_of(layer_sizes.begin(), layer_sizes.end(), [](int s) { return s < 1; })) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("invalid layer sizes [{}]", fmt::join(layer_sizes, ",")));
  }
  Rng rng(seed);
  std::vector<Layer> layers;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    Layer layer{Eigen::MatrixXd(layer_sizes[l], layer_sizes[l - 1]), Eigen::VectorXd(layer_sizes[l])};
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = rng.uniform01() - 0.5;
    }
    for (Eigen::Index r = 0; r < layer.biases.size(); ++r) layer.biases(r) = rng.uniform01() - 0.5;
    layers.push_back(std::move(layer));
  }
  return Network(std::move(layers));
}

Eigen::MatrixXd jacobian(const Network& net, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() < 1) throw Error(ErrorCode::InvalidArgument, "jacobian needs at least one input row");
  if (inputs.cols() != net.input_size()) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("inputs have {} columns, network expects {}", inputs.cols(), net.input_size()));
  }
  const auto& layers = net.layers();
  const std::size_t depth = layers.size();
  Eigen::MatrixXd jac(inputs.rows(), static_cast<Eigen::Index>(net.parameter_count()));

  // Column offset of each layer's parameter block.
  std::vector<Eigen::Index> offsets(depth);
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l < depth; ++l) {
    offsets[l] = offset;
    offset += layers[l].weights.size() + layers[l].biases.size();
  }

  std::vector<Eigen::VectorXd> activations(depth + 1);
  for (Eigen::Index n = 0; n < inputs.rows(); ++n) {
    activations[0] = inputs.row(n).transpose();
    for (std::size_t l = 0; l < depth; ++l) {
      activations[l + 1] = (layers[l].weights * activations[l] + layers[l].biases).array().tanh().matrix();
    }
    // delta = d(output)/d(pre-activation) of the current layer.
    Eigen::VectorXd delta = (1.0 - activations[depth].array().square()).matrix();
    for (std::size_t l = depth; l-- > 0;) {
      const Layer& layer = layers[l];
      const Eigen::VectorXd& in = activations[l];
      Eigen::Index col = offsets[l];
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) jac(n, col++) = delta(r) * in(c);
      }
      for (Eigen::Index r = 0; r < layer.biases.size(); ++r) jac(n, col++) = delta(r);
      if (l > 0) {
        delta = ((layer.weights.transpose() * delta).array() * (1.0 - in.array().square())).matrix();
      }
    }
  }
  return jac;
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (!(mse_goal > 0.0)) fail(fmt::format("mse_goal must be > 0, got {}", mse_goal));
  if (max_epochs < 0) fail(fmt::format("max_epochs must be >= 0, got {}", max_epochs));
  if (!(mu_init > 0.0)) fail(fmt::format("mu_init must be > 0, got {}", mu_init));
  if (!(mu_decrease > 0.0 && mu_decrease < 1.0)) fail(fmt::format("mu_decrease must be in (0, 1), got {}", mu_decrease));
  if (!(mu_increase > 1.0)) fail(fmt::format("mu_increase must be > 1, got {}", mu_increase));
  if (!(mu_max >= mu_init)) fail(fmt::format("mu_max must be >= mu_init, got {}", mu_max));
  if (!(min_gradient >= 0.0)) fail(fmt::format("min_gradient must be >= 0, got {}", min_gradient));
}

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::GoalMet: return "GoalMet";
    case StopReason::MaxEpochs: return "MaxEpochs";
    case StopReason::MuOverflow: return "MuOverflow";
    case StopReason::GradientVanished: return "GradientVanished";
  }
  return "Unknown";
}

namespace {

Eigen::VectorXd outputs_of(const Network& net, const Eigen::MatrixXd& features) {
  Eigen::VectorXd out(features.rows());
  Eigen::VectorXd row(features.cols());
  for (Eigen::Index n = 0; n < features.rows(); ++n) {
    row = features.row(n).transpose();
    out(n) = net.forward(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
  }
  return out;
}

double mean_squared(const Eigen::VectorXd& residuals) {
  return residuals.squaredNorm() / static_cast<double>(residuals.size());
}

// Keeps repeated decreases from reaching zero, where increases would stall.
constexpr double kMuFloor = 1e-20;

}  // namespace

TrainReport lm_train(Network& net, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                     const TrainConfig& config) {
  config.validate();
  if (features.rows() < 1) throw Error(ErrorCode::InvalidArgument, "training set is empty");
  if (features.rows() != targets.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("{} feature rows but {} targets", features.rows(), targets.size()));
  }
  if (features.cols() != net.input_size()) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("features have {} columns, network expects {}", features.cols(), net.input_size()));
  }
  if (!features.allFinite()) throw Error(ErrorCode::InvalidArgument, "features contain non-finite values");
  for (Eigen::Index n = 0; n < targets.size(); ++n) {
    if (!(targets(n) > -1.0 && targets(n) < 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("target {} = {} is outside (-1, 1)", n, targets(n)));
    }
  }

  const auto param_count = static_cast<Eigen::Index>(net.parameter_count());
  TrainReport report;
  Eigen::VectorXd residuals = targets - outputs_of(net, features);
  double mse = mean_squared(residuals);
  report.mse_history.push_back(mse);
  double mu = config.mu_init;
  int epoch = 0;

  while (true) {
    if (mse <= config.mse_goal) {
      report.stop_reason = StopReason::GoalMet;
      break;
    }
    if (epoch >= config.max_epochs) {
      report.stop_reason = StopReason::MaxEpochs;
      break;
    }
    const Eigen::MatrixXd jac = jacobian(net, features);
    const Eigen::VectorXd gradient = jac.transpose() * residuals;
    if (gradient.lpNorm<Eigen::Infinity>() < config.min_gradient) {
      report.stop_reason = StopReason::GradientVanished;
      break;
    }
    const Eigen::MatrixXd gauss_newton = jac.transpose() * jac;
    const std::vector<double> theta = net.parameters();
    Eigen::Map<const Eigen::VectorXd> theta_vec(theta.data(), param_count);

    bool accepted = false;
    bool any_solved = false;
    std::vector<double> trial(theta.size());
    while (mu <= config.mu_max) {
      Eigen::MatrixXd damped = gauss_newton;
      damped.diagonal().array() += mu;
      const Eigen::LLT<Eigen::MatrixXd> factor(damped);
      if (factor.info() == Eigen::Success) {
        const Eigen::VectorXd step = factor.solve(gradient);
        if (step.allFinite()) {
          any_solved = true;
          Eigen::Map<Eigen::VectorXd>(trial.data(), param_count) = theta_vec + step;
          net.set_parameters(trial);
          const Eigen::VectorXd trial_residuals = targets - outputs_of(net, features);
          const double trial_mse = mean_squared(trial_residuals);
          if (std::isfinite(trial_mse) && trial_mse < mse) {
            residuals = trial_residuals;
            mse = trial_mse;
            mu = std::max(mu * config.mu_decrease, kMuFloor);
            accepted = true;
            break;
          }
        }
      }
      mu *= config.mu_increase;
    }
    if (!accepted) {
      net.set_parameters(theta);
      if (!any_solved) {
        throw Error(ErrorCode::SingularSystem,
                    fmt::format("damped normal equations unsolvable up to mu = {:g} at epoch {}",
                                config.mu_max, epoch + 1));
      }
      report.stop_reason = StopReason::MuOverflow;
      break;
    }
    ++epoch;
    report.mse_history.push_back(mse);
  }

  report.final_mse = mse;
  report.epochs_run = epoch;
  return report;
}

double class_target(EegClass c) noexcept {
  switch (c) {
    case EegClass::Healthy: return -0.8;
    case EegClass::EpilepsySyndrome: return 0.0;
    case EegClass::Seizure: return 0.8;
  }
  return 0.0;
}

EegClass nearest_class(double raw_output) noexcept {
  // kAllClasses is ordered by ascending target, so strict < keeps the lower one on ties.
  EegClass best = kAllClasses.front();
  double best_distance = std::abs(raw_output - class_target(best));
  for (EegClass c : kAllClasses) {
    const double d = std::abs(raw_output - class_target(c));
    if (d < best_distance) {
      best = c;
      best_distance = d;
    }
  }
  return best;
}

Classification classify(const Network& net, const FeatureVector& feature) {
  const double raw = net.forward(feature.shares);
  return Classification{nearest_class(raw), raw};
}

void save_model(const Network& net, std::ostream& out) {
  out << fmt::format("wnn-model v1 layers={} activation=tanh\n", fmt::join(net.layer_sizes(), ","));
  int index = 1;
  for (const auto& layer : net.layers()) {
    std::string line = fmt::format("layer {} weights", index);
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) line += fmt::format(" {:.17g}", layer.weights(r, c));
    }
    out << line << '\n';
    line = fmt::format("layer {} biases", index);
    for (Eigen::Index r = 0; r < layer.biases.size(); ++r) line += fmt::format(" {:.17g}", layer.biases(r));
    out << line << '\n';
    ++index;
  }
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string token; ss >> token;) out.push_back(token);
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

Network load_model(std::istream& in, std::string_view source_name) {
  const std::filesystem::path source{std::string(source_name)};
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](const char* expected) {
    if (!std::getline(in, line)) {
      throw ParseError(source, line_no + 1, fmt::format("unexpected end of file, expected {}", expected));
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line("header");
  const auto header = split_ws(line);
  if (header.size() != 4 || header[0] != "wnn-model" || header[1] != "v1" ||
      header[2].rfind("layers=", 0) != 0 || header[3] != "activation=tanh") {
    throw ParseError(source, line_no, "expected 'wnn-model v1 layers=... activation=tanh'");
  }
  std::vector<int> sizes;
  {
    std::string_view spec = std::string_view(header[2]).substr(7);
    while (!spec.empty()) {
      const auto comma = spec.find(',');
      int size = 0;
      if (!parse_number(spec.substr(0, comma), size) || size < 1) {
        throw ParseError(source, line_no, fmt::format("bad layer size list '{}'", header[2]));
      }
      sizes.push_back(size);
      if (comma == std::string_view::npos) break;
      spec.remove_prefix(comma + 1);
    }
  }
  if (sizes.size() < 2 || sizes.back() != 1) {
    throw ParseError(source, line_no, fmt::format("layer list '{}' needs >= 2 layers ending in 1", header[2]));
  }

  auto read_group = [&](int layer_index, const char* kind, Eigen::Index count) {
    next_line(kind);
    const auto tokens = split_ws(line);
    if (tokens.size() < 3 || tokens[0] != "layer" || tokens[1] != std::to_string(layer_index) || tokens[2] != kind) {
      throw ParseError(source, line_no, fmt::format("expected 'layer {} {}'", layer_index, kind));
    }
    if (static_cast<Eigen::Index>(tokens.size() - 3) != count) {
      throw ParseError(source, line_no,
                       fmt::format("layer {} {}: expected {} values, found {}", layer_index, kind, count,
                                   tokens.size() - 3));
    }
    std::vector<double> values(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!parse_number(tokens[i + 3], values[i]) || !std::isfinite(values[i])) {
        throw ParseError(source, line_no, fmt::format("bad number '{}'", tokens[i + 3]));
      }
    }
    return values;
  };

  std::vector<Layer> layers;
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    const int rows = sizes[l];
    const int cols = sizes[l - 1];
    const auto w = read_group(static_cast<int>(l), "weights", Eigen::Index{rows} * cols);
    const auto b = read_group(static_cast<int>(l), "biases", rows);
    Layer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    std::size_t p = 0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) layer.weights(r, c) = w[p++];
    }
    for (int r = 0; r < rows; ++r) layer.biases(r) = b[static_cast<std::size_t>(r)];
    layers.push_back(std::move(layer));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ParseError(source, line_no, "trailing content after last layer");
    }
  }
  return Network(std::move(layers));
}

}  // namespace wnn
