#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wnn/classes.hpp"
#include "wnn/energy.hpp"

namespace wnn {

struct Layer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd biases;   // out
};

// Dense feed-forward network with tanh on every layer and a single output
// neuron. Parameters are addressed in a flat order: for each layer, weights
// row-major, then biases. The Jacobian columns and the model file use the
// same order.
class Network {
 public:
  // Throws InvalidArgument on inconsistent shapes, non-finite parameters or
  // an output layer wider than one neuron.
  explicit Network(std::vector<Layer> layers);

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::vector<int> layer_sizes() const;
  int input_size() const noexcept { return static_cast<int>(layers_.front().weights.cols()); }
  std::size_t parameter_count() const noexcept;

  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);

  // tanh(W_L ... tanh(W_1 x + b_1) ... + b_L); strictly inside (-1, 1).
  double forward(std::span<const double> input) const;

 private:
  std::vector<Layer> layers_;
};

inline const std::vector<int> kDefaultLayerSizes = {6, 5, 1};

// Parameters drawn i.i.d. from [-0.5, 0.5): value = uniform01() - 0.5 using
// Rng(seed) (mt19937_64, top 53 bits), assigned in flat parameter order.
Network init_network(std::uint64_t seed, const std::vector<int>& layer_sizes = kDefaultLayerSizes);

// Row n holds d(output_n)/d(theta) for input row n, via backpropagation.
Eigen::MatrixXd jacobian(const Network& net, const Eigen::MatrixXd& inputs);

struct TrainConfig {
  double mse_goal = 0.1;
  int max_epochs = 1000;
  double mu_init = 1e-3;
  double mu_decrease = 0.1;
  double mu_increase = 10.0;
  double mu_max = 1e10;
  double min_gradient = 1e-7;
  std::uint64_t rng_seed = 0;  // seeds init_network in the pipeline; the trainer itself is deterministic

  void validate() const;
};

enum class StopReason { GoalMet, MaxEpochs, MuOverflow, GradientVanished };

std::string_view to_string(StopReason reason) noexcept;

struct TrainReport {
  double final_mse = 0.0;
  int epochs_run = 0;
  StopReason stop_reason = StopReason::MaxEpochs;
  // Entry 0 is the MSE at the initial parameters; entry e (e >= 1) is the MSE
  // after the step accepted in epoch e. final_mse == mse_history.back().
  std::vector<double> mse_history;
};

// Batch Levenberg-Marquardt on the squared residuals (targets - outputs).
// Trains `net` in place. Throws SingularSystem if the damped system could not
// be factored at any damping value up to mu_max.
TrainReport lm_train(Network& net, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                     const TrainConfig& config);

// One output neuron encodes three classes: Healthy -0.8, EpilepsySyndrome 0.0, Seizure +0.8.
double class_target(EegClass c) noexcept;
// Nearest target; ties go to the lower target.
EegClass nearest_class(double raw_output) noexcept;

struct Classification {
  EegClass label;
  double raw_output;
};

Classification classify(const Network& net, const FeatureVector& feature);

// Text model format:
//   wnn-model v1 layers=6,5,1 activation=tanh
//   layer 1 weights <row-major values>
//   layer 1 biases <values>
//   ...
// Values are printed with 17 significant digits so load(save(net)) is exact.
void save_model(const Network& net, std::ostream& out);
Network load_model(std::istream& in, std::string_view source_name = "<model>");

}  // namespace wnn
