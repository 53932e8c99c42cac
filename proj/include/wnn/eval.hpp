#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "wnn/classes.hpp"
#include "wnn/energy.hpp"
#include "wnn/net.hpp"

namespace wnn {

// Rows are the true class, columns the predicted class, both in
// Healthy, EpilepsySyndrome, Seizure order.
class ConfusionMatrix {
 public:
  using Counts = std::array<std::array<std::size_t, 3>, 3>;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(const Counts& counts) : counts_(counts) {}

  void add(EegClass truth, EegClass predicted) { ++counts_[index_of(truth)][index_of(predicted)]; }

  std::size_t count(EegClass truth, EegClass predicted) const {
    return counts_[index_of(truth)][index_of(predicted)];
  }
  const Counts& counts() const noexcept { return counts_; }
  std::size_t row_total(EegClass truth) const;
  std::size_t total() const;
  std::size_t trace() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  Counts counts_{};
};

// Every test item must carry a label. Throws CountMismatch on an empty set.
ConfusionMatrix evaluate(const Network& net, std::span<const FeatureVector> test);

struct Accuracies {
  // nullopt where the class has no test items.
  std::array<std::optional<double>, 3> per_class;
  double overall = 0.0;
};

// Throws CountMismatch when the matrix is empty.
Accuracies accuracies(const ConfusionMatrix& cm);

// Throws EmptyRow when the class is absent from the matrix.
double class_accuracy(const ConfusionMatrix& cm, EegClass truth);

// One decimal, e.g. 0.94 -> "94.0"; undefined -> "n/a".
std::string format_percent(std::optional<double> fraction);

// Plain-text confusion table with per-class and overall accuracy columns.
std::string format_report(const ConfusionMatrix& cm);

// class,healthy,epilepsy_syndrome,seizure,accuracy_percent rows plus an overall row.
std::string format_report_csv(const ConfusionMatrix& cm);

}  // namespace wnn
