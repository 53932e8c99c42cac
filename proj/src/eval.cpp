#include "wnn/eval.hpp"

#include <fmt/format.h>

#include "wnn/error.hpp"

namespace wnn {

std::size_t ConfusionMatrix::row_total(EegClass truth) const {
  std::size_t sum = 0;
  for (auto c : counts_[index_of(truth)]) sum += c;
  return sum;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (EegClass c : kAllClasses) sum += row_total(c);
  return sum;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t sum = 0;
  for (EegClass c : kAllClasses) sum += count(c, c);
  return sum;
}

ConfusionMatrix evaluate(const Network& net, std::span<const FeatureVector> test) {
  if (test.empty()) throw Error(ErrorCode::CountMismatch, "test set is empty");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!test[i].label) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("test item {} has no label", i));
    }
    cm.add(*test[i].label, classify(net, test[i]).label);
  }
  return cm;
}

Accuracies accuracies(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw Error(ErrorCode::CountMismatch, "confusion matrix is empty");
  Accuracies out;
  for (EegClass c : kAllClasses) {
    const std::size_t row = cm.row_total(c);
    if (row > 0) out.per_class[index_of(c)] = static_cast<double>(cm.count(c, c)) / static_cast<double>(row);
  }
  out.overall = static_cast<double>(cm.trace()) / static_cast<double>(total);
  return out;
}

double class_accuracy(const ConfusionMatrix& cm, EegClass truth) {
  const std::size_t row = cm.row_total(truth);
  if (row == 0) {
    throw Error(ErrorCode::EmptyRow,
                fmt::format("no test items of class {}; accuracy undefined", to_string(truth)));
  }
  return static_cast<double>(cm.count(truth, truth)) / static_cast<double>(row);
}

std::string format_percent(std::optional<double> fraction) {
  if (!fraction) return "n/a";
  return fmt::format("{:.1f}", *fraction * 100.0);
}

std::string format_report(const ConfusionMatrix& cm) {
  const Accuracies acc = accuracies(cm);
  std::string out = fmt::format("{:<20}{:>10}{:>20}{:>10}{:>15}\n", "Class", "Healthy",
                                "Epilepsy syndrome", "Seizure", "Accuracy [%]");
  for (EegClass truth : kAllClasses) {
    out += fmt::format("{:<20}{:>10}{:>20}{:>10}{:>15}\n", display_name(truth),
                       cm.count(truth, EegClass::Healthy), cm.count(truth, EegClass::EpilepsySyndrome),
                       cm.count(truth, EegClass::Seizure), format_percent(acc.per_class[index_of(truth)]));
  }
  out += fmt::format("{:<60}{:>15}\n", "Overall success rate", format_percent(acc.overall));
  out += fmt::format("Correct: {} of {}\n", cm.trace(), cm.total());
  return out;
}

std::string format_report_csv(const ConfusionMatrix& cm) {
  const Accuracies acc = accuracies(cm);
  std::string out = "class,healthy,epilepsy_syndrome,seizure,accuracy_percent\n";
  for (EegClass truth : kAllClasses) {
    out += fmt::format("{},{},{},{},{}\n", to_string(truth), cm.count(truth, EegClass::Healthy),
                       cm.count(truth, EegClass::EpilepsySyndrome), cm.count(truth, EegClass::Seizure),
                       format_percent(acc.per_class[index_of(truth)]));
  }
  out += fmt::format("overall,,,,{}\n", format_percent(acc.overall));
  return out;
}

}  // namespace wnn
