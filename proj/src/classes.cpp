#include "wnn/classes.hpp"

namespace wnn {

std::string_view to_string(EegClass c) noexcept {
  switch (c) {
    case EegClass::Healthy: return "healthy";
    case EegClass::EpilepsySyndrome: return "epilepsy_syndrome";
    case EegClass::Seizure: return "seizure";
  }
  return "unknown";
}

std::string_view display_name(EegClass c) noexcept {
  switch (c) {
    case EegClass::Healthy: return "Healthy";
    case EegClass::EpilepsySyndrome: return "Epilepsy syndrome";
    case EegClass::Seizure: return "Seizure";
  }
  return "Unknown";
}

std::optional<EegClass> parse_class(std::string_view text) noexcept {
  for (EegClass c : kAllClasses) {
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

}  // namespace wnn
