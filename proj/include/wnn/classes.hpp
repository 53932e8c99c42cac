#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace wnn {

enum class EegClass { Healthy = 0, EpilepsySyndrome = 1, Seizure = 2 };

inline constexpr std::array<EegClass, 3> kAllClasses = {EegClass::Healthy, EegClass::EpilepsySyndrome,
                                                        EegClass::Seizure};

constexpr std::size_t index_of(EegClass c) noexcept { return static_cast<std::size_t>(c); }

// Machine names used in CSV files: healthy, epilepsy_syndrome, seizure.
std::string_view to_string(EegClass c) noexcept;
// Human names used in report tables.
std::string_view display_name(EegClass c) noexcept;
std::optional<EegClass> parse_class(std::string_view text) noexcept;

}  // namespace wnn
