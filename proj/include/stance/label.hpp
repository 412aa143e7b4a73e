#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace stance {

enum class StanceLabel { Against, Favor, None };

/// Canonical order used by every matrix, table and report.
inline constexpr std::array<StanceLabel, 3> kLabels{StanceLabel::Against, StanceLabel::Favor,
                                                    StanceLabel::None};

constexpr std::size_t index_of(StanceLabel label) { return static_cast<std::size_t>(label); }

/// "AGAINST" / "FAVOR" / "NONE".
std::string_view to_string(StanceLabel label);

/// Exact, case-sensitive inverse of to_string.
std::optional<StanceLabel> parse_label(std::string_view text);

enum class Partition { Train, Vali, Test };

/// "train" / "vali" / "test".
std::string_view to_string(Partition partition);
std::optional<Partition> parse_partition(std::string_view text);

} // namespace stance
