#include "stance/label.hpp"

namespace stance {

std::string_view to_string(StanceLabel label) {
    switch (label) {
    case StanceLabel::Against: return "AGAINST";
    case StanceLabel::Favor: return "FAVOR";
    case StanceLabel::None: return "NONE";
    }
    return "NONE";
}

std::optional<StanceLabel> parse_label(std::string_view text) {
    for (StanceLabel label : kLabels) {
        if (to_string(label) == text) return label;
    }
    return std::nullopt;
}

std::string_view to_string(Partition partition) {
    switch (partition) {
    case Partition::Train: return "train";
    case Partition::Vali: return "vali";
    case Partition::Test: return "test";
    }
    return "train";
}

std::optional<Partition> parse_partition(std::string_view text) {
    for (Partition p : {Partition::Train, Partition::Vali, Partition::Test}) {
        if (to_string(p) == text) return p;
    }
    return std::nullopt;
}

} // namespace stance
