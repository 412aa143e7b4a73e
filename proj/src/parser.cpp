#include "stance/parser.hpp"

#include "stance/text.hpp"

#include <array>
#include <string>

namespace stance::parser {
namespace {

constexpr std::array<std::string_view, 8> kQuotes{"'", "\"", "`", "‘", "’", "“",
                                                  "”", "*"};
constexpr std::string_view kTrailingPunct = ".,;:!?";

bool strip_prefix_any(std::string_view& s) {
    for (auto q : kQuotes) {
        if (s.starts_with(q)) {
            s.remove_prefix(q.size());
            return true;
        }
    }
    return false;
}

bool strip_suffix_any(std::string_view& s) {
    if (!s.empty() && kTrailingPunct.find(s.back()) != std::string_view::npos) {
        s.remove_suffix(1);
        return true;
    }
    for (auto q : kQuotes) {
        if (s.ends_with(q)) {
            s.remove_suffix(q.size());
            return true;
        }
    }
    return false;
}

struct Variant {
    std::string_view text;
    StanceLabel label;
};

constexpr std::array<Variant, 3> kStrict{{{"against", StanceLabel::Against},
                                          {"in-favor", StanceLabel::Favor},
                                          {"neutral-or-unclear", StanceLabel::None}}};
constexpr std::array<Variant, 5> kLenient{{{"against", StanceLabel::Against},
                                           {"in-favor", StanceLabel::Favor},
                                           {"neutral-or-unclear", StanceLabel::None},
                                           {"in favor", StanceLabel::Favor},
                                           {"neutral or unclear", StanceLabel::None}}};

template <std::size_t N>
Extraction match_single(std::string_view token, const std::array<Variant, N>& variants) {
    for (const auto& v : variants) {
        if (token == v.text) return {v.label, ParseStatus::Ok};
    }
    return {StanceLabel::None, ParseStatus::FallbackNone};
}

template <std::size_t N>
Extraction scan_last(const std::string& lowered, const std::array<Variant, N>& variants) {
    bool found = false;
    std::size_t best_end = 0;
    std::size_t best_len = 0;
    StanceLabel best = StanceLabel::None;
    for (const auto& v : variants) {
        const std::size_t pos = lowered.rfind(v.text);
        if (pos == std::string::npos) continue;
        const std::size_t end = pos + v.text.size();
        if (!found || end > best_end || (end == best_end && v.text.size() > best_len)) {
            found = true;
            best_end = end;
            best_len = v.text.size();
            best = v.label;
        }
    }
    if (!found) return {StanceLabel::None, ParseStatus::FallbackNone};
    return {best, ParseStatus::Ok};
}

} // namespace

std::string_view to_string(ParseStatus status) {
    return status == ParseStatus::Ok ? "OK" : "FALLBACK_NONE";
}

ParseMode mode_for(prompts::PromptKind kind) {
    return kind == prompts::PromptKind::Cot ? ParseMode::CotScan : ParseMode::SingleWord;
}

Extraction extract_label(std::string_view response, ParseMode mode, const ParseOptions& options) {
    const std::string lowered = text::to_lower_utf8(response);
    if (mode == ParseMode::CotScan) {
        return options.lenient ? scan_last(lowered, kLenient) : scan_last(lowered, kStrict);
    }
    std::string_view token = text::trim(lowered);
    while (strip_prefix_any(token) || strip_suffix_any(token)) token = text::trim(token);
    return options.lenient ? match_single(token, kLenient) : match_single(token, kStrict);
}

} // namespace stance::parser
