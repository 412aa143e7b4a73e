#pragma once

#include "stance/label.hpp"
#include "stance/prompts.hpp"

#include <string_view>

namespace stance::parser {

enum class ParseMode { SingleWord, CotScan };

enum class ParseStatus { Ok, FallbackNone };

std::string_view to_string(ParseStatus status);

/// ZERO_SHOT and FEW_SHOT expect a single word; CoT answers are scanned.
ParseMode mode_for(prompts::PromptKind kind);

struct ParseOptions {
    /// Also accept "in favor" / "neutral or unclear" (space instead of hyphen).
    bool lenient = false;
};

struct Extraction {
    StanceLabel label;
    ParseStatus status;

    friend bool operator==(const Extraction&, const Extraction&) = default;
};

/// SingleWord: trim, lowercase, strip enclosing quotes and trailing punctuation, then
/// require the whole token to be a vocabulary word.
/// CotScan: the vocabulary word whose last occurrence ends latest wins (longest on ties).
/// Anything else yields {None, FallbackNone}.
Extraction extract_label(std::string_view response, ParseMode mode, const ParseOptions& options = {});

} // namespace stance::parser
