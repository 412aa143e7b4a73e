#pragma once

#include "stance/corpus.hpp"
#include "stance/label.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace stance::prompts {

enum class PromptKind { ZeroShot, FewShot, Cot };

/// "zero_shot" / "few_shot" / "CoT", matching the run-directory names.
std::string_view to_string(PromptKind kind);
std::optional<PromptKind> parse_prompt_kind(std::string_view text);

/// Prompt vocabulary: 'against', 'in-favor', 'neutral-or-unclear'.
std::string_view prompt_word(StanceLabel label);

/// Case-insensitive after trimming; nullopt for anything outside the vocabulary.
std::optional<StanceLabel> label_from_word(std::string_view word);

struct FewShotExample {
    std::string tweet;
    std::string answer_word;
    std::optional<std::string> source_id;
};

/// The three hand-picked training examples (one per class) used by default.
std::vector<FewShotExample> default_examples();

/// True when `examples` differ from default_examples(); reports flag such runs.
bool is_custom_example_set(const std::vector<FewShotExample>& examples);

/// Raw template bytes. `{{target}}`, `{{tweet}}`, `{{examples}}` and `{{answer}}`
/// are the only placeholders.
struct TemplateSet {
    std::string zero_shot;
    std::string few_shot;
    std::string few_shot_example;
    std::string cot;

    /// Templates compiled into the library.
    static TemplateSet builtin();
    /// zero_shot.txt, few_shot.txt, few_shot_example.txt and cot.txt from `dir`.
    static TemplateSet from_directory(const std::filesystem::path& dir);
};

struct RenderedPrompt {
    std::string record_id;
    PromptKind kind;
    std::string text;
};

/// Single-pass substitution: placeholder-like text inside values is never expanded.
std::string render_template(std::string_view tmpl, std::string_view target,
                            std::string_view tweet, std::string_view examples = {},
                            std::string_view answer = {});

class PromptBuilder {
public:
    /// Throws ConfigError unless there are exactly three examples, one per class,
    /// each answered with a vocabulary word.
    PromptBuilder(TemplateSet templates, std::vector<FewShotExample> examples);
    PromptBuilder();

    RenderedPrompt build(PromptKind kind, const corpus::Record& record,
                         std::string_view target_display) const;

    const std::vector<FewShotExample>& examples() const { return examples_; }

private:
    TemplateSet templates_;
    std::vector<FewShotExample> examples_;
};

/// IDs of VALI/TEST records whose cleaned tweet equals one of the example tweets.
std::set<std::string> leakage_exclusion_ids(const std::vector<FewShotExample>& examples,
                                            const std::vector<corpus::Record>& corpus);

} // namespace stance::prompts
