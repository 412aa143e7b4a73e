#include "stance/prompts.hpp"

#include "stance/csv.hpp"
#include "stance/error.hpp"
#include "stance/text.hpp"

#include <array>

namespace stance::prompts {
namespace {

constexpr std::array<std::string_view, 3> kWords{"against", "in-favor", "neutral-or-unclear"};

} // namespace

std::string_view to_string(PromptKind kind) {
    switch (kind) {
    case PromptKind::ZeroShot: return "zero_shot";
    case PromptKind::FewShot: return "few_shot";
    case PromptKind::Cot: return "CoT";
    }
    return "zero_shot";
}

std::optional<PromptKind> parse_prompt_kind(std::string_view text) {
    for (PromptKind kind : {PromptKind::ZeroShot, PromptKind::FewShot, PromptKind::Cot}) {
        if (text::ascii_lower(to_string(kind)) == text::ascii_lower(text)) return kind;
    }
    return std::nullopt;
}

std::string_view prompt_word(StanceLabel label) { return kWords[index_of(label)]; }

std::optional<StanceLabel> label_from_word(std::string_view word) {
    const std::string needle = text::ascii_lower(text::trim(word));
    for (StanceLabel label : kLabels) {
        if (prompt_word(label) == needle) return label;
    }
    return std::nullopt;
}

std::vector<FewShotExample> default_examples() {
    return {
        {"it's a free country. freedom includes freedom of choice.", "in-favor", std::nullopt},
        {"i really don't understand how some people are pro-choice. a life is a life no matter "
         "if it's 2 weeks old or 20 years old.",
         "against", std::string("2312")},
        {"so ready for my abortion debate", "neutral-or-unclear", std::nullopt},
    };
}

bool is_custom_example_set(const std::vector<FewShotExample>& examples) {
    const auto defaults = default_examples();
    if (examples.size() != defaults.size()) return true;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (examples[i].tweet != defaults[i].tweet ||
            examples[i].answer_word != defaults[i].answer_word) {
            return true;
        }
    }
    return false;
}

TemplateSet TemplateSet::from_directory(const std::filesystem::path& dir) {
    auto load = [&](const char* name) {
        const auto path = dir / name;
        if (!std::filesystem::exists(path)) throw ConfigError("missing template " + path.string());
        return csv::read_file(path);
    };
    // Named steps rather than one braced initializer: if a later file is missing, the
    // strings already read must still be destroyed (GCC 11 skips that for aggregates).
    TemplateSet set;
    set.zero_shot = load("zero_shot.txt");
    set.few_shot = load("few_shot.txt");
    set.few_shot_example = load("few_shot_example.txt");
    set.cot = load("cot.txt");
    return set;
}

std::string render_template(std::string_view tmpl, std::string_view target, std::string_view tweet,
                            std::string_view examples, std::string_view answer) {
    struct Slot {
        std::string_view name;
        std::string_view value;
    };
    const std::array<Slot, 4> slots{{{"{{target}}", target},
                                     {"{{tweet}}", tweet},
                                     {"{{examples}}", examples},
                                     {"{{answer}}", answer}}};
    std::string out;
    out.reserve(tmpl.size() + tweet.size() + examples.size() + 8 * target.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        const std::size_t open = tmpl.find("{{", i);
        if (open == std::string_view::npos) break;
        out.append(tmpl.substr(i, open - i));
        bool matched = false;
        for (const auto& slot : slots) {
            if (tmpl.substr(open, slot.name.size()) == slot.name) {
                out.append(slot.value);
                i = open + slot.name.size();
                matched = true;
                break;
            }
        }
        if (!matched) {
            out.append("{{");
            i = open + 2;
        }
    }
    if (i < tmpl.size()) out.append(tmpl.substr(i));
    return out;
}

PromptBuilder::PromptBuilder() : PromptBuilder(TemplateSet::builtin(), default_examples()) {}

PromptBuilder::PromptBuilder(TemplateSet templates, std::vector<FewShotExample> examples)
    : templates_(std::move(templates)), examples_(std::move(examples)) {
    if (examples_.size() != 3) {
        throw ConfigError("few-shot prompts need exactly 3 examples, got " +
                          std::to_string(examples_.size()));
    }
    std::array<bool, 3> seen{};
    for (const auto& example : examples_) {
        const auto label = label_from_word(example.answer_word);
        if (!label || example.answer_word != prompt_word(*label)) {
            throw ConfigError("few-shot answer '" + example.answer_word +
                              "' is not one of 'in-favor', 'against', 'neutral-or-unclear'");
        }
        if (seen[index_of(*label)]) {
            throw ConfigError("few-shot examples must cover each class exactly once");
        }
        seen[index_of(*label)] = true;
    }
}

RenderedPrompt PromptBuilder::build(PromptKind kind, const corpus::Record& record,
                                    std::string_view target_display) const {
    std::string text;
    switch (kind) {
    case PromptKind::ZeroShot:
        text = render_template(templates_.zero_shot, target_display, record.tweet);
        break;
    case PromptKind::Cot:
        text = render_template(templates_.cot, target_display, record.tweet);
        break;
    case PromptKind::FewShot: {
        std::string shots;
        for (const auto& example : examples_) {
            shots += render_template(templates_.few_shot_example, target_display, example.tweet, {},
                                     example.answer_word);
        }
        text = render_template(templates_.few_shot, target_display, record.tweet, shots);
        break;
    }
    }
    return RenderedPrompt{record.id, kind, std::move(text)};
}

std::set<std::string> leakage_exclusion_ids(const std::vector<FewShotExample>& examples,
                                            const std::vector<corpus::Record>& corpus) {
    std::set<std::string> tweets;
    for (const auto& example : examples) tweets.insert(example.tweet);
    std::set<std::string> ids;
    for (const auto& record : corpus) {
        if (record.partition == Partition::Train) continue;
        if (tweets.contains(record.tweet)) ids.insert(record.id);
    }
    return ids;
}

} // namespace stance::prompts
