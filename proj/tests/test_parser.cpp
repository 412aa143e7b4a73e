#include "doctest.h"

#include "stance/parser.hpp"

#include <random>

using namespace stance;
using parser::extract_label;
using parser::ParseMode;
using parser::ParseStatus;

namespace {

const parser::Extraction kFallback{StanceLabel::None, ParseStatus::FallbackNone};

parser::Extraction ok(StanceLabel label) { return {label, ParseStatus::Ok}; }

} // namespace

TEST_CASE("observed single-word and chain-of-thought responses") {
    CHECK(extract_label("in-favor.", ParseMode::SingleWord) == ok(StanceLabel::Favor));
    const std::string cot =
        "The tweet expresses a clear opinion that freedom includes the freedom of choice. This suggests that "
        "the tweeter supports the legalization of abortion. Therefore, the stance of the tweet with respect "
        "to 'Legalization of Abortion' is 'in-favor'.";
    CHECK(extract_label(cot, ParseMode::CotScan) == ok(StanceLabel::Favor));
}

TEST_CASE("single-word mode") {
    CHECK(extract_label("against", ParseMode::SingleWord) == ok(StanceLabel::Against));
    CHECK(extract_label("  Neutral-or-Unclear \n", ParseMode::SingleWord) == ok(StanceLabel::None));
    CHECK(extract_label("'against'.", ParseMode::SingleWord) == ok(StanceLabel::Against));
    CHECK(extract_label("\"in-favor\"", ParseMode::SingleWord) == ok(StanceLabel::Favor));
    CHECK(extract_label("\xE2\x80\x98in-favor\xE2\x80\x99", ParseMode::SingleWord) == ok(StanceLabel::Favor));
    CHECK(extract_label("**against**", ParseMode::SingleWord) == ok(StanceLabel::Against));
    CHECK(extract_label("neutral-or-unclear!", ParseMode::SingleWord) == ok(StanceLabel::None));

    CHECK(extract_label("", ParseMode::SingleWord) == kFallback);
    CHECK(extract_label("favor", ParseMode::SingleWord) == kFallback);
    CHECK(extract_label("The stance is against.", ParseMode::SingleWord) == kFallback);
    CHECK(extract_label("in favor", ParseMode::SingleWord) == kFallback);
    CHECK(extract_label("in favor", ParseMode::SingleWord, {true}) == ok(StanceLabel::Favor));
    CHECK(extract_label("neutral or unclear", ParseMode::SingleWord, {true}) == ok(StanceLabel::None));
}

TEST_CASE("chain-of-thought mode takes the last vocabulary occurrence") {
    CHECK(extract_label("against ... no, in-favor", ParseMode::CotScan) == ok(StanceLabel::Favor));
    CHECK(extract_label("In-favor? Actually AGAINST.", ParseMode::CotScan) == ok(StanceLabel::Against));
    CHECK(extract_label("Stance: neutral-or-unclear", ParseMode::CotScan) == ok(StanceLabel::None));
    CHECK(extract_label("No idea at all.", ParseMode::CotScan) == kFallback);
    CHECK(extract_label("", ParseMode::CotScan) == kFallback);
    CHECK(extract_label("it is in favor", ParseMode::CotScan) == kFallback);
    CHECK(extract_label("it is in favor", ParseMode::CotScan, {true}) == ok(StanceLabel::Favor));
}

TEST_CASE("parse mode follows the prompt kind") {
    CHECK(parser::mode_for(prompts::PromptKind::ZeroShot) == ParseMode::SingleWord);
    CHECK(parser::mode_for(prompts::PromptKind::FewShot) == ParseMode::SingleWord);
    CHECK(parser::mode_for(prompts::PromptKind::Cot) == ParseMode::CotScan);
    CHECK(parser::to_string(ParseStatus::Ok) == "OK");
    CHECK(parser::to_string(ParseStatus::FallbackNone) == "FALLBACK_NONE");
}

TEST_CASE("last-occurrence property over 10,000 random injections") {
    const std::vector<std::string> filler = {
        "the", "tweet", "seems", "to", "be", "about", "choice", "life", "so", "i", "think", "it", "is",
        "Therefore,", "stance:", "'", "\"", ".", "...", "\n", "label", "neutral", "favor", "unclear", "or",
    };
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 10000; ++trial) {
        std::string text;
        StanceLabel last = StanceLabel::None;
        bool injected = false;
        const int tokens = 1 + static_cast<int>(gen() % 30);
        for (int t = 0; t < tokens; ++t) {
            if (!text.empty()) text += ' ';
            if (gen() % 5 == 0) {
                last = kLabels[gen() % 3];
                injected = true;
                std::string word(prompts::prompt_word(last));
                if (gen() % 2) word = "'" + word + "'";
                if (gen() % 3 == 0) {
                    for (char& c : word) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                }
                text += word;
            } else {
                text += filler[gen() % filler.size()];
            }
        }
        const auto got = extract_label(text, ParseMode::CotScan);
        if (injected) {
            CHECK_MESSAGE(got == ok(last), text);
        } else {
            CHECK_MESSAGE(got == kFallback, text);
        }
    }
}
