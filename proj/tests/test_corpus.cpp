#include "doctest.h"

#include "stance/corpus.hpp"
#include "stance/error.hpp"
#include "support.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <regex>
#include <set>

using namespace stance;
using corpus::RawRecord;
using corpus::Record;

namespace {

const std::string kRetweetRaw =
    "RT @createdequalorg: \"We're all human, aren't we? Every human life is worth the same, and worth "
    "saving.\" -J.K. Rowling #\xE2\x80\xA6 #SemST";
const std::string kRetweetClean =
    "'we're all human, aren't we? every human life is worth the same, and worth saving.' -j.k. rowling "
    "#\xE2\x80\xA6";
const std::string kFollowRaw =
    "Follow #Patriot --> @Enuffis2Much.  Thanks for following back!!  #Truth #Liberty #Justice #ProIsrael "
    "#WakeUpAmerica #FreeAmirNow #SemST";
const std::string kFollowClean =
    "follow #patriot --> @USERNAME. thanks for following back!! #truth #liberty #justice #proisrael "
    "#wakeupamerica #freeamirnow";

std::string random_tweet(std::mt19937_64& gen) {
    static const std::vector<std::string> pieces = {
        "RT ", "@user_1", "@Other:", " ", "  ", "\t", "#SemST", "#semst", "#Tag", "\"", "\\\"", "\\", "'",
        "Word", "word", "ÉTÉ", "ünï", "ΣΑ", "!", ".", ":", "@", "@USERNAME", "@username", "\xE2\x80\xA6",
        "😀", "x@y.com", "RT @a: ",
    };
    std::string out;
    const int n = static_cast<int>(gen() % 12);
    for (int i = 0; i < n; ++i) out += pieces[gen() % pieces.size()];
    return out;
}

std::vector<RawRecord> raw_records(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<RawRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({std::to_string(1000 + i), "T", "tweet " + std::to_string(i), kLabels[gen() % 3]});
    }
    return out;
}

std::vector<Record> train_records(const std::array<std::size_t, 3>& counts) {
    std::vector<Record> out;
    int id = 0;
    for (StanceLabel label : kLabels) {
        for (std::size_t i = 0; i < counts[index_of(label)]; ++i, ++id) {
            out.push_back({std::to_string(id), "t" + std::to_string(id), "Abortion", label, Partition::Train});
        }
    }
    return out;
}

std::multiset<std::string> ids_of(const std::vector<Record>& records) {
    std::multiset<std::string> ids;
    for (const auto& r : records) ids.insert(r.id);
    return ids;
}

} // namespace

TEST_CASE("cleaning reproduces the reference before/after pairs byte-exactly") {
    CHECK(corpus::clean_tweet(kRetweetRaw) == kRetweetClean);
    CHECK(corpus::clean_tweet(kFollowRaw) == kFollowClean);
    CHECK(corpus::clean_tweet("") == "");
}

TEST_CASE("cleaning rules individually") {
    CHECK(corpus::clean_tweet("RT @abc: hello") == "hello");
    CHECK(corpus::clean_tweet("  RT @abc:   hello  ") == "hello");
    CHECK(corpus::clean_tweet("not RT @abc: here") == "not rt @USERNAME: here");
    CHECK(corpus::clean_tweet("hi @Bob and @al_2!") == "hi @USERNAME and @USERNAME!");
    CHECK(corpus::clean_tweet("keep #SemST in the middle #semst") == "keep #semst in the middle");
    CHECK(corpus::clean_tweet("double #SemST #SEMST") == "double");
    CHECK(corpus::clean_tweet("say \\\"hi\\\" now") == "say 'hi' now");
    CHECK(corpus::clean_tweet("a\n\tb   c") == "a b c");
    CHECK(corpus::clean_tweet("#Hashtags #Stay") == "#hashtags #stay");
}

TEST_CASE("cleaning is idempotent and sentinel-safe on random input") {
    std::mt19937_64 gen(11);
    const std::regex foreign_mention("@(?!USERNAME(?![A-Za-z0-9_]))[A-Za-z0-9_]");
    for (int trial = 0; trial < 5000; ++trial) {
        const std::string raw = random_tweet(gen);
        const std::string once = corpus::clean_tweet(raw);
        CHECK_MESSAGE(corpus::clean_tweet(once) == once, "input: " << raw);
        CHECK_MESSAGE(!std::regex_search(once, foreign_mention), "input: " << raw << " -> " << once);
        std::string lowered = once;
        std::string without_sentinel = std::regex_replace(lowered, std::regex("@USERNAME"), "");
        CHECK(std::none_of(without_sentinel.begin(), without_sentinel.end(),
                           [](char c) { return c >= 'A' && c <= 'Z'; }));
        CHECK(text::trim(once).size() == once.size());
        const auto tail = std::string_view(once).substr(once.size() >= 6 ? once.size() - 6 : 0);
        CHECK(text::ascii_lower(tail) != "#semst");
    }
}

TEST_CASE("raw loading filters by target and reports errors precisely") {
    const std::string tsv =
        "ID\tTarget\tTweet\tStance\n"
        "1\tLegalization of Abortion\tfirst\tAGAINST\n"
        "2\tAtheism\tother\tFAVOR\n"
        "3\tLegalization of Abortion\tthird\tNONE\n";
    const auto result = corpus::parse_raw_dataset(tsv, "Legalization of Abortion", "mem");
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].id == "1");
    CHECK(result.records[1].stance == StanceLabel::None);

    CHECK(corpus::parse_raw_dataset("ID\tTarget\tTweet\tStance\n", "x", "mem").records.empty());
    CHECK(corpus::parse_raw_dataset("\xEF\xBB\xBFID\tTarget\tTweet\tStance\n1\tx\tt\tFAVOR\n", "x", "mem")
              .records.size() == 1);

    try {
        corpus::parse_raw_dataset("ID\tTarget\tText\tStance\n", "x", "f.tsv");
        FAIL("expected schema error");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("Tweet") != std::string::npos);
    }
    try {
        corpus::parse_raw_dataset("ID\tTarget\tTweet\tStance\n1\tx\tok\tFAVOR\n2\tx\tbad\tPRO\n", "x", "f.tsv");
        FAIL("expected data error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("f.tsv:3:") != std::string::npos);
    }
}

TEST_CASE("non-UTF-8 lines use the fallback encoding") {
    const std::string tsv = "ID\tTarget\tTweet\tStance\n1\tx\tcaf\xE9 \x85\tNONE\n2\tx\tfine\tNONE\n";
    const auto decoded = corpus::parse_raw_dataset(tsv, "x", "mem");
    CHECK(decoded.lines_reencoded == 1);
    CHECK(decoded.records[0].tweet == "caf\xC3\xA9 \xE2\x80\xA6");
    corpus::LoadOptions strict;
    strict.fallback = text::FallbackEncoding::None;
    CHECK_THROWS_AS(corpus::parse_raw_dataset(tsv, "x", "mem", strict), DataError);
}

TEST_CASE("missing raw file is an error") {
    CHECK_THROWS_AS(corpus::load_raw_dataset("/nonexistent/train.tsv", "x"), Error);
}

TEST_CASE("topic map") {
    corpus::TopicMap topics;
    CHECK(topics.target_for("Abortion") == "Legalization of Abortion");
    CHECK_THROWS_AS(topics.target_for("Atheism"), ConfigError);
}

TEST_CASE("deduplication keeps the first (tweet, label) occurrence") {
    const std::vector<RawRecord> raw = {
        {"1", "T", "Hello @a #SemST", StanceLabel::Favor},
        {"2", "T", "hello @b", StanceLabel::Favor},
        {"3", "T", "HELLO @c", StanceLabel::Against},
        {"4", "T", "other", StanceLabel::None},
    };
    const auto result = corpus::clean_and_deduplicate(raw);
    CHECK(result.dropped == 1);
    REQUIRE(result.kept.size() == 3);
    CHECK(result.kept[0].id == "1");
    CHECK(result.kept[0].tweet == "hello @USERNAME");
    CHECK(result.kept[1].id == "3");
}

TEST_CASE("partition sizes follow the 4:1 rule") {
    for (std::size_t n : {5u, 6u, 7u, 9u, 10u, 12u, 13u, 600u, 603u}) {
        const auto records = corpus::partition_dataset(raw_records(n, n), raw_records(0, 0), "Abortion", 42);
        const auto dist = corpus::label_distribution(records);
        std::size_t vali = 0, train = 0;
        for (auto c : dist.at(Partition::Vali)) vali += c;
        for (auto c : dist.at(Partition::Train)) train += c;
        const auto expected = static_cast<std::size_t>(std::llround(static_cast<double>(n) / 5.0));
        CHECK(vali == expected);
        CHECK(train + vali == n);
    }
    const auto split = corpus::partition_dataset(raw_records(600, 1), raw_records(0, 0), "Abortion", 42);
    const auto dist = corpus::label_distribution(split);
    CHECK(dist.at(Partition::Train)[0] + dist.at(Partition::Train)[1] + dist.at(Partition::Train)[2] == 480);
    CHECK(dist.at(Partition::Vali)[0] + dist.at(Partition::Vali)[1] + dist.at(Partition::Vali)[2] == 120);
    CHECK_THROWS_WITH_AS(corpus::partition_dataset(raw_records(4, 1), {}, "Abortion", 42),
                         doctest::Contains("too few records to split"), DataError);
}

TEST_CASE("partitioning is deterministic, conserving and keeps test records") {
    auto train = raw_records(600, 3);
    auto test = raw_records(50, 4);
    for (auto& r : test) r.id = "t" + r.id;
    const auto a = corpus::partition_dataset(train, test, "Abortion", 42);
    const auto b = corpus::partition_dataset(train, test, "Abortion", 42);
    const auto c = corpus::partition_dataset(train, test, "Abortion", 7);
    CHECK(a == b);
    CHECK(corpus::write_corpus_csv(a) == corpus::write_corpus_csv(b));
    CHECK(corpus::write_partitions_csv(a) != corpus::write_partitions_csv(c));
    REQUIRE(a.size() == 650);
    for (std::size_t i = 0; i < 600; ++i) {
        CHECK(a[i].id == train[i].id);
        CHECK(a[i].partition != Partition::Test);
    }
    for (std::size_t i = 600; i < 650; ++i) CHECK(a[i].partition == Partition::Test);
    std::set<std::string> ids;
    for (const auto& r : a) ids.insert(r.id);
    CHECK(ids.size() == a.size());
}

TEST_CASE("upsampling reference counts") {
    const auto train = train_records({267, 83, 130});
    const auto up = corpus::upsample_balanced(train, 42);
    const auto dist = corpus::label_distribution(up).at(Partition::Train);
    CHECK(dist == corpus::LabelCounts{267, 267, 267});
    CHECK(std::equal(train.begin(), train.end(), up.begin()));

    const auto balanced = train_records({10, 10, 10});
    CHECK(corpus::upsample_balanced(balanced, 1) == balanced);

    const auto tiny = corpus::upsample_balanced(train_records({4, 1, 2}), 9);
    std::size_t favor_copies = 0;
    for (const auto& r : tiny) {
        if (r.label == StanceLabel::Favor) {
            CHECK(r.id == "4");
            ++favor_copies;
        }
    }
    CHECK(favor_copies == 4);
    CHECK(corpus::upsample_balanced(train_records({2, 1, 1}), 3, 2).size() == 12);

    CHECK_THROWS_AS(corpus::upsample_balanced(train_records({3, 0, 2}), 1), DataError);
    CHECK_THROWS_AS(corpus::upsample_balanced({}, 1), DataError);
    CHECK_THROWS_AS(corpus::upsample_balanced(balanced, 1, 0), ConfigError);
}

TEST_CASE("upsampling properties over 1000 random corpora") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const corpus::LabelCounts counts{1 + gen() % 20, 1 + gen() % 20, 1 + gen() % 20};
        const auto train = train_records(counts);
        const std::uint64_t seed = gen();
        const auto up = corpus::upsample_balanced(train, seed);
        const std::size_t target = *std::max_element(counts.begin(), counts.end());

        const auto dist = corpus::label_distribution(up).at(Partition::Train);
        CHECK(dist == corpus::LabelCounts{target, target, target});

        const auto before = ids_of(train);
        const auto after = ids_of(up);
        CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
        std::map<std::string, Record> by_id;
        for (const auto& r : train) by_id.emplace(r.id, r);
        for (const auto& r : up) {
            REQUIRE(by_id.contains(r.id));
            CHECK(by_id.at(r.id) == r);
        }
        CHECK(corpus::upsample_balanced(train, seed) == up);
    }
}

TEST_CASE("label distribution always lists every partition") {
    const auto empty = corpus::label_distribution({});
    CHECK(empty.size() == 3);
    for (const auto& [partition, counts] : empty) CHECK(counts == corpus::LabelCounts{0, 0, 0});
    CHECK(corpus::format_distribution(empty).find("vali") != std::string::npos);
}

TEST_CASE("corpus csv round-trips") {
    std::vector<Record> records = {
        {"1", "has, comma", "Abortion", StanceLabel::Against, Partition::Train},
        {"2", "has \"quote\"", "Abortion", StanceLabel::Favor, Partition::Vali},
        {"3", "plain", "Abortion", StanceLabel::None, Partition::Test},
    };
    const auto text = corpus::write_corpus_csv(records);
    CHECK(text.rfind("ID,tweet,topic,label,partition\n", 0) == 0);
    CHECK(corpus::read_corpus_csv(text, "mem") == records);
    CHECK(corpus::write_partitions_csv(records) == "ID,partition\n1,train\n2,vali\n3,test\n");
}

TEST_CASE("synthetic SemEval-style fixture preprocesses to 600 + 279 records") {
    const auto dir = testing::data_dir() / "raw";
    const auto train = corpus::load_raw_dataset(dir / "train.tsv", "Legalization of Abortion");
    const auto test = corpus::load_raw_dataset(dir / "test.tsv", "Legalization of Abortion");
    CHECK(train.records.size() == 603);
    CHECK(test.records.size() == 280);
    CHECK(train.lines_reencoded > 0);
    const auto train_clean = corpus::clean_and_deduplicate(train.records);
    const auto test_clean = corpus::clean_and_deduplicate(test.records);
    const auto records = corpus::partition_dataset(train_clean.kept, test_clean.kept, "Abortion", 42);
    const auto dist = corpus::label_distribution(records);
    CHECK(dist.at(Partition::Test) == corpus::LabelCounts{188, 46, 45});
    CHECK(dist.at(Partition::Train)[0] + dist.at(Partition::Train)[1] + dist.at(Partition::Train)[2] == 480);
    const auto retweet = std::find_if(records.begin(), records.end(), [](const Record& r) { return r.id == "2403"; });
    REQUIRE(retweet != records.end());
    CHECK(retweet->tweet == kRetweetClean);
}
