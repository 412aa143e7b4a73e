#pragma once

#include "stance/label.hpp"
#include "stance/text.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace stance::corpus {

/// One row of a raw SemEval-style TSV file.
struct RawRecord {
    std::string id;
    std::string target;
    std::string tweet;
    StanceLabel stance;
};

/// A cleaned tweet with its split assignment.
struct Record {
    std::string id;
    std::string tweet;
    std::string topic;
    StanceLabel label;
    Partition partition;

    friend bool operator==(const Record&, const Record&) = default;
};

enum class SourceFile { Train, Test };

/// Short topic key ("Abortion") to the Target string used in the raw files.
class TopicMap {
public:
    TopicMap();
    explicit TopicMap(std::map<std::string, std::string> topics);

    /// Throws ConfigError for an unknown topic.
    const std::string& target_for(std::string_view topic) const;
    const std::map<std::string, std::string>& entries() const { return topics_; }

private:
    std::map<std::string, std::string> topics_;
};

struct LoadOptions {
    text::FallbackEncoding fallback = text::FallbackEncoding::Windows1252;
};

struct LoadResult {
    std::vector<RawRecord> records;
    std::size_t lines_read = 0;
    std::size_t lines_reencoded = 0;
};

/// Reads an "ID\tTarget\tTweet\tStance" file and keeps rows whose Target matches.
/// Lines that are not valid UTF-8 are decoded with the configured fallback; with no
/// fallback they raise DataError.
LoadResult load_raw_dataset(const std::filesystem::path& path, std::string_view target,
                            const LoadOptions& options = {});
LoadResult parse_raw_dataset(std::string_view contents, std::string_view target,
                             std::string_view source_name, const LoadOptions& options = {});

/// Normalizes raw tweet text:
///   1. drop a leading "RT @handle:" marker,
///   2. replace every @handle with "@USERNAME",
///   3. drop trailing "#SemST" markers (any case),
///   4. turn escaped quotes and double quotes into single quotes,
///   5. lowercase,
///   6. collapse whitespace runs and trim.
std::string clean_tweet(std::string_view raw);

inline constexpr std::string_view kMentionSentinel = "@USERNAME";

struct DedupResult {
    std::vector<RawRecord> kept;
    std::size_t dropped = 0;
};

/// Cleans every tweet, then keeps only the first record for each exact
/// (cleaned tweet, label) pair.
DedupResult clean_and_deduplicate(const std::vector<RawRecord>& raw);

/// Assigns TRAIN/VALI to the train-file records (|VALI| = round(n/5), uniform,
/// unstratified) and TEST to every test-file record. Output keeps input order,
/// train-file records first.
std::vector<Record> partition_dataset(const std::vector<RawRecord>& train_file,
                                      const std::vector<RawRecord>& test_file,
                                      std::string_view topic, std::uint64_t seed);

/// Oversamples each class to factor × (largest class count). Originals come first,
/// in input order; added duplicates follow, grouped by class in canonical order.
std::vector<Record> upsample_balanced(const std::vector<Record>& train, std::uint64_t seed,
                                      int factor = 1);

using LabelCounts = std::array<std::size_t, 3>;

/// Counts per partition, each in canonical label order. Every partition is present.
std::map<Partition, LabelCounts> label_distribution(const std::vector<Record>& records);

/// Human-readable table of label_distribution.
std::string format_distribution(const std::map<Partition, LabelCounts>& counts);

/// "ID,tweet,topic,label,partition"
std::string write_corpus_csv(const std::vector<Record>& records);
/// "ID,partition"
std::string write_partitions_csv(const std::vector<Record>& records);

std::vector<Record> read_corpus_csv(std::string_view contents, std::string_view source_name);

} // namespace stance::corpus
