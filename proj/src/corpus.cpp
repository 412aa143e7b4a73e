#include "stance/corpus.hpp"

#include "stance/csv.hpp"
#include "stance/error.hpp"
#include "stance/random.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>
#include <utility>

namespace stance::corpus {
namespace {

constexpr std::string_view kWhitespace = " \t\r\n\v\f";

bool is_space(char c) { return kWhitespace.find(c) != std::string_view::npos; }

bool is_handle_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::string_view trim_right(std::string_view s) {
    const auto last = s.find_last_not_of(kWhitespace);
    return last == std::string_view::npos ? std::string_view{} : s.substr(0, last + 1);
}

std::string_view strip_retweet_marker(std::string_view s) {
    std::string_view rest = text::trim(s);
    if (rest.size() < 3 || rest.substr(0, 2) != "RT" || !is_space(rest[2])) return s;
    std::size_t i = 2;
    while (i < rest.size() && is_space(rest[i])) ++i;
    if (i >= rest.size() || rest[i] != '@') return s;
    std::size_t j = i + 1;
    while (j < rest.size() && is_handle_char(rest[j])) ++j;
    if (j == i + 1) return s;
    if (j < rest.size() && rest[j] == ':') ++j;
    return text::trim(rest.substr(j));
}

std::string replace_mentions(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] == '@' && i + 1 < s.size() && is_handle_char(s[i + 1])) {
            std::size_t j = i + 1;
            while (j < s.size() && is_handle_char(s[j])) ++j;
            out += kMentionSentinel;
            i = j;
        } else {
            out.push_back(s[i++]);
        }
    }
    return out;
}

std::string_view strip_marker_hashtags(std::string_view s) {
    constexpr std::string_view marker = "#semst";
    s = trim_right(s);
    while (s.size() >= marker.size() &&
           text::ascii_lower(s.substr(s.size() - marker.size())) == marker) {
        s = trim_right(s.substr(0, s.size() - marker.size()));
    }
    return s;
}

std::string normalize_quotes(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '\\') {
            std::size_t j = i;
            while (j < s.size() && s[j] == '\\') ++j;
            if (j < s.size() && (s[j] == '\'' || s[j] == '"')) {
                out.push_back('\'');
                i = j;
            } else {
                out.append(s.substr(i, j - i));
                i = j - 1;
            }
        } else if (c == '"') {
            out.push_back('\'');
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view contents) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < contents.size()) {
        std::size_t end = contents.find('\n', start);
        if (end == std::string_view::npos) end = contents.size();
        std::string_view line = contents.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t tab = line.find('\t', pos);
        fields.push_back(line.substr(pos, tab == std::string_view::npos ? line.npos : tab - pos));
        if (tab == std::string_view::npos) break;
        pos = tab + 1;
    }
    return fields;
}

} // namespace

TopicMap::TopicMap() : topics_{{"Abortion", "Legalization of Abortion"}} {}

TopicMap::TopicMap(std::map<std::string, std::string> topics) : topics_(std::move(topics)) {}

const std::string& TopicMap::target_for(std::string_view topic) const {
    auto it = topics_.find(std::string(topic));
    if (it == topics_.end()) throw ConfigError("unknown topic '" + std::string(topic) + "'");
    return it->second;
}

LoadResult parse_raw_dataset(std::string_view contents, std::string_view target,
                             std::string_view source_name, const LoadOptions& options) {
    if (contents.substr(0, 3) == "\xEF\xBB\xBF") contents.remove_prefix(3);
    const auto lines = split_lines(contents);
    const std::string source(source_name);
    if (lines.empty() || lines.front().empty()) throw SchemaError(source + ": missing header row");

    const auto header = split_tabs(lines.front());
    auto column = [&](std::string_view name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (text::trim(header[i]) == name) return i;
        }
        throw SchemaError(source + ": missing column '" + std::string(name) + "'");
    };
    const std::size_t id_col = column("ID");
    const std::size_t target_col = column("Target");
    const std::size_t tweet_col = column("Tweet");
    const std::size_t stance_col = column("Stance");
    const std::size_t width = std::max({id_col, target_col, tweet_col, stance_col}) + 1;

    LoadResult result;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        std::string_view line = lines[n];
        if (text::trim(line).empty()) continue;
        const std::string line_no = std::to_string(n + 1);
        ++result.lines_read;

        std::string decoded;
        if (!text::is_valid_utf8(line)) {
            if (options.fallback == text::FallbackEncoding::None) {
                throw DataError(source + ":" + line_no + ": invalid UTF-8");
            }
            decoded = text::windows1252_to_utf8(line);
            line = decoded;
            ++result.lines_reencoded;
        }

        const auto fields = split_tabs(line);
        if (fields.size() < width) {
            throw DataError(source + ":" + line_no + ": expected " + std::to_string(width) +
                            " tab-separated fields, found " + std::to_string(fields.size()));
        }
        if (fields[target_col] != target) continue;

        const auto stance = parse_label(text::trim(fields[stance_col]));
        if (!stance) {
            throw DataError(source + ":" + line_no + ": unknown stance '" +
                            std::string(fields[stance_col]) + "'");
        }
        RawRecord record{std::string(text::trim(fields[id_col])), std::string(fields[target_col]),
                         std::string(fields[tweet_col]), *stance};
        if (record.id.empty()) throw DataError(source + ":" + line_no + ": empty ID");
        result.records.push_back(std::move(record));
    }
    return result;
}

LoadResult load_raw_dataset(const std::filesystem::path& path, std::string_view target,
                            const LoadOptions& options) {
    if (!std::filesystem::exists(path)) throw Error("raw data file not found: " + path.string());
    return parse_raw_dataset(csv::read_file(path), target, path.string(), options);
}

std::string clean_tweet(std::string_view raw) {
    std::string s(strip_retweet_marker(raw));
    s = replace_mentions(s);
    s = std::string(strip_marker_hashtags(s));
    s = normalize_quotes(s);
    // Lowercasing also folds the sentinel, so mentions are re-applied afterwards; this
    // also catches handles that only become ASCII once lowercased.
    s = replace_mentions(text::to_lower_utf8(s));
    return collapse_whitespace(s);
}

DedupResult clean_and_deduplicate(const std::vector<RawRecord>& raw) {
    DedupResult result;
    std::set<std::pair<std::string, StanceLabel>> seen;
    for (const auto& record : raw) {
        RawRecord cleaned = record;
        cleaned.tweet = clean_tweet(record.tweet);
        if (seen.emplace(cleaned.tweet, cleaned.stance).second) {
            result.kept.push_back(std::move(cleaned));
        } else {
            ++result.dropped;
        }
    }
    return result;
}

std::vector<Record> partition_dataset(const std::vector<RawRecord>& train_file,
                                      const std::vector<RawRecord>& test_file,
                                      std::string_view topic, std::uint64_t seed) {
    const std::size_t n = train_file.size();
    if (n < 5) throw DataError("too few records to split (" + std::to_string(n) + " < 5)");

    const std::size_t vali_count = (n + 2) / 5; // round(n / 5); n / 5 is never a half
    std::vector<bool> is_vali(n, false);
    const auto order = SeededRng(seed).permutation(n);
    for (std::size_t i = 0; i < vali_count; ++i) is_vali[order[i]] = true;

    std::set<std::string> ids;
    std::vector<Record> records;
    records.reserve(n + test_file.size());
    auto add = [&](const RawRecord& raw, Partition partition) {
        if (!ids.insert(raw.id).second) throw DataError("duplicate ID '" + raw.id + "'");
        records.push_back(Record{raw.id, raw.tweet, std::string(topic), raw.stance, partition});
    };
    for (std::size_t i = 0; i < n; ++i) {
        add(train_file[i], is_vali[i] ? Partition::Vali : Partition::Train);
    }
    for (const auto& raw : test_file) add(raw, Partition::Test);
    return records;
}

std::vector<Record> upsample_balanced(const std::vector<Record>& train, std::uint64_t seed,
                                      int factor) {
    if (train.empty()) throw DataError("cannot upsample an empty training set");
    if (factor < 1) throw ConfigError("upsampling factor must be >= 1");

    std::array<std::vector<std::size_t>, 3> by_class;
    for (std::size_t i = 0; i < train.size(); ++i) by_class[index_of(train[i].label)].push_back(i);

    std::size_t largest = 0;
    for (StanceLabel label : kLabels) {
        const auto& members = by_class[index_of(label)];
        if (members.empty()) {
            throw DataError("cannot upsample: class " + std::string(to_string(label)) +
                            " has no training records");
        }
        largest = std::max(largest, members.size());
    }
    const std::size_t goal = largest * static_cast<std::size_t>(factor);

    std::vector<Record> out = train;
    SeededRng rng(seed);
    for (StanceLabel label : kLabels) {
        const auto& members = by_class[index_of(label)];
        for (std::size_t k = members.size(); k < goal; ++k) {
            out.push_back(train[members[rng.below(members.size())]]);
        }
    }
    return out;
}

std::map<Partition, LabelCounts> label_distribution(const std::vector<Record>& records) {
    std::map<Partition, LabelCounts> counts{
        {Partition::Train, {}}, {Partition::Vali, {}}, {Partition::Test, {}}};
    for (const auto& r : records) ++counts[r.partition][index_of(r.label)];
    return counts;
}

std::string format_distribution(const std::map<Partition, LabelCounts>& counts) {
    std::ostringstream out;
    out << std::left << std::setw(10) << "partition";
    for (StanceLabel label : kLabels) out << std::right << std::setw(9) << to_string(label);
    out << std::setw(9) << "total" << '\n';
    for (const auto& [partition, row] : counts) {
        out << std::left << std::setw(10) << to_string(partition);
        std::size_t total = 0;
        for (std::size_t c : row) {
            out << std::right << std::setw(9) << c;
            total += c;
        }
        out << std::setw(9) << total << '\n';
    }
    return out.str();
}

std::string write_corpus_csv(const std::vector<Record>& records) {
    std::ostringstream out;
    csv::write_row(out, {"ID", "tweet", "topic", "label", "partition"});
    for (const auto& r : records) {
        csv::write_row(out, {r.id, r.tweet, r.topic, std::string(to_string(r.label)),
                             std::string(to_string(r.partition))});
    }
    return out.str();
}

std::string write_partitions_csv(const std::vector<Record>& records) {
    std::ostringstream out;
    csv::write_row(out, {"ID", "partition"});
    for (const auto& r : records) csv::write_row(out, {r.id, std::string(to_string(r.partition))});
    return out.str();
}

std::vector<Record> read_corpus_csv(std::string_view contents, std::string_view source_name) {
    const auto table = csv::parse(contents);
    const auto id = table.require("ID", source_name);
    const auto tweet = table.require("tweet", source_name);
    const auto topic = table.require("topic", source_name);
    const auto label = table.require("label", source_name);
    const auto partition = table.require("partition", source_name);
    const std::size_t width = std::max({id, tweet, topic, label, partition}) + 1;

    std::vector<Record> records;
    records.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string where = std::string(source_name) + " row " + std::to_string(i + 2);
        if (row.size() < width) throw SchemaError(where + ": too few fields");
        const auto l = parse_label(row[label]);
        if (!l) throw DataError(where + ": unknown label '" + row[label] + "'");
        const auto p = parse_partition(row[partition]);
        if (!p) throw DataError(where + ": unknown partition '" + row[partition] + "'");
        records.push_back(Record{row[id], row[tweet], row[topic], *l, *p});
    }
    return records;
}

} // namespace stance::corpus
