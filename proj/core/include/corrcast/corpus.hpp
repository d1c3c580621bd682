#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "corrcast/date.hpp"

namespace corrcast {

// One Beige Book article. Text is plain (tags already stripped), nonempty.
struct ArticleRecord {
    int year = 0;
    int month = 0; // 1-12, the issue month
    std::string district;
    std::string text;
};

// Article collection keyed by (year, month, district); records are kept
// sorted by that key and the key is unique.
struct Corpus {
    std::vector<ArticleRecord> records;

    bool empty() const { return records.empty(); }
    size_t size() const { return records.size(); }

    // Issue months present, ascending.
    std::vector<MonthKey> issue_months() const;
};

struct FetchFailure {
    int year = 0;
    int month = 0;
    std::string district;
    std::string message;
};

struct FetchReport {
    size_t attempted = 0;
    size_t succeeded = 0;
    std::vector<FetchFailure> failures;
};

struct FetchConfig {
    // URL template with {year}, {month}, {district} placeholders.
    std::string url_template;
    std::vector<int> years;
    std::vector<int> issue_months;
    std::vector<std::string> districts;
    std::chrono::milliseconds politeness_delay{250};
    int max_parallel = 4;
};

// One JSON object per line with fields year, month, district, text.
// Throws ParseError (bad line, with line number) or ValidationError
// (duplicate key, empty text).
Corpus load_corpus_jsonl(const std::filesystem::path& path);
std::string corpus_to_jsonl(const Corpus& corpus);
void save_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);

// One GET per (year, issue month, district), bounded-parallel with the
// politeness delay enforced between request starts. Successes become
// records, failures go into `report`. Throws TransportError when every
// request fails.
Corpus fetch_articles(const FetchConfig& config, FetchReport* report = nullptr);

// All records with the given issue (year, month); empty for non-issue months.
std::vector<ArticleRecord> articles_for_month(const Corpus& corpus, int year,
                                              int month);

// Most recent issue month <= m, for carrying articles forward over months
// without a Beige Book issue.
std::optional<MonthKey> latest_issue_on_or_before(const Corpus& corpus,
                                                  const MonthKey& m);

// Tag stripping and whitespace collapsing; script/style bodies dropped,
// common entities decoded.
std::string html_to_text(std::string_view html);

} // namespace corrcast
