#include "corrcast/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <tuple>

#include <httplib.h>
#include <json.hpp>

#include "corrcast/csv.hpp"
#include "corrcast/errors.hpp"

namespace corrcast {

namespace {

auto record_key(const ArticleRecord& r) {
    return std::tie(r.year, r.month, r.district);
}

void sort_and_check(Corpus& corpus, const std::string& origin) {
    std::sort(corpus.records.begin(), corpus.records.end(),
              [](const ArticleRecord& a, const ArticleRecord& b) {
                  return record_key(a) < record_key(b);
              });
    for (size_t i = 1; i < corpus.records.size(); ++i)
        if (record_key(corpus.records[i - 1]) == record_key(corpus.records[i])) {
            const ArticleRecord& r = corpus.records[i];
            throw ValidationError(origin + ": duplicate article key (" +
                                  std::to_string(r.year) + ", " +
                                  std::to_string(r.month) + ", " + r.district + ")");
        }
}

} // namespace

std::vector<MonthKey> Corpus::issue_months() const {
    std::vector<MonthKey> months;
    for (const ArticleRecord& r : records) {
        const MonthKey m{r.year, r.month};
        if (months.empty() || !(months.back() == m)) months.push_back(m);
    }
    return months;
}

Corpus load_corpus_jsonl(const std::filesystem::path& path) {
    const std::string content = csv::read_file(path);
    Corpus corpus;

    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= content.size()) {
        const size_t eol = content.find('\n', pos);
        std::string line = content.substr(
            pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? content.size() + 1 : eol + 1;
        ++line_no;
        if (csv::trim(line).empty()) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
        ArticleRecord record;
        for (const char* field : {"year", "month", "district", "text"})
            if (!obj.contains(field))
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": missing field '" + field + "'");
        try {
            record.year = obj.at("year").get<int>();
            record.month = obj.at("month").get<int>();
            record.district = obj.at("district").get<std::string>();
            record.text = obj.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
        if (record.month < 1 || record.month > 12)
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": month " + std::to_string(record.month) +
                                  " outside 1..12");
        if (record.text.empty())
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": empty text");
        corpus.records.push_back(std::move(record));
    }
    sort_and_check(corpus, path.string());
    return corpus;
}

std::string corpus_to_jsonl(const Corpus& corpus) {
    std::string out;
    for (const ArticleRecord& r : corpus.records) {
        const nlohmann::json obj = {{"year", r.year},
                                    {"month", r.month},
                                    {"district", r.district},
                                    {"text", r.text}};
        out += obj.dump();
        out += '\n';
    }
    return out;
}

void save_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
    csv::write_file_if_changed(path, corpus_to_jsonl(corpus));
}

namespace {

std::string substitute(std::string templ, const std::string& key,
                       const std::string& value) {
    const std::string token = "{" + key + "}";
    size_t pos = 0;
    while ((pos = templ.find(token, pos)) != std::string::npos) {
        templ.replace(pos, token.size(), value);
        pos += value.size();
    }
    return templ;
}

// scheme://host[:port] and the path that follows.
std::pair<std::string, std::string> split_url(const std::string& url) {
    const size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw DomainError("fetch_articles: URL '" + url + "' has no scheme");
    const size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

// Serializes request starts so consecutive requests are at least `delay`
// apart regardless of which worker issues them.
class Throttle {
public:
    explicit Throttle(std::chrono::milliseconds delay) : delay_(delay) {}

    void wait_turn() {
        std::unique_lock<std::mutex> lock(mutex_);
        for (;;) {
            const auto now = std::chrono::steady_clock::now();
            if (now >= next_) {
                next_ = now + delay_;
                return;
            }
            cv_.wait_until(lock, next_, [] { return false; });
        }
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::chrono::milliseconds delay_;
    std::chrono::steady_clock::time_point next_{};
};

} // namespace

Corpus fetch_articles(const FetchConfig& config, FetchReport* report) {
    struct Job {
        int year;
        int month;
        std::string district;
    };
    std::vector<Job> jobs;
    for (int year : config.years)
        for (int month : config.issue_months)
            for (const std::string& district : config.districts)
                jobs.push_back({year, month, district});

    FetchReport local;
    FetchReport& rep = report ? *report : local;
    rep.attempted = jobs.size();

    std::mutex sink_mutex;
    Corpus corpus;
    Throttle throttle(config.politeness_delay);
    std::atomic<size_t> cursor{0};

    auto worker = [&] {
        for (;;) {
            const size_t i = cursor.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            const std::string url = substitute(
                substitute(substitute(config.url_template, "year",
                                      std::to_string(job.year)),
                           "month", std::to_string(job.month)),
                "district", job.district);
            throttle.wait_turn();
            std::string error;
            std::string text;
            try {
                const auto [origin, path] = split_url(url);
                httplib::Client client(origin);
                client.set_connection_timeout(10);
                client.set_read_timeout(30);
                const httplib::Result res = client.Get(path);
                if (!res)
                    error = "transport failure: " + httplib::to_string(res.error());
                else if (res->status != 200)
                    error = "HTTP " + std::to_string(res->status);
                else
                    text = html_to_text(res->body);
            } catch (const std::exception& e) {
                error = e.what();
            }
            if (error.empty() && text.empty()) error = "empty body";

            std::lock_guard<std::mutex> lock(sink_mutex);
            if (error.empty())
                corpus.records.push_back({job.year, job.month, job.district, text});
            else
                rep.failures.push_back({job.year, job.month, job.district, error});
        }
    };

    const size_t threads = std::min<size_t>(
        std::max(1, config.max_parallel), std::max<size_t>(1, jobs.size()));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    rep.succeeded = corpus.records.size();
    if (!jobs.empty() && corpus.records.empty())
        throw TransportError("fetch_articles: all " + std::to_string(jobs.size()) +
                             " requests failed, first: " +
                             (rep.failures.empty() ? "?" : rep.failures[0].message));
    sort_and_check(corpus, "fetch_articles");
    return corpus;
}

std::vector<ArticleRecord> articles_for_month(const Corpus& corpus, int year,
                                              int month) {
    std::vector<ArticleRecord> out;
    for (const ArticleRecord& r : corpus.records)
        if (r.year == year && r.month == month) out.push_back(r);
    return out;
}

std::optional<MonthKey> latest_issue_on_or_before(const Corpus& corpus,
                                                  const MonthKey& m) {
    std::optional<MonthKey> best;
    for (const ArticleRecord& r : corpus.records) {
        const MonthKey issue{r.year, r.month};
        if (m < issue) break; // records sorted by key
        best = issue;
    }
    return best;
}

std::string html_to_text(std::string_view html) {
    std::string stripped;
    stripped.reserve(html.size());
    size_t i = 0;
    auto skip_block = [&](std::string_view open, std::string_view close) {
        if (html.size() - i < open.size()) return false;
        for (size_t j = 0; j < open.size(); ++j)
            if (std::tolower(static_cast<unsigned char>(html[i + j])) != open[j])
                return false;
        size_t end = i + open.size();
        while (end < html.size()) {
            if (html[end] == '<' && html.size() - end >= close.size()) {
                bool match = true;
                for (size_t j = 0; j < close.size(); ++j)
                    if (std::tolower(static_cast<unsigned char>(html[end + j])) !=
                        close[j]) {
                        match = false;
                        break;
                    }
                if (match) {
                    end = html.find('>', end);
                    i = end == std::string::npos ? html.size() : end + 1;
                    return true;
                }
            }
            ++end;
        }
        i = html.size();
        return true;
    };
    while (i < html.size()) {
        const char c = html[i];
        if (c == '<') {
            if (skip_block("<script", "</script") ||
                skip_block("<style", "</style")) {
                stripped += ' '; // a removed block separates words like a tag
                continue;
            }
            const size_t end = html.find('>', i);
            if (end == std::string::npos) break;
            i = end + 1;
            stripped += ' ';
            continue;
        }
        if (c == '&') {
            static constexpr std::pair<std::string_view, char> entities[] = {
                {"&amp;", '&'}, {"&lt;", '<'},   {"&gt;", '>'},
                {"&quot;", '"'}, {"&#39;", '\''}, {"&apos;", '\''},
            };
            bool replaced = false;
            for (const auto& [name, repl] : entities)
                if (html.substr(i, name.size()) == name) {
                    stripped += repl;
                    i += name.size();
                    replaced = true;
                    break;
                }
            if (!replaced) {
                if (html.substr(i, 6) == "&nbsp;") {
                    stripped += ' ';
                    i += 6;
                } else {
                    stripped += c;
                    ++i;
                }
            }
            continue;
        }
        stripped += c;
        ++i;
    }

    std::string out;
    out.reserve(stripped.size());
    bool pending_space = false;
    for (char c : stripped) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += c;
    }
    return out;
}

} // namespace corrcast
