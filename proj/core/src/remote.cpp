#include "corrcast/remote.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "corrcast/csv.hpp"
#include "corrcast/errors.hpp"

namespace corrcast {

namespace {

std::string fnv1a_hex(std::string_view text) {
    uint64_t h = 1469598103934665603ull;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::pair<std::string, std::string> split_url(const std::string& url) {
    const size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw DomainError("RemotePredictor: URL '" + url + "' has no scheme");
    const size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

// Pulls the reply text and (when reported) the first-token probability out
// of a chat-completion response body. Throws MalformedReplyError when the
// body or the reply token is unusable.
PredictorOutput parse_response_body(const std::string& body, CodingScheme scheme) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedReplyError(std::string("response is not JSON: ") + e.what());
    }
    if (!doc.contains("choices") || !doc["choices"].is_array() ||
        doc["choices"].empty())
        throw MalformedReplyError("response has no choices");
    const nlohmann::json& choice = doc["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content") ||
        !choice["message"]["content"].is_string())
        throw MalformedReplyError("response choice has no message content");

    PredictorOutput out =
        parse_completion(choice["message"]["content"].get<std::string>(), scheme);
    if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
        const nlohmann::json& lp = choice["logprobs"];
        if (lp.contains("content") && lp["content"].is_array() &&
            !lp["content"].empty() && lp["content"][0].contains("logprob") &&
            lp["content"][0]["logprob"].is_number()) {
            out.probability =
                std::exp(lp["content"][0]["logprob"].get<double>());
            out.probability_reported = true;
        }
    }
    return out;
}

} // namespace

RemotePredictor::RemotePredictor(RemoteConfig config)
    : config_(std::move(config)) {
    if (config_.endpoint_url.empty())
        throw DomainError("RemotePredictor: endpoint_url is empty");
    if (config_.retry_cap < 0)
        throw DomainError("RemotePredictor: retry_cap must be >= 0");
    if (config_.transcript_path.empty()) return;

    std::ifstream in(config_.transcript_path);
    if (!in) return; // no transcript yet; it is created on first success
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json entry;
        try {
            entry = nlohmann::json::parse(line);
            cache_[entry.at("hash").get<std::string>()] =
                entry.at("response").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(config_.transcript_path.string() + ":" +
                             std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::optional<PredictorOutput> RemotePredictor::predict(
    const PromptContext& context) {
    const std::vector<std::string> segments = segment_article(
        context.article, config_.max_segment_tokens, config_.seed);

    double corr_sum = 0.0, prob_sum = 0.0;
    size_t hits = 0;
    bool all_reported = true;
    for (const std::string& segment : segments) {
        PromptContext piece = context;
        piece.article = segment;
        const std::optional<PredictorOutput> out =
            complete_one(build_prompt(piece), context.scheme);
        if (!out) continue;
        corr_sum += class_to_correlation(out->cls, context.scheme);
        prob_sum += out->probability;
        all_reported = all_reported && out->probability_reported;
        ++hits;
    }
    if (hits == 0) return std::nullopt;

    PredictorOutput merged;
    merged.cls = round_to_class(corr_sum / static_cast<double>(hits),
                                context.scheme);
    merged.probability = prob_sum / static_cast<double>(hits);
    merged.probability_reported = all_reported;
    return merged;
}

std::optional<PredictorOutput> RemotePredictor::complete_one(
    const std::string& prompt, CodingScheme scheme) {
    const std::string hash = fnv1a_hex(prompt);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(hash);
        if (it != cache_.end()) {
            try {
                return parse_response_body(it->second, scheme);
            } catch (const MalformedReplyError&) {
                cache_.erase(it); // stale entry; fall through to the network
            }
        }
    }

    auto backoff = config_.initial_backoff;
    for (int attempt = 0; attempt <= config_.retry_cap; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        const std::optional<std::string> body = exchange(prompt);
        if (!body) continue;
        try {
            const PredictorOutput out = parse_response_body(*body, scheme);
            remember(hash, prompt, *body);
            return out;
        } catch (const MalformedReplyError&) {
            continue;
        }
    }
    return std::nullopt;
}

std::optional<std::string> RemotePredictor::exchange(const std::string& prompt) {
    {
        // Per-endpoint rate limit shared by all callers.
        std::unique_lock<std::mutex> lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        if (now < next_request_) {
            const auto wait = next_request_ - now;
            lock.unlock();
            std::this_thread::sleep_for(wait);
            lock.lock();
        }
        next_request_ =
            std::chrono::steady_clock::now() + config_.min_request_interval;
    }

    nlohmann::json request = {
        {"model", config_.model},
        {"messages",
         nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config_.temperature},
    };
    if (config_.request_logprobs) request["logprobs"] = true;

    ++http_requests_;
    try {
        const auto [origin, path] = split_url(config_.endpoint_url);
        httplib::Client client(origin);
        client.set_connection_timeout(10);
        client.set_read_timeout(60);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        const httplib::Result res =
            client.Post(path, headers, request.dump(), "application/json");
        if (!res || res->status != 200) return std::nullopt;
        return res->body;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void RemotePredictor::remember(const std::string& hash, const std::string& prompt,
                               const std::string& body) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!cache_.emplace(hash, body).second) return; // already persisted
    if (config_.transcript_path.empty()) return;

    const nlohmann::json entry = {
        {"hash", hash},
        {"model", config_.model},
        {"prompt", prompt},
        {"response", body},
    };
    if (config_.transcript_path.has_parent_path())
        std::filesystem::create_directories(config_.transcript_path.parent_path());
    std::ofstream out(config_.transcript_path, std::ios::app);
    if (!out)
        throw Error("RemotePredictor: cannot append to transcript " +
                    config_.transcript_path.string());
    out << entry.dump() << '\n';
}

} // namespace corrcast
