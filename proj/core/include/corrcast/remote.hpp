#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>

#include "corrcast/predictors.hpp"

namespace corrcast {

struct RemoteConfig {
    std::string endpoint_url; // full completion URL, e.g. http://host/v1/chat/completions
    std::string api_key;      // empty sends no Authorization header
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.0;
    bool request_logprobs = true;
    int retry_cap = 3; // retries after the first attempt
    std::chrono::milliseconds initial_backoff{100}; // doubles per retry
    std::chrono::milliseconds min_request_interval{0};
    size_t max_segment_tokens = 512;
    std::filesystem::path transcript_path; // empty disables the cache
    uint64_t seed = 0;                     // drives segment sampling
};

// Text-completion adapter: builds the prompt per segment, POSTs a completion
// request at temperature 0, parses the reply, and averages segments in
// correlation space (re-rounded to a class, probability averaged).
// Successful exchanges persist to a JSONL transcript keyed by prompt hash;
// cached prompts never reach the network again. Exhausted retries yield
// nullopt and the pipeline records a missing month.
class RemotePredictor : public Predictor {
public:
    explicit RemotePredictor(RemoteConfig config);

    std::string name() const override { return "remote"; }
    std::optional<PredictorOutput> predict(const PromptContext& context) override;

    size_t http_requests() const { return http_requests_.load(); }

private:
    std::optional<PredictorOutput> complete_one(const std::string& prompt,
                                                CodingScheme scheme);
    std::optional<std::string> exchange(const std::string& prompt);
    void remember(const std::string& hash, const std::string& prompt,
                  const std::string& body);

    RemoteConfig config_;
    std::map<std::string, std::string> cache_; // prompt hash -> response body
    std::mutex mutex_;
    std::atomic<size_t> http_requests_{0};
    std::chrono::steady_clock::time_point next_request_{};
};

} // namespace corrcast
