#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrcast/correlation.hpp"

namespace corrcast {

// One predicted class with its probability. `probability_reported` is false
// when the source gave no probability and 1.0 was assumed.
struct PredictorOutput {
    int cls = 0;
    double probability = 1.0;
    bool probability_reported = true;
};

// Everything a predictor may see for one query: the target year, one article
// (or segment), and the realized correlations of the preceding months,
// oldest to newest. Nothing dated inside or after the target month belongs
// here.
struct PromptContext {
    int year = 0;
    std::string article;
    std::vector<double> past_correlations;
    CodingScheme scheme = CodingScheme::ThreeLevel;
};

// Uniform predictor contract. predict() is deterministic for fixed state and
// context; nullopt means the value is missing (e.g. remote retries
// exhausted) and the caller records a gap instead of failing.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual std::string name() const = 0;
    virtual std::optional<PredictorOutput> predict(const PromptContext& context) = 0;
};

// Instantiates the completion prompt for the context. The history paragraph
// is omitted entirely when past_correlations is empty; the response-range
// wording follows the scheme (0-2 or 0-10).
std::string build_prompt(const PromptContext& context);

// Accepts a completion consisting of one in-range integer token, surrounding
// whitespace tolerated; probability defaults to 1.0 (the transport layer
// overrides it when the endpoint reports log-probabilities). Throws
// MalformedReplyError otherwise.
PredictorOutput parse_completion(std::string_view raw, CodingScheme scheme);

// Splits text into contiguous word-boundary segments of at most max_tokens
// whitespace-delimited words; the segments concatenate back to the input.
// More than 10 segments are reduced to a seeded sample of 10, original order
// preserved; the sample depends only on (seed, text, max_tokens).
std::vector<std::string> segment_article(std::string_view text, size_t max_tokens,
                                         uint64_t seed);

// EWMA of the prior realized correlations (most recent weighted highest,
// smoothing alpha = 2/(span+1)), rounded to the scheme class, probability
// 1.0. Throws InsufficientDataError on empty history.
PredictorOutput baseline_predict(const std::vector<double>& history, int span,
                                 CodingScheme scheme);

// Predictor wrapper around baseline_predict; reads only
// context.past_correlations.
class BaselinePredictor : public Predictor {
public:
    explicit BaselinePredictor(int span = 3) : span_(span) {}

    std::string name() const override { return "baseline"; }
    std::optional<PredictorOutput> predict(const PromptContext& context) override;

private:
    int span_;
};

} // namespace corrcast
