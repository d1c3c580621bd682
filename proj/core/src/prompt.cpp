#include "corrcast/predictors.hpp"

#include <cctype>

#include "corrcast/csv.hpp"
#include "corrcast/errors.hpp"
#include "corrcast/rng.hpp"

namespace corrcast {

std::string build_prompt(const PromptContext& context) {
    std::string prompt = "You are a financial agent in the year " +
                         std::to_string(context.year) +
                         ". You don't know anything that happens during this "
                         "year or anything afterwards. The following data is "
                         "an article regarding the economic conditions: " +
                         context.article;

    if (!context.past_correlations.empty()) {
        std::string list = "[";
        for (size_t i = 0; i < context.past_correlations.size(); ++i) {
            if (i > 0) list += ", ";
            list += csv::format_double(context.past_correlations[i]);
        }
        list += "]";
        prompt += "\n\nFurthermore, previous " +
                  std::to_string(context.past_correlations.size()) +
                  " month's correlations of stocks and bonds are given by " +
                  list + " from oldest to most recent.";
    }

    prompt += "\n\nOnly using the above data and nothing else, how do you "
              "think stock returns and bond returns will be correlated?";
    prompt += "\n\nDo not use any other outside information. You must choose "
              "a side, you don't need to be certain about it.";
    if (context.scheme == CodingScheme::ThreeLevel) {
        prompt += "\n\nRespond with only 0, 1 or 2, 0 being negatively "
                  "correlated, 1 being uncorrelated, and 2 being positively "
                  "correlated.";
        prompt += "\n\nYou should return 1 digit and nothing else.";
        prompt += "\n\nExample: 1. This example implies the guess is positive "
                  "correlation. Ensure the formatting is correct.";
    } else {
        prompt += "\n\nRespond with only a number from 0 to 10, 0 being most "
                  "negatively correlated, 5 being uncorrelated, and 10 being "
                  "most positively correlated.";
        prompt += "\n\nYou should return 1 number and nothing else.";
        prompt += "\n\nExample: 7. This example implies the guess is positive "
                  "correlation. Ensure the formatting is correct.";
    }
    return prompt;
}

PredictorOutput parse_completion(std::string_view raw, CodingScheme scheme) {
    size_t begin = 0, end = raw.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin])))
        ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1])))
        --end;
    const std::string_view token = raw.substr(begin, end - begin);

    if (token.empty())
        throw MalformedReplyError("parse_completion: empty reply");
    if (token.size() > 2)
        throw MalformedReplyError("parse_completion: reply '" +
                                  std::string(token) + "' is not a bare integer");
    int value = 0;
    for (char c : token) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw MalformedReplyError("parse_completion: reply '" +
                                      std::string(token) +
                                      "' is not a bare integer");
        value = value * 10 + (c - '0');
    }
    if (value >= class_count(scheme))
        throw MalformedReplyError("parse_completion: class " +
                                  std::to_string(value) + " out of range for " +
                                  to_string(scheme));
    PredictorOutput out;
    out.cls = value;
    out.probability = 1.0;
    out.probability_reported = false;
    return out;
}

std::vector<std::string> segment_article(std::string_view text, size_t max_tokens,
                                         uint64_t seed) {
    if (max_tokens == 0)
        throw DomainError("segment_article: max_tokens must be positive");

    // Byte offsets where every (max_tokens)-th word starts; slicing there
    // keeps the segments an exact partition of the input.
    std::vector<size_t> cuts{0};
    size_t words = 0;
    bool in_word = false;
    for (size_t i = 0; i < text.size(); ++i) {
        const bool space = std::isspace(static_cast<unsigned char>(text[i])) != 0;
        if (!space && !in_word) {
            if (words > 0 && words % max_tokens == 0) cuts.push_back(i);
            ++words;
        }
        in_word = !space;
    }
    cuts.push_back(text.size());

    std::vector<std::string> segments;
    segments.reserve(cuts.size() - 1);
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
        segments.emplace_back(text.substr(cuts[i], cuts[i + 1] - cuts[i]));

    constexpr size_t sample_cap = 10;
    if (segments.size() > sample_cap) {
        std::string label = "segment:" + std::to_string(max_tokens) + ":";
        label.append(text);
        Rng rng = Rng::fork(seed, label);
        const std::vector<size_t> keep =
            rng.sample_indices(segments.size(), sample_cap);
        std::vector<std::string> sampled;
        sampled.reserve(sample_cap);
        for (size_t idx : keep) sampled.push_back(std::move(segments[idx]));
        segments = std::move(sampled);
    }
    return segments;
}

} // namespace corrcast
