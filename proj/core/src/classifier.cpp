#include "corrcast/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "corrcast/errors.hpp"

namespace corrcast {

namespace {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current += static_cast<char>(
                std::tolower(static_cast<unsigned char>(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

// Sparse token-frequency vector over the vocabulary; unknown tokens ignored.
std::vector<std::pair<int, double>> featurize(
    const std::map<std::string, int>& vocabulary, std::string_view text) {
    std::map<int, double> counts;
    size_t known = 0;
    for (const std::string& token : tokenize(text)) {
        auto it = vocabulary.find(token);
        if (it == vocabulary.end()) continue;
        ++counts[it->second];
        ++known;
    }
    std::vector<std::pair<int, double>> features(counts.begin(), counts.end());
    if (known > 0)
        for (auto& [index, value] : features) value /= static_cast<double>(known);
    return features;
}

std::vector<double> scores_for(const ClassifierModel& model,
                               const std::vector<std::pair<int, double>>& features) {
    const size_t bias = model.vocabulary.size();
    std::vector<double> scores(static_cast<size_t>(model.classes()));
    for (size_t c = 0; c < scores.size(); ++c) {
        double z = model.weights[c][bias];
        for (const auto& [index, value] : features)
            z += model.weights[c][static_cast<size_t>(index)] * value;
        scores[c] = z;
    }
    return scores;
}

std::vector<double> softmax(std::vector<double> scores) {
    const double peak = *std::max_element(scores.begin(), scores.end());
    double total = 0.0;
    for (double& z : scores) {
        z = std::exp(z - peak);
        total += z;
    }
    for (double& z : scores) z /= total;
    return scores;
}

} // namespace

ClassifierModel train_classifier(const Corpus& corpus,
                                 const std::map<MonthKey, int>& labels,
                                 const MonthKey& window_start,
                                 const MonthKey& window_end, CodingScheme scheme,
                                 int epochs, double learning_rate) {
    if (epochs < 1) throw DomainError("train_classifier: epochs must be >= 1");
    if (!(learning_rate > 0.0))
        throw DomainError("train_classifier: learning_rate must be positive");

    ClassifierModel model;
    model.scheme = scheme;
    model.window_start = window_start;
    model.window_end = window_end;
    const int classes = class_count(scheme);

    struct Example {
        const ArticleRecord* article;
        int label;
    };
    std::vector<Example> examples;
    for (const ArticleRecord& r : corpus.records) {
        const MonthKey m{r.year, r.month};
        if (m < window_start || window_end < m) continue;
        auto it = labels.find(m);
        if (it == labels.end())
            throw ValidationError("train_classifier: no label for training month " +
                                  to_string(m));
        if (it->second < 0 || it->second >= classes)
            throw ValidationError("train_classifier: label " +
                                  std::to_string(it->second) + " for " +
                                  to_string(m) + " out of range for " +
                                  to_string(scheme));
        examples.push_back({&r, it->second});
    }
    if (examples.empty())
        throw InsufficientDataError("train_classifier: no articles inside " +
                                    to_string(window_start) + ".." +
                                    to_string(window_end));

    for (const Example& e : examples)
        for (const std::string& token : tokenize(e.article->text))
            model.vocabulary.emplace(token, 0);
    int next_index = 0;
    for (auto& [token, index] : model.vocabulary) index = next_index++;

    std::vector<bool> seen(static_cast<size_t>(classes), false);
    for (const Example& e : examples) seen[static_cast<size_t>(e.label)] = true;
    for (int c = 0; c < classes; ++c)
        if (!seen[static_cast<size_t>(c)])
            model.warnings.push_back("class " + std::to_string(c) +
                                     " absent from training data");

    std::vector<std::vector<std::pair<int, double>>> features;
    features.reserve(examples.size());
    for (const Example& e : examples)
        features.push_back(featurize(model.vocabulary, e.article->text));

    const size_t width = model.vocabulary.size() + 1; // bias last
    model.weights.assign(static_cast<size_t>(classes),
                         std::vector<double>(width, 0.0));

    const double scale = 1.0 / static_cast<double>(examples.size());
    std::vector<std::vector<double>> gradient(static_cast<size_t>(classes),
                                              std::vector<double>(width));
    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (auto& row : gradient) std::fill(row.begin(), row.end(), 0.0);
        double loss = 0.0;
        for (size_t i = 0; i < examples.size(); ++i) {
            const std::vector<double> p = softmax(scores_for(model, features[i]));
            const auto label = static_cast<size_t>(examples[i].label);
            loss -= std::log(std::max(p[label], 1e-300));
            for (size_t c = 0; c < p.size(); ++c) {
                const double g = (p[c] - (c == label ? 1.0 : 0.0)) * scale;
                for (const auto& [index, value] : features[i])
                    gradient[c][static_cast<size_t>(index)] += g * value;
                gradient[c][width - 1] += g;
            }
        }
        model.loss_trace.push_back(loss * scale);
        for (size_t c = 0; c < gradient.size(); ++c)
            for (size_t j = 0; j < width; ++j)
                model.weights[c][j] -= learning_rate * gradient[c][j];
    }
    return model;
}

std::vector<double> classifier_probabilities(const ClassifierModel& model,
                                             std::string_view article) {
    if (model.weights.empty())
        throw ValidationError("classifier_probabilities: model is untrained");
    return softmax(scores_for(model, featurize(model.vocabulary, article)));
}

PredictorOutput classifier_predict(const ClassifierModel& model,
                                   std::string_view article) {
    const std::vector<double> p = classifier_probabilities(model, article);
    const auto best = std::max_element(p.begin(), p.end());
    PredictorOutput out;
    out.cls = static_cast<int>(best - p.begin());
    out.probability = *best;
    out.probability_reported = true;
    return out;
}

} // namespace corrcast
