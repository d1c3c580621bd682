#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "corrcast/corpus.hpp"
#include "corrcast/correlation.hpp"
#include "corrcast/predictors.hpp"

namespace corrcast {

// Multinomial logistic regression over token-frequency features, the
// trainable stand-in for a transformer classifier behind the Predictor
// contract.
struct ClassifierModel {
    std::map<std::string, int> vocabulary; // token -> feature index
    // One row per class: vocabulary.size() weights followed by the bias.
    std::vector<std::vector<double>> weights;
    CodingScheme scheme = CodingScheme::ThreeLevel;
    MonthKey window_start{};
    MonthKey window_end{};
    std::vector<double> loss_trace; // mean cross-entropy per epoch, pre-step
    std::vector<std::string> warnings;

    int classes() const { return static_cast<int>(weights.size()); }
};

// Full-batch gradient descent from zero weights for `epochs` steps; fully
// deterministic. Articles with issue month inside [window_start, window_end]
// train; each takes its month's label. Throws ValidationError when a
// training month has no label, InsufficientDataError when no article falls
// in the window. Classes absent from the training data are retained with a
// warning.
ClassifierModel train_classifier(const Corpus& corpus,
                                 const std::map<MonthKey, int>& labels,
                                 const MonthKey& window_start,
                                 const MonthKey& window_end, CodingScheme scheme,
                                 int epochs = 10, double learning_rate = 0.5);

// Argmax class with its softmax probability; out-of-vocabulary tokens are
// ignored.
PredictorOutput classifier_predict(const ClassifierModel& model,
                                   std::string_view article);

// Per-class softmax probabilities, summing to 1.
std::vector<double> classifier_probabilities(const ClassifierModel& model,
                                             std::string_view article);

// Predictor wrapper; reads only context.article.
class ClassifierPredictor : public Predictor {
public:
    explicit ClassifierPredictor(ClassifierModel model) : model_(std::move(model)) {}

    std::string name() const override { return "classifier"; }
    std::optional<PredictorOutput> predict(const PromptContext& context) override {
        return classifier_predict(model_, context.article);
    }

    const ClassifierModel& model() const { return model_; }

private:
    ClassifierModel model_;
};

} // namespace corrcast
