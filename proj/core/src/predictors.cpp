#include "corrcast/predictors.hpp"

#include "corrcast/errors.hpp"

namespace corrcast {

PredictorOutput baseline_predict(const std::vector<double>& history, int span,
                                 CodingScheme scheme) {
    if (history.empty())
        throw InsufficientDataError("baseline_predict: empty correlation history");
    if (span < 1) throw DomainError("baseline_predict: span must be >= 1");

    const double alpha = 2.0 / (span + 1.0);
    const double decay = 1.0 - alpha;
    double weight = 1.0; // (1-alpha)^k, k = 0 at the most recent value
    double total = 0.0, mean = 0.0;
    for (size_t k = 0; k < history.size(); ++k) {
        total += weight;
        mean += weight * history[history.size() - 1 - k];
        weight *= decay;
    }
    mean /= total;

    PredictorOutput out;
    out.cls = round_to_class(mean, scheme);
    out.probability = 1.0;
    out.probability_reported = true;
    return out;
}

std::optional<PredictorOutput> BaselinePredictor::predict(
    const PromptContext& context) {
    return baseline_predict(context.past_correlations, span_, context.scheme);
}

} // namespace corrcast
