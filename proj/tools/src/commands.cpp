#include "corrcast_cli/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include <json.hpp>

#include "corrcast/backtest.hpp"
#include "corrcast/classifier.hpp"
#include "corrcast/csv.hpp"
#include "corrcast/errors.hpp"
#include "corrcast/predictors.hpp"
#include "corrcast/remote.hpp"
#include "corrcast/stats.hpp"

namespace corrcast::cli {

namespace {

// Marks an artifact group as in flight; the marker survives a crash so a
// later run can see the group is incomplete.
class PartialMarker {
public:
    explicit PartialMarker(std::filesystem::path path) : path_(std::move(path)) {
        std::filesystem::create_directories(path_.parent_path());
        csv::write_file_if_changed(path_, "");
    }
    ~PartialMarker() {
        if (!committed_) return;
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    void commit() { committed_ = true; }

private:
    std::filesystem::path path_;
    bool committed_ = false;
};

std::filesystem::path corpus_path(const RunConfig& config) {
    return config.data_dir / "corpus.jsonl";
}

std::filesystem::path realized_path(const RunConfig& config) {
    return config.data_dir /
           ("realized_" + config.stock_ticker + "_" + config.bond_ticker + ".csv");
}

// The spliced reconstruction supersedes the raw series once it exists.
PriceSeries load_ingested_prices(const RunConfig& config, const std::string& ticker) {
    const auto dir = prices_dir(config);
    const auto spliced = dir / (ticker + "_spliced.csv");
    const auto raw = dir / (ticker + ".csv");
    const auto& path = std::filesystem::exists(spliced) ? spliced : raw;
    if (!std::filesystem::exists(path))
        throw ValidationError("no ingested prices for '" + ticker + "' (" +
                              raw.string() + "); run `corrcast ingest` first");
    PriceSeries series = load_price_csv(path);
    series.ticker = ticker;
    return series;
}

Corpus load_ingested_corpus(const RunConfig& config) {
    const auto path = corpus_path(config);
    if (!std::filesystem::exists(path))
        throw ValidationError("corpus store missing (" + path.string() +
                              "); run `corrcast ingest` first");
    return load_corpus_jsonl(path);
}

CorrelationSeries load_realized(const RunConfig& config) {
    const auto path = realized_path(config);
    if (!std::filesystem::exists(path))
        throw ValidationError("realized correlation series missing (" +
                              path.string() +
                              "); run `corrcast realized-corr` first");
    return load_correlation_csv(path);
}

std::vector<double> past_correlations(const CorrelationSeries& realized,
                                      const MonthKey& month, int history_months) {
    std::vector<double> past;
    for (int k = history_months; k >= 1; --k) {
        const auto it = realized.values.find(add_months(month, -k));
        if (it != realized.values.end()) past.push_back(it->second);
    }
    return past;
}

VariantSeries load_variant_series(const RunConfig& config, const std::string& kind,
                                  CodingScheme scheme, int history_months) {
    VariantSeries out;
    for (int v = 0; v < 3; ++v) {
        const auto path =
            predictions_dir(config) /
            prediction_filename(kind, scheme, history_months,
                                static_cast<Variant>(v + 1));
        if (!std::filesystem::exists(path))
            throw ValidationError(
                "prediction file missing: " + path.string() +
                "; run `corrcast predict` with predictor.kind=" + kind +
                ", scheme=" + to_string(scheme) +
                ", history_months=" + std::to_string(history_months));
        out[v] = load_correlation_csv(path);
    }
    return out;
}

nlohmann::json grid_to_json(const ExperimentGrid& grid) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : grid.cells)
        for (const auto& cell : row)
            rows.push_back({{"n", cell.n},
                            {"variant", to_string(cell.variant)},
                            {"t", cell.t},
                            {"df", cell.df},
                            {"p", cell.p},
                            {"windows_a", cell.size_a},
                            {"windows_b", cell.size_b}});
    return {{"hypothesis", grid.hypothesis},
            {"scheme", grid.scheme_label},
            {"cells", rows}};
}

void write_monthly_errors(const RunConfig& config, const std::string& name,
                          const VariantSeries& predicted,
                          const CorrelationSeries& realized, const MonthKey& first,
                          const MonthKey& last) {
    VariantSeries common;
    for (int v = 0; v < 3; ++v)
        common[v] = restrict_months(
            predicted[v],
            {&predicted[(v + 1) % 3], &predicted[(v + 2) % 3], &realized}, first,
            last);
    std::string out = "year,month,v1,v2,v3\n";
    for (const auto& [month, value] : common[0].values) {
        out += std::to_string(month.year) + "," + std::to_string(month.month);
        for (int v = 0; v < 3; ++v)
            out += "," + csv::format_double(common[v].values.at(month) -
                                            realized.values.at(month));
        out += "\n";
    }
    csv::write_file_if_changed(config.out_dir / "report" / name, out);
}

} // namespace

void cmd_ingest(const RunConfig& config) {
    DirectoryLock lock(config.data_dir);
    PartialMarker marker(config.data_dir / "ingest.partial");
    std::filesystem::create_directories(prices_dir(config));

    for (const auto& [ticker, source] : config.price_sources) {
        if (!std::filesystem::exists(source))
            throw ValidationError("price source for '" + ticker +
                                  "' missing: " + source.string() +
                                  "; fix price_sources in the config");
        PriceSeries series = load_price_csv(source);
        series.ticker = ticker;
        csv::write_file_if_changed(prices_dir(config) / (ticker + ".csv"),
                                   price_series_to_csv(series));
    }
    std::cout << "ingested " << config.price_sources.size() << " price series\n";

    if (config.fetch_enabled) {
        FetchReport report;
        const Corpus corpus = fetch_articles(config.fetch, &report);
        csv::write_file_if_changed(corpus_path(config), corpus_to_jsonl(corpus));
        std::cout << "fetched " << report.succeeded << "/" << report.attempted
                  << " articles\n";
        for (const auto& failure : report.failures)
            std::cerr << "fetch failed: " << failure.year << "-" << failure.month
                      << " " << failure.district << ": " << failure.message
                      << "\n";
    } else if (!config.corpus_source.empty()) {
        const Corpus corpus = load_corpus_jsonl(config.corpus_source);
        csv::write_file_if_changed(corpus_path(config), corpus_to_jsonl(corpus));
        std::cout << "normalized corpus of " << corpus.size() << " articles\n";
    }
    marker.commit();
}

void cmd_reconstruct_bond(const RunConfig& config) {
    DirectoryLock lock(config.data_dir);
    if (config.bond_target.empty() || config.bond_candidates.empty())
        throw ValidationError("config: bond.target and bond.candidates are "
                              "required for reconstruct-bond");
    PartialMarker marker(config.out_dir / "reconstruct_bond.partial");

    const PriceSeries target = load_ingested_prices(config, config.bond_target);
    std::map<std::string, PriceSeries> candidates;
    for (const auto& name : config.bond_candidates)
        candidates[name] = load_ingested_prices(config, name);

    const RegressionModel model =
        best_subset_bond_regression(candidates, target, config.split_fraction);

    std::cout << "selected predictors:";
    for (const auto& name : model.predictors) std::cout << " " << name;
    std::cout << "\nintercept: " << csv::format_double(model.intercept) << "\n";
    for (size_t i = 0; i < model.predictors.size(); ++i)
        std::cout << "  " << model.predictors[i] << ": "
                  << csv::format_double(model.coefficients[i]) << "\n";
    std::cout << "out-of-sample R^2: "
              << csv::format_double(model.out_of_sample_r2) << "\n";
    for (const auto& warning : model.warnings)
        std::cerr << "warning: " << warning << "\n";

    // Backfill every candidate date that precedes the target history.
    std::set<Date> before;
    for (const auto& name : model.predictors)
        for (const auto& point : candidates.at(name).observations)
            if (point.date < target.observations.front().date)
                before.insert(point.date);
    const std::vector<Date> dates(before.begin(), before.end());
    const PriceSeries spliced = backfill_prices(model, candidates, target, dates);
    csv::write_file_if_changed(
        prices_dir(config) / (config.bond_target + "_spliced.csv"),
        price_series_to_csv(spliced));
    std::cout << "spliced series: " << spliced.size() << " observations ("
              << dates.size() << " backfilled)\n";

    // In-sample fit residuals for the error-distribution plot.
    std::string errors = "date,actual,predicted,error\n";
    for (const auto& point : target.observations) {
        std::map<std::string, double> row;
        bool complete = true;
        for (const auto& name : model.predictors) {
            const auto value = candidates.at(name).value_on(point.date);
            if (!value) {
                complete = false;
                break;
            }
            row[name] = *value;
        }
        if (!complete) continue;
        const double predicted = model.predict(row);
        errors += to_string(point.date) + "," + csv::format_double(point.close) +
                  "," + csv::format_double(predicted) + "," +
                  csv::format_double(predicted - point.close) + "\n";
    }
    csv::write_file_if_changed(config.out_dir / "bond_regression_errors.csv",
                               errors);
    marker.commit();
}

void cmd_realized_corr(const RunConfig& config) {
    DirectoryLock lock(config.data_dir);
    if (config.stock_ticker.empty() || config.bond_ticker.empty())
        throw ValidationError("config: pair.stock and pair.bond are required");
    PartialMarker marker(config.data_dir / "realized.partial");

    const ReturnSeries stock =
        to_returns(load_ingested_prices(config, config.stock_ticker));
    const ReturnSeries bond =
        to_returns(load_ingested_prices(config, config.bond_ticker));
    CorrelationSeries realized = realized_correlation_series(
        stock, bond, config.realized_first, config.realized_last);
    realized.source = realized_path(config).stem().string();
    csv::write_file_if_changed(realized_path(config),
                               correlation_series_to_csv(realized));
    std::cout << "realized correlations for " << realized.size()
              << " months -> " << realized_path(config).string() << "\n";
    marker.commit();
}

void cmd_predict(const RunConfig& config) {
    DirectoryLock lock(config.data_dir);
    const std::string& kind = config.predictor_kind;
    if (kind != "baseline" && kind != "classifier" && kind != "remote")
        throw ValidationError("config: predictor.kind '" + kind +
                              "' is not baseline/classifier/remote");

    const CorrelationSeries realized = load_realized(config);
    Corpus corpus;
    if (kind != "baseline") corpus = load_ingested_corpus(config);

    std::unique_ptr<Predictor> predictor;
    std::unique_ptr<RemotePredictor> remote;
    if (kind == "baseline") {
        predictor = std::make_unique<BaselinePredictor>(config.baseline_span);
    } else if (kind == "classifier") {
        std::map<MonthKey, int> labels;
        for (const auto& [month, value] : realized.values)
            if (config.train_first <= month && month <= config.train_last)
                labels[month] = round_to_class(value, config.scheme);
        Corpus training;
        for (const auto& record : corpus.records)
            if (labels.count(MonthKey{record.year, record.month}))
                training.records.push_back(record);
        ClassifierModel model = train_classifier(
            training, labels, config.train_first, config.train_last,
            config.scheme, config.epochs, config.learning_rate);
        for (const auto& warning : model.warnings)
            std::cerr << "warning: " << warning << "\n";
        std::cout << "classifier: " << training.size() << " articles, loss "
                  << csv::format_double(model.loss_trace.front()) << " -> "
                  << csv::format_double(model.loss_trace.back()) << "\n";
        predictor = std::make_unique<ClassifierPredictor>(std::move(model));
    } else {
        if (config.endpoint_url.empty())
            throw ValidationError(
                "remote predictor needs an endpoint: set CORRCAST_API_URL or "
                "predictor.endpoint in the config");
        RemoteConfig rc;
        rc.endpoint_url = config.endpoint_url;
        rc.api_key = config.api_key;
        rc.model = config.model;
        rc.retry_cap = config.retry_cap;
        rc.initial_backoff = std::chrono::milliseconds(config.backoff_ms);
        rc.max_segment_tokens = config.max_segment_tokens;
        rc.transcript_path =
            config.data_dir / "transcripts" /
            ("remote_" + to_string(config.scheme) + ".jsonl");
        std::filesystem::create_directories(rc.transcript_path.parent_path());
        rc.seed = config.seed;
        remote = std::make_unique<RemotePredictor>(rc);
    }
    Predictor& engine = remote ? *remote : *predictor;

    std::filesystem::create_directories(predictions_dir(config));
    PartialMarker marker(predictions_dir(config) /
                         (kind + "_" + to_string(config.scheme) + "_h" +
                          std::to_string(config.history_months) + ".partial"));

    VariantSeries out;
    size_t predicted = 0, skipped = 0;
    for (MonthKey m = config.predict_first; m <= config.predict_last;
         m = add_months(m, 1)) {
        std::vector<std::string> articles;
        if (kind == "baseline") {
            articles.push_back("");
        } else {
            const auto issue = latest_issue_on_or_before(corpus, m);
            if (!issue) {
                ++skipped;
                continue;
            }
            for (const auto& record :
                 articles_for_month(corpus, issue->year, issue->month))
                articles.push_back(record.text);
        }
        PromptContext context;
        context.year = m.year;
        context.scheme = config.scheme;
        context.past_correlations =
            past_correlations(realized, m, config.history_months);

        std::vector<PredictorOutput> answers;
        for (const auto& article : articles) {
            context.article = article;
            try {
                if (const auto output = engine.predict(context))
                    answers.push_back(*output);
            } catch (const InsufficientDataError&) {
                // Baseline with an empty history: the month is a gap.
            }
        }
        if (answers.empty()) {
            ++skipped;
            continue;
        }
        for (int v = 0; v < 3; ++v) {
            std::vector<double> values;
            for (const auto& answer : answers)
                values.push_back(strength_scaled(
                    class_to_correlation(answer.cls, config.scheme),
                    answer.probability, static_cast<Variant>(v + 1)));
            out[v].values[m] = aggregate_month(values);
        }
        ++predicted;
    }

    for (int v = 0; v < 3; ++v) {
        const std::string name = prediction_filename(
            kind, config.scheme, config.history_months, static_cast<Variant>(v + 1));
        out[v].source = std::filesystem::path(name).stem().string();
        csv::write_file_if_changed(predictions_dir(config) / name,
                                   correlation_series_to_csv(out[v]));
    }
    marker.commit();
    std::cout << kind << ": " << predicted << " months predicted, " << skipped
              << " skipped\n";
    if (remote)
        std::cout << "remote: " << remote->http_requests()
                  << " HTTP calls (rest served from the transcript)\n";
}

void cmd_simulate(const RunConfig& config) {
    DirectoryLock lock(config.data_dir);
    const BacktestConfig& bt = config.backtest;
    if (bt.assets.size() < 2)
        throw ValidationError("config: backtest.assets needs at least 2 entries");
    if (!(bt.start < config.covid_cutoff && config.covid_cutoff < bt.end))
        throw DomainError("simulate: covid cutoff must lie strictly inside the "
                          "backtest range");

    std::map<std::string, PriceSeries> prices;
    for (const auto& asset : bt.assets)
        prices[asset] = load_ingested_prices(config, asset);

    const auto pair_matches = [&](const std::string& a, const std::string& b) {
        return (a == config.stock_ticker && b == config.bond_ticker) ||
               (a == config.bond_ticker && b == config.stock_ticker);
    };
    const auto series_fn = [&](CorrelationSeries series) {
        return [series = std::move(series), pair_matches](
                   const std::string& a, const std::string& b, const MonthKey& m,
                   const std::vector<double>&) -> std::optional<double> {
            if (!pair_matches(a, b)) return std::nullopt;
            const auto it = series.values.find(m);
            if (it == series.values.end()) return std::nullopt;
            return it->second;
        };
    };

    std::map<std::string, PairPredictionFn> strategies;
    strategies["baseline"] = [&](const std::string&, const std::string&,
                                 const MonthKey&,
                                 const std::vector<double>& past)
        -> std::optional<double> {
        try {
            const PredictorOutput output =
                baseline_predict(past, config.baseline_span, config.scheme);
            return class_to_correlation(output.cls, config.scheme);
        } catch (const InsufficientDataError&) {
            return std::nullopt;
        }
    };
    for (const std::string kind : {"classifier", "remote"}) {
        const auto path = predictions_dir(config) /
                          prediction_filename(kind, config.scheme,
                                              config.history_months,
                                              config.simulate_variant);
        if (!std::filesystem::exists(path))
            throw ValidationError("prediction file missing: " + path.string() +
                                  "; run `corrcast predict` with predictor.kind=" +
                                  kind);
        strategies[kind] = series_fn(load_correlation_csv(path));
    }

    const auto backtest_dir = config.out_dir / "backtest";
    PartialMarker marker(backtest_dir / "simulate.partial");
    std::string table = "strategy,pre_covid,post_covid\n";
    nlohmann::json summary;
    for (const auto& [name, fn] : strategies) {
        const BacktestResult result = run_backtest(bt, prices, fn);
        for (const auto& line : result.log) std::cerr << name << ": " << line << "\n";
        const auto [pre, post] = split_periods(result, config.covid_cutoff);
        const auto sharpe_pre = pre.sharpe(bt.annualization);
        const auto sharpe_post = post.sharpe(bt.annualization);

        csv::write_file_if_changed(backtest_dir / (name + "_values.csv"),
                                   backtest_values_to_csv(result));
        csv::write_file_if_changed(backtest_dir / (name + "_weights.csv"),
                                   backtest_weights_to_csv(result));
        const auto cell = [](const std::optional<double>& s) {
            return s ? csv::format_double(*s) : std::string("n/a");
        };
        table += name + "," + cell(sharpe_pre) + "," + cell(sharpe_post) + "\n";

        size_t fallbacks = 0;
        for (const auto& record : result.rebalances)
            fallbacks += record.used_fallback ? 1 : 0;
        summary[name] = {
            {"pnl", result.pnl()},
            {"pre_covid",
             {{"pnl", pre.pnl()},
              {"sharpe", sharpe_pre ? nlohmann::json(*sharpe_pre)
                                    : nlohmann::json()}}},
            {"post_covid",
             {{"pnl", post.pnl()},
              {"sharpe", sharpe_post ? nlohmann::json(*sharpe_post)
                                     : nlohmann::json()}}},
            {"rebalances", result.rebalances.size()},
            {"fallback_months", fallbacks}};
    }
    csv::write_file_if_changed(backtest_dir / "sharpe_table.csv", table);
    csv::write_file_if_changed(backtest_dir / "summary.json", summary.dump(2) + "\n");
    marker.commit();
    std::cout << table;
}

void cmd_test(const RunConfig& config) {
    DirectoryLock lock(config.data_dir);
    const CorrelationSeries realized = load_realized(config);
    const auto tests_dir = config.out_dir / "tests";
    PartialMarker marker(tests_dir / "tests.partial");

    PeriodSplit split;
    split.train_first = config.train_first;
    split.train_last = config.train_last;
    split.test_first = config.test_first;
    split.test_last = config.test_last;

    nlohmann::json archive = nlohmann::json::array();
    const auto emit = [&](const std::string& name, const ExperimentGrid& grid) {
        csv::write_file_if_changed(tests_dir / (name + ".csv"), grid_to_csv(grid));
        archive.push_back(grid_to_json(grid));
        std::cout << "wrote " << (tests_dir / (name + ".csv")).string() << "\n";
    };

    for (const CodingScheme scheme :
         {CodingScheme::ThreeLevel, CodingScheme::ElevenBin}) {
        const std::string label = to_string(scheme);
        const VariantSeries remote_h =
            load_variant_series(config, "remote", scheme, config.history_months);
        const VariantSeries remote_h0 =
            load_variant_series(config, "remote", scheme, 0);
        const VariantSeries classifier_h = load_variant_series(
            config, "classifier", scheme, config.history_months);

        emit("lookahead_" + label,
             experiment_lookahead(remote_h, realized, split, label,
                                  config.window_lengths, config.normalized_rmse));
        emit("history_" + label,
             experiment_history(remote_h0, remote_h, realized, config.train_first,
                                config.test_last, label, config.window_lengths,
                                config.normalized_rmse));
        emit("model_train_" + label,
             experiment_model_comparison(remote_h, classifier_h, realized,
                                         config.train_first, config.train_last,
                                         label, config.window_lengths,
                                         config.normalized_rmse));
        emit("model_test_" + label,
             experiment_model_comparison(remote_h, classifier_h, realized,
                                         config.test_first, config.test_last,
                                         label, config.window_lengths,
                                         config.normalized_rmse));
    }
    csv::write_file_if_changed(tests_dir / "tests.json", archive.dump(2) + "\n");
    marker.commit();
}

void cmd_report(const RunConfig& config) {
    DirectoryLock lock(config.data_dir);
    const CorrelationSeries realized = load_realized(config);
    PartialMarker marker(config.out_dir / "report" / "report.partial");

    for (const CodingScheme scheme :
         {CodingScheme::ThreeLevel, CodingScheme::ElevenBin}) {
        const std::string label = to_string(scheme);
        const VariantSeries remote_h =
            load_variant_series(config, "remote", scheme, config.history_months);
        const VariantSeries remote_h0 =
            load_variant_series(config, "remote", scheme, 0);
        const VariantSeries classifier_h = load_variant_series(
            config, "classifier", scheme, config.history_months);

        write_monthly_errors(config, "errors_lookahead_" + label + ".csv",
                             remote_h, realized, config.train_first,
                             config.test_last);
        write_monthly_errors(config, "errors_history_" + label + ".csv",
                             remote_h0, realized, config.train_first,
                             config.test_last);
        write_monthly_errors(config, "errors_model_train_" + label + ".csv",
                             classifier_h, realized, config.train_first,
                             config.train_last);
        write_monthly_errors(config, "errors_model_test_" + label + ".csv",
                             classifier_h, realized, config.test_first,
                             config.test_last);
    }

    for (const std::string name : {"baseline", "classifier", "remote"}) {
        const auto source = config.out_dir / "backtest" / (name + "_values.csv");
        if (!std::filesystem::exists(source)) {
            std::cout << "note: no value path for '" << name
                      << "' (run `corrcast simulate`)\n";
            continue;
        }
        const BacktestResult values = load_backtest_values(source);
        csv::write_file_if_changed(config.out_dir / "report" /
                                       ("values_" + name + ".csv"),
                                   backtest_values_to_csv(values));
    }
    marker.commit();
    std::cout << "report bundle -> " << (config.out_dir / "report").string()
              << "\n";
}

} // namespace corrcast::cli
