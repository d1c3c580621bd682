#include "corrcast_cli/cli.hpp"

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "corrcast/errors.hpp"

namespace corrcast::cli {

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"corrcast: text-driven stock/bond correlation forecasts"};
    app.require_subcommand(1);

    std::string config_path = "corrcast.json";
    app.add_option("--config", config_path, "run configuration file")
        ->capture_default_str();
    uint64_t seed = 0;
    CLI::Option* seed_opt =
        app.add_option("--seed", seed, "root seed, overrides the config");

    std::string predictor_flag, scheme_flag, from_flag, to_flag;
    int history_flag = -1;

    CLI::App* ingest = app.add_subcommand("ingest", "normalize price and corpus stores");
    CLI::App* reconstruct =
        app.add_subcommand("reconstruct-bond", "best-subset index reconstruction");
    CLI::App* realized =
        app.add_subcommand("realized-corr", "realized monthly correlations");
    CLI::App* predict =
        app.add_subcommand("predict", "emit predicted correlation series");
    predict->add_option("--predictor", predictor_flag,
                        "baseline | classifier | remote");
    predict->add_option("--scheme", scheme_flag, "original | bins");
    predict->add_option("--history", history_flag,
                        "months of realized history in the prompt");
    predict->add_option("--from", from_flag, "first month, YYYY-MM");
    predict->add_option("--to", to_flag, "last month, YYYY-MM");
    CLI::App* simulate =
        app.add_subcommand("simulate", "minimum-variance backtests + Sharpe table");
    CLI::App* test = app.add_subcommand("test", "hypothesis-test tables");
    CLI::App* report = app.add_subcommand("report", "plot-data bundle");
    for (CLI::App* sub : {ingest, reconstruct, realized, predict, simulate, test, report})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunConfig config = load_run_config(config_path);
        if (seed_opt->count()) {
            config.seed = seed;
            config.seed_set = true;
        }
        if (!predictor_flag.empty()) config.predictor_kind = predictor_flag;
        if (!scheme_flag.empty()) {
            if (scheme_flag == "original")
                config.scheme = CodingScheme::ThreeLevel;
            else if (scheme_flag == "bins")
                config.scheme = CodingScheme::ElevenBin;
            else
                throw ValidationError("--scheme must be 'original' or 'bins'");
        }
        if (history_flag >= 0) {
            config.history_months = history_flag;
            config.backtest.history_months = history_flag;
        }
        if (!from_flag.empty()) config.predict_first = parse_month(from_flag);
        if (!to_flag.empty()) config.predict_last = parse_month(to_flag);
        if (config.predictor_kind == "remote" && !config.seed_set)
            throw ValidationError("remote predictions sample article segments; "
                                  "pass --seed or set seed in the config");

        if (ingest->parsed()) cmd_ingest(config);
        if (reconstruct->parsed()) cmd_reconstruct_bond(config);
        if (realized->parsed()) cmd_realized_corr(config);
        if (predict->parsed()) cmd_predict(config);
        if (simulate->parsed()) cmd_simulate(config);
        if (test->parsed()) cmd_test(config);
        if (report->parsed()) cmd_report(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace corrcast::cli
