#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "corrcast/backtest.hpp"
#include "corrcast/corpus.hpp"
#include "corrcast/correlation.hpp"
#include "corrcast/date.hpp"

namespace corrcast::cli {

// Everything a run needs, loaded from one JSON config file. Secrets never
// live here: the API key comes from the environment variable named in the
// config, the endpoint may be overridden by CORRCAST_API_URL.
struct RunConfig {
    std::filesystem::path data_dir = "data";
    std::filesystem::path out_dir = "out";
    uint64_t seed = 0;
    bool seed_set = false;

    std::map<std::string, std::filesystem::path> price_sources;
    std::filesystem::path corpus_source; // normalized into the data dir
    bool fetch_enabled = false;
    FetchConfig fetch;

    std::string bond_target;
    std::vector<std::string> bond_candidates;
    double split_fraction = 0.8;

    std::string stock_ticker;
    std::string bond_ticker;
    MonthKey realized_first{1980, 1};
    MonthKey realized_last{2024, 6};

    std::string predictor_kind = "baseline"; // baseline | classifier | remote
    CodingScheme scheme = CodingScheme::ThreeLevel;
    int history_months = 3;
    int baseline_span = 3;
    int retry_cap = 3;
    int backoff_ms = 100;
    size_t max_segment_tokens = 512;
    std::string endpoint_url;
    std::string api_key;
    std::string model = "gpt-3.5-turbo";
    int epochs = 10;
    double learning_rate = 0.5;
    MonthKey predict_first{1980, 1};
    MonthKey predict_last{2024, 6};

    BacktestConfig backtest;
    Date covid_cutoff{2020, 1, 1};
    Variant simulate_variant = Variant::V1;

    MonthKey train_first{1980, 1};
    MonthKey train_last{2021, 9};
    MonthKey test_first{2021, 10};
    MonthKey test_last{2024, 6};
    std::vector<int> window_lengths = {1, 3, 6, 12};
    bool normalized_rmse = true;
};

// Parses and validates the config; every referenced input path must exist.
// Relative paths resolve against the config file's directory. Flags merged
// by the caller override file values.
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical artifact names shared by the commands.
std::string prediction_filename(const std::string& kind, CodingScheme scheme,
                                int history_months, Variant variant);
std::filesystem::path prices_dir(const RunConfig& config);
std::filesystem::path predictions_dir(const RunConfig& config);

// Serializes commands against one data directory. Throws when the lock is
// already held; releases on destruction.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& data_dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    std::filesystem::path path_;
};

// Command bodies behind the CLI verbs; each validates its inputs, emits its
// artifacts idempotently, and throws corrcast errors on failure.
void cmd_ingest(const RunConfig& config);
void cmd_reconstruct_bond(const RunConfig& config);
void cmd_realized_corr(const RunConfig& config);
void cmd_predict(const RunConfig& config);
void cmd_simulate(const RunConfig& config);
void cmd_test(const RunConfig& config);
void cmd_report(const RunConfig& config);

// Dispatch used by main and by end-to-end tests; returns the process exit
// status and reports errors on stderr.
int run_cli(int argc, const char* const* argv);

} // namespace corrcast::cli
