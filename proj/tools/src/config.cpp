#include "corrcast_cli/cli.hpp"

#include <cstdlib>
#include <fstream>

#include <fcntl.h>
#include <unistd.h>

#include <json.hpp>

#include "corrcast/errors.hpp"

namespace corrcast::cli {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
    return p.is_absolute() ? p : base / p;
}

MonthKey month_field(const json& obj, const char* key, const MonthKey& fallback) {
    if (!obj.contains(key)) return fallback;
    return parse_month(obj.at(key).get<std::string>());
}

Date date_field(const json& obj, const char* key, const Date& fallback) {
    if (!obj.contains(key)) return fallback;
    return parse_date(obj.at(key).get<std::string>());
}

CodingScheme parse_scheme(const std::string& label) {
    if (label == "original") return CodingScheme::ThreeLevel;
    if (label == "bins") return CodingScheme::ElevenBin;
    throw ValidationError("config: scheme '" + label +
                          "' is neither 'original' nor 'bins'");
}

Variant parse_variant(const std::string& label) {
    if (label == "v1") return Variant::V1;
    if (label == "v2") return Variant::V2;
    if (label == "v3") return Variant::V3;
    throw ValidationError("config: variant '" + label + "' is not v1/v2/v3");
}

void require_exists(const std::filesystem::path& p, const std::string& what) {
    if (!std::filesystem::exists(p))
        throw ValidationError("config: " + what + " does not exist: " +
                              p.string());
}

} // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("config file not found: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    const std::filesystem::path base = path.parent_path();
    RunConfig c;
    c.data_dir = resolve(base, doc.value("data_dir", std::string("data")));
    c.out_dir = resolve(base, doc.value("out_dir", std::string("out")));
    if (doc.contains("seed")) {
        c.seed = doc.at("seed").get<uint64_t>();
        c.seed_set = true;
    }

    if (doc.contains("price_sources"))
        for (const auto& [ticker, source] : doc.at("price_sources").items()) {
            const auto p = resolve(base, source.get<std::string>());
            require_exists(p, "price source for '" + ticker + "'");
            c.price_sources[ticker] = p;
        }

    if (doc.contains("corpus")) {
        const json& corpus = doc.at("corpus");
        if (corpus.contains("fetch")) {
            const json& fetch = corpus.at("fetch");
            c.fetch_enabled = true;
            c.fetch.url_template = fetch.at("url_template").get<std::string>();
            for (const auto& y : fetch.at("years"))
                c.fetch.years.push_back(y.get<int>());
            for (const auto& m : fetch.at("months"))
                c.fetch.issue_months.push_back(m.get<int>());
            for (const auto& d : fetch.at("districts"))
                c.fetch.districts.push_back(d.get<std::string>());
            c.fetch.politeness_delay =
                std::chrono::milliseconds(fetch.value("politeness_ms", 250));
            c.fetch.max_parallel = fetch.value("max_parallel", 4);
        } else if (corpus.contains("path")) {
            c.corpus_source = resolve(base, corpus.at("path").get<std::string>());
            require_exists(c.corpus_source, "corpus path");
        }
    }

    if (doc.contains("bond")) {
        const json& bond = doc.at("bond");
        c.bond_target = bond.value("target", std::string());
        if (bond.contains("candidates"))
            for (const auto& name : bond.at("candidates"))
                c.bond_candidates.push_back(name.get<std::string>());
        c.split_fraction = bond.value("split_fraction", 0.8);
        if (!(c.split_fraction > 0.0 && c.split_fraction < 1.0))
            throw ValidationError("config: bond.split_fraction must be in (0,1)");
    }

    if (doc.contains("pair")) {
        c.stock_ticker = doc.at("pair").value("stock", std::string());
        c.bond_ticker = doc.at("pair").value("bond", std::string());
    }
    if (doc.contains("realized")) {
        c.realized_first = month_field(doc.at("realized"), "first", c.realized_first);
        c.realized_last = month_field(doc.at("realized"), "last", c.realized_last);
        if (c.realized_last < c.realized_first)
            throw ValidationError("config: realized range is reversed");
    }

    if (doc.contains("predictor")) {
        const json& pred = doc.at("predictor");
        c.predictor_kind = pred.value("kind", c.predictor_kind);
        if (pred.contains("scheme"))
            c.scheme = parse_scheme(pred.at("scheme").get<std::string>());
        c.history_months = pred.value("history_months", c.history_months);
        c.baseline_span = pred.value("baseline_span", c.baseline_span);
        c.retry_cap = pred.value("retry_cap", c.retry_cap);
        c.backoff_ms = pred.value("backoff_ms", c.backoff_ms);
        c.max_segment_tokens =
            pred.value("max_segment_tokens", c.max_segment_tokens);
        c.endpoint_url = pred.value("endpoint", c.endpoint_url);
        c.model = pred.value("model", c.model);
        c.epochs = pred.value("epochs", c.epochs);
        c.learning_rate = pred.value("learning_rate", c.learning_rate);
        c.predict_first = month_field(pred, "first", c.predict_first);
        c.predict_last = month_field(pred, "last", c.predict_last);
        const std::string key_env =
            pred.value("api_key_env", std::string("CORRCAST_API_KEY"));
        if (const char* key = std::getenv(key_env.c_str())) c.api_key = key;
    }
    if (const char* url = std::getenv("CORRCAST_API_URL")) c.endpoint_url = url;

    if (doc.contains("backtest")) {
        const json& bt = doc.at("backtest");
        if (bt.contains("assets"))
            for (const auto& a : bt.at("assets"))
                c.backtest.assets.push_back(a.get<std::string>());
        c.backtest.start = date_field(bt, "start", c.backtest.start);
        c.backtest.end = date_field(bt, "end", c.backtest.end);
        c.backtest.vol_span = bt.value("vol_span", c.backtest.vol_span);
        c.backtest.target_vol = bt.value("target_vol", c.backtest.target_vol);
        c.backtest.annualization =
            bt.value("annualization", c.backtest.annualization);
        c.backtest.risk_free = bt.value("risk_free", c.backtest.risk_free);
        c.covid_cutoff = date_field(bt, "covid_cutoff", c.covid_cutoff);
        if (bt.contains("variant"))
            c.simulate_variant = parse_variant(bt.at("variant").get<std::string>());
    }
    c.backtest.history_months = c.history_months;

    if (doc.contains("stats")) {
        const json& stats = doc.at("stats");
        c.train_first = month_field(stats, "train_first", c.train_first);
        c.train_last = month_field(stats, "train_last", c.train_last);
        c.test_first = month_field(stats, "test_first", c.test_first);
        c.test_last = month_field(stats, "test_last", c.test_last);
        if (stats.contains("window_lengths")) {
            c.window_lengths.clear();
            for (const auto& n : stats.at("window_lengths"))
                c.window_lengths.push_back(n.get<int>());
        }
        c.normalized_rmse = stats.value("normalized", c.normalized_rmse);
    }
    if (c.train_last < c.train_first || c.test_last < c.test_first)
        throw ValidationError("config: stats period is reversed");
    for (int n : c.window_lengths)
        if (n < 1) throw ValidationError("config: window lengths must be >= 1");

    if (c.predictor_kind == "remote" && !c.seed_set)
        throw ValidationError(
            "config: seed is required when the remote predictor samples "
            "article segments");
    return c;
}

std::string prediction_filename(const std::string& kind, CodingScheme scheme,
                                int history_months, Variant variant) {
    return kind + "_" + to_string(scheme) + "_h" +
           std::to_string(history_months) + "_" + to_string(variant) + ".csv";
}

std::filesystem::path prices_dir(const RunConfig& config) {
    return config.data_dir / "prices";
}

std::filesystem::path predictions_dir(const RunConfig& config) {
    return config.out_dir / "predictions";
}

DirectoryLock::DirectoryLock(const std::filesystem::path& data_dir) {
    std::filesystem::create_directories(data_dir);
    path_ = data_dir / ".lock";
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        throw Error("data directory is locked by another invocation; remove " +
                    path_.string() + " if that run is gone");
    ::close(fd);
}

DirectoryLock::~DirectoryLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
}

} // namespace corrcast::cli
