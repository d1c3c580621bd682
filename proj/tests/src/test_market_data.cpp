#include <doctest.h>

#include <cmath>
#include <string>

#include "corrcast/csv.hpp"
#include "corrcast/errors.hpp"
#include "corrcast/market_data.hpp"
#include "corrcast/rng.hpp"
#include "test_support.hpp"

using namespace corrcast;
using corrcast::testing::TempDir;
using corrcast::testing::write_text;

namespace {

// Reference EWMA volatility computed the long way: normalized decay weights
// over the returns strictly before as_of, weighted mean removed, biased
// weighted variance. Written against the definition, not the library.
double ewma_vol_reference(const std::vector<double>& past, int span) {
    const double alpha = 2.0 / (span + 1.0);
    std::vector<double> w(past.size());
    double total = 0.0;
    for (size_t k = 0; k < past.size(); ++k) {
        // k = 0 is the most recent return, which sits at the back of `past`.
        w[k] = std::pow(1.0 - alpha, static_cast<double>(k));
        total += w[k];
    }
    double mean = 0.0;
    for (size_t k = 0; k < past.size(); ++k)
        mean += w[k] / total * past[past.size() - 1 - k];
    double var = 0.0;
    for (size_t k = 0; k < past.size(); ++k) {
        const double d = past[past.size() - 1 - k] - mean;
        var += w[k] / total * d * d;
    }
    return std::sqrt(var);
}

} // namespace

TEST_CASE("load_price_csv normalizes and validates") {
    TempDir dir;
    SUBCASE("rows are sorted by date") {
        write_text(dir / "p.csv",
                   "date,close\n2020-01-03,11\n2020-01-02,10\n2020-01-06,12\n");
        const PriceSeries s = load_price_csv(dir / "p.csv");
        REQUIRE(s.size() == 3);
        CHECK(s.observations[0].date == Date{2020, 1, 2});
        CHECK(s.observations[0].close == 10.0);
        CHECK(s.observations[2].date == Date{2020, 1, 6});
        CHECK(s.value_on(Date{2020, 1, 3}) == 11.0);
        CHECK_FALSE(s.value_on(Date{2020, 1, 4}).has_value());
    }
    SUBCASE("header is mandatory") {
        write_text(dir / "h.csv", "2020-01-02,10\n");
        CHECK_THROWS_AS(load_price_csv(dir / "h.csv"), ParseError);
    }
    SUBCASE("duplicate dates rejected") {
        write_text(dir / "d.csv", "date,close\n2020-01-02,10\n2020-01-02,11\n");
        CHECK_THROWS_AS(load_price_csv(dir / "d.csv"), ValidationError);
    }
    SUBCASE("nonpositive prices rejected") {
        write_text(dir / "z.csv", "date,close\n2020-01-02,0\n");
        CHECK_THROWS_AS(load_price_csv(dir / "z.csv"), ValidationError);
        write_text(dir / "n.csv", "date,close\n2020-01-02,-3\n");
        CHECK_THROWS_AS(load_price_csv(dir / "n.csv"), ValidationError);
    }
    SUBCASE("malformed row names its line") {
        write_text(dir / "m.csv", "date,close\n2020-01-02,10\nnot-a-row\n");
        try {
            load_price_csv(dir / "m.csv");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("3") != std::string::npos);
        }
    }
    SUBCASE("round-trips through price_series_to_csv") {
        write_text(dir / "r.csv",
                   "date,close\n2020-01-02,10.25\n2020-01-03,11.5\n");
        const PriceSeries s = load_price_csv(dir / "r.csv");
        write_text(dir / "r2.csv", price_series_to_csv(s));
        const PriceSeries t = load_price_csv(dir / "r2.csv");
        REQUIRE(t.size() == s.size());
        for (size_t i = 0; i < s.size(); ++i) {
            CHECK(t.observations[i].date == s.observations[i].date);
            CHECK(t.observations[i].close == s.observations[i].close);
        }
    }
}

TEST_CASE("to_returns computes simple daily changes") {
    PriceSeries p;
    p.observations = {{Date{2020, 1, 2}, 100.0},
                      {Date{2020, 1, 3}, 102.0},
                      {Date{2020, 1, 6}, 96.9}};
    const ReturnSeries r = to_returns(p);
    REQUIRE(r.size() == 2);
    CHECK(r.observations[0].date == Date{2020, 1, 3});
    CHECK(r.observations[0].value == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(r.observations[1].value == doctest::Approx(-0.05).epsilon(1e-12));

    PriceSeries one;
    one.observations = {{Date{2020, 1, 2}, 100.0}};
    CHECK_THROWS_AS(to_returns(one), InsufficientDataError);
}

TEST_CASE("ewma_volatility matches the direct-sum reference") {
    const auto dates = testing::weekdays(Date{2019, 1, 1}, Date{2020, 12, 31});
    Rng rng(101);
    ReturnSeries returns;
    for (const Date& d : dates)
        returns.observations.push_back({d, 0.01 * rng.normal()});

    for (int span : {2, 5, 20, 60}) {
        const Date as_of = Date{2020, 7, 1};
        std::vector<double> past;
        for (const auto& obs : returns.observations)
            if (obs.date < as_of) past.push_back(obs.value);
        REQUIRE(static_cast<int>(past.size()) >= span);
        CHECK(ewma_volatility(returns, span, as_of) ==
              doctest::Approx(ewma_vol_reference(past, span)).epsilon(1e-12));
    }
}

TEST_CASE("ewma_volatility ignores data on and after as_of") {
    Rng rng(55);
    ReturnSeries returns;
    const auto dates = testing::weekdays(Date{2020, 1, 1}, Date{2020, 6, 30});
    for (const Date& d : dates)
        returns.observations.push_back({d, 0.01 * rng.normal()});

    const Date as_of{2020, 4, 1};
    const double before = ewma_volatility(returns, 10, as_of);
    ReturnSeries tampered = returns;
    for (auto& obs : tampered.observations)
        if (!(obs.date < as_of)) obs.value = 9.9;
    CHECK(ewma_volatility(tampered, 10, as_of) == before);
}

TEST_CASE("ewma_volatility needs span observations before as_of") {
    ReturnSeries returns;
    const auto dates = testing::weekdays(Date{2020, 1, 1}, Date{2020, 1, 14});
    for (size_t i = 0; i < dates.size(); ++i)
        returns.observations.push_back({dates[i], 0.001 * (i + 1)});
    REQUIRE(returns.size() == 10);

    CHECK_NOTHROW(ewma_volatility(returns, 10, Date{2020, 2, 1}));
    CHECK_THROWS_AS(ewma_volatility(returns, 11, Date{2020, 2, 1}),
                    InsufficientDataError);
    CHECK_THROWS_AS(ewma_volatility(returns, 10, dates.back()),
                    InsufficientDataError);
}

namespace {

PriceSeries series_on(const std::vector<Date>& dates,
                      const std::function<double(size_t)>& f) {
    PriceSeries s;
    for (size_t i = 0; i < dates.size(); ++i)
        s.observations.push_back({dates[i], f(i)});
    return s;
}

} // namespace

TEST_CASE("best subset recovers a planted exact fit") {
    const auto dates = testing::weekdays(Date{2020, 1, 1}, Date{2020, 3, 15});
    Rng rng(3);
    std::vector<double> a(dates.size()), b(dates.size()), noise(dates.size());
    for (size_t i = 0; i < dates.size(); ++i) {
        a[i] = 50.0 + 10.0 * rng.uniform();
        b[i] = 80.0 + 10.0 * rng.uniform();
        noise[i] = 30.0 + 10.0 * rng.uniform();
    }
    std::map<std::string, PriceSeries> candidates;
    candidates["alpha"] = series_on(dates, [&](size_t i) { return a[i]; });
    candidates["beta"] = series_on(dates, [&](size_t i) { return b[i]; });
    candidates["noise"] = series_on(dates, [&](size_t i) { return noise[i]; });
    const PriceSeries target = series_on(
        dates, [&](size_t i) { return 2.0 * a[i] - 0.5 * b[i] + 7.0; });

    const RegressionModel model =
        best_subset_bond_regression(candidates, target, 0.8);
    REQUIRE(model.predictors == std::vector<std::string>{"alpha", "beta"});
    CHECK(model.out_of_sample_r2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(model.coefficients[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(model.coefficients[1] == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(model.intercept == doctest::Approx(7.0).epsilon(1e-9));

    std::map<std::string, double> row{{"alpha", 60.0}, {"beta", 90.0}};
    CHECK(model.predict(row) == doctest::Approx(82.0).epsilon(1e-9));
    CHECK_THROWS_AS(model.predict({{"alpha", 60.0}}), GapError);
}

TEST_CASE("best subset ties break to fewer predictors then names") {
    const auto dates = testing::weekdays(Date{2020, 1, 1}, Date{2020, 2, 28});
    Rng rng(9);
    std::vector<double> a(dates.size());
    for (auto& v : a) v = 100.0 + 20.0 * rng.uniform();

    std::map<std::string, PriceSeries> twins;
    twins["d1"] = series_on(dates, [&](size_t i) { return a[i]; });
    twins["d2"] = series_on(dates, [&](size_t i) { return a[i]; });
    const PriceSeries target = series_on(dates, [&](size_t i) { return a[i]; });

    const RegressionModel model = best_subset_bond_regression(twins, target, 0.8);
    // {d1} and {d2} both fit exactly; {d1,d2} is singular and skipped.
    CHECK(model.predictors == std::vector<std::string>{"d1"});
    CHECK(model.out_of_sample_r2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(model.warnings.empty());
}

TEST_CASE("best subset input validation") {
    const auto dates = testing::weekdays(Date{2020, 1, 1}, Date{2020, 1, 31});
    std::map<std::string, PriceSeries> candidates;
    candidates["a"] = series_on(dates, [](size_t i) { return 10.0 + i; });

    SUBCASE("disjoint dates -> AlignmentError") {
        const auto other = testing::weekdays(Date{2021, 1, 1}, Date{2021, 1, 31});
        const PriceSeries target = series_on(other, [](size_t i) { return 5.0 + i; });
        CHECK_THROWS_AS(best_subset_bond_regression(candidates, target, 0.8),
                        AlignmentError);
    }
    SUBCASE("more than 12 candidates -> DomainError") {
        std::map<std::string, PriceSeries> many;
        for (int k = 0; k < 13; ++k)
            many["c" + std::to_string(k)] =
                series_on(dates, [&](size_t i) { return 10.0 + i + k; });
        const PriceSeries target = series_on(dates, [](size_t i) { return 9.0 + i; });
        CHECK_THROWS_AS(best_subset_bond_regression(many, target, 0.8),
                        DomainError);
    }
    SUBCASE("single common date leaves a split side empty") {
        PriceSeries target;
        target.observations = {{dates[0], 10.0}};
        CHECK_THROWS_AS(best_subset_bond_regression(candidates, target, 0.8),
                        InsufficientDataError);
    }
    SUBCASE("constant target in the test segment skips every subset") {
        const PriceSeries target = series_on(dates, [](size_t) { return 42.0; });
        CHECK_THROWS_AS(best_subset_bond_regression(candidates, target, 0.8),
                        ConditioningError);
    }
}

TEST_CASE("backfill_prices splices predicted history under the target") {
    const auto past = testing::weekdays(Date{2019, 11, 1}, Date{2019, 12, 31});
    const auto overlap = testing::weekdays(Date{2020, 1, 1}, Date{2020, 2, 28});
    std::vector<Date> all = past;
    all.insert(all.end(), overlap.begin(), overlap.end());

    Rng rng(17);
    std::vector<double> a(all.size());
    for (auto& v : a) v = 40.0 + 10.0 * rng.uniform();
    std::map<std::string, PriceSeries> candidates;
    candidates["a"] = series_on(all, [&](size_t i) { return a[i]; });

    PriceSeries target;
    for (size_t i = past.size(); i < all.size(); ++i)
        target.observations.push_back({all[i], 3.0 * a[i] + 1.0});

    const RegressionModel model =
        best_subset_bond_regression(candidates, target, 0.8);
    REQUIRE(model.predictors == std::vector<std::string>{"a"});

    const PriceSeries spliced = backfill_prices(model, candidates, target, past);
    REQUIRE(spliced.size() == all.size());
    for (size_t i = 0; i < past.size(); ++i)
        CHECK(spliced.observations[i].close ==
              doctest::Approx(3.0 * a[i] + 1.0).epsilon(1e-9));
    // The original target wins on its own dates.
    for (size_t i = past.size(); i < all.size(); ++i)
        CHECK(spliced.observations[i].close ==
              target.observations[i - past.size()].close);

    SUBCASE("missing candidate date -> GapError naming it") {
        std::vector<Date> with_gap = past;
        with_gap.push_back(Date{2019, 10, 1}); // before candidate history
        try {
            backfill_prices(model, candidates, target, with_gap);
            FAIL("expected GapError");
        } catch (const GapError& e) {
            CHECK(std::string(e.what()).find("2019-10-01") != std::string::npos);
            CHECK(std::string(e.what()).find("a") != std::string::npos);
        }
    }
}

TEST_CASE("backfill_prices rejects nonpositive predicted levels") {
    const auto dates = testing::weekdays(Date{2020, 1, 1}, Date{2020, 2, 28});
    std::map<std::string, PriceSeries> candidates;
    candidates["a"] = series_on(dates, [](size_t i) { return 10.0 + i; });

    // Target = 100 - 2*a turns negative once a grows past 50.
    PriceSeries target;
    for (size_t i = 0; i < 10; ++i)
        target.observations.push_back(
            {dates[dates.size() - 10 + i],
             100.0 - 2.0 * (10.0 + dates.size() - 10 + i)});
    for (auto& obs : target.observations) obs.close += 200.0; // keep positive

    const RegressionModel model =
        best_subset_bond_regression(candidates, target, 0.8);
    // Early dates have small a, so predicted = 300 - 2a stays positive; build
    // a deliberately negative prediction instead.
    RegressionModel bad = model;
    bad.intercept = -1000.0;
    CHECK_THROWS_AS(
        backfill_prices(bad, candidates, target, {dates[0], dates[1]}),
        ValidationError);
}
