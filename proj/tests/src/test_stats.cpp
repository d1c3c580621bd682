#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "corrcast/errors.hpp"
#include "corrcast/rng.hpp"
#include "corrcast/stats.hpp"

using namespace corrcast;

namespace {

CorrelationSeries series_from(const MonthKey& first,
                              const std::vector<double>& values) {
    CorrelationSeries out;
    MonthKey m = first;
    for (double v : values) {
        out.values[m] = v;
        m = add_months(m, 1);
    }
    return out;
}

// Shared synthetic ground truth for the experiment controls.
CorrelationSeries smooth_realized(const MonthKey& first, int months) {
    CorrelationSeries out;
    MonthKey m = first;
    for (int k = 0; k < months; ++k) {
        out.values[m] = 0.3 * std::sin(0.21 * k) + 0.1 * std::cos(0.05 * k);
        m = add_months(m, 1);
    }
    return out;
}

CorrelationSeries with_noise(const CorrelationSeries& realized, double sigma,
                             uint64_t seed, const std::string& label) {
    Rng rng = Rng::fork(seed, label);
    CorrelationSeries out;
    for (const auto& [month, value] : realized.values)
        out.values[month] = value + sigma * rng.uniform(-1.0, 1.0);
    return out;
}

VariantSeries triple(const CorrelationSeries& series) {
    return {series, series, series};
}

} // namespace

TEST_CASE("student_t_cdf reproduces tabulated values") {
    struct Point {
        double t;
        double df;
        double cdf;
    };
    // Reference values frozen from an independent statistics package.
    const Point table[] = {
        {0.0, 1, 5.0000000000000000e-01},
        {1.0, 1, 7.5000000000000022e-01},
        {-1.0, 1, 2.4999999999999978e-01},
        {2.5, 2, 9.3519413988924460e-01},
        {-2.5, 2, 6.4805860110755398e-02},
        {0.5, 3, 6.7427601757592459e-01},
        {1.96, 5, 9.4635602374735295e-01},
        {-1.96, 5, 5.3643976252647052e-02},
        {3.0, 7, 9.9002893693400373e-01},
        {0.25, 10, 5.9617589713169294e-01},
        {-0.25, 10, 4.0382410286830706e-01},
        {2.0, 12, 9.6567249298095703e-01},
        {4.5, 15, 9.9978835111523301e-01},
        {-4.5, 15, 2.1164888476699856e-04},
        {1.5, 20.5, 9.2557060158316318e-01},
        {-0.75, 30, 2.2954827283716500e-01},
        {2.33, 60, 9.8840592287653639e-01},
        {5.0, 100, 9.9999877491329325e-01},
        {-3.2, 200, 7.9917687071506989e-04},
        {0.1, 2.7, 5.3635083237422798e-01},
    };
    for (const Point& point : table) {
        CAPTURE(point.t);
        CAPTURE(point.df);
        CHECK(std::fabs(student_t_cdf(point.t, point.df) - point.cdf) < 1e-8);
    }

    SUBCASE("exact half at zero") { CHECK(student_t_cdf(0.0, 7.0) == 0.5); }
    SUBCASE("symmetry") {
        for (double t : {0.1, 0.7, 1.3, 2.9, 6.0})
            for (double df : {1.0, 4.0, 17.5, 120.0})
                CHECK(student_t_cdf(t, df) + student_t_cdf(-t, df) ==
                      doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("monotone in t") {
        double last = 0.0;
        for (double t = -6.0; t <= 6.0; t += 0.25) {
            const double c = student_t_cdf(t, 9.0);
            CHECK(c > last);
            last = c;
        }
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(student_t_cdf(1.0, 0.0), DomainError);
        CHECK_THROWS_AS(student_t_cdf(1.0, -3.0), DomainError);
    }
}

TEST_CASE("regularized_incomplete_beta basics") {
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(1, 1) is the identity.
    CHECK(regularized_incomplete_beta(1.0, 1.0, 0.3) ==
          doctest::Approx(0.3).epsilon(1e-14));
    // I_x(1, b) = 1 - (1-x)^b.
    CHECK(regularized_incomplete_beta(1.0, 4.0, 0.2) ==
          doctest::Approx(1.0 - std::pow(0.8, 4)).epsilon(1e-13));
    // I_x(1/2, 1/2) = (2/pi) asin(sqrt(x)).
    CHECK(regularized_incomplete_beta(0.5, 0.5, 0.25) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    SUBCASE("symmetry identity") {
        for (double x : {0.05, 0.3, 0.62, 0.97})
            CHECK(regularized_incomplete_beta(2.5, 4.0, x) ==
                  doctest::Approx(1.0 -
                                  regularized_incomplete_beta(4.0, 2.5, 1.0 - x))
                      .epsilon(1e-12));
    }
    SUBCASE("monotone in x") {
        double last = -1.0;
        for (double x = 0.0; x <= 1.0; x += 0.05) {
            const double v = regularized_incomplete_beta(3.0, 2.0, x);
            CHECK(v >= last);
            last = v;
        }
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), DomainError);
        CHECK_THROWS_AS(regularized_incomplete_beta(1.0, -1.0, 0.5), DomainError);
        CHECK_THROWS_AS(regularized_incomplete_beta(1.0, 1.0, 1.5), DomainError);
    }
}

TEST_CASE("one_sided_t_test matches a frozen Welch example") {
    const std::vector<double> a{0.0, 0.0, 0.0, 0.0001, -0.0001};
    const std::vector<double> b{10.0, 10.0, 10.0, 10.1, 9.9};
    const TestReport less = one_sided_t_test(a, b, Alternative::ALess);
    CHECK(less.t == doctest::Approx(-316.22760790307467).epsilon(1e-12));
    CHECK(less.df == doctest::Approx(4.000007999999999).epsilon(1e-12));
    CHECK(less.p == doctest::Approx(2.9996938633186113e-10).epsilon(1e-12));
    CHECK(less.size_a == 5);
    CHECK(less.size_b == 5);

    const TestReport greater = one_sided_t_test(a, b, Alternative::AGreater);
    CHECK(greater.t == less.t);
    CHECK(greater.p == doctest::Approx(1.0 - less.p).epsilon(1e-12));
}

TEST_CASE("one_sided_t_test pooled variant from first principles") {
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> b{2.0, 3.0, 4.0, 5.0, 6.0};
    const TestReport r = one_sided_t_test(a, b, Alternative::ALess, true);
    // Pooled variance ((3)(5/3) + (4)(5/2)) / 7 = 15/7; the statistic is
    // -1.5 / sqrt((15/7)(1/4 + 1/5)).
    CHECK(r.t == doctest::Approx(-1.5275252316519467).epsilon(1e-12));
    CHECK(r.df == 7.0);
    CHECK(r.p == doctest::Approx(student_t_cdf(r.t, 7.0)).epsilon(1e-15));
    CHECK(r.p < 0.5);
}

TEST_CASE("identical samples give p exactly one half") {
    const std::vector<double> sample{0.2, -0.4, 0.7, 0.1};
    const TestReport less = one_sided_t_test(sample, sample, Alternative::ALess);
    CHECK(less.t == 0.0);
    CHECK(less.p == 0.5);
    const TestReport greater =
        one_sided_t_test(sample, sample, Alternative::AGreater);
    CHECK(greater.p == 0.5);
}

TEST_CASE("one_sided_t_test names the degenerate sample") {
    const std::vector<double> good{1.0, 2.0, 3.0};
    try {
        one_sided_t_test({1.0}, good, Alternative::ALess);
        FAIL("expected DegenerateInputError");
    } catch (const DegenerateInputError& e) {
        CHECK(std::string(e.what()).find("sample_a") != std::string::npos);
    }
    try {
        one_sided_t_test(good, {2.0, 2.0, 2.0}, Alternative::ALess);
        FAIL("expected DegenerateInputError");
    } catch (const DegenerateInputError& e) {
        const std::string what = e.what();
        CHECK(what.find("sample_b") != std::string::npos);
        CHECK(what.find("zero variance") != std::string::npos);
    }
}

TEST_CASE("rmse_windows chunks shared months") {
    const MonthKey first{2020, 1};
    const std::vector<double> base{0.1, -0.2, 0.0, 0.3, -0.1, 0.2, 0.05};
    const CorrelationSeries realized = series_from(first, base);
    std::vector<double> shifted = base;
    const std::vector<double> delta{0.1, -0.2, 0.3, 0.0, 0.1, -0.1, 0.5};
    for (size_t k = 0; k < shifted.size(); ++k) shifted[k] += delta[k];
    const CorrelationSeries predicted = series_from(first, shifted);

    SUBCASE("normalized windows of three") {
        const ErrorWindows w = rmse_windows(predicted, realized, 3, first,
                                            MonthKey{2020, 12}, true, "demo");
        CHECK(w.n == 3);
        CHECK(w.period_label == "demo");
        REQUIRE(w.windows.size() == 2); // the seventh month cannot fill a window
        CHECK(w.windows[0] ==
              doctest::Approx(std::sqrt((0.01 + 0.04 + 0.09) / 3.0)).epsilon(1e-12));
        CHECK(w.windows[1] ==
              doctest::Approx(std::sqrt((0.0 + 0.01 + 0.01) / 3.0)).epsilon(1e-12));
        REQUIRE(w.months_used.size() == 6);
        CHECK(w.months_used.front() == first);
        CHECK(w.months_used.back() == MonthKey{2020, 6});
    }
    SUBCASE("unnormalized keeps the plain root of the sum") {
        const ErrorWindows w = rmse_windows(predicted, realized, 3, first,
                                            MonthKey{2020, 12}, false);
        REQUIRE(w.windows.size() == 2);
        CHECK(w.windows[0] == doctest::Approx(std::sqrt(0.14)).epsilon(1e-12));
        CHECK(w.windows[1] == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
    }
    SUBCASE("n = 1 keeps every month") {
        const ErrorWindows w =
            rmse_windows(predicted, realized, 1, first, MonthKey{2020, 12});
        REQUIRE(w.windows.size() == 7);
        for (size_t k = 0; k < 7; ++k)
            CHECK(w.windows[k] == doctest::Approx(std::fabs(delta[k])).epsilon(1e-12));
    }
    SUBCASE("a gap on either side drops the month from both") {
        CorrelationSeries holey = realized;
        holey.values.erase(MonthKey{2020, 3});
        const ErrorWindows w = rmse_windows(predicted, holey, 3, first,
                                            MonthKey{2020, 12});
        REQUIRE(w.windows.size() == 2);
        CHECK(w.windows[0] ==
              doctest::Approx(std::sqrt((0.01 + 0.04 + 0.0) / 3.0)).epsilon(1e-12));
        CHECK(w.windows[1] ==
              doctest::Approx(std::sqrt((0.01 + 0.01 + 0.25) / 3.0)).epsilon(1e-12));
        CHECK(w.months_used.size() == 6);
    }
    SUBCASE("range restriction") {
        const ErrorWindows w = rmse_windows(predicted, realized, 2,
                                            MonthKey{2020, 2}, MonthKey{2020, 5});
        REQUIRE(w.windows.size() == 2);
        CHECK(w.months_used.front() == MonthKey{2020, 2});
        CHECK(w.months_used.back() == MonthKey{2020, 5});
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(rmse_windows(predicted, realized, 10, first,
                                     MonthKey{2020, 12}),
                        InsufficientDataError);
        CHECK_THROWS_AS(rmse_windows(predicted, realized, 3, MonthKey{2021, 1},
                                     MonthKey{2021, 12}),
                        InsufficientDataError);
        CHECK_THROWS_AS(rmse_windows(predicted, realized, 0, first,
                                     MonthKey{2020, 12}),
                        DomainError);
        CHECK_THROWS_AS(rmse_windows(predicted, realized, 3, MonthKey{2020, 12},
                                     first),
                        DomainError);
    }
}

TEST_CASE("restrict_months keeps the intersection inside the range") {
    CorrelationSeries a = series_from(MonthKey{2020, 1}, {0.1, 0.2, 0.3, 0.4});
    a.source = "a";
    CorrelationSeries b;
    b.values[MonthKey{2020, 2}] = 0.0;
    b.values[MonthKey{2020, 3}] = 0.0;
    b.values[MonthKey{2020, 5}] = 0.0;
    CorrelationSeries c;
    c.values[MonthKey{2020, 2}] = 0.0;
    c.values[MonthKey{2020, 4}] = 0.0;

    const CorrelationSeries both = restrict_months(
        a, {&b, &c}, MonthKey{2020, 1}, MonthKey{2020, 12});
    CHECK(both.source == "a");
    REQUIRE(both.values.size() == 1);
    CHECK(both.values.count(MonthKey{2020, 2}) == 1);
    CHECK(both.values.at(MonthKey{2020, 2}) == 0.2);

    const CorrelationSeries none = restrict_months(
        a, {&b, &c}, MonthKey{2020, 3}, MonthKey{2020, 12});
    CHECK(none.values.empty());
}

TEST_CASE("experiment_lookahead flags inflated test-period errors") {
    const MonthKey first{2000, 1};
    const CorrelationSeries realized = smooth_realized(first, 204);
    PeriodSplit split;
    split.train_first = first;
    split.train_last = MonthKey{2009, 12};
    split.test_first = MonthKey{2010, 1};
    split.test_last = MonthKey{2016, 12};

    SUBCASE("positive control") {
        CorrelationSeries leaky;
        Rng rng = Rng::fork(7001, "leak");
        for (const auto& [month, value] : realized.values) {
            const double sigma = month <= split.train_last ? 0.05 : 0.15;
            leaky.values[month] = value + sigma * rng.uniform(-1.0, 1.0);
        }
        const ExperimentGrid grid =
            experiment_lookahead(triple(leaky), realized, split, "demo");
        CHECK(grid.hypothesis == "lookahead");
        CHECK(grid.scheme_label == "demo");
        REQUIRE(grid.ns == default_window_lengths);
        REQUIRE(grid.cells.size() == 4);
        for (size_t v = 0; v < 3; ++v) {
            CHECK(grid.cells[0][v].p < 0.01); // n = 1
            CHECK(grid.cells[0][v].hypothesis == "lookahead");
            CHECK(grid.cells[0][v].n == 1);
            CHECK(grid.cells[0][v].variant == static_cast<Variant>(v + 1));
            CHECK(grid.cells[0][v].t < 0.0);
        }
        CHECK(grid.cells[3][0].n == 12);
        CHECK(grid.cells[0][0].size_a == 120);
        CHECK(grid.cells[0][0].size_b == 84);
    }
    SUBCASE("null control stays centered") {
        double total = 0.0;
        const int runs = 20;
        for (int s = 0; s < runs; ++s) {
            const CorrelationSeries flat = with_noise(
                realized, 0.08, 9000 + static_cast<uint64_t>(s), "null");
            const ExperimentGrid grid =
                experiment_lookahead(triple(flat), realized, split, "demo", {1});
            total += grid.cells[0][0].p;
        }
        const double mean_p = total / runs;
        CHECK(mean_p > 0.3);
        CHECK(mean_p < 0.7);
    }
}

TEST_CASE("experiment_history rewards the extra context") {
    const MonthKey first{2005, 1};
    const MonthKey last{2014, 12};
    const CorrelationSeries realized = smooth_realized(first, 120);
    const CorrelationSeries with =
        with_noise(realized, 0.04, 51, "with-history");
    CorrelationSeries without = with_noise(realized, 0.20, 52, "without-history");
    // Ragged coverage: the intersection must drive both window counts.
    without.values.erase(MonthKey{2006, 5});
    without.values.erase(MonthKey{2011, 9});

    const ExperimentGrid grid = experiment_history(
        triple(without), triple(with), realized, first, last, "demo");
    CHECK(grid.hypothesis == "history");
    REQUIRE(grid.cells.size() == 4);
    for (size_t v = 0; v < 3; ++v) {
        CHECK(grid.cells[0][v].p < 0.01);
        CHECK(grid.cells[0][v].t > 0.0); // without-history errors are larger
        CHECK(grid.cells[0][v].size_a == grid.cells[0][v].size_b);
        CHECK(grid.cells[0][v].size_a == 118);
    }
}

TEST_CASE("experiment_model_comparison separates unequal models") {
    const MonthKey first{2005, 1};
    const MonthKey last{2014, 12};
    const CorrelationSeries realized = smooth_realized(first, 120);
    const CorrelationSeries sharp = with_noise(realized, 0.03, 61, "sharp");
    const CorrelationSeries blunt = with_noise(realized, 0.25, 62, "blunt");

    SUBCASE("better model wins") {
        const ExperimentGrid grid = experiment_model_comparison(
            triple(sharp), triple(blunt), realized, first, last, "demo");
        CHECK(grid.hypothesis == "model_comparison");
        for (size_t v = 0; v < 3; ++v) CHECK(grid.cells[0][v].p < 0.01);
    }
    SUBCASE("a model against itself sits at exactly one half") {
        const ExperimentGrid grid = experiment_model_comparison(
            triple(sharp), triple(sharp), realized, first, last, "demo");
        for (const auto& row : grid.cells)
            for (const TestReport& cell : row) {
                CHECK(cell.t == 0.0);
                CHECK(cell.p == 0.5);
            }
    }
}

TEST_CASE("grid_to_csv lays out p by window length and variant") {
    ExperimentGrid grid;
    grid.hypothesis = "demo";
    grid.ns = {1, 3};
    std::array<TestReport, 3> row1{};
    row1[0].p = 0.5;
    row1[1].p = 0.25;
    row1[2].p = 0.125;
    std::array<TestReport, 3> row2{};
    row2[0].p = 0.0625;
    row2[1].p = 1.0;
    row2[2].p = 0.75;
    grid.cells = {row1, row2};
    CHECK(grid_to_csv(grid) ==
          "n,v1,v2,v3\n1,0.5,0.25,0.125\n3,0.0625,1,0.75\n");
}
