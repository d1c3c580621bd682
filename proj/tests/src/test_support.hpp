#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "corrcast/date.hpp"
#include "corrcast/market_data.hpp"

namespace corrcast::testing {

// Self-deleting scratch directory for fixture files.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate =
                base / ("corrcast_test_" + std::to_string(counter_++));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("TempDir: cannot create scratch directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const {
        return path_ / name;
    }

private:
    static inline std::atomic<int> counter_{0};
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path,
                       const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// Loopback HTTP server wrapping httplib; routes are registered before
// start() and the chosen port is read from base_url().
class MockServer {
public:
    MockServer() = default;
    ~MockServer() { stop(); }

    httplib::Server& server() { return server_; }

    void start() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        if (port_ <= 0) throw std::runtime_error("MockServer: bind failed");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    void stop() {
        if (!thread_.joinable()) return;
        server_.stop();
        thread_.join();
    }

    int port() const { return port_; }
    std::string base_url() const {
        return "http://127.0.0.1:" + std::to_string(port_);
    }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

// Weekday-only business calendar for synthetic price fixtures.
inline std::vector<Date> weekdays(const Date& first, const Date& last) {
    static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    auto leap = [](int y) {
        return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    };
    auto days_in = [&](int y, int m) {
        return m == 2 && leap(y) ? 29 : lengths[m - 1];
    };
    // Days since 1970-01-01 (a Thursday), standard civil-calendar arithmetic.
    auto day_number = [](const Date& date) {
        const int y = date.year - (date.month <= 2 ? 1 : 0);
        const long era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy =
            (153u * static_cast<unsigned>(date.month + (date.month > 2 ? -3 : 9)) +
             2u) /
                5u +
            static_cast<unsigned>(date.day) - 1u;
        const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
        return era * 146097 + static_cast<long>(doe) - 719468;
    };
    std::vector<Date> out;
    Date d = first;
    while (d <= last) {
        const int weekday = static_cast<int>(((day_number(d) % 7) + 11) % 7);
        if (weekday != 0 && weekday != 6) out.push_back(d);
        d.day += 1;
        if (d.day > days_in(d.year, d.month)) {
            d.day = 1;
            d.month += 1;
            if (d.month > 12) {
                d.month = 1;
                d.year += 1;
            }
        }
    }
    return out;
}

inline PriceSeries make_prices(const std::string& ticker,
                               const std::vector<Date>& dates,
                               const std::function<double(size_t)>& level) {
    PriceSeries series;
    series.ticker = ticker;
    for (size_t i = 0; i < dates.size(); ++i)
        series.observations.push_back({dates[i], level(i)});
    return series;
}

} // namespace corrcast::testing
