#include "trr/day.hpp"

#include "trr/errors.hpp"

#include <charconv>
#include <cstdio>

namespace trr {

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

Day::Day(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    if (!ymd.ok()) throw InputError("invalid calendar date");
    days_ = std::chrono::sys_days{ymd};
}

Day Day::parse(std::string_view iso) {
    unsigned y = 0, m = 0, d = 0;
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' || !parse_uint(iso.substr(0, 4), y) ||
        !parse_uint(iso.substr(5, 2), m) || !parse_uint(iso.substr(8, 2), d)) {
        throw InputError("invalid date '" + std::string(iso) + "', expected YYYY-MM-DD");
    }
    std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (!ymd.ok()) throw InputError("invalid date '" + std::string(iso) + "'");
    return Day(std::chrono::sys_days{ymd});
}

std::string Day::iso() const {
    std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int Day::year() const {
    return static_cast<int>(std::chrono::year_month_day{days_}.year());
}

}  // namespace trr
