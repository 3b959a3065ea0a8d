#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace trr {

// A calendar day. Rendered and parsed as ISO-8601 (YYYY-MM-DD).
class Day {
public:
    Day() = default;
    explicit Day(std::chrono::sys_days days) : days_(days) {}
    Day(int year, unsigned month, unsigned day);

    // Throws InputError on anything but a valid YYYY-MM-DD date.
    static Day parse(std::string_view iso);

    std::string iso() const;
    std::chrono::sys_days sys_days() const { return days_; }
    int year() const;

    // Signed number of calendar days from *this to other.
    long days_until(const Day& other) const { return (other.days_ - days_).count(); }
    Day plus_days(long n) const { return Day(days_ + std::chrono::days(n)); }

    friend auto operator<=>(const Day&, const Day&) = default;
    friend bool operator==(const Day&, const Day&) = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace trr
