#include "trr/data.hpp"

#include "trr/errors.hpp"
#include "trr/util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace trr {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.emplace_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError(where + ": '" + s + "' is not a number");
    }
}

// Reads a CSV whose header must equal `header`; calls row(fields, where) per data line.
template <typename Fn>
void read_csv(const std::filesystem::path& path, const std::vector<std::string>& header, Fn row) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (!seen_header) {
            if (fields != header) throw InputError(where + ": unexpected CSV header");
            seen_header = true;
            continue;
        }
        if (fields.size() != header.size()) throw InputError(where + ": expected " + std::to_string(header.size()) + " fields");
        row(fields, where);
    }
    if (!seen_header) throw InputError(path.string() + ": empty CSV");
}

void sort_strict(ValueSeries& rows, const std::string& what) {
    std::sort(rows.begin(), rows.end(), [](const DayValue& a, const DayValue& b) { return a.day < b.day; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].day == rows[i - 1].day) throw InputError(what + ": duplicate day " + rows[i].day.iso());
}

}  // namespace

Corpus parse_corpus(std::istream& in, const std::string& origin) {
    Corpus corpus;
    std::set<std::string> ids;
    std::map<Day, std::size_t> seq;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        NewsArticle a;
        try {
            auto j = nlohmann::json::parse(line);
            if (!j.contains("date")) throw InputError(where + ": missing 'date'");
            if (!j.contains("headline")) throw InputError(where + ": missing 'headline'");
            a.date = Day::parse(j.at("date").get<std::string>());
            a.headline = j.at("headline").get<std::string>();
            if (j.contains("body") && !j.at("body").is_null()) a.body = j.at("body").get<std::string>();
            const std::size_t n = ++seq[a.date];
            if (j.contains("id") && !j.at("id").is_null())
                a.id = j.at("id").get<std::string>();
            else
                a.id = a.date.iso() + "#" + std::to_string(n);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(where + ": " + e.what());
        } catch (const InputError& e) {
            const std::string msg = e.what();
            throw InputError(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
        }
        if (a.id.empty()) throw InputError(where + ": empty id");
        if (!ids.insert(a.id).second) throw InputError(where + ": duplicate article id '" + a.id + "'");
        corpus[a.date].push_back(std::move(a));
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open corpus " + path.string());
    return parse_corpus(in, path.string());
}

void PriceSeries::validate() const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!(rows[i].value > 0.0))
            throw InputError(ticker + ": nonpositive close on " + rows[i].day.iso());
        if (i > 0 && !(rows[i - 1].day < rows[i].day))
            throw InputError(ticker + ": days not strictly increasing at " + rows[i].day.iso());
    }
}

std::map<std::string, PriceSeries> load_prices(const std::filesystem::path& path) {
    std::map<std::string, PriceSeries> out;
    read_csv(path, {"date", "ticker", "close"}, [&](const std::vector<std::string>& f, const std::string& where) {
        auto& series = out[f[1]];
        series.ticker = f[1];
        series.rows.push_back({Day::parse(f[0]), parse_number(f[2], where)});
    });
    for (auto& [ticker, series] : out) {
        sort_strict(series.rows, ticker);
        series.validate();
    }
    return out;
}

TedSeries load_ted(const std::filesystem::path& path) {
    TedSeries ted;
    read_csv(path, {"date", "spread"}, [&](const std::vector<std::string>& f, const std::string& where) {
        ted.rows.push_back({Day::parse(f[0]), parse_number(f[1], where)});
    });
    sort_strict(ted.rows, path.string());
    return ted;
}

ValueSeries daily_returns(const PriceSeries& prices) {
    if (prices.rows.size() < 2) throw PreconditionError(prices.ticker + ": need at least two closes for returns");
    prices.validate();
    ValueSeries out;
    out.reserve(prices.rows.size() - 1);
    for (std::size_t i = 1; i < prices.rows.size(); ++i)
        out.push_back({prices.rows[i].day, prices.rows[i].value / prices.rows[i - 1].value - 1.0});
    return out;
}

ValueSeries portfolio_returns(const std::map<std::string, ValueSeries>& per_stock) {
    if (per_stock.empty()) throw InputError("portfolio_returns: no constituent series");
    std::map<Day, std::pair<double, std::size_t>> acc;
    for (const auto& [_, series] : per_stock)
        for (const auto& r : series) {
            auto& [sum, n] = acc[r.day];
            sum += r.value;
            ++n;
        }
    ValueSeries out;
    for (const auto& [day, sn] : acc) out.push_back({day, sn.first / static_cast<double>(sn.second)});
    return out;
}

LabelSeries crash_labels(const ValueSeries& returns, double threshold) {
    LabelSeries out{LabelKind::crash, {}};
    for (const auto& r : returns) out.rows.push_back({r.day, r.value <= threshold ? 1 : 0});
    return out;
}

LabelSeries crisis_labels(const TedSeries& ted, double threshold) {
    LabelSeries out{LabelKind::crisis, {}};
    for (const auto& r : ted.rows) out.rows.push_back({r.day, r.value > threshold ? 1 : 0});
    return out;
}

double percentile_threshold(const ValueSeries& returns, double percentile) {
    if (returns.empty()) throw PreconditionError("percentile_threshold: empty series");
    if (!(percentile >= 0.0 && percentile <= 100.0)) throw InputError("percentile must lie in [0, 100]");
    std::vector<double> v;
    v.reserve(returns.size());
    for (const auto& r : returns) v.push_back(r.value);
    std::sort(v.begin(), v.end());
    const double pos = percentile / 100.0 * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Alignment align_next_day(const LabelSeries& labels, const std::vector<Day>& prediction_days) {
    Alignment out;
    for (const auto& d : prediction_days) {
        auto it = std::upper_bound(labels.rows.begin(), labels.rows.end(), d,
                                   [](const Day& day, const LabelRow& row) { return day < row.day; });
        if (it == labels.rows.end()) {
            out.dropped.push_back(d);
            continue;
        }
        out.pairs.push_back({d, it->day, it->label});
    }
    return out;
}

std::vector<double> ted_context(const TedSeries& ted, const Day& day, std::size_t n) {
    auto end = std::upper_bound(ted.rows.begin(), ted.rows.end(), day,
                                [](const Day& d, const DayValue& row) { return d < row.day; });
    const auto available = static_cast<std::size_t>(end - ted.rows.begin());
    auto begin = end - static_cast<std::ptrdiff_t>(std::min(n, available));
    std::vector<double> out;
    for (auto it = begin; it != end; ++it) out.push_back(it->value);
    return out;
}

}  // namespace trr
