#include "support.hpp"

#include "trr/data.hpp"
#include "trr/errors.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

using namespace trr;
using namespace trr::testing;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("trr_data_" + name);
    std::ofstream(path) << text;
    return path;
}

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

ValueSeries series(const std::vector<double>& values) {
    ValueSeries out;
    Day d = kD1;
    for (double v : values) {
        out.push_back({d, v});
        d = d.plus_days(1);
    }
    return out;
}

}  // namespace

TEST(Corpus, GroupsByDayInFileOrder) {
    std::istringstream in(R"({"id":"b","date":"2007-02-21","headline":"Second day"}
{"id":"a","date":"2007-02-20","headline":"First","body":"text"}

{"date":"2007-02-20","headline":"No id"}
)");
    const auto c = parse_corpus(in);
    ASSERT_EQ(c.size(), 2u);
    const auto& first = c.at(kD1);
    ASSERT_EQ(first.size(), 2u);
    EXPECT_EQ(first[0].id, "a");
    EXPECT_EQ(first[0].body, "text");
    EXPECT_EQ(first[1].id, "2007-02-20#2");
    EXPECT_EQ(c.at(kD2)[0].headline, "Second day");
}

TEST(Corpus, ErrorsNameTheLine) {
    auto bad = [](const std::string& text) {
        return error_of([&] {
            std::istringstream in(text);
            parse_corpus(in, "feed");
        });
    };
    EXPECT_TRUE(contains(bad("{\"date\":\"2007-02-20\",\"headline\":\"ok\"}\n{\"date\":\"2007-02-20\"}"), "feed:2"));
    EXPECT_TRUE(contains(bad("{\"date\":\"2007-02-20\"}"), "headline"));
    EXPECT_TRUE(contains(bad("{\"headline\":\"x\"}"), "date"));
    EXPECT_TRUE(contains(bad("not json"), "feed:1"));
    EXPECT_TRUE(contains(bad("{\"date\":\"2007-13-40\",\"headline\":\"x\"}"), "feed:1"));
    EXPECT_TRUE(contains(bad("{\"id\":\"x\",\"date\":\"2007-02-20\",\"headline\":\"a\"}\n"
                             "{\"id\":\"x\",\"date\":\"2007-02-21\",\"headline\":\"b\"}"),
                         "duplicate"));
    EXPECT_THROW(load_corpus("/nonexistent/corpus.jsonl"), InputError);
}

TEST(Corpus, BundledSyntheticCorpusLoads) {
    const auto c = load_corpus(synthetic_dir() / "corpus.jsonl");
    EXPECT_EQ(c.size(), 10u);
    for (const auto& [day, articles] : c) EXPECT_EQ(articles.size(), 2u);
}

TEST(Prices, LoadSortAndValidate) {
    const auto path = write_temp("prices.csv",
                                 "date,ticker,close\n2007-02-21,AAA,11\n2007-02-20,AAA,10\n2007-02-20,BBB,5\n");
    const auto prices = load_prices(path);
    ASSERT_EQ(prices.size(), 2u);
    EXPECT_EQ(prices.at("AAA").rows.front().day, kD1);
    EXPECT_EQ(prices.at("AAA").rows.back().value, 11.0);

    EXPECT_TRUE(contains(error_of([] { load_prices(write_temp("p1.csv", "date,close\n")); }), "header"));
    EXPECT_TRUE(contains(error_of([] { load_prices(write_temp("p2.csv", "date,ticker,close\n2007-02-20,A,x\n")); }),
                         ":2"));
    EXPECT_TRUE(contains(error_of([] { load_prices(write_temp("p3.csv", "date,ticker,close\n2007-02-20,A,-1\n")); }),
                         "nonpositive"));
    EXPECT_TRUE(contains(error_of([] {
                             load_prices(write_temp("p4.csv", "date,ticker,close\n2007-02-20,A,1\n2007-02-20,A,2\n"));
                         }),
                         "duplicate"));
    EXPECT_THROW(load_prices("/nonexistent/prices.csv"), InputError);
}

TEST(Ted, LoadsSortedSeries) {
    const auto ted = load_ted(write_temp("ted.csv", "date,spread\n2007-02-21,0.5\n2007-02-20,0.4\n"));
    ASSERT_EQ(ted.rows.size(), 2u);
    EXPECT_EQ(ted.rows[0].value, 0.4);
    EXPECT_THROW(load_ted(write_temp("ted_bad.csv", "date,spread\n2007-02-20,abc\n")), InputError);
}

TEST(Returns, DailyAndPortfolio) {
    PriceSeries p{"AAA", {{kD1, 100.0}, {kD2, 98.0}, {kD3, 98.98}}};
    const auto r = daily_returns(p);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].day, kD2);
    EXPECT_NEAR(r[0].value, -0.02, 1e-15);
    EXPECT_NEAR(r[1].value, 0.01, 1e-15);
    EXPECT_THROW(daily_returns(PriceSeries{"A", {{kD1, 1.0}}}), PreconditionError);

    std::map<std::string, ValueSeries> per{{"A", {{kD1, 0.02}, {kD2, -0.04}}}, {"B", {{kD2, 0.0}}}};
    const auto port = portfolio_returns(per);
    ASSERT_EQ(port.size(), 2u);
    EXPECT_DOUBLE_EQ(port[0].value, 0.02);  // only A on kD1
    EXPECT_DOUBLE_EQ(port[1].value, -0.02);
    EXPECT_THROW(portfolio_returns({}), InputError);
}

TEST(Labels, CrashThresholdIsInclusive) {
    const auto l = crash_labels(series({-0.02, -0.0199999, -0.05, 0.01}));
    std::vector<int> got;
    for (const auto& r : l.rows) got.push_back(r.label);
    EXPECT_EQ(got, (std::vector<int>{1, 0, 1, 0}));
    EXPECT_EQ(l.kind, LabelKind::crash);
}

TEST(Labels, CrisisThresholdIsStrict) {
    TedSeries ted{series({0.48, 0.4800001, 0.3, 0.9})};
    const auto l = crisis_labels(ted);
    std::vector<int> got;
    for (const auto& r : l.rows) got.push_back(r.label);
    EXPECT_EQ(got, (std::vector<int>{0, 1, 0, 1}));
    EXPECT_EQ(l.kind, LabelKind::crisis);
}

TEST(Labels, PropertiesOnRandomSeries) {
    std::mt19937 rng(3);
    std::normal_distribution<double> ret(0.0, 0.02);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(50);
        for (auto& x : v) x = ret(rng);
        const auto s = series(v);
        const auto l = crash_labels(s, -0.02);
        ASSERT_EQ(l.rows.size(), s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            EXPECT_EQ(l.rows[i].day, s[i].day);
            EXPECT_EQ(l.rows[i].label, s[i].value <= -0.02 ? 1 : 0);
        }
        // Lower threshold never labels more days.
        auto count = [](const LabelSeries& ls) {
            return std::count_if(ls.rows.begin(), ls.rows.end(), [](const LabelRow& r) { return r.label == 1; });
        };
        EXPECT_LE(count(crash_labels(s, -0.04)), count(l));
    }
}

TEST(Percentile, InterpolatesBetweenOrderStatistics) {
    const auto s = series({5.0, 1.0, 3.0, 2.0, 4.0});
    EXPECT_EQ(percentile_threshold(s, 0.0), 1.0);
    EXPECT_EQ(percentile_threshold(s, 100.0), 5.0);
    EXPECT_EQ(percentile_threshold(s, 50.0), 3.0);
    EXPECT_DOUBLE_EQ(percentile_threshold(s, 10.0), 1.4);
    EXPECT_THROW(percentile_threshold(s, 101.0), InputError);
    EXPECT_THROW(percentile_threshold({}, 5.0), PreconditionError);
}

TEST(Percentile, MatchesCountOfCrashDays) {
    std::mt19937 rng(8);
    std::normal_distribution<double> ret(0.0, 0.02);
    std::vector<double> v(201);
    for (auto& x : v) x = ret(rng);
    const auto s = series(v);
    // With 201 values the 5th percentile is exactly the 11th smallest.
    const double t = percentile_threshold(s, 5.0);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(t, sorted[10]);
    const auto l = crash_labels(s, t);
    EXPECT_EQ(std::count_if(l.rows.begin(), l.rows.end(), [](const LabelRow& r) { return r.label == 1; }), 11);
}

TEST(Alignment, PairsWithNextLabelledDay) {
    LabelSeries labels{LabelKind::crash, {{kD2, 1}, {Day(2007, 2, 26), 0}}};
    const auto a = align_next_day(labels, {kD1, kD2, kD3, Day(2007, 2, 26)});
    ASSERT_EQ(a.pairs.size(), 3u);
    EXPECT_EQ(a.pairs[0].label_day, kD2);
    EXPECT_EQ(a.pairs[0].label, 1);
    EXPECT_EQ(a.pairs[1].label_day, Day(2007, 2, 26));  // strictly after
    EXPECT_EQ(a.pairs[2].prediction_day, kD3);
    ASSERT_EQ(a.dropped.size(), 1u);
    EXPECT_EQ(a.dropped[0], Day(2007, 2, 26));
}

TEST(Alignment, LabelDayAlwaysFollowsPredictionDay) {
    std::mt19937 rng(12);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 100; ++trial) {
        LabelSeries labels;
        std::vector<Day> days;
        Day d = kD1;
        for (int i = 0; i < 20; ++i, d = d.plus_days(1)) {
            if (coin(rng)) labels.rows.push_back({d, coin(rng) ? 1 : 0});
            if (coin(rng)) days.push_back(d);
        }
        const auto a = align_next_day(labels, days);
        EXPECT_EQ(a.pairs.size() + a.dropped.size(), days.size());
        for (const auto& p : a.pairs) {
            EXPECT_LT(p.prediction_day, p.label_day);
            for (const auto& r : labels.rows)
                if (p.prediction_day < r.day) {
                    EXPECT_EQ(r.day, p.label_day);
                    break;
                }
        }
    }
}

TEST(TedContext, LastValuesUpToDay) {
    TedSeries ted{series({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7})};
    EXPECT_EQ(ted_context(ted, kD1), (std::vector<double>{0.1}));
    EXPECT_EQ(ted_context(ted, kD1.plus_days(6)), (std::vector<double>{0.3, 0.4, 0.5, 0.6, 0.7}));
    EXPECT_EQ(ted_context(ted, kD1.plus_days(2), 2), (std::vector<double>{0.2, 0.3}));
    EXPECT_TRUE(ted_context(ted, Day(2007, 1, 1)).empty());
}
