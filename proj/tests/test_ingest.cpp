#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "loadshare/ingest.hpp"
#include "loadshare/monotone_map.hpp"

using loadshare::ExperimentTable;
using loadshare::json;
using loadshare::parse_config;
using loadshare::parse_samples;
using loadshare::read_config;
using loadshare::read_samples;

namespace {

ExperimentTable parse(const std::string& text, std::ostream* events = nullptr) {
    std::istringstream in(text);
    return parse_samples(in, "test.csv", events);
}

}

TEST(ParseSamples, HeaderUnitsAndComments) {
    auto t = parse(
        "# calibration run 12\n"
        "# units: N\n"
        "f_k,f_j\n"
        "0,0\n"
        "0.5,0.2\n"
        "1.0,0.33\n"
        "1.5,0.43\n");
    EXPECT_EQ(t.units, "N");
    EXPECT_EQ(t.source, "test.csv");
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_EQ(t.rows[2][1], 0.33);
    EXPECT_EQ(t.duplicates_merged, 0);
    EXPECT_FALSE(t.origin_injected);
}

TEST(ParseSamples, HeaderlessAndUnsortedInputIsSorted) {
    auto t = parse("1.5,0.43\n0.5,0.2\n0,0\n1.0,0.33\n");
    ASSERT_EQ(t.rows.size(), 4u);
    for (size_t i = 0; i + 1 < t.rows.size(); ++i) EXPECT_LT(t.rows[i][0], t.rows[i + 1][0]);
    EXPECT_EQ(t.rows[0][0], 0.0);
    EXPECT_EQ(t.rows[3][1], 0.43);
}

TEST(ParseSamples, DuplicateReferenceForcesAreAveraged) {
    std::ostringstream events;
    auto t = parse("0,0\n0.5,0.2\n0.5,0.4\n1.0,0.33\n1.5,0.43\n", &events);
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_DOUBLE_EQ(t.rows[1][1], 0.3);
    EXPECT_EQ(t.duplicates_merged, 1);
    EXPECT_NE(events.str().find("duplicates_merged"), std::string::npos);
}

TEST(ParseSamples, OriginInjectedWhenMissing) {
    std::ostringstream events;
    auto t = parse("0.5,0.2\n1.0,0.33\n1.5,0.43\n", &events);
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_TRUE(t.origin_injected);
    EXPECT_EQ(t.rows[0][0], 0.0);
    EXPECT_EQ(t.rows[0][1], 0.0);
    EXPECT_NE(events.str().find("origin_injected"), std::string::npos);
}

TEST(ParseSamples, RejectsBadData) {
    // nonzero response at zero force contradicts h(0) = 0
    EXPECT_THROW(parse("0,0.1\n0.5,0.2\n1.0,0.33\n1.5,0.43\n"), loadshare::ValidationError);
    EXPECT_THROW(parse("0,0\n0.5,-0.2\n1.0,0.33\n1.5,0.43\n"), loadshare::ValidationError);
    EXPECT_THROW(parse("0,0\n0.5,0.2\n1.0,0.33\n"), loadshare::ValidationError);  // 3 rows
    EXPECT_THROW(parse(""), loadshare::ValidationError);
    EXPECT_THROW(parse("# only comments\n"), loadshare::ValidationError);
}

TEST(ParseSamples, ParseErrorsNameTheLine) {
    try {
        parse("0,0\n0.5,0.2\n1.0,zebra\n1.5,0.43\n");
        FAIL() << "expected ParseError";
    } catch (const loadshare::ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("test.csv:3"), std::string::npos);
    }
    EXPECT_THROW(parse("0,0\n0.5,0.2,9\n1.0,0.33\n1.5,0.43\n"), loadshare::ParseError);
    EXPECT_THROW(parse("0,0\n0.5\n1.0,0.33\n1.5,0.43\n"), loadshare::ParseError);
}

TEST(ParseSamples, FittedMapPassesThroughKnots) {
    std::ostringstream csv;
    csv << "f_k,f_j\n";
    for (int i = 0; i <= 9; ++i) {
        double x = 2.0 * i / 9.0;
        csv << x << "," << 0.5 * x / (1.0 + x) << "\n";
    }
    auto t = parse(csv.str());
    auto h = loadshare::MonotoneMap::make_tabulated(t.rows);
    for (const auto& row : t.rows) EXPECT_DOUBLE_EQ(h.eval(row[0]), row[1]);
}

TEST(ReadSamples, MissingFileIsIoError) {
    EXPECT_THROW(read_samples("/nonexistent/nope.csv"), loadshare::IoError);
}

TEST(ParseConfig, MinimalWithDefaults) {
    auto doc = json::parse(R"({
        "arms": {"deep": 1.0, "middle": 2.0, "long": 4.0},
        "pair": ["deep", "long"],
        "sweep": {"m_min": 0.0, "m_max": 6.0, "count": 13}
    })");
    auto cfg = parse_config(doc, "cfg");
    ASSERT_EQ(cfg.arm_names.size(), 3u);
    EXPECT_EQ(cfg.arm_names[0], "deep");   // insertion order preserved
    EXPECT_EQ(cfg.arm_values[2], 4.0);
    EXPECT_EQ(cfg.pair_j, "deep");
    EXPECT_EQ(cfg.pair_k, "long");
    EXPECT_EQ(cfg.index_of("middle"), 1u);
    EXPECT_EQ(cfg.sweep.count, 13);
    EXPECT_EQ(cfg.numeric.tol, 1e-10);
    EXPECT_EQ(cfg.numeric.n_max, 64);
    EXPECT_EQ(cfg.numeric.grid_size, 257);
    EXPECT_EQ(cfg.numeric.ref_force, 1.0);
}

TEST(ParseConfig, UppercaseSweepKeysAccepted) {
    auto doc = json::parse(R"({
        "arms": {"a": 1.0, "b": 2.0},
        "pair": ["a", "b"],
        "sweep": {"M_min": 0.5, "M_max": 3.0, "count": 5},
        "numeric": {"tol": 1e-12, "n_max": 32, "grid_size": 129, "ref_force": 0.5}
    })");
    auto cfg = parse_config(doc, "cfg");
    EXPECT_EQ(cfg.sweep.m_min, 0.5);
    EXPECT_EQ(cfg.sweep.m_max, 3.0);
    EXPECT_EQ(cfg.numeric.tol, 1e-12);
    EXPECT_EQ(cfg.numeric.n_max, 32);
    EXPECT_EQ(cfg.numeric.grid_size, 129);
    EXPECT_EQ(cfg.numeric.ref_force, 0.5);
}

TEST(ParseConfig, RejectsBadDocuments) {
    auto throws = [](const char* text) {
        auto doc = json::parse(text);
        EXPECT_THROW(parse_config(doc, "cfg"), loadshare::ValidationError) << text;
    };
    throws(R"({"pair": ["a","b"], "sweep": {"m_min":0,"m_max":1,"count":2}})");  // no arms
    throws(R"({"arms": {"a": 1.0}, "pair": ["a","a"],
               "sweep": {"m_min":0,"m_max":1,"count":2}})");  // one arm
    throws(R"({"arms": {"a": 1.0, "b": 0.0}, "pair": ["a","b"],
               "sweep": {"m_min":0,"m_max":1,"count":2}})");  // nonpositive arm
    throws(R"({"arms": {"a": 1.0, "b": 2.0}, "pair": ["a","zzz"],
               "sweep": {"m_min":0,"m_max":1,"count":2}})");  // unknown pair muscle
    throws(R"({"arms": {"a": 1.0, "b": 2.0}, "pair": "a,b",
               "sweep": {"m_min":0,"m_max":1,"count":2}})");  // pair not an array
    throws(R"({"arms": {"a": 1.0, "b": 2.0}, "pair": ["a","b"]})");  // no sweep
    throws(R"({"arms": {"a": 1.0, "b": 2.0}, "pair": ["a","b"],
               "sweep": {"m_min":1,"m_max":1,"count":2}})");  // empty interval
    throws(R"({"arms": {"a": 1.0, "b": 2.0}, "pair": ["a","b"],
               "sweep": {"m_min":-1,"m_max":1,"count":2}})");  // negative moment
    throws(R"({"arms": {"a": 1.0, "b": 2.0}, "pair": ["a","b"],
               "sweep": {"m_min":0,"m_max":1,"count":1}})");  // single point
    throws(R"({"arms": {"a": 1.0, "b": 2.0}, "pair": ["a","b"],
               "sweep": {"m_min":0,"m_max":1,"count":2}, "numeric": {"tol": 0}})");
    throws(R"({"arms": {"a": 1.0, "b": 2.0}, "pair": ["a","b"],
               "sweep": {"m_min":0,"m_max":1,"count":2}, "numeric": {"n_max": 2}})");
    throws(R"({"arms": {"a": 1.0, "b": 2.0}, "pair": ["a","b"],
               "sweep": {"m_min":0,"m_max":1,"count":2}, "numeric": {"grid_size": 4}})");
}

TEST(ReadConfig, FileErrors) {
    EXPECT_THROW(read_config("/nonexistent/cfg.json"), loadshare::IoError);
    std::string path = testing::TempDir() + "loadshare_bad_config.json";
    std::ofstream(path) << "{ not json";
    EXPECT_THROW(read_config(path), loadshare::ParseError);
}
