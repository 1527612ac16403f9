#include <zetalab/io.hpp>

#include <gtest/gtest.h>

#include <limits>

using namespace zetalab;

namespace {

Table sample()
{
    Table t;
    t.set("tool", std::string("zetalab"));
    t.set("x", 0.1);
    t.set("note", std::string("a=b contains equals"));
    t.columns = {"n", "value", "label"};
    t.rows.push_back({1LL, 0.1, std::string("S(0)")});
    t.rows.push_back({-42LL, 1e-300, std::string("T")});
    t.rows.push_back({7LL, 123456789.125, std::string("")});
    t.rows.push_back({0LL, std::numeric_limits<double>::infinity(), std::string("inf")});
    return t;
}

} // namespace

TEST(Numbers, ShortestRoundTrip)
{
    for (double v : {0.1, 1.0 / 3, 1e-300, 6.02214076e23, -0.0, 123456789.125}) {
        const auto s = format_number(v);
        const auto c = parse_cell(s);
        const double back = std::holds_alternative<double>(c) ? std::get<double>(c) : static_cast<double>(std::get<long long>(c));
        EXPECT_EQ(back, v) << s;
    }
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_TRUE(std::holds_alternative<long long>(parse_cell("17")));
    EXPECT_TRUE(std::holds_alternative<double>(parse_cell("1.5e3")));
    EXPECT_TRUE(std::holds_alternative<std::string>(parse_cell("S(1)")));
}

TEST(Csv, RoundTrip)
{
    const auto t = sample();
    const auto text = to_csv(t);
    EXPECT_EQ(text.rfind("# tool=zetalab\n", 0), 0u);
    const auto back = parse_csv(text);
    EXPECT_EQ(to_csv(back), text);
    EXPECT_EQ(back.get("note"), "a=b contains equals");
    EXPECT_EQ(back.columns, t.columns);
    EXPECT_EQ(back.rows.size(), t.rows.size());
}

TEST(Csv, Errors)
{
    EXPECT_THROW(parse_csv("# a=1\n"), IoError);
    EXPECT_THROW(parse_csv("a,b\n1\n"), IoError);
    EXPECT_THROW(parse_csv("a\n1\n# b=2\n"), IoError);
    EXPECT_THROW(parse_csv("# novalue\na\n"), IoError);
    Table t;
    t.columns = {"a"};
    t.rows.push_back({std::string("x,y")});
    EXPECT_THROW(to_csv(t), IoError);
}

TEST(Json, RoundTrip)
{
    const auto t = sample();
    const auto text = to_json_text(t);
    const auto back = parse_json(text);
    EXPECT_EQ(to_json_text(back), text);
    EXPECT_EQ(to_csv(back), to_csv(t));
    const auto doc = Json::parse(text);
    EXPECT_TRUE(doc["rows"][0][1].is_number_float());
    EXPECT_TRUE(doc["rows"][3][1].is_string());
}

TEST(Json, Errors)
{
    EXPECT_THROW(parse_json("{"), IoError);
    EXPECT_THROW(parse_json("{\"meta\":{}}"), IoError);
    EXPECT_THROW(parse_json("{\"meta\":{},\"columns\":[\"a\"],\"rows\":[[1,2]]}"), IoError);
}

TEST(Files, WriteReadAndFailure)
{
    const auto p = std::filesystem::temp_directory_path() / "zetalab_io_test.csv";
    write_text(p, "abc\n");
    EXPECT_EQ(read_text(p), "abc\n");
    std::filesystem::remove(p);
    EXPECT_THROW(write_text("/nonexistent-dir/x.csv", "a"), IoError);
    EXPECT_THROW(read_text("/nonexistent-dir/x.csv"), IoError);
}

TEST(Json, ReportEncodings)
{
    ModelConfig c;
    const Json jc = c;
    EXPECT_EQ(jc["weight_scheme"], "plain");
    MgfResult r{1.5, 0.01, 1.49, 1.6, 0.2};
    const Json jr = r;
    EXPECT_EQ(jr["stderr"], 0.01);
    MomentEstimate m{1, 10, 20, 3.0, 100, 0.1};
    EXPECT_EQ(Json(m)["nodes"], 100);
}
