#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "relicmp/csv.hpp"
#include "relicmp/report.hpp"

using namespace relicmp;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path = "relicmp_test_" + std::to_string(counter++) + ".csv";
    std::ofstream os(path);
    os << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("csv ingestion") {
  SUBCASE("minimal 2x2") {
    TempFile f("0,1\n1,0\n");
    const Matrix m = ingest_csv(f.path);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK(m(0, 1) == 1.0);
  }
  SUBCASE("empty cell reports its location") {
    TempFile f("1,2\n3,\n");
    try {
      ingest_csv(f.path);
      FAIL("expected MissingData");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::missing_data);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
      CHECK(std::string(e.what()).find("column 2") != std::string::npos);
    }
  }
  SUBCASE("NA tokens are missing data") {
    TempFile f("1,2\nNA,3\n");
    CHECK_THROWS_AS(ingest_csv(f.path), Error);
  }
  SUBCASE("ragged rows are rejected") {
    TempFile f("1,2\n3,4,5\n");
    try {
      ingest_csv(f.path);
      FAIL("expected NonRectangular");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::non_rectangular);
    }
  }
  SUBCASE("garbage is a parse error") {
    TempFile f("1,2\nx7,3\n");
    try {
      ingest_csv(f.path);
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::parse_error);
    }
  }
  SUBCASE("header row is skipped when requested") {
    TempFile f("a,b\n1,2\n3,4\n");
    CsvOptions opt;
    opt.header = true;
    const Matrix m = ingest_csv(f.path, opt);
    CHECK(m.rows() == 2);
    CHECK(m(1, 0) == 3.0);
  }
  SUBCASE("group column splits preserving row order") {
    TempFile f("g,x,y\nA,1,2\nB,3,4\nA,5,6\nB,7,8\n");
    CsvOptions opt;
    opt.header = true;
    opt.group_col = "g";
    const auto groups = ingest_grouped_csv(f.path, opt);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].name == "A");
    CHECK(groups[0].data.rows() == 2);
    CHECK(groups[0].data(0, 0) == 1.0);
    CHECK(groups[0].data(1, 0) == 5.0);
    CHECK(groups[1].name == "B");
    CHECK(groups[1].data(1, 1) == 8.0);
  }
  SUBCASE("group column by 1-based index without header") {
    TempFile f("1,9\n2,9\n1,8\n");
    CsvOptions opt;
    opt.group_col = "1";
    const auto groups = ingest_grouped_csv(f.path, opt);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].name == "1");
    CHECK(groups[0].data.rows() == 2);
    CHECK(groups[0].data.cols() == 1);
  }
}

TEST_CASE("report documents") {
  RequestEcho req;
  req.subcommand = "compare";
  req.inputs = {"a.csv", "b.csv"};
  req.method = "permutation";
  req.variance = "adf";
  req.alternative = "two-sided";
  req.coefficient = "alpha";
  req.level = 0.95;
  req.replicates = 1000;
  req.seed = 42;

  TestResult r;
  r.method = TestMethod::permutation;
  r.statistic = 1.5;
  r.diff = 0.02;
  r.p_right = 0.07;
  r.p_left = 0.93;
  r.p_two = 0.14;
  r.ci = Interval{-0.01, 0.05, 0.95};
  r.coefficient_estimates = {0.8, 0.78};
  r.replicates_used = 1000;
  r.seed = 42;

  SUBCASE("request echo round-trips") {
    const RequestEcho back = request_from_json(to_json(req));
    CHECK(back.subcommand == req.subcommand);
    CHECK(back.inputs == req.inputs);
    CHECK(back.seed == req.seed);
    CHECK(back.level == req.level);
  }
  SUBCASE("fields survive serialization") {
    const nlohmann::json j = to_json(r);
    CHECK(j.at("method") == "permutation");
    CHECK(j.at("p_two").get<double>() == doctest::Approx(0.14));
    CHECK(j.at("ci").at("lower").get<double>() == doctest::Approx(-0.01));
    CHECK(j.at("p").get<double>() == doctest::Approx(0.14));
  }
  SUBCASE("documents are deterministic and timestamps are optional") {
    GroupDescriptive g;
    g.name = "a.csv";
    g.n = 10;
    g.k = 5;
    g.coefficient = 0.8;
    g.variance_component = 0.3;
    const nlohmann::json d1 = report_document(req, {g}, to_json(r), false);
    const nlohmann::json d2 = report_document(req, {g}, to_json(r), false);
    CHECK(d1.dump(2) == d2.dump(2));
    CHECK_FALSE(d1.contains("timestamp"));
    CHECK(report_document(req, {g}, to_json(r), true).contains("timestamp"));
  }
  SUBCASE("flat csv has a header and one row per result") {
    const std::string csv = results_to_csv({r, r});
    CHECK(csv.rfind("method,", 0) == 0);
    int lines = 0;
    for (char c : csv)
      if (c == '\n') ++lines;
    CHECK(lines == 3);
  }
}
