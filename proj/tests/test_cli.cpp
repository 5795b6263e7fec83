#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "app.hpp"
#include "output.hpp"

using namespace hallfiber;
using namespace hallfiber::cli;

namespace {

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"hallfiber"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out;
  std::ostringstream err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("numbers") {
  TEST_CASE("format and parse round trip") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1e-300, 1.3132542203352642}) {
      CHECK(parse_number(format_number(v)) == v);
    }
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(-0.0) == "0");
    CHECK(parse_number("infinity") == std::numeric_limits<double>::infinity());
    CHECK(parse_number("-inf") == -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(parse_number("1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number(""), std::invalid_argument);
  }
}

TEST_SUITE("commands") {
  TEST_CASE("flat band dispersion") {
    const Run r = run({"dispersion", "--b", "1", "--gamma", "0", "--xi", "-6:4:200", "--branches", "+1"});
    REQUIRE(r.status == kExitOk);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 201);
    CHECK(rows[0] == std::vector<std::string>{"xi", "branch", "lambda", "dlambda_dxi"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(parse_number(rows[i][2]) == 0.0);
      CHECK(parse_number(rows[i][3]) == 0.0);
    }
  }

  TEST_CASE("two samples give two rows of four columns") {
    const Run r = run({"dispersion", "--gamma", "1", "--xi", "-1:1:2", "--branches", "-1"});
    REQUIRE(r.status == kExitOk);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].size() == 4);
    CHECK(rows[2].size() == 4);
    CHECK(parse_number(rows[1][2]) < 0.0);
  }

  TEST_CASE("several gammas add a gamma column") {
    const Run r = run({"dispersion", "--gamma", "0.5,inf", "--xi", "0", "--branches", "+1"});
    REQUIRE(r.status == kExitOk);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].front() == "gamma");
    CHECK(rows[2].front() == "inf");
  }

  TEST_CASE("json dispersion parses") {
    const Run r = run({"dispersion", "--gamma", "1", "--xi", "-1:1:3", "--branches", "+1,-1",
                       "--format", "json"});
    REQUIRE(r.status == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.dump().find("lambda") != std::string::npos);
  }

  TEST_CASE("svg of the flat band has a horizontal polyline") {
    const auto path = std::filesystem::temp_directory_path() / "hallfiber_flat.svg";
    const Run r = run({"dispersion", "--gamma", "0", "--xi", "-3:3:7", "--branches", "+1",
                       "--out", "/dev/null", "--svg", path.c_str()});
    REQUIRE(r.status == kExitOk);
    const std::string svg = slurp(path);
    const auto at = svg.find("class=\"curve\"");
    REQUIRE(at != std::string::npos);
    const auto pts_at = svg.find("points=\"", svg.rfind("<polyline", at));
    REQUIRE(pts_at != std::string::npos);
    const auto end = svg.find('"', pts_at + 8);
    std::istringstream pts(svg.substr(pts_at + 8, end - pts_at - 8));
    std::string pair;
    std::vector<std::string> ys;
    while (pts >> pair) ys.push_back(pair.substr(pair.find(',') + 1));
    REQUIRE(ys.size() == 7);
    for (const auto& y : ys) CHECK(y == ys.front());
    std::filesystem::remove(path);
  }

  TEST_CASE("conductance report round trip") {
    const Run r = run({"conductance", "--gamma", "0.7", "--levels", "0", "--no-integral"});
    REQUIRE(r.status == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("integer") == 1);
    const ConductanceReport rep = report_from_json(j);
    CHECK(reports_equal(rep, report_from_json(report_to_json(rep))));
    CHECK(report_to_json(rep).dump() == j.dump());
  }

  TEST_CASE("conductance at gamma = inf") {
    const Run r = run({"conductance", "--gamma", "inf", "--levels", "0"});
    REQUIRE(r.status == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("integer") == 2);
    CHECK(std::abs(j.at("integral").get<double>() - 2.0) <= 1e-2);
  }

  TEST_CASE("critical points skip unresolved gammas") {
    const Run r = run({"critical-point", "--gamma", "0.05,1"});
    REQUIRE(r.status == kExitOk);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "1");
    CHECK(std::abs(parse_number(rows[1][4])) <= 1e-6);
    CHECK(r.err.find("skipping gamma = 0.05") != std::string::npos);
  }

  TEST_CASE("symmetry check") {
    const Run r = run({"symmetry-check", "--b", "-1", "--gamma", "2", "--xi", "0.3"});
    REQUIRE(r.status == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("max_deviation").get<double>() <= 1e-6);
  }

  TEST_CASE("output does not depend on the worker count") {
    const Run one = run({"dispersion", "--gamma", "1", "--xi", "-2:2:9", "--workers", "1"});
    const Run four = run({"dispersion", "--gamma", "1", "--xi", "-2:2:9", "--workers", "4"});
    const Run eight = run({"dispersion", "--gamma", "1", "--xi", "-2:2:9", "--workers", "8"});
    REQUIRE(one.status == kExitOk);
    CHECK(one.out == four.out);
    CHECK(one.out == eight.out);
  }

  TEST_CASE("usage errors exit with 2") {
    CHECK(run({"dispersion", "--gamma", "1", "--eta", "0"}).status == kExitUsage);
    CHECK(run({"dispersion", "--gamma", "1", "--xi", "1:0:5"}).status == kExitUsage);
    CHECK(run({"dispersion", "--gamma", "1", "--xi", "a:b"}).status == kExitUsage);
    CHECK(run({"dispersion", "--b", "0", "--gamma", "1"}).status == kExitUsage);
    CHECK(run({"dispersion", "--gamma", "1", "--branches", "+0"}).status == kExitUsage);
    CHECK(run({"conductance", "--gamma", "1", "--levels", "0", "--delta", "5"}).status ==
          kExitUsage);
    CHECK(run({"frobnicate"}).status == kExitUsage);
    const Run e = run({"dispersion", "--eta", "9"});
    CHECK(e.status == kExitUsage);
    CHECK_FALSE(e.err.empty());
    CHECK(run({"--help"}).status == kExitOk);
  }

  TEST_CASE("solver failures exit with 1 and name the sample") {
    const Run r = run({"dispersion", "--gamma", "1", "--xi", "-6", "--branches", "+1",
                       "--spacing", "0.02"});
    CHECK(r.status == kExitFailure);
    CHECK(r.err.find("+1") != std::string::npos);
  }
}
