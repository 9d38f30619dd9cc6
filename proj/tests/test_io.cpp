#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "finepot/error.hpp"
#include "finepot/expr.hpp"
#include "finepot/io.hpp"

using namespace finepot;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "finepot_io_test";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("expressions") {
    double xy[2] = {0.5, -2.0};
    CHECK(Expression::parse("x + 2*y")(xy) == doctest::Approx(-3.5));
    CHECK(Expression::parse("2^3^2")(0.0) == 512.0);
    CHECK(Expression::parse("-x^2")(3.0) == -9.0);
    CHECK(Expression::parse("x > 0 && y < 0")(xy) == 1.0);
    CHECK(Expression::parse("max(x, y) + min(1, 2)")(xy) == doctest::Approx(1.5));
    CHECK(Expression::parse("sin(pi*x)")(0.5) == doctest::Approx(1.0));
    CHECK(Expression::parse("x1 ** 2 + x2")(xy) == doctest::Approx(-1.75));
    CHECK(std::isinf(Expression::parse("inf")(0.0)));
}

TEST_CASE("malformed expressions report a position") {
    CHECK_THROWS_AS(Expression::parse("x +"), Error);
    CHECK_THROWS_AS(Expression::parse("foo(x)"), Error);
    CHECK_THROWS_AS(Expression::parse("q"), Error);
    try {
        Expression::parse("1 + $");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        CHECK(std::string(e.what()).find("position 4") != std::string::npos);
    }
    double one[1] = {1.0};
    CHECK_THROWS_AS(Expression::parse("y")(one), Error);
}

TEST_CASE("sha256 known answers") {
    CHECK(sha256_text("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_text("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    auto p = scratch("abc.txt");
    std::ofstream(p) << "abc";
    CHECK(sha256_file(p) == sha256_text("abc"));
}

TEST_CASE("numbers round-trip") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(parse_number(format_number(v)) == v);
    CHECK(std::isinf(parse_number("-inf")));
    CHECK(std::isnan(parse_number("nan")));
    CHECK_THROWS_AS(parse_number("1.2.3"), Error);
}

TEST_CASE("csv writer and reader") {
    auto p = scratch("table.csv");
    {
        CsvWriter w(p, {"id", "value"}, 42);
        w.row({"0", format_number(1.5)});
        w.row({"1", format_number(-std::numeric_limits<double>::infinity())});
    }
    std::ifstream in(p);
    std::string first;
    std::getline(in, first);
    CHECK(first.rfind("# generated ", 0) == 0);
    CHECK(first.find("seed=42") != std::string::npos);
    auto t = read_csv(p);
    CHECK(t.header == std::vector<std::string>{"id", "value"});
    auto v = t.numbers("value");
    CHECK(v[0] == 1.5);
    CHECK(std::isinf(v[1]));
    CHECK_THROWS_AS(t.column("missing"), Error);
}

TEST_CASE("problem from an expression config") {
    auto j = Json::parse(R"({
        "space": {"type": "grid", "lower": [0], "upper": [1], "h": 0.25},
        "p": 3, "f": "x", "psi1": "-inf", "psi2": 0.9
    })");
    auto pr = problem_from_config(j);
    CHECK(pr.p == 3.0);
    CHECK(pr.space->size() == 5);
    CHECK(pr.domain.count() == 3);
    CHECK(pr.boundary[4] == 1.0);
    CHECK(pr.upper[2] == 0.9);
}

TEST_CASE("graph space from csv files") {
    auto dir = scratch("graph");
    fs::create_directories(dir);
    std::ofstream(dir / "vertices.csv") << "id,measure,x\n0,0.5,0\n1,1,1\n2,0.5,2\n";
    std::ofstream(dir / "edges.csv") << "src,dst,length\n0,1,1\n1,2,1\n";
    auto j = Json::parse(R"({"type": "graph", "vertices": "vertices.csv", "edges": "edges.csv"})");
    auto sp = space_from_config(j, dir);
    CHECK(sp->size() == 3);
    CHECK(sp->dim() == 1);
    CHECK(sp->terms().size() == 2);
}

TEST_CASE("config errors carry the config kind") {
    auto j = Json::parse(R"({"space": {"type": "torus"}})");
    try {
        problem_from_config(j);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
    CHECK_THROWS_AS(solver_from_config(Json::parse(R"({"method": "magic"})")), Error);
}
