#include "specmeter/textio.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace specmeter;

TEST_CASE("format_double round-trips") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-2.0) == "-2");
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 2000; ++k) {
        const double v = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
        REQUIRE(parse_double(format_double(v)) == v);
    }
    CHECK(parse_double(format_double(std::numeric_limits<double>::denorm_min())) ==
          std::numeric_limits<double>::denorm_min());
}

TEST_CASE("number parsing rejects junk") {
    CHECK(parse_double(" 1.25 ") == 1.25);
    CHECK(parse_integer("42") == 42);
    CHECK_THROWS(parse_double("1.2.3"));
    CHECK_THROWS(parse_double(""));
    CHECK_THROWS(parse_integer("4x"));
    CHECK_THROWS(parse_integer("1.5"));
}

TEST_CASE("split and trim") {
    CHECK(trim("  a b \t") == "a b");
    const auto parts = split("16,32,,64", ',');
    REQUIRE(parts.size() == 4);
    CHECK(parts[2].empty());
    CHECK(parts[3] == "64");
}

TEST_CASE("kind with nested options") {
    const auto k = split_kind_options("wigner:entry=heavy_cubic:cut=2");
    CHECK(k.kind == "wigner");
    CHECK(k.text("entry", "") == "heavy_cubic:cut=2");
    const auto b = split_kind_options("band:b=3,entry=uniform:bound=1.5");
    CHECK(b.integer("b", 0) == 3);
    CHECK(b.text("entry", "") == "uniform:bound=1.5");
    CHECK(b.number("missing", 7.5) == 7.5);
    CHECK(split_kind_options("kolmogorov").options.empty());
}
