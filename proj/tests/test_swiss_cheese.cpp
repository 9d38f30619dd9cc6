#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "finepot/error.hpp"
#include "finepot/swiss_cheese.hpp"

using namespace finepot;
using BigFloat = boost::multiprecision::cpp_dec_float_50;

namespace {

std::string message_of(const SwissCheeseSpec& s) {
    try {
        validate(s);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

BigFloat direct_sum(const BigFloat& beta, int J) {
    BigFloat s = 0;
    for (int j = 1; j <= J; ++j) s += boost::multiprecision::pow(BigFloat(2), -beta * j);
    return s;
}

} // namespace

TEST_CASE("parameter constraints name the violated inequality") {
    CHECK(message_of({2, 1.5, 0.1, 5.0, 0.1, 4}).empty());
    CHECK(message_of({2, 1.5, 0.1, 3.0, 0.1, 4}).find("α > n/(n−p)") != std::string::npos);
    CHECK(message_of({2, 1.5, 0.1, 5.0, 0.9, 4}).find("θ") != std::string::npos);
    CHECK(message_of({2, 1.5, 0.6, 5.0, 0.1, 4}).find("δ") != std::string::npos);
    CHECK(message_of({2, 2.0, 0.1, 1.5, 0.1, 4}).find("α > n/(n−1)") != std::string::npos);
}

TEST_CASE("radii follow the two regimes") {
    SwissCheese sub(SwissCheeseSpec{2, 1.5, 0.1, 5.0, 0.1, 4});
    CHECK(sub.radius(1) == doctest::Approx(0.1 / 32));
    CHECK(sub.radius(4) == doctest::Approx(0.1 * std::ldexp(1.0, -20)));
    SwissCheese crit(SwissCheeseSpec{2, 2.0, 0.1, 3.0, 0.3, 4});
    CHECK(crit.radius(1) == doctest::Approx(0.1 * std::exp2(-8.0)));
}

TEST_CASE("membership and margins") {
    SwissCheese c(SwissCheeseSpec{2, 1.5, 0.1, 5.0, 0.1, 2});
    std::vector<double> centre{0.5, 0.5}, away{1.0 / 3, 1.0 / 3}, outside{1.2, 0.5};
    CHECK(!c.contains(centre));
    CHECK(c.contains(away));
    CHECK(!c.contains(outside));
    CHECK(c.margin(centre, 2) < 0.0);
    CHECK(c.margin(away, 2) > 0.0);
}

TEST_CASE("thinness partial sums match 50-digit summation") {
    for (auto spec : {SwissCheeseSpec{2, 1.5, 0.1, 5.0, 0.1, 4}, SwissCheeseSpec{2, 2.0, 0.1, 3.0, 0.3, 4},
                      SwissCheeseSpec{3, 2.5, 0.2, 7.0, 0.2, 3}}) {
        auto rep = swiss_cheese_report(spec, 1e-3, 30, false);
        BigFloat a(spec.alpha), t(spec.theta), n(spec.n), p(spec.p);
        BigFloat beta = spec.regime() == CheeseRegime::Critical ? BigFloat(a * (1 - t)) : BigFloat((a * (1 - t) - 1) * (n - p) / (p - 1));
        CHECK(rep.thinness_rate == doctest::Approx(beta.convert_to<double>()).epsilon(1e-14));
        for (int J = 1; J <= 30; ++J) {
            BigFloat ref = direct_sum(beta, J);
            double rel = boost::multiprecision::abs((BigFloat(rep.thinness_partial[J - 1]) - ref) / ref).convert_to<double>();
            CHECK(rel <= 1e-12);
        }
    }
}

TEST_CASE("the example's rate is 3.5") {
    auto rep = swiss_cheese_report(SwissCheeseSpec{}, 1e-3, 8, false);
    CHECK(rep.thinness_rate == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(rep.thinness_ratio == doctest::Approx(std::exp2(-3.5)).epsilon(1e-15));
}

TEST_CASE("removed vertex count matches brute force") {
    SwissCheeseSpec spec{2, 1.5, 0.4, 4.2, 0.1, 2};
    const double h = 1.0 / 512;
    SwissCheese c(spec, 2);
    std::size_t brute = 0;
    for (int i = 0; i <= 512; ++i)
        for (int j = 0; j <= 512; ++j) {
            std::vector<double> x{i * h, j * h};
            if (c.margin(x, 2) < 0.0) ++brute;
        }
    CHECK(count_removed_vertices(spec, 2, h) == brute);
}

TEST_CASE("grid complement stays below the measure bound") {
    SwissCheeseSpec spec;
    SwissCheese c(spec);
    auto rep = swiss_cheese_report(spec, c.radius(4) / 4.0);
    REQUIRE(rep.grid_complement_measure);
    CHECK(*rep.grid_complement_measure <= rep.measure_bound);
    CHECK(rep.k_effective == 4);
    CHECK(!rep.truncated);
    // per-generation terms (2^k - 1)^n r_k^n
    for (int k = 1; k <= 4; ++k)
        CHECK(rep.measure_terms[k - 1] == doctest::Approx(std::pow((std::ldexp(1.0, k) - 1.0) * c.radius(k), 2)));
}

TEST_CASE("unresolved generations are disclosed") {
    SwissCheeseSpec spec;
    SwissCheese c(spec);
    auto rep = swiss_cheese_report(spec, c.radius(2), 8, false);
    CHECK(rep.truncated);
    CHECK(rep.k_effective < spec.k_max);
    CHECK(!rep.disclosure.empty());
}

TEST_CASE("full grid construction marks E") {
    auto res = swiss_cheese(SwissCheeseSpec{2, 1.5, 0.4, 4.2, 0.1, 2}, 1.0 / 256);
    REQUIRE(res.space);
    CHECK(res.space->size() - res.E.count() == res.report.grid_removed_vertices);
}
