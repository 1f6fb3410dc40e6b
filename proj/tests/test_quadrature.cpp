#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "xmdl/errors.hpp"
#include "xmdl/quadrature.hpp"

using namespace xmdl;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("inverse square root singularity") {
    auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    REQUIRE(r.finite());
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("exponential tail") {
    auto r = integrate([](double x) { return std::exp(-x); }, 0.0, kInf);
    REQUIRE(r.finite());
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("gaussian over the whole line") {
    auto r = integrate([](double x) { return std::exp(-0.5 * x * x); }, -kInf, kInf);
    REQUIRE(r.finite());
    CHECK(r.value == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-8));
}

TEST_CASE("gamma-type integrand: singularity plus tail") {
    auto r = integrate([](double x) { return std::exp(-x) / std::sqrt(x); }, 0.0, kInf);
    REQUIRE(r.finite());
    CHECK(r.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-8));
}

TEST_CASE("1/x divergence at zero is detected by window decay") {
    auto r = integrate([](double x) { return 1.0 / x; }, 0.0, 1.0);
    CHECK(r.verdict == Verdict::Divergent);
}

TEST_CASE("1/x divergence at infinity") {
    auto r = integrate([](double x) { return 1.0 / x; }, 1.0, kInf);
    CHECK(r.verdict == Verdict::Divergent);
}

TEST_CASE("constant over the line diverges by running total") {
    auto r = integrate([](double) { return 1.0; }, -kInf, kInf);
    CHECK(r.verdict == Verdict::Divergent);
}

TEST_CASE("exponential growth diverges via non-finite values") {
    auto r = integrate([](double x) { return std::exp(x * x); }, -kInf, kInf);
    CHECK(r.verdict == Verdict::Divergent);
}

TEST_CASE("harmonic-log divergence x^-1 (log x)^-2 scale is classified") {
    // integral of 1/(x (1+ln^2 x)) over (0,1) is finite (arctan); the same
    // integrand without the damping is not.
    auto fin = integrate([](double x) { return 1.0 / (x * (1.0 + std::pow(std::log(x), 2))); },
                         0.0, 1.0);
    REQUIRE(fin.finite());
    CHECK(fin.value == doctest::Approx(M_PI / 2.0).epsilon(1e-7));
    auto div = integrate([](double x) { return 1.0 / (x * (1.0 + std::abs(std::log(x)))); }, 0.0, 1.0);
    CHECK(div.verdict == Verdict::Divergent);
}

TEST_CASE("interior split captures a narrow peak") {
    auto f = [](double x) { return std::exp(-1e6 * (x - 0.3) * (x - 0.3)); };
    auto r = integrate(f, 0.0, 1.0, {}, 0.3);
    REQUIRE(r.finite());
    CHECK(r.value == doctest::Approx(std::sqrt(M_PI / 1e6)).epsilon(1e-8));
}

TEST_CASE("QuadratureResult::require throws on divergence") {
    auto r = integrate([](double x) { return 1.0 / x; }, 0.0, 1.0);
    CHECK_THROWS_AS(r.require(), DivergentError);
}
