#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "xmdl/errors.hpp"
#include "xmdl/jeffreys.hpp"

using namespace xmdl;

namespace {
constexpr double kTau = 2.0 * M_PI;
}

TEST_CASE("unconditional Jeffreys integrals") {
    QuadratureResult bern = jeffreys_integral(make_family("bernoulli"));
    REQUIRE(bern.finite());
    CHECK(bern.value == doctest::Approx(M_PI).epsilon(1e-8));
    CHECK(jeffreys_integral(make_family("exponential")).verdict == Verdict::Divergent);
    CHECK(jeffreys_integral(make_family("gaussian-location")).verdict == Verdict::Divergent);
    CHECK(jeffreys_integral(make_family("poisson")).verdict == Verdict::Divergent);
}

TEST_CASE("conditional Jeffreys: exponential family after one observation") {
    ExpFamily1D f = make_family("exponential");
    for (double xb : {0.5, 1.0, 2.0}) {
        QuadratureResult r = conditional_jeffreys(f, 1, xb);
        REQUIRE(r.finite());
        CHECK(r.value == doctest::Approx(M_E).epsilon(1e-8));
    }
}

TEST_CASE("conditional Jeffreys: bernoulli m=2 at the balanced average") {
    QuadratureResult r = conditional_jeffreys(make_family("bernoulli"), 2, 0.5);
    REQUIRE(r.finite());
    CHECK(r.value == doctest::Approx(M_PI / 2.0).epsilon(1e-8));
}

TEST_CASE("diagnosis: light-tail rule covers the exponential family") {
    ExpFamily1D f = make_family("exponential");
    auto meta = tail_metadata("exponential");
    REQUIRE(meta.has_value());
    FinitenessDiagnosis d = diagnose(f, *meta, 1);
    CHECK(d.verdict == FiniteVerdict::Finite);
    CHECK(d.rule == TailRule::LightTail);
    REQUIRE(d.required_m.has_value());
    CHECK(*d.required_m == 1);
}

TEST_CASE("diagnosis: bernoulli falls back to the finite unconditional integral") {
    ExpFamily1D f = make_family("bernoulli");
    FinitenessDiagnosis d = diagnose(f, TailMetadata{}, 1);
    CHECK(d.verdict == FiniteVerdict::Finite);
    CHECK(d.rule == TailRule::NumericFallback);
    REQUIRE(d.required_m.has_value());
    CHECK(*d.required_m == 0);
}

TEST_CASE("exponentiated-Cauchy mixture: partition bounds and anchoring") {
    ExpCauchyFamily ec = build_exp_cauchy();
    CHECK(ec.partition(0.0) == 1.0);
    for (double beta : {-1e-8, -1e-4, -0.05, -1.0, -50.0, -1e4}) {
        double z = ec.partition(beta);
        CAPTURE(beta);
        CHECK(z >= 0.5 - 1e-10);
        CHECK(z <= 1.0 + 1e-10);
    }
    // Z decreases as beta decreases.
    CHECK(ec.partition(-1.0) > ec.partition(-10.0));
}

TEST_CASE("exponentiated-Cauchy mixture: mean map is monotone and invertible") {
    ExpCauchyFamily ec = build_exp_cauchy();
    CHECK(ec.mean(-1.0) > ec.mean(-5.0));
    for (double mu : {0.05, 0.7, 3.0}) {
        double beta = ec.beta_from_mean(mu);
        CHECK(ec.mean(beta) == doctest::Approx(mu).epsilon(1e-9));
    }
}

TEST_CASE("exponentiated-Cauchy mixture: divergence from the atom is capped at ln 2") {
    ExpCauchyFamily ec = build_exp_cauchy();
    CHECK(ec.divergence_from_atom(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    for (double beta : {-1e-6, -1.0, -100.0}) {
        double d = ec.divergence_from_atom(beta);
        CHECK(d >= -1e-10);
        CHECK(d <= std::log(2.0) + 1e-10);
    }
    // D(P_beta || P_0) also stays below ln 2 and approaches it as beta -> -inf.
    CHECK(ec.divergence_beta(-1e6, 0.0) == doctest::Approx(std::log(2.0)).epsilon(0.02));
    CHECK(ec.divergence_beta(-1.0, 0.0) < std::log(2.0));
}

TEST_CASE("exponentiated-Cauchy mixture: Fisher information lower bound") {
    ExpCauchyFamily ec = build_exp_cauchy();
    for (double beta : {-1e-6, -1e-3, -0.05}) {
        double bound = (1.0 / (81.0 * kTau * M_E)) /
                       (beta * beta * (1.0 + std::pow(std::log(-beta), 2)));
        CAPTURE(beta);
        CHECK(ec.fisher(beta) >= bound);
    }
}

TEST_CASE("exponentiated-Cauchy mixture: Jeffreys integrals diverge at every m") {
    ExpCauchyFamily ec = build_exp_cauchy();
    CHECK(ec.jeffreys_integral().verdict == Verdict::Divergent);
    CHECK(ec.conditional_jeffreys(1, 1.0).verdict == Verdict::Divergent);
    CHECK(ec.conditional_jeffreys(5, 0.4).verdict == Verdict::Divergent);
}

TEST_CASE("domain guards") {
    ExpFamily1D f = make_family("bernoulli");
    CHECK_THROWS_AS(conditional_jeffreys(f, 0, 0.5), DomainError);
    ExpCauchyFamily ec = build_exp_cauchy();
    CHECK_THROWS_AS(ec.mean(0.5), DomainError);
    CHECK_THROWS_AS(ec.beta_from_mean(-1.0), DomainError);
}
