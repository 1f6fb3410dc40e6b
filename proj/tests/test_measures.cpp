#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "xmdl/errors.hpp"
#include "xmdl/expfam.hpp"
#include "xmdl/measures.hpp"

using namespace xmdl;

TEST_CASE("jeffreys prior mass of bernoulli is pi") {
    ExpFamily1D f = make_family("bernoulli");
    PosteriorState st{f, make_prior("jeffreys", f), 0, 0.0};
    QuadratureResult r = prior_normalizer(st);
    REQUIRE(r.finite());
    CHECK(r.value == doctest::Approx(M_PI).epsilon(1e-8));
}

TEST_CASE("bernoulli jeffreys posterior after two balanced flips") {
    ExpFamily1D f = make_family("bernoulli");
    PosteriorState st{f, make_prior("jeffreys", f), 2, 0.5};
    // Density proportional to sqrt(y(1-y)); at y=1/2 it equals 4/pi.
    CHECK(posterior_log_density(st, 0.5) == doctest::Approx(std::log(4.0 / M_PI)).epsilon(1e-8));
}

TEST_CASE("posterior densities normalize") {
    ExpFamily1D f = make_family("exponential");
    PosteriorState st{f, make_prior("jeffreys", f), 3, 1.2};
    QuadratureResult r = integrate(
        [&](double y) { return std::exp(posterior_log_density(st, y)); }, 0.0,
        std::numeric_limits<double>::infinity(), {}, 1.2);
    REQUIRE(r.finite());
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gaussian exp(y^2) prior normalizes only for m > 2") {
    ExpFamily1D f = make_family("gaussian-location");
    PriorMeasure prior = make_prior("gauss-alpha:1", f);
    CHECK(in_Fm(prior, f, 2, 0.0) == Verdict::Divergent);
    CHECK(in_Fm(prior, f, 3, 0.0) == Verdict::Finite);
    PosteriorState bad{f, prior, 2, 0.0};
    CHECK_THROWS_AS(posterior_log_density(bad, 0.0), NotNormalizable);
}

TEST_CASE("exponential exp(1/y)/y^2 prior: F_m has left boundary 1/m") {
    ExpFamily1D f = make_family("exponential");
    PriorMeasure prior = make_prior("exp-inv-sq", f);
    for (std::int64_t m : {2, 4}) {
        double b = 1.0 / static_cast<double>(m);
        CHECK(in_Fm(prior, f, m, b + 0.05) == Verdict::Finite);
        CHECK(in_Fm(prior, f, m, b - 0.05) == Verdict::Divergent);
    }
}

TEST_CASE("F_m grows with m") {
    ExpFamily1D f = make_family("exponential");
    PriorMeasure prior = make_prior("exp-inv-sq", f);
    for (double xb : {0.3, 0.6, 1.1}) {
        Verdict prev = Verdict::Divergent;
        for (std::int64_t m = 1; m <= 6; ++m) {
            Verdict v = in_Fm(prior, f, m, xb);
            if (prev == Verdict::Finite) CHECK(v == Verdict::Finite);
            prev = v;
        }
    }
}

TEST_CASE("batch conditioning equals sequential factor accumulation") {
    ExpFamily1D f = make_family("bernoulli");
    PriorMeasure prior = make_prior("jeffreys", f);
    std::vector<double> data = {1.0, 0.0, 1.0, 1.0};
    double xbar = 0.75;
    auto seq_log = [&](double y) {
        double lp = prior.log_density(y);
        for (double x : data) lp -= divergence(f, x, y);
        return lp;
    };
    QuadratureResult norm = integrate([&](double y) { return std::exp(seq_log(y)); }, 0.0, 1.0);
    REQUIRE(norm.finite());
    PosteriorState st{f, prior, 4, xbar};
    for (double y : {0.2, 0.5, 0.8})
        CHECK(posterior_log_density(st, y) ==
              doctest::Approx(seq_log(y) - std::log(norm.value)).epsilon(1e-8));
}

TEST_CASE("prior catalog rejects unknown ids") {
    ExpFamily1D f = make_family("bernoulli");
    CHECK_THROWS_AS(make_prior("cauchy", f), ConfigError);
}
