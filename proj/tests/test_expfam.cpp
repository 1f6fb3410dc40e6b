#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "xmdl/errors.hpp"
#include "xmdl/expfam.hpp"

using namespace xmdl;

TEST_CASE("bernoulli closed forms at mu=3/4") {
    ExpFamily1D f = make_family("bernoulli");
    CHECK(canonical_param(f, 0.75) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(cumulant(f, 0.75) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(divergence(f, 0.5, 0.75) ==
          doctest::Approx(0.5 * std::log(0.5 / 0.75) + 0.5 * std::log(0.5 / 0.25)).epsilon(1e-12));
    CHECK(sup_exponent(f, 0.5) == doctest::Approx(0.0));
    CHECK(sup_exponent(f, 1.0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("catalog closed forms agree with variance-only quadrature") {
    for (const char* id : {"bernoulli", "exponential", "geometric", "poisson", "gamma:k=2.5"}) {
        ExpFamily1D f = make_family(id);
        ExpFamily1D bare;
        bare.name = f.name + "-bare";
        bare.mean_range = f.mean_range;
        bare.variance = f.variance;
        bare.anchor_mean = f.anchor_mean;
        for (double mu : {0.3, 0.8, 1.7}) {
            if (!f.mean_range.interior(mu)) continue;
            CAPTURE(id);
            CAPTURE(mu);
            CHECK(canonical_param(bare, mu) == doctest::Approx(canonical_param(f, mu)).epsilon(1e-8));
            CHECK(cumulant(bare, mu) == doctest::Approx(cumulant(f, mu)).epsilon(1e-8));
            CHECK(divergence(bare, 0.6, mu) == doctest::Approx(divergence(f, 0.6, mu)).epsilon(1e-8));
            CHECK(sup_exponent(bare, mu) == doctest::Approx(sup_exponent(f, mu)).epsilon(1e-8));
        }
    }
}

TEST_CASE("canonical parameter and cumulant derivatives match the variance function") {
    const double h = 1e-5;
    for (const char* id : {"bernoulli", "exponential", "poisson", "geometric"}) {
        ExpFamily1D f = make_family(id);
        for (double mu : {0.35, 0.8}) {
            if (!f.mean_range.interior(mu - h) || !f.mean_range.interior(mu + h)) continue;
            CAPTURE(id);
            double dbeta = (canonical_param(f, mu + h) - canonical_param(f, mu - h)) / (2 * h);
            CHECK(dbeta == doctest::Approx(1.0 / f.variance(mu)).epsilon(1e-6));
            double da = (cumulant(f, mu + h) - cumulant(f, mu - h)) / (2 * h);
            CHECK(da == doctest::Approx(mu / f.variance(mu)).epsilon(1e-6));
        }
    }
}

TEST_CASE("known divergences") {
    CHECK(divergence(make_family("gaussian-location"), 0.7, -0.3) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(divergence(make_family("exponential"), 1.0, 2.0) ==
          doctest::Approx(0.5 - 1.0 + std::log(2.0)).epsilon(1e-12));
    CHECK(divergence(make_family("poisson"), 2.0, 1.0) ==
          doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-12));
    // Scaled-shape consistency: gamma with shape k multiplies the unit-shape
    // divergence by k.
    CHECK(divergence(make_family("gamma:k=3"), 0.7, 1.9) ==
          doctest::Approx(3.0 * divergence(make_family("exponential"), 0.7, 1.9)).epsilon(1e-12));
}

TEST_CASE("compensation identity on a grid") {
    for (const char* id : {"bernoulli", "exponential", "gaussian-location"}) {
        ExpFamily1D f = make_family(id);
        std::vector<double> data = {0.3, 0.9, 0.6};
        double xbar = (data[0] + data[1] + data[2]) / 3.0;
        for (double y : {0.2, 0.5, 0.85}) {
            if (!f.mean_range.interior(y)) continue;
            double lhs = 0.0, rhs = 3.0 * divergence(f, xbar, y);
            for (double x : data) {
                lhs += divergence(f, x, y);
                rhs += divergence(f, x, xbar);
            }
            CAPTURE(id);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("discrete densities normalize") {
    ExpFamily1D bern = make_family("bernoulli");
    for (double mu : {0.1, 0.5, 0.93})
        CHECK(std::exp(log_density(bern, mu, 0.0)) + std::exp(log_density(bern, mu, 1.0)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    for (const char* id : {"poisson", "geometric"}) {
        ExpFamily1D f = make_family(id);
        for (double mu : {0.4, 1.3, 3.0}) {
            double total = 0.0;
            for (int x = 0; x <= 300; ++x) total += std::exp(log_density(f, mu, x));
            CAPTURE(id);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("continuous densities normalize") {
    ExpFamily1D f = make_family("exponential");
    QuadratureResult r = integrate([&](double x) { return std::exp(log_density(f, 1.7, x)); }, 0.0,
                                   std::numeric_limits<double>::infinity());
    REQUIRE(r.finite());
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("ml_mean endpoint handling") {
    ExpFamily1D bern = make_family("bernoulli");
    CHECK(ml_mean(bern, 1.0) == 1.0);  // delta element exists
    CHECK(ml_mean(bern, 0.25) == 0.25);
    ExpFamily1D expf = make_family("exponential");
    CHECK_THROWS_AS(ml_mean(expf, 0.0), DomainError);  // open endpoint, no atom
}

TEST_CASE("atom endpoint densities") {
    ExpFamily1D bern = make_family("bernoulli");
    CHECK(log_density(bern, 1.0, 1.0) == 0.0);
    CHECK(log_density(bern, 1.0, 0.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("catalog ids resolve and hashes are stable") {
    for (const auto& id : family_catalog()) {
        if (id == "exp-cauchy") continue;  // canonical-parameter class, separate interface
        std::string concrete = id;
        if (auto pos = concrete.find("<shape>"); pos != std::string::npos)
            concrete.replace(pos, 7, "2");
        CHECK_NOTHROW(make_family(concrete));
    }
    CHECK(family_hash("bernoulli") == family_hash("bernoulli"));
    CHECK(family_hash("bernoulli") != family_hash("exponential"));
    CHECK_THROWS_AS(make_family("cauchy"), ConfigError);
}
