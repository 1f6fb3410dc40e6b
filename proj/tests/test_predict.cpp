#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "xmdl/errors.hpp"
#include "xmdl/jeffreys.hpp"
#include "xmdl/predict.hpp"

using namespace xmdl;

namespace {
constexpr double kTau = 2.0 * M_PI;

std::vector<double> bits_to_seq(std::uint32_t bits, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
    return xs;
}
}  // namespace

TEST_CASE("jeffreys mixture on bernoulli reproduces the add-half rule") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, jeffreys_prior(f));
    for (int m = 0; m <= 6; ++m) {
        for (int k = 0; k <= m; ++k) {
            double xbar = m == 0 ? 0.0 : static_cast<double>(k) / m;
            double want = (k + 0.5) / (m + 1.0);
            CAPTURE(m);
            CAPTURE(k);
            CHECK(std::exp(sys.predict_log(m, xbar, 1.0)) == doctest::Approx(want).epsilon(1e-8));
            CHECK(std::exp(sys.predict_log(m, xbar, 0.0)) ==
                  doctest::Approx(1.0 - want).epsilon(1e-8));
        }
    }
}

TEST_CASE("flat-prior mixture is symmetric at the start") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, make_prior("flat", f));
    CHECK(std::exp(sys.predict_log(0, 0.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::exp(sys.predict_log(0, 0.0, 0.0)) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("gaussian flat-prior predictive widens to variance 1 + 1/m") {
    ExpFamily1D f = make_family("gaussian-location");
    BayesMixture sys(f, make_prior("flat", f));
    CHECK_THROWS_AS(sys.predict_log(0, 0.0, 0.3), NotYetDefined);
    double xbar = 0.3;
    for (double x : {-0.5, 0.3, 1.4}) {
        double want = -0.5 * std::log(2.0 * kTau) - (x - xbar) * (x - xbar) / 4.0;
        CHECK(sys.predict_log(1, xbar, x) == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("snml next-symbol weights from brute-force maximized likelihood") {
    ExpFamily1D f = make_family("bernoulli");
    SnmlSystem sys(f);
    CHECK(std::exp(sys.predict_log(0, 0.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-12));
    // After "1": weights sup p^2 = 1 and sup p(1-p) = 1/4.
    CHECK(std::exp(sys.predict_log(1, 1.0, 1.0)) == doctest::Approx(0.8).epsilon(1e-10));
    // After "10": both extensions maximize at 4/27.
    CHECK(std::exp(sys.predict_log(2, 0.5, 1.0)) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("fixed-horizon NML marginals") {
    ExpFamily1D f = make_family("bernoulli");
    NmlBernoulli n1(f, 1);
    CHECK(std::exp(n1.predict_log(0, 0.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-12));
    NmlBernoulli n2(f, 2);
    std::vector<double> ones = {1.0, 1.0};
    CHECK(std::exp(n2.log_conditional(ones, 0)) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK_THROWS_AS(n2.predict_log(2, 0.5, 1.0), InfeasibleHorizon);
}

TEST_CASE("shtarkov sum matches the direct binomial oracle") {
    const std::int64_t n = 10;
    double direct = 0.0;
    for (std::int64_t k = 0; k <= n; ++k) {
        double c = 1.0;
        for (std::int64_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
        direct += c * std::pow(static_cast<double>(k) / n, static_cast<double>(k)) *
                  std::pow(static_cast<double>(n - k) / n, static_cast<double>(n - k));
    }
    CHECK(log_shtarkov_binomial(n) == doctest::Approx(std::log(direct)).epsilon(1e-12));
}

TEST_CASE("chain rule consistency across conditioning splits") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture jef(f, jeffreys_prior(f));
    SnmlSystem snml(f);
    NmlBernoulli nml(f, 6);
    PluginSystem plug(f);
    const PredictionSystem* systems[] = {&jef, &snml, &nml, &plug};
    for (const PredictionSystem* sys : systems) {
        for (std::uint32_t bits = 0; bits < 64; ++bits) {
            std::vector<double> xs = bits_to_seq(bits, 6);
            std::vector<double> head(xs.begin(), xs.begin() + 3);
            double joint = sys->log_conditional(xs, 0);
            double split = sys->log_conditional(xs, 3) + sys->log_conditional(head, 0);
            CAPTURE(sys->label());
            CAPTURE(bits);
            CHECK(joint == doctest::Approx(split).epsilon(1e-10));
        }
    }
}

TEST_CASE("mixture shortcut equals step-by-step chaining") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, jeffreys_prior(f));
    for (std::uint32_t bits : {0u, 9u, 21u, 63u}) {
        std::vector<double> xs = bits_to_seq(bits, 6);
        double fast = sys.log_conditional(xs, 0);
        double slow = sys.PredictionSystem::log_conditional(xs, 0);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
    }
}

TEST_CASE("regret of the string 01 under the jeffreys mixture is ln 2") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, jeffreys_prior(f));
    std::vector<double> xs = {0.0, 1.0};
    // Q(01) = (1/2)(1/4); ML gives (1/2)^2.
    CHECK(regret2(sys, xs, 0).regret2_nats == doctest::Approx(std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("the ML element has zero regret against itself") {
    ExpFamily1D f = make_family("bernoulli");
    struct MlOracle : PredictionSystem {
        using PredictionSystem::PredictionSystem;
        std::string label() const override { return "ml-oracle"; }
        double predict_log(std::int64_t, double, double x) const override {
            return log_density(family_, 0.75, x);
        }
    } oracle(f);
    std::vector<double> xs = {1.0, 1.0, 1.0, 0.0};  // xbar = 3/4 = the oracle's element
    CHECK(regret2(oracle, xs, 0).regret2_nats == doctest::Approx(0.0));
}

TEST_CASE("NML equalizes regret at its horizon") {
    ExpFamily1D f = make_family("bernoulli");
    NmlBernoulli nml(f, 8);
    double lo = 1e300, hi = -1e300;
    for (std::uint32_t bits = 0; bits < 256; ++bits) {
        std::vector<double> xs = bits_to_seq(bits, 8);
        double r = regret2(nml, xs, 0).regret2_nats;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(hi - lo <= 1e-10);
    CHECK(lo == doctest::Approx(log_shtarkov_binomial(8)).epsilon(1e-10));
}

TEST_CASE("regret is invariant to the anchor convention") {
    ExpFamily1D base = make_family("exponential");
    auto strip = [](ExpFamily1D f, double anchor) {
        f.canonical_cf = nullptr;
        f.cumulant_cf = nullptr;
        f.sup_exponent_cf = nullptr;
        f.anchor_mean = anchor;
        return f;
    };
    std::vector<double> xs = {0.8, 1.9, 1.1, 0.6};
    BayesMixture a(strip(base, 1.0), jeffreys_prior(base));
    BayesMixture b(strip(base, 2.0), jeffreys_prior(base));
    CHECK(regret2(a, xs, 1).regret2_nats ==
          doctest::Approx(regret2(b, xs, 1).regret2_nats).epsilon(1e-10));
}

TEST_CASE("mixtures are exchangeable, snml nearly so") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture jef(f, jeffreys_prior(f));
    CHECK(exchangeability_probe(jef, 6, 0) <= 1e-12);
    CHECK(exchangeability_probe(jef, 6, 2) <= 1e-12);
    SnmlSystem snml(f);
    CHECK(exchangeability_probe(snml, 6, 0) >= 0.0);  // recorded, not asserted
}

TEST_CASE("race demonstrations at small n") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture jef(f, jeffreys_prior(f));
    BayesMixture flat(f, make_prior("flat", f));
    RaceResult same = regret_race(jef, jef, {}, 8);
    for (double g : same.gap_trace) CHECK(g == doctest::Approx(0.0));
    RaceResult sep = regret_race(jef, flat, {}, 12);
    CHECK(sep.gap_trace.back() > 0.0);
    PluginSystem plug(f);
    std::vector<double> ones(16, 1.0);
    CHECK(regret2(plug, ones, 0).regret2_nats > regret2(jef, ones, 0).regret2_nats);
}

TEST_CASE("gap experiment approaches ln J at a modest horizon") {
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, jeffreys_prior(f));
    auto sampler = make_sampler(f, 0.5);
    double mean_gap = 0.0;
    const int seeds = 8;
    for (int s = 0; s < seeds; ++s)
        mean_gap += regret_gap_experiment(sys, {}, sampler, {4096}, 77 + static_cast<std::uint64_t>(s))
                        .front()
                        .gap;
    mean_gap /= seeds;
    CHECK(std::abs(mean_gap - std::log(M_PI)) < 0.1);
}
