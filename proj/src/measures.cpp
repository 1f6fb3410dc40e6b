#include "xmdl/measures.hpp"

#include <cmath>

#include "xmdl/errors.hpp"

namespace xmdl {

namespace {

double parse_param(const std::string& id, const std::string& prefix) {
    try {
        return std::stod(id.substr(prefix.size()));
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad parameter in prior id '" + id + "'");
    }
}

}  // namespace

PriorMeasure make_prior(const std::string& id, const ExpFamily1D& family) {
    PriorMeasure p;
    p.label = id;
    p.support = family.mean_range;
    if (id == "jeffreys") {
        auto variance = family.variance;
        p.log_density = [variance](double y) { return -0.5 * std::log(variance(y)); };
        return p;
    }
    if (id == "flat") {
        p.log_density = [](double) { return 0.0; };
        return p;
    }
    if (id.rfind("gauss-alpha:", 0) == 0) {
        double alpha = parse_param(id, "gauss-alpha:");
        p.log_density = [alpha](double y) { return alpha * y * y; };
        return p;
    }
    if (id == "exp-inv-sq") {
        p.log_density = [](double y) { return 1.0 / y - 2.0 * std::log(y); };
        return p;
    }
    throw ConfigError("unknown prior id '" + id + "'");
}

std::vector<std::string> prior_catalog() {
    return {"jeffreys", "flat", "gauss-alpha:<a>", "exp-inv-sq"};
}

QuadratureResult prior_normalizer(const PosteriorState& state, const QuadratureOptions& opts) {
    const auto& f = state.family;
    const auto& prior = state.prior;
    if (state.m < 0) throw DomainError("prior_normalizer: m must be nonnegative");
    if (state.m > 0 && !f.mean_range.in_closure(state.xbar))
        throw DomainError("prior_normalizer: xbar outside the closure of the mean range");
    const std::int64_t m = state.m;
    const double xbar = state.xbar;
    auto integrand = [&, m, xbar](double y) {
        double lp = prior.log_density(y);
        if (m > 0) lp -= static_cast<double>(m) * divergence(f, xbar, y);
        return std::exp(lp);
    };
    double split = std::numeric_limits<double>::quiet_NaN();
    if (m > 0 && prior.support.interior(xbar)) split = xbar;  // posterior peak
    return integrate(integrand, prior.support.mu_inf, prior.support.mu_sup, opts, split);
}

Verdict in_Fm(const PriorMeasure& prior, const ExpFamily1D& family, std::int64_t m, double xbar,
              const QuadratureOptions& opts) {
    if (m < 1) throw DomainError("in_Fm: m must be at least 1");
    return prior_normalizer({family, prior, m, xbar}, opts).verdict;
}

double posterior_log_density(const PosteriorState& state, double y, const QuadratureOptions& opts) {
    QuadratureResult norm = prior_normalizer(state, opts);
    if (!norm.finite())
        throw NotNormalizable("posterior normalizer verdict: " + std::string(to_string(norm.verdict)));
    double lp = state.prior.log_density(y);
    if (state.m > 0) lp -= static_cast<double>(state.m) * divergence(state.family, state.xbar, y);
    return lp - std::log(norm.value);
}

}  // namespace xmdl
