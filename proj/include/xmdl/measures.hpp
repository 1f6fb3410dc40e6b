#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "xmdl/expfam.hpp"
#include "xmdl/quadrature.hpp"

namespace xmdl {

// A possibly improper prior measure, specified as a log density with respect
// to Lebesgue measure on (a subset of) the mean range. No atoms.
struct PriorMeasure {
    std::string label;
    std::function<double(double)> log_density;
    MeanRange support;
    std::optional<bool> proper_hint;
};

// Prior catalog: `jeffreys`, `flat`, `gauss-alpha:<a>` (density exp(a*y^2)),
// `exp-inv-sq` (density exp(1/y) * y^-2). Support defaults to the family's
// mean range.
PriorMeasure make_prior(const std::string& id, const ExpFamily1D& family);
std::vector<std::string> prior_catalog();

// Prior conditioned on m observations with sample average xbar; by
// sufficiency the posterior density is proportional to
// prior(y) * exp(-m * D(xbar || y)).
struct PosteriorState {
    ExpFamily1D family;
    PriorMeasure prior;
    std::int64_t m = 0;
    double xbar = 0.0;  // ignored when m == 0
};

// Integral of prior(y) * exp(-m D(xbar || y)) over the support, with full
// finiteness verdict. m = 0 reduces to the raw prior mass.
QuadratureResult prior_normalizer(const PosteriorState& state, const QuadratureOptions& opts = {});

// Finiteness verdict of the prior normalizer: xbar ∈ F_m?
Verdict in_Fm(const PriorMeasure& prior, const ExpFamily1D& family, std::int64_t m, double xbar,
              const QuadratureOptions& opts = {});

// ln of the normalized posterior density at y. Throws NotNormalizable when
// the normalizer is not certified Finite.
double posterior_log_density(const PosteriorState& state, double y,
                             const QuadratureOptions& opts = {});

}  // namespace xmdl
