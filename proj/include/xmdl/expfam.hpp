#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "xmdl/quadrature.hpp"

namespace xmdl {

// Open/closed interval of mean values; endpoints may be infinite, and an
// endpoint may be closed only when it is finite.
struct MeanRange {
    double mu_inf = -std::numeric_limits<double>::infinity();
    double mu_sup = std::numeric_limits<double>::infinity();
    bool left_closed = false;
    bool right_closed = false;

    bool interior(double mu) const { return mu > mu_inf && mu < mu_sup; }
    bool in_closure(double mu) const { return mu >= mu_inf && mu <= mu_sup; }
    void validate() const;
};

// A one-dimensional exponential family described by its mean range and
// variance function. Catalog families additionally carry closed forms; the
// variance-function-only path is what generic code exercises.
struct ExpFamily1D {
    std::string name;
    MeanRange mean_range;
    std::function<double(double)> variance;  // V(mu) > 0 on the interior
    bool discrete = false;
    double anchor_mean = 0.0;  // canonical param and cumulant pinned to 0 here
    bool left_point_mass = false;   // extended family contains delta at mu_inf
    bool right_point_mass = false;  // ... and at mu_sup

    // Optional closed forms; quadrature of the variance function is the
    // fallback for each.
    std::function<double(double, double)> divergence_cf;   // D(mu0 || mu1)
    std::function<double(double)> canonical_cf;            // beta_hat(mu), anchored
    std::function<double(double)> cumulant_cf;             // A(beta_hat(mu)), anchored
    std::function<double(double, double)> log_density_cf;  // (mu, x) -> ln p
    // g(mu) = beta_hat(mu)*mu - A(beta_hat(mu)), extended by continuity to
    // closed endpoints. n*g(xbar) is the sufficient-statistic part of the
    // maximized log-likelihood.
    std::function<double(double)> sup_exponent_cf;

    // Discrete support shape (for next-symbol enumeration).
    bool binary_support = false;       // {0, 1}
    bool nonneg_int_support = false;   // {0, 1, 2, ...}
};

// --- Operations -----------------------------------------------------------

// Information divergence D(mu0 || mu1) = integral_{mu0}^{mu1} (mu-mu0)/V(mu) dmu.
// Returns +infinity when the integral diverges (e.g. mu1 at an endpoint
// without a point mass). Throws DomainError outside the closure.
double divergence(const ExpFamily1D& f, double mu0, double mu1,
                  const QuadratureOptions& opts = {});

// Canonical parameter beta_hat(mu), anchored so beta_hat(anchor_mean) = 0.
double canonical_param(const ExpFamily1D& f, double mu, const QuadratureOptions& opts = {});

// Cumulant A(beta_hat(mu)), anchored to 0 at anchor_mean.
double cumulant(const ExpFamily1D& f, double mu, const QuadratureOptions& opts = {});

// Mean parameter of the maximum-likelihood element for sample average xbar.
// Finite endpoints map to the extended delta element only when the family has
// a point mass there; otherwise DomainError.
double ml_mean(const ExpFamily1D& f, double xbar);

// ln pmf/pdf of observation x under the mean-mu element. mu may be a closed endpoint
// with a point mass (delta element).
double log_density(const ExpFamily1D& f, double mu, double x);

// g(mu) = beta_hat(mu)*mu - A(beta_hat(mu)), extended to atom endpoints.
double sup_exponent(const ExpFamily1D& f, double mu, const QuadratureOptions& opts = {});

// --- Catalog ---------------------------------------------------------------

// Identifiers: bernoulli, gaussian-location, poisson, exponential,
// gamma:k=<shape>, geometric. Throws ConfigError for unknown ids.
ExpFamily1D make_family(const std::string& id);
std::vector<std::string> family_catalog();

// Stable 16-bit hash of the family id (codec file headers).
std::uint16_t family_hash(const std::string& id);

}  // namespace xmdl
