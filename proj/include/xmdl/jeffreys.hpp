#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "xmdl/expfam.hpp"
#include "xmdl/measures.hpp"
#include "xmdl/quadrature.hpp"

namespace xmdl {

// Unnormalized Jeffreys prior V(y)^{-1/2} on the family's mean range.
PriorMeasure jeffreys_prior(const ExpFamily1D& family);

// J = integral over M of V(x)^{-1/2} dx, with full verdict semantics.
QuadratureResult jeffreys_integral(const ExpFamily1D& family, const QuadratureOptions& opts = {});

// J | x^m = integral of exp(-m D(xbar || x)) V(x)^{-1/2} dx.
QuadratureResult conditional_jeffreys(const ExpFamily1D& family, std::int64_t m, double xbar,
                                      const QuadratureOptions& opts = {});

// --- Finiteness diagnosis ---------------------------------------------------

enum class TailClass { Light, Heavy, Unknown };
enum class TailRule { AnalyticEndpoint, LightTail, HeavyTail, NumericFallback };
enum class FiniteVerdict { Finite, Infinite, Unknown };

const char* to_string(TailRule r);
const char* to_string(FiniteVerdict v);

// Catalog-supplied structure of the base measure near the endpoints; the
// diagnosis engine applies certified rules, it does not estimate from data.
struct TailMetadata {
    // Base-measure density (x-a)^{gamma-1} g(x) near the left endpoint a with
    // g analytic and g(a) > 0.
    std::optional<double> left_endpoint_exponent;
    TailClass tail_class = TailClass::Unknown;
    std::optional<double> heavy_tail_alpha;       // q(x) = O(x^{-1-alpha})
    std::optional<double> gamma_comparison_shape; // V_gamma(x) = x^2 / k
};

struct FinitenessDiagnosis {
    FiniteVerdict verdict = FiniteVerdict::Unknown;
    TailRule rule = TailRule::NumericFallback;
    std::optional<int> required_m;  // smallest conditioning length certified
    std::string notes;
};

// Tail metadata for a catalog family id; nullopt for families the catalog
// carries no certified structure for.
std::optional<TailMetadata> tail_metadata(const std::string& family_id);

FinitenessDiagnosis diagnose(const ExpFamily1D& family, const TailMetadata& meta, std::int64_t m,
                             const QuadratureOptions& opts = {});

// --- Exponentiated-Cauchy mixture -------------------------------------------

// Exponential family based on the 1/2-1/2 mixture of a point mass at 0 and an
// exponentiated Cauchy distribution, exposed in its canonical parametrization
// beta <= 0 (the mean-value map has no closed form). Z, mean and Fisher
// information are computed by quadrature; Z evaluations are memoized behind a
// mutex so concurrent reads are safe.
class ExpCauchyFamily {
public:
    double partition(double beta) const;   // Z(beta), beta <= 0; Z(0) = 1
    double log_partition(double beta) const;  // A(beta) = ln Z(beta), anchored at 0
    double mean(double beta) const;        // mu(beta) = Z'(beta)/Z(beta)
    double fisher(double beta) const;      // I_beta = Z''/Z - (Z'/Z)^2
    double beta_from_mean(double mu) const;  // monotone bisection on mean()

    // D(P_beta0 || P_beta1).
    double divergence_beta(double beta0, double beta1) const;
    // D(delta_0 || P_beta) = ln 2 + ln Z(beta); the delta is the beta -> -inf
    // extended element.
    double divergence_from_atom(double beta) const;

    // Jeffreys and conditional Jeffreys integrals over beta in (-inf, 0).
    QuadratureResult jeffreys_integral(const QuadratureOptions& opts = {}) const;
    QuadratureResult conditional_jeffreys(std::int64_t m, double xbar,
                                          const QuadratureOptions& opts = {}) const;

private:
    struct Moments { double z, zp, zpp; };
    Moments moments(double beta) const;

    mutable std::map<double, Moments> cache_;
    mutable std::mutex cache_mutex_;
};

ExpCauchyFamily build_exp_cauchy();

}  // namespace xmdl
