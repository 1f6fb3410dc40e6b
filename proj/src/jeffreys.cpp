#include "xmdl/jeffreys.hpp"

#include <cmath>

#include "xmdl/errors.hpp"

namespace xmdl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTau = 2.0 * M_PI;
}

const char* to_string(TailRule r) {
    switch (r) {
        case TailRule::AnalyticEndpoint: return "analytic-endpoint";
        case TailRule::LightTail: return "light-tail";
        case TailRule::HeavyTail: return "heavy-tail";
        case TailRule::NumericFallback: return "numeric-fallback";
    }
    return "?";
}

const char* to_string(FiniteVerdict v) {
    switch (v) {
        case FiniteVerdict::Finite: return "finite";
        case FiniteVerdict::Infinite: return "infinite";
        case FiniteVerdict::Unknown: return "unknown";
    }
    return "?";
}

PriorMeasure jeffreys_prior(const ExpFamily1D& family) {
    PriorMeasure p = make_prior("jeffreys", family);
    return p;
}

QuadratureResult jeffreys_integral(const ExpFamily1D& family, const QuadratureOptions& opts) {
    auto integrand = [&family](double x) { return 1.0 / std::sqrt(family.variance(x)); };
    return integrate(integrand, family.mean_range.mu_inf, family.mean_range.mu_sup, opts);
}

QuadratureResult conditional_jeffreys(const ExpFamily1D& family, std::int64_t m, double xbar,
                                      const QuadratureOptions& opts) {
    if (m < 1) throw DomainError("conditional_jeffreys: m must be at least 1");
    if (!family.mean_range.interior(xbar) &&
        !(family.left_point_mass && xbar == family.mean_range.mu_inf) &&
        !(family.right_point_mass && xbar == family.mean_range.mu_sup))
        throw DomainError("conditional_jeffreys: xbar must be interior or a point-mass endpoint");
    auto integrand = [&family, m, xbar](double x) {
        double d = divergence(family, xbar, x);
        return std::exp(-static_cast<double>(m) * d - 0.5 * std::log(family.variance(x)));
    };
    double split = family.mean_range.interior(xbar) ? xbar
                                                    : std::numeric_limits<double>::quiet_NaN();
    return integrate(integrand, family.mean_range.mu_inf, family.mean_range.mu_sup, opts, split);
}

// --- Diagnosis --------------------------------------------------------------

std::optional<TailMetadata> tail_metadata(const std::string& family_id) {
    TailMetadata m;
    if (family_id == "exponential") {
        m.left_endpoint_exponent = 1.0;  // base density e^{-x} near 0
        m.tail_class = TailClass::Light;
        m.gamma_comparison_shape = 1.0;
        return m;
    }
    if (family_id.rfind("gamma:k=", 0) == 0) {
        double k = std::stod(family_id.substr(8));
        m.left_endpoint_exponent = k;
        m.tail_class = TailClass::Light;
        m.gamma_comparison_shape = k;
        return m;
    }
    if (family_id == "geometric") {
        m.left_endpoint_exponent = 1.0;  // point mass at 0
        m.tail_class = TailClass::Light;
        m.gamma_comparison_shape = 1.0;
        return m;
    }
    if (family_id == "exp-cauchy") {
        m.tail_class = TailClass::Heavy;
        return m;
    }
    return std::nullopt;  // bernoulli, gaussian-location, poisson: numeric fallback
}

namespace {

// liminf V(x)/V_gamma(x) probed on a geometric grid up to 1e6.
bool light_tail_holds(const ExpFamily1D& f, double shape_k) {
    double lo = std::isfinite(f.mean_range.mu_inf) ? f.mean_range.mu_inf + 1.0 : 1.0;
    double min_ratio = kInf;
    for (double x = lo; x <= 1e6; x *= 2.0) {
        if (!f.mean_range.interior(x)) break;
        min_ratio = std::min(min_ratio, f.variance(x) / (x * x / shape_k));
    }
    return min_ratio > 1e-6;
}

FinitenessDiagnosis numeric_fallback(const ExpFamily1D& f, std::int64_t m,
                                     const QuadratureOptions& opts) {
    FinitenessDiagnosis d;
    d.rule = TailRule::NumericFallback;
    QuadratureResult j = jeffreys_integral(f, opts);
    if (j.finite()) {
        d.verdict = FiniteVerdict::Finite;
        d.required_m = 0;
        d.notes = "unconditional Jeffreys integral finite by quadrature";
        return d;
    }
    // Probe the conditional integral at representative interior averages.
    double probes[3];
    if (std::isfinite(f.mean_range.mu_inf) && std::isfinite(f.mean_range.mu_sup)) {
        double a = f.mean_range.mu_inf, b = f.mean_range.mu_sup;
        probes[0] = a + 0.25 * (b - a);
        probes[1] = a + 0.5 * (b - a);
        probes[2] = a + 0.75 * (b - a);
    } else {
        double c = f.mean_range.interior(f.anchor_mean) ? f.anchor_mean : 1.0;
        probes[0] = 0.5 * c;
        probes[1] = c;
        probes[2] = 2.0 * c;
    }
    bool all_finite = true, any_divergent = false, any_inconclusive = false;
    for (double x : probes) {
        if (!f.mean_range.interior(x)) continue;
        Verdict v = conditional_jeffreys(f, std::max<std::int64_t>(m, 1), x, opts).verdict;
        all_finite = all_finite && v == Verdict::Finite;
        any_divergent = any_divergent || v == Verdict::Divergent;
        any_inconclusive = any_inconclusive || v == Verdict::Inconclusive;
    }
    if (any_divergent) {
        d.verdict = FiniteVerdict::Infinite;
        d.notes = "conditional Jeffreys integral divergent at probe averages";
    } else if (any_inconclusive || !all_finite) {
        d.verdict = FiniteVerdict::Unknown;
        d.notes = "quadrature inconclusive at probe averages";
    } else {
        d.verdict = FiniteVerdict::Finite;
        d.required_m = static_cast<int>(std::max<std::int64_t>(m, 1));
        d.notes = "conditional Jeffreys integral finite at probe averages";
    }
    return d;
}

}  // namespace

FinitenessDiagnosis diagnose(const ExpFamily1D& family, const TailMetadata& meta, std::int64_t m,
                             const QuadratureOptions& opts) {
    if (m < 1) throw DomainError("diagnose: m must be at least 1");
    FinitenessDiagnosis d;

    if (meta.tail_class == TailClass::Heavy) {
        // Heavy tail links conditional and unconditional finiteness.
        d.rule = TailRule::HeavyTail;
        if (meta.heavy_tail_alpha) {
            d.verdict = FiniteVerdict::Finite;
            d.required_m = 0;
            d.notes = "heavy tail with q(x) = O(x^{-1-alpha}): unconditional integral finite";
            return d;
        }
        QuadratureResult j = jeffreys_integral(family, opts);
        if (j.verdict == Verdict::Divergent) {
            d.verdict = FiniteVerdict::Infinite;
            d.notes = "heavy tail with infinite Jeffreys integral: every conditional integral infinite";
        } else if (j.finite()) {
            d.verdict = FiniteVerdict::Finite;
            d.required_m = 0;
            d.notes = "heavy tail with finite Jeffreys integral";
        } else {
            d.verdict = FiniteVerdict::Unknown;
            d.notes = "heavy tail, unconditional quadrature inconclusive";
        }
        return d;
    }

    bool left_ok = meta.left_endpoint_exponent.has_value() && std::isfinite(family.mean_range.mu_inf);
    bool right_ok = meta.tail_class == TailClass::Light && meta.gamma_comparison_shape &&
                    light_tail_holds(family, *meta.gamma_comparison_shape);
    if (std::isfinite(family.mean_range.mu_sup)) right_ok = right_ok || left_ok;  // bounded above: no tail
    if (left_ok && right_ok) {
        d.verdict = FiniteVerdict::Finite;
        d.rule = TailRule::LightTail;
        d.required_m = static_cast<int>(m);
        d.notes = "left endpoint analytic (exponent " +
                  std::to_string(*meta.left_endpoint_exponent) + "), right tail dominates a Gamma family";
        return d;
    }
    return numeric_fallback(family, m, opts);
}

// --- Exponentiated-Cauchy mixture --------------------------------------------
//
// Q = 1/2 delta_0 + 1/2 exp(Cauchy); the continuous part has density
// 2 / (tau x (1 + log^2 x)). With u = log x and the shift v = u - log(1/|beta|)
// the moment integrands acquire the fixed shape e^{jv - e^v} modulated by a
// slowly varying Cauchy factor, so compact quadrature never misses the peak
// even for |beta| down to 2^-64.

ExpCauchyFamily::Moments ExpCauchyFamily::moments(double beta) const {
    if (beta > 0) throw DomainError("exp-cauchy: beta must be <= 0");
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(beta);
        if (it != cache_.end()) return it->second;
    }
    Moments mo{};
    QuadratureOptions q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-11;
    if (beta == 0.0) {
        mo.z = 1.0;
        mo.zp = kInf;
        mo.zpp = kInf;
    } else {
        const double L = -std::log(-beta);  // log(1/|beta|)
        const double v0 = -40.0;
        auto cauchy = [L](double v) { return 1.0 / (1.0 + (v + L) * (v + L)); };
        double z_core = integrate([&](double v) { return std::exp(-std::exp(v)) * cauchy(v); },
                                  v0, 5.0, q).require();
        double z_tail = std::atan(v0 + L) + M_PI / 2.0;  // exp(-e^v) ~ 1 below v0
        mo.z = 0.5 + (z_core + z_tail) / kTau;
        double i1 = integrate([&](double v) { return std::exp(v - std::exp(v)) * cauchy(v); },
                              -45.0, 6.0, q).require();
        mo.zp = i1 / (kTau * (-beta));
        double i2 = integrate([&](double v) { return std::exp(2.0 * v - std::exp(v)) * cauchy(v); },
                              -45.0, 7.0, q).require();
        mo.zpp = i2 / (kTau * beta * beta);
    }
    std::lock_guard<std::mutex> lock(cache_mutex_);
    cache_.emplace(beta, mo);
    return mo;
}

double ExpCauchyFamily::partition(double beta) const { return moments(beta).z; }

double ExpCauchyFamily::log_partition(double beta) const { return std::log(moments(beta).z); }

double ExpCauchyFamily::mean(double beta) const {
    if (beta >= 0) throw DomainError("exp-cauchy: mean defined for beta < 0");
    Moments mo = moments(beta);
    return mo.zp / mo.z;
}

double ExpCauchyFamily::fisher(double beta) const {
    if (beta >= 0) throw DomainError("exp-cauchy: fisher defined for beta < 0");
    Moments mo = moments(beta);
    double mu = mo.zp / mo.z;
    return mo.zpp / mo.z - mu * mu;
}

double ExpCauchyFamily::beta_from_mean(double mu) const {
    if (!(mu > 0) || !std::isfinite(mu))
        throw DomainError("exp-cauchy: mean must be positive and finite");
    double hi = -1.0;
    while (mean(hi) < mu) hi *= 0.5;          // push toward 0-
    double lo = 2.0 * hi;
    while (mean(lo) > mu) lo *= 2.0;          // push toward -inf
    for (int i = 0; i < 200 && hi - lo > 1e-14 * std::abs(lo); ++i) {
        double mid = 0.5 * (lo + hi);
        (mean(mid) < mu ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double ExpCauchyFamily::divergence_beta(double beta0, double beta1) const {
    return (beta0 - beta1) * mean(beta0) - log_partition(beta0) + log_partition(beta1);
}

double ExpCauchyFamily::divergence_from_atom(double beta) const {
    return std::log(2.0) + log_partition(beta);
}

QuadratureResult ExpCauchyFamily::jeffreys_integral(const QuadratureOptions& opts) const {
    auto integrand = [this](double b) { return std::sqrt(fisher(b)); };
    return integrate(integrand, -kInf, 0.0, opts, -1.0);
}

QuadratureResult ExpCauchyFamily::conditional_jeffreys(std::int64_t m, double xbar,
                                                       const QuadratureOptions& opts) const {
    if (m < 1) throw DomainError("conditional_jeffreys: m must be at least 1");
    const double beta_bar = beta_from_mean(xbar);
    const double g_bar = beta_bar * xbar - log_partition(beta_bar);
    auto integrand = [this, m, xbar, g_bar](double b) {
        double d = g_bar - b * xbar + log_partition(b);  // D(P^xbar || P_b)
        return std::exp(-static_cast<double>(m) * d) * std::sqrt(fisher(b));
    };
    return integrate(integrand, -kInf, 0.0, opts, beta_bar);
}

ExpCauchyFamily build_exp_cauchy() { return ExpCauchyFamily{}; }

}  // namespace xmdl
