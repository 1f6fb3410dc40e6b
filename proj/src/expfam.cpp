#include "xmdl/expfam.hpp"

#include <cmath>

#include "xmdl/errors.hpp"

namespace xmdl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

bool is_nonneg_integer(double x) {
    return x >= 0 && std::isfinite(x) && x == std::floor(x);
}

bool at_left_atom(const ExpFamily1D& f, double mu) {
    return f.left_point_mass && std::isfinite(f.mean_range.mu_inf) && mu == f.mean_range.mu_inf;
}
bool at_right_atom(const ExpFamily1D& f, double mu) {
    return f.right_point_mass && std::isfinite(f.mean_range.mu_sup) && mu == f.mean_range.mu_sup;
}

void require_interior(const ExpFamily1D& f, double mu, const char* op) {
    if (!f.mean_range.interior(mu))
        throw DomainError(std::string(op) + ": mean " + std::to_string(mu) +
                          " not interior to the mean range of " + f.name);
}

}  // namespace

void MeanRange::validate() const {
    if (!(mu_inf < mu_sup)) throw DomainError("mean range requires mu_inf < mu_sup");
    if (left_closed && !std::isfinite(mu_inf))
        throw DomainError("a closed endpoint must be finite");
    if (right_closed && !std::isfinite(mu_sup))
        throw DomainError("a closed endpoint must be finite");
}

double divergence(const ExpFamily1D& f, double mu0, double mu1, const QuadratureOptions& opts) {
    if (!f.mean_range.in_closure(mu0) || !f.mean_range.in_closure(mu1))
        throw DomainError("divergence: argument outside the closure of the mean range");
    if (mu0 == mu1) return 0.0;
    if (f.divergence_cf) return f.divergence_cf(mu0, mu1);
    // Quadrature of (mu - mu0)/V along the directed interval; the integrand is
    // nonnegative for either orientation after folding the sign.
    double lo = std::min(mu0, mu1), hi = std::max(mu0, mu1);
    auto integrand = [&](double mu) { return std::abs(mu - mu0) / f.variance(mu); };
    QuadratureResult r = integrate(integrand, lo, hi, opts);
    if (r.verdict == Verdict::Divergent) return kInf;
    return r.require();
}

double canonical_param(const ExpFamily1D& f, double mu, const QuadratureOptions& opts) {
    require_interior(f, mu, "canonical_param");
    if (f.canonical_cf) return f.canonical_cf(mu);
    double a = f.anchor_mean, sign = 1.0;
    if (mu < a) { std::swap(a, mu); sign = -1.0; }
    auto integrand = [&](double v) { return 1.0 / f.variance(v); };
    return sign * integrate(integrand, a, mu, opts).require();
}

double cumulant(const ExpFamily1D& f, double mu, const QuadratureOptions& opts) {
    require_interior(f, mu, "cumulant");
    if (f.cumulant_cf) return f.cumulant_cf(mu);
    double a = f.anchor_mean, sign = 1.0;
    if (mu < a) { std::swap(a, mu); sign = -1.0; }
    auto integrand = [&](double v) { return v / f.variance(v); };
    return sign * integrate(integrand, a, mu, opts).require();
}

double ml_mean(const ExpFamily1D& f, double xbar) {
    if (!f.mean_range.in_closure(xbar))
        throw DomainError("ml_mean: sample average outside the closure of the mean range");
    if (f.mean_range.interior(xbar)) return xbar;
    if (at_left_atom(f, xbar) || at_right_atom(f, xbar)) return xbar;
    throw DomainError("ml_mean: sample average at an endpoint without a point mass in " + f.name);
}

double log_density(const ExpFamily1D& f, double mu, double x) {
    if (at_left_atom(f, mu) || at_right_atom(f, mu))
        return x == mu ? 0.0 : -kInf;  // delta element
    require_interior(f, mu, "log_density");
    if (!f.log_density_cf)
        throw DomainError("log_density: family " + f.name + " has no density closed form");
    return f.log_density_cf(mu, x);
}

double sup_exponent(const ExpFamily1D& f, double mu, const QuadratureOptions& opts) {
    if (f.sup_exponent_cf) {
        if (!f.mean_range.in_closure(mu))
            throw DomainError("sup_exponent: argument outside the closure");
        if (!f.mean_range.interior(mu) && !at_left_atom(f, mu) && !at_right_atom(f, mu))
            throw DomainError("sup_exponent: endpoint without a point mass");
        return f.sup_exponent_cf(mu);
    }
    require_interior(f, mu, "sup_exponent");
    return canonical_param(f, mu, opts) * mu - cumulant(f, mu, opts);
}

namespace {

ExpFamily1D bernoulli_family() {
    ExpFamily1D f;
    f.name = "bernoulli";
    f.mean_range = {0.0, 1.0, true, true};
    f.variance = [](double mu) { return mu * (1.0 - mu); };
    f.discrete = true;
    f.anchor_mean = 0.5;
    f.left_point_mass = f.right_point_mass = true;
    f.binary_support = true;
    f.divergence_cf = [](double a, double b) {
        if (a == b) return 0.0;
        if (b <= 0.0 || b >= 1.0) return kInf;  // any interior a vs a boundary target
        return xlogx(a) - a * std::log(b) + xlogx(1.0 - a) - (1.0 - a) * std::log(1.0 - b);
    };
    f.canonical_cf = [](double mu) { return std::log(mu / (1.0 - mu)); };
    f.cumulant_cf = [](double mu) { return -std::log(1.0 - mu) - std::log(2.0); };
    f.log_density_cf = [](double mu, double x) {
        if (x != 0.0 && x != 1.0) throw DomainError("bernoulli: observation must be 0 or 1");
        return x == 1.0 ? std::log(mu) : std::log(1.0 - mu);
    };
    f.sup_exponent_cf = [](double mu) {
        return xlogx(mu) + xlogx(1.0 - mu) + std::log(2.0);
    };
    return f;
}

ExpFamily1D gaussian_location_family() {
    ExpFamily1D f;
    f.name = "gaussian-location";
    f.mean_range = {-kInf, kInf, false, false};
    f.variance = [](double) { return 1.0; };
    f.anchor_mean = 0.0;
    f.divergence_cf = [](double a, double b) { return 0.5 * (a - b) * (a - b); };
    f.canonical_cf = [](double mu) { return mu; };
    f.cumulant_cf = [](double mu) { return 0.5 * mu * mu; };
    f.log_density_cf = [](double mu, double x) {
        return -0.5 * (x - mu) * (x - mu) - 0.5 * std::log(2.0 * M_PI);
    };
    f.sup_exponent_cf = [](double mu) { return 0.5 * mu * mu; };
    return f;
}

ExpFamily1D poisson_family() {
    ExpFamily1D f;
    f.name = "poisson";
    f.mean_range = {0.0, kInf, true, false};
    f.variance = [](double mu) { return mu; };
    f.discrete = true;
    f.anchor_mean = 1.0;
    f.left_point_mass = true;
    f.nonneg_int_support = true;
    f.divergence_cf = [](double a, double b) {
        if (a == b) return 0.0;
        if (b <= 0.0) return kInf;
        return b - a + (a > 0 ? a * std::log(a / b) : 0.0);
    };
    f.canonical_cf = [](double mu) { return std::log(mu); };
    f.cumulant_cf = [](double mu) { return mu - 1.0; };
    f.log_density_cf = [](double mu, double x) {
        if (!is_nonneg_integer(x)) throw DomainError("poisson: observation must be a nonnegative integer");
        return -mu + x * std::log(mu) - std::lgamma(x + 1.0);
    };
    f.sup_exponent_cf = [](double mu) { return xlogx(mu) - mu + 1.0; };
    return f;
}

ExpFamily1D exponential_family() {
    ExpFamily1D f;
    f.name = "exponential";
    f.mean_range = {0.0, kInf, false, false};
    f.variance = [](double mu) { return mu * mu; };
    f.anchor_mean = 1.0;
    f.divergence_cf = [](double a, double b) {
        if (a == b) return 0.0;
        if (b <= 0.0 || a <= 0.0) return kInf;
        return a / b - 1.0 - std::log(a / b);
    };
    f.canonical_cf = [](double mu) { return 1.0 - 1.0 / mu; };
    f.cumulant_cf = [](double mu) { return std::log(mu); };
    f.log_density_cf = [](double mu, double x) {
        if (x < 0) throw DomainError("exponential: observation must be nonnegative");
        return -std::log(mu) - x / mu;
    };
    f.sup_exponent_cf = [](double mu) { return mu - 1.0 - std::log(mu); };
    return f;
}

ExpFamily1D gamma_family(double k) {
    if (!(k > 0)) throw ConfigError("gamma family requires shape k > 0");
    ExpFamily1D f;
    f.name = "gamma:k=" + std::to_string(k);
    f.mean_range = {0.0, kInf, false, false};
    f.variance = [k](double mu) { return mu * mu / k; };
    f.anchor_mean = 1.0;
    f.divergence_cf = [k](double a, double b) {
        if (a == b) return 0.0;
        if (b <= 0.0 || a <= 0.0) return kInf;
        return k * (a / b - 1.0 - std::log(a / b));
    };
    f.canonical_cf = [k](double mu) { return k * (1.0 - 1.0 / mu); };
    f.cumulant_cf = [k](double mu) { return k * std::log(mu); };
    f.log_density_cf = [k](double mu, double x) {
        if (x <= 0) throw DomainError("gamma: observation must be positive");
        return k * std::log(k / mu) + (k - 1.0) * std::log(x) - k * x / mu - std::lgamma(k);
    };
    f.sup_exponent_cf = [k](double mu) { return k * (mu - 1.0 - std::log(mu)); };
    return f;
}

ExpFamily1D geometric_family() {
    ExpFamily1D f;
    f.name = "geometric";
    f.mean_range = {0.0, kInf, true, false};
    f.variance = [](double mu) { return mu * (1.0 + mu); };
    f.discrete = true;
    f.anchor_mean = 1.0;
    f.left_point_mass = true;
    f.nonneg_int_support = true;
    f.divergence_cf = [](double a, double b) {
        if (a == b) return 0.0;
        if (b <= 0.0) return kInf;
        return (a > 0 ? a * std::log(a / b) : 0.0) + (1.0 + a) * std::log((1.0 + b) / (1.0 + a));
    };
    f.canonical_cf = [](double mu) { return std::log(mu / (1.0 + mu)) + std::log(2.0); };
    f.cumulant_cf = [](double mu) { return std::log((1.0 + mu) / 2.0); };
    f.log_density_cf = [](double mu, double x) {
        if (!is_nonneg_integer(x)) throw DomainError("geometric: observation must be a nonnegative integer");
        return x * std::log(mu / (1.0 + mu)) - std::log(1.0 + mu);
    };
    f.sup_exponent_cf = [](double mu) {
        return xlogx(mu) - (1.0 + mu) * std::log1p(mu) + (1.0 + mu) * std::log(2.0);
    };
    return f;
}

}  // namespace

ExpFamily1D make_family(const std::string& id) {
    if (id == "bernoulli") return bernoulli_family();
    if (id == "gaussian-location") return gaussian_location_family();
    if (id == "poisson") return poisson_family();
    if (id == "exponential") return exponential_family();
    if (id == "geometric") return geometric_family();
    if (id.rfind("gamma:k=", 0) == 0) {
        try {
            return gamma_family(std::stod(id.substr(8)));
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad gamma shape in family id '" + id + "'");
        }
    }
    throw ConfigError("unknown family id '" + id + "'");
}

std::vector<std::string> family_catalog() {
    return {"bernoulli", "gaussian-location", "poisson", "exponential", "gamma:k=<shape>",
            "geometric", "exp-cauchy"};
}

std::uint16_t family_hash(const std::string& id) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return static_cast<std::uint16_t>(h ^ (h >> 16) ^ (h >> 32) ^ (h >> 48));
}

}  // namespace xmdl
