#include "xmdl/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xmdl/errors.hpp"
#include "xmdl/jeffreys.hpp"

namespace xmdl {

namespace {

constexpr double kTau = 2.0 * M_PI;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double partial_mean(std::span<const double> xs, std::int64_t k) {
    if (k == 0) return 0.0;
    double s = std::accumulate(xs.begin(), xs.begin() + k, 0.0);
    return s / static_cast<double>(k);
}

double log_binom(std::int64_t n, std::int64_t k) {
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

}  // namespace

double PredictionSystem::log_conditional(std::span<const double> xs, std::int64_t m) const {
    const std::int64_t n = static_cast<std::int64_t>(xs.size());
    if (m < 0 || m > n) throw DomainError("log_conditional: m out of range");
    double sum = std::accumulate(xs.begin(), xs.begin() + m, 0.0);
    double total = 0.0;
    for (std::int64_t i = m; i < n; ++i) {
        double xbar = i > 0 ? sum / static_cast<double>(i) : 0.0;
        total += predict_log(i, xbar, xs[i]);
        sum += xs[i];
    }
    return total;
}

// --- Bayes mixture -----------------------------------------------------------

BayesMixture::BayesMixture(ExpFamily1D family, PriorMeasure prior, QuadratureOptions opts)
    : PredictionSystem(std::move(family)), prior_(std::move(prior)), opts_(opts) {}

double BayesMixture::log_normalizer(std::int64_t m, double xbar) const {
    // Discrete families revisit the same integer sufficient statistic; keying
    // on the (m, sum) pair makes whole-trajectory evaluation O(1) quadratures.
    double key_stat = m == 0 ? 0.0
                     : family_.discrete ? std::nearbyint(static_cast<double>(m) * xbar)
                                        : static_cast<double>(m) * xbar;
    std::pair<std::int64_t, double> key{m, key_stat};
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
    }
    QuadratureResult r = prior_normalizer({family_, prior_, m, xbar}, opts_);
    double v = r.finite() ? std::log(r.value) : kNaN;
    std::lock_guard<std::mutex> lock(memo_mutex_);
    memo_.emplace(key, v);
    return v;
}

double BayesMixture::predict_log(std::int64_t m, double xbar, double x) const {
    double ln_i_m = log_normalizer(m, xbar);
    if (std::isnan(ln_i_m))
        throw NotYetDefined("mixture not normalizable at m=" + std::to_string(m));
    double xb1 = m == 0 ? x : (static_cast<double>(m) * xbar + x) / static_cast<double>(m + 1);
    double ln_i_m1 = log_normalizer(m + 1, xb1);
    if (std::isnan(ln_i_m1))
        throw NotYetDefined("mixture not normalizable at m=" + std::to_string(m + 1));
    double g1 = sup_exponent(family_, xb1, opts_);
    double g0 = m == 0 ? 0.0 : sup_exponent(family_, xbar, opts_);
    return log_density(family_, family_.anchor_mean, x) +
           static_cast<double>(m + 1) * g1 - static_cast<double>(m) * g0 + ln_i_m1 - ln_i_m;
}

double BayesMixture::log_conditional(std::span<const double> xs, std::int64_t m) const {
    const std::int64_t n = static_cast<std::int64_t>(xs.size());
    if (m < 0 || m > n) throw DomainError("log_conditional: m out of range");
    if (m == n) return 0.0;
    double xbm = partial_mean(xs, m);
    double xbn = partial_mean(xs, n);
    double ln_i_m = log_normalizer(m, xbm);
    if (std::isnan(ln_i_m))
        throw NotYetDefined("mixture not normalizable at m=" + std::to_string(m));
    double ln_i_n = log_normalizer(n, xbn);
    if (std::isnan(ln_i_n))
        throw NotYetDefined("mixture not normalizable at n=" + std::to_string(n));
    double lh = 0.0;
    for (std::int64_t i = m; i < n; ++i) lh += log_density(family_, family_.anchor_mean, xs[i]);
    double gm = m == 0 ? 0.0 : sup_exponent(family_, xbm, opts_);
    return lh + static_cast<double>(n) * sup_exponent(family_, xbn, opts_) -
           static_cast<double>(m) * gm + ln_i_n - ln_i_m;
}

// --- SNML ---------------------------------------------------------------------

SnmlSystem::SnmlSystem(ExpFamily1D family, QuadratureOptions opts)
    : PredictionSystem(std::move(family)), opts_(opts) {}

// ln of the maximized likelihood of the extended string, with the factors
// shared by every candidate next symbol dropped.
double SnmlSystem::log_weight(std::int64_t m, double xbar, double x) const {
    double xb1 = m == 0 ? x : (static_cast<double>(m) * xbar + x) / static_cast<double>(m + 1);
    return log_density(family_, family_.anchor_mean, x) +
           static_cast<double>(m + 1) * sup_exponent(family_, xb1, opts_);
}

double SnmlSystem::log_normalizer(std::int64_t m, double xbar) const {
    double key_stat = m == 0 ? 0.0
                     : family_.discrete ? std::nearbyint(static_cast<double>(m) * xbar)
                                        : static_cast<double>(m) * xbar;
    std::pair<std::int64_t, double> key{m, key_stat};
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
    }
    double v;
    if (family_.binary_support) {
        double w0 = log_weight(m, xbar, 0.0), w1 = log_weight(m, xbar, 1.0);
        double hi = std::max(w0, w1);
        v = hi + std::log(std::exp(w0 - hi) + std::exp(w1 - hi));
    } else if (family_.nonneg_int_support) {
        // Sum until the tail is provably negligible past the weight's peak.
        double hi = -std::numeric_limits<double>::infinity();
        std::vector<double> lws;
        double prev = -std::numeric_limits<double>::infinity();
        for (std::int64_t x = 0; x < 1000000; ++x) {
            double lw = log_weight(m, xbar, static_cast<double>(x));
            lws.push_back(lw);
            hi = std::max(hi, lw);
            if (x > 2 && lw < prev && lw < hi - 46.0) break;
            prev = lw;
        }
        double s = 0.0;
        for (double lw : lws) s += std::exp(lw - hi);
        v = hi + std::log(s);
    } else {
        auto f = [this, m, xbar](double x) { return std::exp(log_weight(m, xbar, x)); };
        QuadratureResult r =
            integrate(f, family_.mean_range.mu_inf, family_.mean_range.mu_sup, opts_,
                      m > 0 ? xbar : family_.anchor_mean);
        if (!r.finite())
            throw NotNormalizable("single-step maximized likelihood does not normalize");
        v = std::log(r.value);
    }
    std::lock_guard<std::mutex> lock(memo_mutex_);
    memo_.emplace(key, v);
    return v;
}

double SnmlSystem::predict_log(std::int64_t m, double xbar, double x) const {
    return log_weight(m, xbar, x) - log_normalizer(m, xbar);
}

// --- Fixed-horizon NML ---------------------------------------------------------

namespace {

// ln of the maximized binary likelihood of a length-n string with s ones.
double log_sup_binary(std::int64_t s, std::int64_t n) {
    if (n == 0) return 0.0;
    double p = static_cast<double>(s) / static_cast<double>(n);
    double v = 0.0;
    if (s > 0) v += static_cast<double>(s) * std::log(p);
    if (s < n) v += static_cast<double>(n - s) * std::log1p(-p);
    return v;
}

}  // namespace

NmlBernoulli::NmlBernoulli(ExpFamily1D family, std::int64_t horizon)
    : PredictionSystem(std::move(family)), horizon_(horizon) {
    if (!family_.binary_support)
        throw ConfigError("fixed-horizon NML is implemented for binary support only");
    if (horizon_ < 1) throw InfeasibleHorizon("horizon must be at least 1");
}

double NmlBernoulli::log_marginal(std::int64_t m, std::int64_t k) const {
    const std::int64_t r = horizon_ - m;  // continuation length
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(static_cast<std::size_t>(r) + 1);
    for (std::int64_t j = 0; j <= r; ++j) {
        terms[static_cast<std::size_t>(j)] = log_binom(r, j) + log_sup_binary(k + j, horizon_);
        hi = std::max(hi, terms[static_cast<std::size_t>(j)]);
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - hi);
    return hi + std::log(s);
}

double NmlBernoulli::predict_log(std::int64_t m, double xbar, double x) const {
    if (m >= horizon_)
        throw InfeasibleHorizon("prediction step " + std::to_string(m + 1) +
                                " exceeds design horizon " + std::to_string(horizon_));
    std::int64_t k = m == 0 ? 0
                            : static_cast<std::int64_t>(
                                  std::llround(static_cast<double>(m) * xbar));
    std::int64_t b = static_cast<std::int64_t>(std::llround(x));
    return log_marginal(m + 1, k + b) - log_marginal(m, k);
}

// --- Plug-in ------------------------------------------------------------------

PluginSystem::PluginSystem(ExpFamily1D family, double eps)
    : PredictionSystem(std::move(family)), eps_(eps) {
    if (!(eps_ > 0)) throw ConfigError("plug-in smoothing requires eps > 0");
}

double PluginSystem::predict_log(std::int64_t m, double xbar, double x) const {
    // Pseudo-count shrinkage toward the anchor; for binary support with the
    // anchor at 1/2 this is the (k + eps)/(m + 2 eps) rule.
    double w = 2.0 * eps_;
    double mu = m == 0 ? family_.anchor_mean
                       : (static_cast<double>(m) * xbar + w * family_.anchor_mean) /
                             (static_cast<double>(m) + w);
    return log_density(family_, mu, x);
}

std::unique_ptr<PredictionSystem> make_system(const ExpFamily1D& family, const std::string& id,
                                              std::int64_t horizon) {
    if (id == "jeffreys") return std::make_unique<BayesMixture>(family, jeffreys_prior(family));
    if (id == "flat") return std::make_unique<BayesMixture>(family, make_prior("flat", family));
    if (id == "snml") return std::make_unique<SnmlSystem>(family);
    if (id == "nml") return std::make_unique<NmlBernoulli>(family, horizon);
    if (id == "plugin") return std::make_unique<PluginSystem>(family);
    throw ConfigError("unknown prediction system '" + id + "'");
}

// --- Regret -------------------------------------------------------------------

RegretRecord regret2(const PredictionSystem& system, std::span<const double> xs, std::int64_t m) {
    const std::int64_t n = static_cast<std::int64_t>(xs.size());
    if (m < 0 || m >= n) throw DomainError("regret2: need 0 <= m < n");
    const ExpFamily1D& f = system.family();
    double mu = ml_mean(f, partial_mean(xs, n));
    double lml = 0.0;
    for (std::int64_t i = m; i < n; ++i) lml += log_density(f, mu, xs[i]);
    double lq = system.log_conditional(xs, m);
    RegretRecord rec;
    rec.n = n;
    rec.m = m;
    rec.regret2_nats = lml - lq;
    rec.gap = rec.regret2_nats - 0.5 * std::log(static_cast<double>(n) / kTau);
    return rec;
}

double log_shtarkov_binomial(std::int64_t n) {
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(static_cast<std::size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k) {
        terms[static_cast<std::size_t>(k)] = log_binom(n, k) + log_sup_binary(k, n);
        hi = std::max(hi, terms[static_cast<std::size_t>(k)]);
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - hi);
    return hi + std::log(s);
}

std::function<double(std::mt19937_64&)> make_sampler(const ExpFamily1D& family, double mu) {
    if (!family.mean_range.interior(mu))
        throw DomainError("sampler mean must be interior to the mean range");
    const std::string& nm = family.name;
    if (family.binary_support)
        return [mu](std::mt19937_64& g) {
            return std::bernoulli_distribution(mu)(g) ? 1.0 : 0.0;
        };
    if (nm == "gaussian-location")
        return [mu](std::mt19937_64& g) { return std::normal_distribution<double>(mu, 1.0)(g); };
    if (nm == "poisson")
        return [mu](std::mt19937_64& g) {
            return static_cast<double>(std::poisson_distribution<int>(mu)(g));
        };
    if (nm == "exponential")
        return [mu](std::mt19937_64& g) {
            return std::exponential_distribution<double>(1.0 / mu)(g);
        };
    if (nm.rfind("gamma:k=", 0) == 0) {
        double k = std::stod(nm.substr(8));
        return [mu, k](std::mt19937_64& g) {
            return std::gamma_distribution<double>(k, mu / k)(g);
        };
    }
    if (nm == "geometric")
        return [mu](std::mt19937_64& g) {
            return static_cast<double>(std::geometric_distribution<int>(1.0 / (1.0 + mu))(g));
        };
    throw ConfigError("no sampler for family '" + nm + "'");
}

std::vector<RegretRecord> regret_gap_experiment(const PredictionSystem& system,
                                                std::span<const double> prefix,
                                                const std::function<double(std::mt19937_64&)>& sampler,
                                                const std::vector<std::int64_t>& horizons,
                                                std::uint64_t seed) {
    const std::int64_t m = static_cast<std::int64_t>(prefix.size());
    std::int64_t n_max = m;
    for (std::int64_t n : horizons) n_max = std::max(n_max, n);
    std::vector<double> xs(prefix.begin(), prefix.end());
    xs.reserve(static_cast<std::size_t>(n_max));
    std::mt19937_64 gen(seed);
    while (static_cast<std::int64_t>(xs.size()) < n_max) xs.push_back(sampler(gen));
    std::vector<RegretRecord> out;
    out.reserve(horizons.size());
    for (std::int64_t n : horizons) {
        if (n <= m) throw DomainError("horizon must exceed the conditioning length");
        out.push_back(regret2(system, std::span<const double>(xs.data(), static_cast<std::size_t>(n)), m));
    }
    return out;
}

double exchangeability_probe(const PredictionSystem& system, int n, int m) {
    if (!system.family().binary_support)
        throw ConfigError("exchangeability probe enumerates binary strings");
    if (n < 1 || n > 24 || m < 0 || m > n) throw DomainError("probe size out of range");
    // Class key: the literal prefix x^m plus the suffix one-count.
    std::map<std::pair<std::uint32_t, int>, std::pair<double, double>> classes;
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        int suffix_ones = 0;
        for (int i = 0; i < n; ++i) {
            xs[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
            if (i >= m) suffix_ones += (bits >> i) & 1u;
        }
        double lq = system.log_conditional(xs, m);
        std::pair<std::uint32_t, int> key{bits & ((1u << m) - 1u), suffix_ones};
        auto [it, fresh] = classes.emplace(key, std::pair<double, double>{lq, lq});
        if (!fresh) {
            it->second.first = std::min(it->second.first, lq);
            it->second.second = std::max(it->second.second, lq);
        }
    }
    double dev = 0.0;
    for (const auto& [key, mm] : classes) dev = std::max(dev, mm.second - mm.first);
    return dev;
}

RaceResult regret_race(const PredictionSystem& a, const PredictionSystem& b,
                       std::span<const double> prefix, int depth, int beam) {
    if (!a.family().binary_support || !b.family().binary_support)
        throw ConfigError("regret race searches over binary continuations");
    const std::int64_t m = static_cast<std::int64_t>(prefix.size());
    struct Node {
        std::vector<double> xs;
        double score;
        std::vector<double> trace;
    };
    auto score_of = [&](std::span<const double> xs) {
        return regret2(b, xs, m).regret2_nats - regret2(a, xs, m).regret2_nats;
    };
    std::vector<Node> front{{std::vector<double>(prefix.begin(), prefix.end()), 0.0, {}}};
    for (int d = 0; d < depth; ++d) {
        std::vector<Node> next;
        next.reserve(front.size() * 2);
        for (const Node& node : front) {
            for (double sym : {0.0, 1.0}) {
                Node child = node;
                child.xs.push_back(sym);
                child.score = score_of(child.xs);
                child.trace.push_back(child.score);
                next.push_back(std::move(child));
            }
        }
        std::sort(next.begin(), next.end(),
                  [](const Node& l, const Node& r) { return l.score > r.score; });
        if (static_cast<int>(next.size()) > beam) next.resize(static_cast<std::size_t>(beam));
        front = std::move(next);
    }
    RaceResult res;
    res.sequence = front.front().xs;
    res.gap_trace = front.front().trace;
    return res;
}

}  // namespace xmdl
