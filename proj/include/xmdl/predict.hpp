#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xmdl/expfam.hpp"
#include "xmdl/measures.hpp"
#include "xmdl/quadrature.hpp"

namespace xmdl {

// Consistent sequential predictor over a one-dimensional exponential family.
// The conditioning string enters only through its length m and average xbar;
// log_conditional defaults to chaining predict_log and subclasses may replace
// it with an algebraically identical shortcut. Systems are immutable after
// construction and safe to share across threads.
class PredictionSystem {
public:
    explicit PredictionSystem(ExpFamily1D family) : family_(std::move(family)) {}
    virtual ~PredictionSystem() = default;

    const ExpFamily1D& family() const { return family_; }
    virtual std::string label() const = 0;

    // ln q(x | m previous observations with average xbar); xbar ignored at m=0.
    virtual double predict_log(std::int64_t m, double xbar, double x) const = 0;

    // ln Q(x_{m+1..n} | x^m) where xs = x_1..x_n.
    virtual double log_conditional(std::span<const double> xs, std::int64_t m) const;

protected:
    ExpFamily1D family_;
};

// Bayes mixture over the mean range with a (possibly improper) prior.
// Predictions exist once the prior conditioned on (m, xbar) normalizes;
// before that every query throws NotYetDefined.
class BayesMixture : public PredictionSystem {
public:
    BayesMixture(ExpFamily1D family, PriorMeasure prior, QuadratureOptions opts = {});

    std::string label() const override { return "bayes[" + prior_.label + "]"; }
    double predict_log(std::int64_t m, double xbar, double x) const override;
    // Sufficient-statistic form: two normalizer quadratures per call instead
    // of one per step, and exactly permutation invariant.
    double log_conditional(std::span<const double> xs, std::int64_t m) const override;

    // ln of the conditioned prior mass; NaN stands for "not normalizable".
    double log_normalizer(std::int64_t m, double xbar) const;

private:
    PriorMeasure prior_;
    QuadratureOptions opts_;
    mutable std::map<std::pair<std::int64_t, double>, double> memo_;
    mutable std::mutex memo_mutex_;
};

// Sequential normalized maximum likelihood: the next-symbol weight is the
// maximized likelihood of the extended string, renormalized over the
// single-observation support (summation when discrete, quadrature otherwise).
class SnmlSystem : public PredictionSystem {
public:
    explicit SnmlSystem(ExpFamily1D family, QuadratureOptions opts = {});

    std::string label() const override { return "snml"; }
    double predict_log(std::int64_t m, double xbar, double x) const override;

private:
    double log_weight(std::int64_t m, double xbar, double x) const;
    double log_normalizer(std::int64_t m, double xbar) const;

    QuadratureOptions opts_;
    mutable std::map<std::pair<std::int64_t, double>, double> memo_;
    mutable std::mutex memo_mutex_;
};

// Fixed-horizon normalized maximum likelihood for a binary-support family,
// exposed through the sequential interface by marginalizing over
// continuations. Queries past the design horizon throw InfeasibleHorizon.
class NmlBernoulli : public PredictionSystem {
public:
    NmlBernoulli(ExpFamily1D family, std::int64_t horizon);

    std::string label() const override { return "nml[n=" + std::to_string(horizon_) + "]"; }
    std::int64_t horizon() const { return horizon_; }
    double predict_log(std::int64_t m, double xbar, double x) const override;

private:
    // ln sum over continuations of the full-string maximized likelihood,
    // given m observed symbols with k ones.
    double log_marginal(std::int64_t m, std::int64_t k) const;

    std::int64_t horizon_;
};

// Maximum-likelihood plug-in with pseudo-count smoothing toward the anchor
// mean (Laplace rule at eps=1 for binary support).
class PluginSystem : public PredictionSystem {
public:
    explicit PluginSystem(ExpFamily1D family, double eps = 1.0);

    std::string label() const override { return "plugin"; }
    double predict_log(std::int64_t m, double xbar, double x) const override;

private:
    double eps_;
};

// System catalog: jeffreys | flat | snml | nml | plugin. `horizon` is
// consulted by nml only.
std::unique_ptr<PredictionSystem> make_system(const ExpFamily1D& family, const std::string& id,
                                              std::int64_t horizon = 0);

// --- Regret instrumentation -------------------------------------------------

struct RegretRecord {
    std::int64_t n = 0;
    std::int64_t m = 0;
    double regret2_nats = 0.0;
    double gap = 0.0;  // regret2 - (1/2) ln(n / tau), tau = 2 pi
};

// Codelength of the predictor on x_{m+1..n} beyond the best-in-hindsight
// family element coding the same suffix:
//   regret2 = -ln Q(x_{m+1..n} | x^m) + ln P^{xbar_n}(x_{m+1..n}).
// Conditioning the maximized likelihood on the same prefix keeps the value
// independent of the anchor/base-measure convention.
RegretRecord regret2(const PredictionSystem& system, std::span<const double> xs, std::int64_t m);

// ln of the Shtarkov normalizer for binary strings of length n,
// ln sum_k C(n,k) (k/n)^k (1-k/n)^(n-k).
double log_shtarkov_binomial(std::int64_t n);

// One i.i.d. observation from the mean-mu element of a catalog family.
std::function<double(std::mt19937_64&)> make_sampler(const ExpFamily1D& family, double mu);

// Draws x_{m+1..n_max} i.i.d. from `sampler` after the fixed conditioning
// prefix and records regret2/gap at each horizon.
std::vector<RegretRecord> regret_gap_experiment(const PredictionSystem& system,
                                                std::span<const double> prefix,
                                                const std::function<double(std::mt19937_64&)>& sampler,
                                                const std::vector<std::int64_t>& horizons,
                                                std::uint64_t seed);

// Max over permutation classes (same prefix x^m, same suffix one-count) of
// the spread of ln Q(x^n | x^m), by exhaustive enumeration of binary strings.
double exchangeability_probe(const PredictionSystem& system, int n, int m);

// Beam search for a binary continuation on which system b accumulates more
// regret than system a. Existence demonstration only, not a decision
// procedure: returns the best sequence found within the depth budget.
struct RaceResult {
    std::vector<double> sequence;   // prefix + found continuation
    std::vector<double> gap_trace;  // REG_b - REG_a after each appended symbol
};

RaceResult regret_race(const PredictionSystem& a, const PredictionSystem& b,
                       std::span<const double> prefix, int depth, int beam = 8);

}  // namespace xmdl
