#include "xmdl/reproduce.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "xmdl/coding.hpp"
#include "xmdl/errors.hpp"
#include "xmdl/expfam.hpp"
#include "xmdl/jeffreys.hpp"
#include "xmdl/measures.hpp"
#include "xmdl/predict.hpp"
#include "xmdl/quadrature.hpp"

namespace xmdl {

namespace {

constexpr double kTau = 2.0 * M_PI;

struct Gate {
    std::ostream& out;
    int status = 0;

    void report(const std::string& tag, bool pass, const std::string& detail,
                double seconds, bool inconclusive = false) {
        out << tag << ": " << (inconclusive ? "INCONCLUSIVE" : pass ? "PASS" : "FAIL") << " - "
            << detail << " [" << seconds << " s]\n";
        if (inconclusive) {
            if (status == 0) status = 2;
        } else if (!pass) {
            status = 1;
        }
    }
};

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// 1. Bernoulli Jeffreys integral equals pi.
void c01(Gate& g) {
    Timer t;
    QuadratureResult r = jeffreys_integral(make_family("bernoulli"));
    bool pass = r.finite() && std::abs(r.value - M_PI) <= 1e-6;
    g.report("criterion 01", pass, "bernoulli Jeffreys integral = " + fmt(r.value) + " vs pi", t.seconds(),
             r.verdict == Verdict::Inconclusive);
}

// 2. Conditional Jeffreys for the exponential family at m=1 equals e.
void c02(Gate& g) {
    Timer t;
    ExpFamily1D f = make_family("exponential");
    bool pass = true, inc = false;
    std::string detail = "exponential J|x^1 =";
    for (double xb : {0.5, 1.0, 2.0}) {
        QuadratureResult r = conditional_jeffreys(f, 1, xb);
        inc = inc || r.verdict == Verdict::Inconclusive;
        pass = pass && r.finite() && std::abs(r.value - M_E) <= 1e-6;
        detail += " " + fmt(r.finite() ? r.value : std::nan(""));
    }
    g.report("criterion 02", pass, detail + " vs e", t.seconds(), inc);
}

// 3. Conditional Jeffreys for Bernoulli at m=2, xbar=1/2 equals pi/2.
void c03(Gate& g) {
    Timer t;
    QuadratureResult r = conditional_jeffreys(make_family("bernoulli"), 2, 0.5);
    bool pass = r.finite() && std::abs(r.value - M_PI / 2.0) <= 1e-6;
    g.report("criterion 03", pass, "bernoulli J|x^2 (xbar=1/2) = " + fmt(r.value) + " vs pi/2",
             t.seconds(), r.verdict == Verdict::Inconclusive);
}

// 4. Jeffreys-mixture regret gap approaches ln J on fair-coin data.
void c04(Gate& g) {
    Timer t;
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, jeffreys_prior(f));
    auto sampler = make_sampler(f, 0.5);
    double mean_gap = 0.0;
    const int seeds = 16;
    for (int s = 0; s < seeds; ++s) {
        auto recs = regret_gap_experiment(sys, {}, sampler, {65536}, 1000 + static_cast<std::uint64_t>(s));
        mean_gap += recs.front().gap;
    }
    mean_gap /= seeds;
    bool pass = std::abs(mean_gap - std::log(M_PI)) <= 0.05;
    g.report("criterion 04", pass,
             "bernoulli Jeffreys-mixture gap at n=65536, 16 seeds: " + fmt(mean_gap) + " vs ln pi",
             t.seconds());
}

// 5. Shtarkov sum asymptote.
void c05(Gate& g) {
    Timer t;
    const std::int64_t n = 65536;
    double gap = log_shtarkov_binomial(n) - 0.5 * std::log(static_cast<double>(n) / kTau);
    bool pass = std::abs(gap - std::log(M_PI)) <= 0.02;
    g.report("criterion 05", pass, "ln Shtarkov(65536) - (1/2)ln(n/tau) = " + fmt(gap) + " vs ln pi",
             t.seconds());
}

// 6. Gaussian-location prior exp(y^2): normalizable exactly when m > 2.
void c06(Gate& g) {
    Timer t;
    ExpFamily1D f = make_family("gaussian-location");
    PriorMeasure prior = make_prior("gauss-alpha:1", f);
    bool pass = true, inc = false;
    std::string detail = "gauss-alpha:1 verdicts";
    for (std::int64_t m : {1, 2, 3, 4, 8}) {
        Verdict v = in_Fm(prior, f, m, 0.0);
        inc = inc || v == Verdict::Inconclusive;
        bool want_finite = m > 2;
        pass = pass && v == (want_finite ? Verdict::Finite : Verdict::Divergent);
        detail += std::string(" m=") + std::to_string(m) + ":" + to_string(v);
    }
    g.report("criterion 06", pass, detail, t.seconds(), inc);
}

// 7. Exponential family, prior exp(1/y)/y^2: F_m = [1/m, inf).
void c07(Gate& g) {
    Timer t;
    ExpFamily1D f = make_family("exponential");
    PriorMeasure prior = make_prior("exp-inv-sq", f);
    bool pass = true, inc = false;
    std::string detail = "F_m boundary at 1/m:";
    for (std::int64_t m : {2, 4, 8}) {
        double b = 1.0 / static_cast<double>(m);
        Verdict above = in_Fm(prior, f, m, b + 0.05);
        Verdict below = in_Fm(prior, f, m, b - 0.05);
        inc = inc || above == Verdict::Inconclusive || below == Verdict::Inconclusive;
        pass = pass && above == Verdict::Finite && below == Verdict::Divergent;
        detail += std::string(" m=") + std::to_string(m) + ":" + to_string(above) + "/" + to_string(below);
    }
    g.report("criterion 07", pass, detail, t.seconds(), inc);
}

// 8. F_m grids are increasing in m and convex in xbar.
void c08(Gate& g) {
    Timer t;
    int violations = 0;
    bool inc = false;
    {
        ExpFamily1D f = make_family("exponential");
        PriorMeasure prior = make_prior("exp-inv-sq", f);
        const int grid_n = 20;
        std::vector<std::vector<Verdict>> verdicts;  // [m][grid]
        for (std::int64_t m : {1, 2, 3, 5, 8}) {
            std::vector<Verdict> row;
            for (int i = 0; i < grid_n; ++i) {
                double xb = 0.04 + 2.0 * static_cast<double>(i) / grid_n;
                Verdict v = in_Fm(prior, f, m, xb);
                inc = inc || v == Verdict::Inconclusive;
                row.push_back(v);
            }
            verdicts.push_back(std::move(row));
        }
        for (std::size_t mi = 0; mi + 1 < verdicts.size(); ++mi)
            for (int i = 0; i < grid_n; ++i)
                if (verdicts[mi][static_cast<std::size_t>(i)] == Verdict::Finite &&
                    verdicts[mi + 1][static_cast<std::size_t>(i)] == Verdict::Divergent)
                    ++violations;  // F_m must grow with m
        for (const auto& row : verdicts) {
            // Finite points must form one contiguous run of the sorted grid.
            int runs = 0;
            bool in_run = false;
            for (Verdict v : row) {
                if (v == Verdict::Finite && !in_run) {
                    ++runs;
                    in_run = true;
                } else if (v != Verdict::Finite) {
                    in_run = false;
                }
            }
            if (runs > 1) ++violations;
        }
    }
    g.report("criterion 08", violations == 0,
             "F_m monotonicity/convexity violations: " + std::to_string(violations), t.seconds(), inc);
}

// 9. Constructive realization of Kraft-feasible length functions.
void c09(Gate& g) {
    Timer t;
    std::mt19937_64 gen(2024);
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int a = 2 + static_cast<int>(gen() % 3);
        int n = 1 + static_cast<int>(gen() % 6);
        LengthFunction lf;
        lf.output_base = 2;
        std::uniform_real_distribution<double> ud(0.3, 4.0);
        for (int i = 0; i < a; ++i) {
            lf.alphabet.push_back(std::string(1, static_cast<char>('a' + i)));
            lf.lengths.push_back(ud(gen));
        }
        double ks = kraft_sum(lf);
        if (ks > 1.0) {
            double c = std::log2(ks) + 1e-9;
            for (double& l : lf.lengths) l += c;
        }
        PrefixCode code = build_block_code(lf, n);
        if (!check_prefix_free(code)) ++failures;
        // Per-symbol deviation bound: |len(word)/n - avg target| <= 1/n.
        for (const auto& [block, word] : code.codebook) {
            double target = 0.0;
            for (char ch : block) target += lf.lengths[static_cast<std::size_t>(ch - 'a')];
            if (std::abs(static_cast<double>(word.size()) - target) > 1.0 + 1e-9) ++failures;
        }
    }
    g.report("criterion 09", failures == 0,
             "block-code construction failures over 100 random length functions: " +
                 std::to_string(failures),
             t.seconds());
}

// 10. Codec round trips and codelength accounting.
void c10(Gate& g) {
    Timer t;
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture sys(f, jeffreys_prior(f));
    int mismatches = 0, overruns = 0;
    auto run_one = [&](std::uint64_t seed, std::int64_t n) {
        std::mt19937_64 gen(seed);
        std::vector<double> xs;
        xs.reserve(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) xs.push_back(static_cast<double>(gen() & 1));
        BitStream bits;
        EncodeStats st = arithmetic_encode(sys, xs, 0, bits);
        if (static_cast<double>(st.bits) > st.ideal_bits_quant + coder_slack_bits(n)) ++overruns;
        std::vector<double> back = arithmetic_decode(sys, bits, n, {});
        if (back != xs) ++mismatches;
    };
    for (std::uint64_t s = 0; s < 1000; ++s) run_one(40000 + s, 256);
    for (std::uint64_t s = 0; s < 16; ++s) run_one(50000 + s, 10000);
    g.report("criterion 10", mismatches == 0 && overruns == 0,
             "codec mismatches: " + std::to_string(mismatches) +
                 ", codelength overruns: " + std::to_string(overruns),
             t.seconds());
}

// 11. Mixture exchangeability; SNML deviation reported.
void c11(Gate& g) {
    Timer t;
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture jef(f, jeffreys_prior(f));
    BayesMixture flat(f, make_prior("flat", f));
    double dev = 0.0;
    for (int n = 1; n <= 8; ++n) {
        dev = std::max(dev, exchangeability_probe(jef, n, 0));
        dev = std::max(dev, exchangeability_probe(flat, n, 0));
    }
    SnmlSystem snml(f);
    double snml_dev = exchangeability_probe(snml, 6, 0);
    g.report("criterion 11", dev <= 1e-12,
             "mixture permutation deviation " + fmt(dev) + "; snml deviation (reported) " +
                 fmt(snml_dev),
             t.seconds());
}

// 12. NML equalizes regret at its design horizon.
void c12(Gate& g) {
    Timer t;
    ExpFamily1D f = make_family("bernoulli");
    NmlBernoulli nml(f, 8);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::vector<double> xs(8);
    for (std::uint32_t bits = 0; bits < 256; ++bits) {
        for (int i = 0; i < 8; ++i) xs[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
        double r = regret2(nml, xs, 0).regret2_nats;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    g.report("criterion 12", hi - lo <= 1e-10,
             "NML regret spread over all strings at n=8: " + fmt(hi - lo), t.seconds());
}

// 13. Exponentiated-Cauchy mixture: partition bounds, atom divergence,
//     divergent conditional Jeffreys integral.
void c13(Gate& g) {
    Timer t;
    ExpCauchyFamily ec = build_exp_cauchy();
    bool pass = true, inc = false;
    std::string detail;
    for (double beta : {0.0, -1e-6, -1e-3, -0.1, -1.0, -10.0, -1000.0}) {
        double z = ec.partition(beta);
        if (!(z >= 0.5 - 1e-9 && z <= 1.0 + 1e-9)) {
            pass = false;
            detail += " Z(" + fmt(beta) + ")=" + fmt(z);
        }
    }
    double atom = ec.divergence_from_atom(0.0);
    if (std::abs(atom - std::log(2.0)) > 1e-6) {
        pass = false;
        detail += " D(atom)=" + fmt(atom);
    }
    for (std::int64_t m : {1, 5, 20}) {
        QuadratureResult r = ec.conditional_jeffreys(m, 1.0);
        inc = inc || r.verdict == Verdict::Inconclusive;
        if (r.verdict != Verdict::Divergent) {
            pass = false;
            detail += " J|x^" + std::to_string(m) + "=" + to_string(r.verdict);
        }
    }
    g.report("criterion 13", pass,
             detail.empty() ? "partition in [1/2,1], atom divergence ln 2, conditional Jeffreys divergent"
                            : "violations:" + detail,
             t.seconds(), inc);
}

// 14. Batch/sequential posterior equivalence and the compensation identity.
void c14(Gate& g) {
    Timer t;
    double worst = 0.0;
    struct Case {
        std::string family, prior;
        std::vector<double> data;
        std::vector<double> ys;
    };
    std::vector<Case> cases = {
        {"bernoulli", "jeffreys", {1, 0, 1}, {0.2, 0.5, 0.8}},
        {"bernoulli", "flat", {1, 1, 0, 1}, {0.3, 0.6}},
        {"exponential", "exp-inv-sq", {1.5, 0.7, 2.0}, {0.8, 1.5, 2.5}},
        {"gaussian-location", "jeffreys", {0.3, -1.0, 0.5}, {-0.5, 0.0, 1.0}},
    };
    for (const Case& c : cases) {
        ExpFamily1D f = make_family(c.family);
        PriorMeasure prior = make_prior(c.prior, f);
        const std::int64_t m = static_cast<std::int64_t>(c.data.size());
        double xbar = 0.0;
        for (double x : c.data) xbar += x;
        xbar /= static_cast<double>(m);
        // Sequential form: the prior times per-observation factors exp(-D(x_i || y)).
        auto seq_log = [&](double y) {
            double lp = prior.log_density(y);
            for (double x : c.data) lp -= divergence(f, x, y);
            return lp;
        };
        QuadratureResult norm =
            integrate([&](double y) { return std::exp(seq_log(y)); }, prior.support.mu_inf,
                      prior.support.mu_sup, {}, xbar);
        for (double y : c.ys) {
            double batch = posterior_log_density({f, prior, m, xbar}, y);
            double sequential = seq_log(y) - std::log(norm.require());
            worst = std::max(worst, std::abs(batch - sequential));
        }
        // Compensation identity: sum_i D(x_i||y) = sum_i D(x_i||xbar) + m D(xbar||y).
        for (double y : c.ys) {
            double lhs = 0.0, rhs = static_cast<double>(m) * divergence(f, xbar, y);
            for (double x : c.data) {
                lhs += divergence(f, x, y);
                rhs += divergence(f, x, xbar);
            }
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    g.report("criterion 14", worst <= 1e-8,
             "batch/sequential + compensation max discrepancy: " + fmt(worst), t.seconds());
}

// Existential race demonstrations at n=16 (sign checks with exhaustive oracle).
void race_checks(Gate& g) {
    Timer t;
    ExpFamily1D f = make_family("bernoulli");
    BayesMixture jef(f, jeffreys_prior(f));
    BayesMixture flat(f, make_prior("flat", f));
    PluginSystem plug(f);

    // Exhaustive: some length-16 string where the Jeffreys mixture beats the
    // flat mixture, i.e. REG_flat - REG_jeffreys > 0.
    double best_exhaustive = -std::numeric_limits<double>::infinity();
    std::vector<double> xs(16);
    for (std::uint32_t bits = 0; bits < (1u << 16); ++bits) {
        for (int i = 0; i < 16; ++i) xs[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
        best_exhaustive = std::max(best_exhaustive, regret2(flat, xs, 0).regret2_nats -
                                                        regret2(jef, xs, 0).regret2_nats);
    }
    RaceResult search = regret_race(jef, flat, {}, 16);
    bool race1 = best_exhaustive > 0 && search.gap_trace.back() > 0;
    g.report("race check A", race1,
             "jeffreys vs flat at n=16: exhaustive best gap " + fmt(best_exhaustive) +
                 ", beam-search gap " + fmt(search.gap_trace.back()),
             t.seconds());

    Timer t2;
    // Smoothed plug-in falls behind the Jeffreys mixture on all-ones, and the
    // shortfall grows with n.
    std::vector<double> ones8(8, 1.0), ones16(16, 1.0);
    double gap8 = regret2(plug, ones8, 0).regret2_nats - regret2(jef, ones8, 0).regret2_nats;
    double gap16 = regret2(plug, ones16, 0).regret2_nats - regret2(jef, ones16, 0).regret2_nats;
    bool race2 = gap16 > 0 && gap16 > gap8;
    g.report("race check B", race2,
             "jeffreys vs plugin on all-ones: gap " + fmt(gap8) + " at n=8, " + fmt(gap16) +
                 " at n=16",
             t2.seconds());
}

}  // namespace

int run_reproduce(std::ostream& out) {
    Gate g{out};
    try {
        c01(g);
        c02(g);
        c03(g);
        c04(g);
        c05(g);
        c06(g);
        c07(g);
        c08(g);
        c09(g);
        c10(g);
        c11(g);
        c12(g);
        c13(g);
        c14(g);
        race_checks(g);
    } catch (const InconclusiveError& e) {
        out << "aborted: inconclusive quadrature: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        out << "aborted: " << e.what() << "\n";
        return 1;
    }
    out << (g.status == 0 ? "all criteria passed"
            : g.status == 2 ? "inconclusive results present"
                             : "failures present")
        << "\n";
    return g.status;
}

}  // namespace xmdl
