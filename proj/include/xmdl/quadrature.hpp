#pragma once

#include <functional>
#include <limits>
#include <string>

namespace xmdl {

enum class Verdict { Finite, Divergent, Inconclusive };

const char* to_string(Verdict v);

// Value + error estimate + finiteness verdict from the adaptive integrator.
// `value` is meaningful only when verdict == Finite.
struct QuadratureResult {
    Verdict verdict = Verdict::Inconclusive;
    double value = std::numeric_limits<double>::quiet_NaN();
    double error_estimate = 0.0;
    std::string diagnostics;

    bool finite() const { return verdict == Verdict::Finite; }

    // Finite value or throws DivergentError / InconclusiveError.
    double require() const;
};

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    // A window scan toward an improper endpoint is declared Divergent when the
    // running total passes this cap while the last window still contributes
    // more than `window_fraction` of it.
    double divergence_cap = 1e6;
    double window_fraction = 1e-3;
    // Second divergence rule: window contributions along a geometric scan that
    // decay like k^{-p} with p <= power_threshold give a non-summable tail.
    double power_threshold = 1.05;
    // Total adaptive-panel budget across the whole call.
    int max_panels = 1 << 20;
    // Maximum number of geometric windows per endpoint scan.
    int max_windows = 2048;
};

// Adaptive quadrature of f over (a, b), either endpoint possibly infinite or
// an integrable singularity. f is assumed nonnegative (or of known sign) near
// improper endpoints. `split` is an optional interior point to anchor the
// two endpoint scans at (useful when the integrand peaks there).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {},
                           double split = std::numeric_limits<double>::quiet_NaN());

}  // namespace xmdl
