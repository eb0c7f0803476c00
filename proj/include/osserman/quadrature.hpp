#pragma once

// Adaptive Gauss–Kronrod quadrature plus the machinery for improper
// integrals over [a, ∞): octave-by-octave accumulation, a log–log decay fit
// over the trailing two decades, and a three-way convergence verdict.

#include <functional>
#include <map>

namespace osserman::quad {

using Fn = std::function<double(double)>;

struct Result {
    double value = 0.0;
    double error = 0.0;
    long evals = 0;
    bool converged = false;
};

/// Globally adaptive G7/K15 on [a, b].  Panels are refined worst-error-first,
/// so integrable endpoint singularities converge.  Throws QuadratureError if
/// the integrand returns a non-finite value.
Result integrate(const Fn& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 0.0, int max_panels = 200000);

/// Caches ∫_anchor^s f at every queried s so that repeated evaluations with
/// increasing s cost one short segment each.
class CumulativeIntegral {
public:
    CumulativeIntegral(Fn f, double anchor, double rel_tol = 1e-11);
    double operator()(double s) const;

private:
    Fn f_;
    double anchor_;
    double rel_tol_;
    mutable std::map<double, double> knots_;
};

enum class TailVerdict { Converges, Diverges, Inconclusive };

struct TailOptions {
    double start = 1.0;
    double tail_tol = 1e-6;        // relative: stop once est. tail < tol * total
    double exponent_margin = 0.02; // dead band around the critical exponent -1
    int max_octaves = 48;
    int min_octaves = 10;
    double rel_tol = 1e-9;         // per-octave quadrature tolerance
};

struct TailResult {
    TailVerdict verdict = TailVerdict::Inconclusive;
    double partial = 0.0;        // ∫_start^reached
    double tail_estimate = 0.0;  // extrapolated remainder when convergent
    double value = 0.0;          // partial + tail_estimate
    double error_estimate = 0.0;
    double fitted_exponent = 0.0;
    double fitted_scale = 0.0;   // C in phi ≈ C t^p over the fit window
    double reached = 0.0;
    int octaves = 0;
};

/// Integrate a nonnegative, eventually-decaying integrand over [start, ∞).
/// Divergence is decided by the fitted decay exponent; an exactly harmonic
/// window (constant octave increments) is reported divergent; a noisy
/// near-critical exponent is reported inconclusive, never guessed.
TailResult integrate_to_infinity(const Fn& phi, const TailOptions& opts = {});

}  // namespace osserman::quad
