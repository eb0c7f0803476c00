#pragma once

// The hypothesis system as checkable objects: one-variable nonlinearity
// class membership, the Keller–Osserman integral, reciprocal tail integrals
// and their inversion, and the sampled structural inequalities that gate
// every campaign.

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace osserman::model {

using Func1 = std::function<double(double)>;
using Func3 = std::function<double(double, double, double)>;  // (x, u, v)

struct CheckResult {
    std::string name;
    double worst_margin = 0.0;           // signed slack; >= 0 means satisfied
    std::vector<double> worst_point;     // coordinates of the worst sample
};

struct CertificateReport {
    bool passed = false;
    std::vector<CheckResult> checks;
    long samples_used = 0;

    nlohmann::json to_json() const;
    const CheckResult* find(const std::string& name) const;
};

CertificateReport merge(std::initializer_list<CertificateReport> parts);

/// h(0)=0 within 1e-12, nondecreasing on the samples, h > 0 past zero.
/// `t_grid` must be sorted and start at 0.
CertificateReport check_f_class(const Func1& h, const std::vector<double>& t_grid);

/// Same checks minus the h(0)=0 clause, for dominating functions that are
/// allowed a positive offset at the origin.
CertificateReport check_monotone_positive(const Func1& h, const std::vector<double>& t_grid,
                                          const std::string& prefix);

struct KoOptions {
    double t_split = 16.0;          // end of the plain finite part
    double tail_tol = 1e-6;         // relative tail stop tolerance
    double exponent_margin = 0.02;  // dead band around the critical decay -1
    int max_doublings = 48;
    double quad_rel_tol = 1e-9;
};

enum class KoStatus { Converges, Diverges, Inconclusive };

struct KoResult {
    KoStatus status = KoStatus::Inconclusive;
    bool converges = false;
    double integral = 0.0;        // meaningful when converges
    double error_estimate = 0.0;
    double fitted_exponent = 0.0;
    double reached = 0.0;

    nlohmann::json to_json() const;
};

/// Decide ∫_1^∞ H(t)^{-1/2} dt with H(t) = ∫_0^t h, and evaluate it when it
/// converges.  The verdict is never guessed: a noisy near-critical decay is
/// reported as Inconclusive.
KoResult keller_osserman(const Func1& h, const KoOptions& opts = {});

/// G(s) = ∫_s^∞ dt/g(t) with relative error <= 1e-8, or TailDiverges.
double tail_integral(const Func1& g, double s);

/// Solve G(w) = z for w with |G(w) - z| <= 1e-10·z.  Throws OutOfRange when
/// z <= 0 or z >= G(t_min).
double invert_tail(const Func1& g, double z, double t_min = 1e-12);

/// Full problem data.  Partial derivatives of the two right-hand sides are
/// part of the spec so the solver can assemble an analytic Jacobian.
struct NonlinearitySpec {
    Func3 Fu, Fv;                          // right-hand sides
    Func3 dFu_du, dFu_dv, dFv_du, dFv_dv;  // their partials
    Func1 a1, a2, a1sq, a2sq;              // positive coefficient functions
    Func1 b1, b2;                          // convection coefficients, >= 0
    Func1 f1, f2, g;                       // one-variable class functions
    double q1 = 2.0, q2 = 2.0;             // gradient exponents in (0, 2]
};

/// Throws PreconditionError when q1 or q2 leaves (0, 2].
void validate(const NonlinearitySpec& spec);

struct StructuralSamples {
    std::vector<double> x, t, s;
};

/// Sample the minorant inequalities, the strict domination of g on the
/// diagonal (slack 1e-12 relative), coefficient positivity, and class
/// membership of f1, f2, g.
CertificateReport verify_structural(const NonlinearitySpec& spec,
                                    const StructuralSamples& samples);

/// rho > 2, theta > 2, sigma + gamma > 2, sigma < 2, gamma < 2.
bool check_exponent_family(double rho, double sigma, double gamma, double theta);

}  // namespace osserman::model
