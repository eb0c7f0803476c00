#include "osserman/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osserman/errors.hpp"
#include "osserman/quadrature.hpp"

namespace osserman::model {

nlohmann::json CertificateReport::to_json() const {
    nlohmann::json j;
    j["passed"] = passed;
    j["samples_used"] = samples_used;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        j["checks"].push_back({{"name", c.name},
                               {"worst_margin", c.worst_margin},
                               {"worst_point", c.worst_point}});
    }
    return j;
}

const CheckResult* CertificateReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

void finalize(CertificateReport& rep) {
    rep.passed = true;
    for (const auto& c : rep.checks)
        if (!(c.worst_margin >= 0.0)) rep.passed = false;
}

}  // namespace

CertificateReport merge(std::initializer_list<CertificateReport> parts) {
    CertificateReport out;
    out.passed = true;
    for (const auto& p : parts) {
        out.passed = out.passed && p.passed;
        out.samples_used += p.samples_used;
        out.checks.insert(out.checks.end(), p.checks.begin(), p.checks.end());
    }
    return out;
}

CertificateReport check_f_class(const Func1& h, const std::vector<double>& t_grid) {
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw PreconditionError("t_grid must be sorted and include 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw PreconditionError("t_grid must be strictly increasing");

    CertificateReport rep;
    rep.samples_used = static_cast<long>(t_grid.size());

    double h0 = h(0.0);
    rep.checks.push_back({"h(0)=0 (tol 1e-12)", 1e-12 - std::abs(h0), {0.0}});

    double maxabs = 0.0;
    std::vector<double> hv(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        hv[i] = h(t_grid[i]);
        maxabs = std::max(maxabs, std::abs(hv[i]));
    }
    double slack = 1e-12 * (1.0 + maxabs);

    double worst_diff = std::numeric_limits<double>::infinity();
    double worst_t = 0.0;
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        double d = hv[i] - hv[i - 1];
        if (d < worst_diff) {
            worst_diff = d;
            worst_t = t_grid[i - 1];
        }
    }
    rep.checks.push_back({"nondecreasing (tol 1e-12 rel)", worst_diff + slack, {worst_t}});

    double worst_pos = std::numeric_limits<double>::infinity();
    double pos_t = 0.0;
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (hv[i] < worst_pos) {
            worst_pos = hv[i];
            pos_t = t_grid[i];
        }
    }
    rep.checks.push_back({"positive past 0 (tol 1e-12 rel)", worst_pos - slack, {pos_t}});

    finalize(rep);
    return rep;
}

CertificateReport check_monotone_positive(const Func1& h, const std::vector<double>& t_grid,
                                          const std::string& prefix) {
    CertificateReport rep = check_f_class(h, t_grid);
    // drop the h(0)=0 clause, keep monotonicity and positivity
    rep.checks.erase(rep.checks.begin());
    for (auto& c : rep.checks) c.name = prefix + ": " + c.name;
    finalize(rep);
    return rep;
}

KoResult keller_osserman(const Func1& h, const KoOptions& opts) {
    // light precheck: nondecreasing and positive on (0, t_split]
    {
        std::vector<double> grid;
        for (int i = 0; i <= 32; ++i) grid.push_back(opts.t_split * i / 32.0);
        auto rep = check_monotone_positive(h, grid, "h");
        if (!rep.passed)
            throw PreconditionError(
                "keller_osserman: h must be nondecreasing and positive on the sampled range");
    }

    quad::CumulativeIntegral H(h, 0.0, 1e-11);
    auto phi = [&H](double t) -> double {
        double Hv;
        try {
            Hv = H(t);
        } catch (const QuadratureError&) {
            return 0.0;  // H overflowed: the integrand has long since vanished
        }
        if (!std::isfinite(Hv)) return 0.0;
        if (!(Hv > 0.0)) return std::numeric_limits<double>::infinity();
        return 1.0 / std::sqrt(Hv);
    };

    quad::Result head = quad::integrate(phi, 1.0, opts.t_split, opts.quad_rel_tol, 0.0);

    quad::TailOptions topt;
    topt.start = opts.t_split;
    topt.tail_tol = opts.tail_tol;
    topt.exponent_margin = opts.exponent_margin;
    topt.max_octaves = opts.max_doublings;
    topt.rel_tol = opts.quad_rel_tol;
    quad::TailResult tail = quad::integrate_to_infinity(phi, topt);

    KoResult out;
    out.fitted_exponent = tail.fitted_exponent;
    out.reached = tail.reached;
    switch (tail.verdict) {
        case quad::TailVerdict::Converges:
            out.status = KoStatus::Converges;
            out.converges = true;
            out.integral = head.value + tail.value;
            out.error_estimate = head.error + tail.error_estimate;
            break;
        case quad::TailVerdict::Diverges:
            out.status = KoStatus::Diverges;
            break;
        case quad::TailVerdict::Inconclusive:
            out.status = KoStatus::Inconclusive;
            break;
    }
    return out;
}

nlohmann::json KoResult::to_json() const {
    nlohmann::json j;
    j["status"] = status == KoStatus::Converges  ? "converges"
                  : status == KoStatus::Diverges ? "diverges"
                                                 : "inconclusive";
    j["converges"] = converges;
    if (converges) {
        j["integral"] = integral;
        j["error_estimate"] = error_estimate;
    }
    j["fitted_exponent"] = fitted_exponent;
    j["reached"] = reached;
    return j;
}

namespace {

// verdict-only convergence scan of ∫ dt/g from max(s,1)
quad::TailResult reciprocal_tail_scan(const Func1& g, double s, int max_octaves = 40) {
    auto recip = [&g](double t) -> double {
        double gv = g(t);
        if (!std::isfinite(gv)) return 0.0;
        if (!(gv > 0.0)) throw QuadratureError("g must be positive on the tail");
        return 1.0 / gv;
    };
    quad::TailOptions topt;
    topt.start = std::max(s, 1.0);
    topt.exponent_margin = 0.02;
    topt.max_octaves = max_octaves;
    topt.rel_tol = 1e-8;
    topt.tail_tol = 1e-3;  // verdict only; the value is recomputed exactly below
    return quad::integrate_to_infinity(recip, topt);
}

double tail_integral_unchecked(const Func1& g, double s) {
    const double T0 = std::max(s, 1.0) * 1024.0;
    auto recip = [&g](double t) -> double {
        double gv = g(t);
        if (!std::isfinite(gv)) return 0.0;
        if (!(gv > 0.0)) throw QuadratureError("g must be positive on the tail");
        return 1.0 / gv;
    };
    quad::Result head = quad::integrate(recip, s, T0, 1e-10, 0.0);
    // substitute t = 1/sigma on [T0, ∞); Kronrod nodes never touch sigma = 0
    auto subst = [&g](double sigma) -> double {
        double t = 1.0 / sigma;
        double gv = g(t);
        if (!std::isfinite(gv)) return 0.0;
        if (!(gv > 0.0)) throw QuadratureError("g must be positive on the tail");
        double denom = sigma * sigma * gv;
        if (denom <= 0.0) return 0.0;
        return 1.0 / denom;
    };
    quad::Result rest = quad::integrate(subst, 0.0, 1.0 / T0, 1e-10, 0.0);
    return head.value + rest.value;
}

}  // namespace

double tail_integral(const Func1& g, double s) {
    quad::TailResult scan = reciprocal_tail_scan(g, s);
    if (scan.verdict == quad::TailVerdict::Diverges)
        throw TailDiverges("tail of 1/g diverges (fitted decay exponent " +
                           std::to_string(scan.fitted_exponent) + ")");
    if (scan.verdict == quad::TailVerdict::Inconclusive)
        throw TailDiverges("tail of 1/g could not be certified convergent (fitted exponent " +
                           std::to_string(scan.fitted_exponent) + " too close to -1)");
    return tail_integral_unchecked(g, s);
}

double invert_tail(const Func1& g, double z, double t_min) {
    if (!(z > 0.0)) throw OutOfRange("invert_tail: z must be positive");
    quad::TailResult scan = reciprocal_tail_scan(g, t_min);
    if (scan.verdict != quad::TailVerdict::Converges)
        throw TailDiverges("invert_tail: tail of 1/g does not converge");
    double G_min = tail_integral_unchecked(g, t_min);
    if (!(z < G_min)) throw OutOfRange("invert_tail: z >= G(t_min)");

    auto G = [&](double w) { return tail_integral_unchecked(g, w); };

    // bracket: G is strictly decreasing
    double lo = t_min, flo = G_min - z;
    double hi = std::max(1.0, 2.0 * t_min);
    double fhi = G(hi) - z;
    int guard = 0;
    while (fhi > 0.0 && guard++ < 200) {
        lo = hi;
        flo = fhi;
        hi *= 4.0;
        fhi = G(hi) - z;
    }
    if (fhi > 0.0) throw OutOfRange("invert_tail: failed to bracket (z too small)");

    // bisection with secant acceleration on the monotone bracket
    double w = hi, fw = fhi;
    const double f_tol = 1e-10 * z;
    for (int it = 0; it < 200 && std::abs(fw) > f_tol; ++it) {
        double mid;
        if (flo != fhi) {
            mid = lo + (hi - lo) * flo / (flo - fhi);  // secant estimate
            if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        } else {
            mid = 0.5 * (lo + hi);
        }
        if (mid <= lo || mid >= hi) break;  // bracket at float resolution
        double fm = G(mid) - z;
        if (fm > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        w = mid;
        fw = fm;
        // an occasional plain bisection step keeps hard brackets shrinking
        if (it % 8 == 7) {
            double m2 = 0.5 * (lo + hi);
            if (m2 > lo && m2 < hi) {
                double f2 = G(m2) - z;
                if (f2 > 0.0) {
                    lo = m2;
                    flo = f2;
                } else {
                    hi = m2;
                    fhi = f2;
                }
                if (std::abs(f2) < std::abs(fw)) {
                    w = m2;
                    fw = f2;
                }
            }
        }
    }
    if (std::abs(fw) > f_tol) {
        if (std::abs(flo) < std::abs(fw)) w = lo, fw = flo;
        if (std::abs(fhi) < std::abs(fw)) w = hi, fw = fhi;
    }
    return w;
}

void validate(const NonlinearitySpec& spec) {
    if (!(spec.q1 > 0.0 && spec.q1 <= 2.0)) throw PreconditionError("q1 must lie in (0,2]");
    if (!(spec.q2 > 0.0 && spec.q2 <= 2.0)) throw PreconditionError("q2 must lie in (0,2]");
}

CertificateReport verify_structural(const NonlinearitySpec& spec,
                                    const StructuralSamples& samples) {
    validate(spec);
    if (samples.x.empty() || samples.t.empty() || samples.s.empty())
        throw PreconditionError("verify_structural: sample grids must be non-empty");
    for (double t : samples.t)
        if (!(t > 0.0)) throw PreconditionError("verify_structural: t samples must be positive");
    for (double s : samples.s)
        if (!(s > 0.0)) throw PreconditionError("verify_structural: s samples must be positive");

    CertificateReport rep;
    long used = 0;

    // coefficient positivity
    {
        double worst = std::numeric_limits<double>::infinity(), wx = 0.0;
        for (double x : samples.x) {
            for (const Func1* f : {&spec.a1, &spec.a2, &spec.a1sq, &spec.a2sq}) {
                double v = (*f)(x);
                ++used;
                if (v < worst) {
                    worst = v;
                    wx = x;
                }
            }
        }
        if (worst == 0.0) worst = -1e-300;  // strict positivity
        rep.checks.push_back({"coefficients a_i, a_i^2 positive", worst, {wx}});

        double worstb = std::numeric_limits<double>::infinity();
        double wbx = 0.0;
        for (double x : samples.x)
            for (const Func1* f : {&spec.b1, &spec.b2}) {
                double v = (*f)(x);
                ++used;
                if (v < worstb) {
                    worstb = v;
                    wbx = x;
                }
            }
        rep.checks.push_back({"convection coefficients nonnegative", worstb, {wbx}});
    }

    // F_u(x,t,s) >= a1(x) f1(t)
    {
        double worst = std::numeric_limits<double>::infinity();
        std::vector<double> wp{0, 0, 0};
        for (double x : samples.x)
            for (double t : samples.t)
                for (double s : samples.s) {
                    double m = spec.Fu(x, t, s) - spec.a1(x) * spec.f1(t);
                    ++used;
                    if (m < worst) {
                        worst = m;
                        wp = {x, t, s};
                    }
                }
        rep.checks.push_back({"Fu minorant: Fu(x,t,s) >= a1(x)*f1(t)", worst, wp});
    }

    // F_v(x,t,s) >= a2(x) f2(s)
    {
        double worst = std::numeric_limits<double>::infinity();
        std::vector<double> wp{0, 0, 0};
        for (double x : samples.x)
            for (double t : samples.t)
                for (double s : samples.s) {
                    double m = spec.Fv(x, t, s) - spec.a2(x) * spec.f2(s);
                    ++used;
                    if (m < worst) {
                        worst = m;
                        wp = {x, t, s};
                    }
                }
        rep.checks.push_back({"Fv minorant: Fv(x,t,s) >= a2(x)*f2(s)", worst, wp});
    }

    // g(t) > max_i F_i(x,t,t)/a_i^2(x), strict with 1e-12 relative slack
    {
        double worst = std::numeric_limits<double>::infinity();
        std::vector<double> wp{0, 0};
        for (double x : samples.x) {
            double c1 = spec.a1sq(x), c2 = spec.a2sq(x);
            for (double t : samples.t) {
                double gt = spec.g(t);
                double ratio = std::max(spec.Fu(x, t, t) / c1, spec.Fv(x, t, t) / c2);
                double m = gt - ratio - 1e-12 * (1.0 + std::abs(gt));
                used += 2;
                if (m < worst) {
                    worst = m;
                    wp = {x, t};
                }
            }
        }
        rep.checks.push_back(
            {"g dominates diagonal: g(t) > max F_i(x,t,t)/a_i^2(x) (slack 1e-12)", worst, wp});
    }

    rep.samples_used = used;

    // class membership of the one-variable functions
    std::vector<double> tgrid;
    tgrid.push_back(0.0);
    for (double t : samples.t) tgrid.push_back(t);
    std::sort(tgrid.begin(), tgrid.end());
    tgrid.erase(std::unique(tgrid.begin(), tgrid.end()), tgrid.end());

    auto f1rep = check_f_class(spec.f1, tgrid);
    for (auto& c : f1rep.checks) c.name = "f1: " + c.name;
    auto f2rep = check_f_class(spec.f2, tgrid);
    for (auto& c : f2rep.checks) c.name = "f2: " + c.name;
    // g may carry a positive offset at the origin; only monotonicity and
    // positivity are required of the dominating function
    auto grep = check_monotone_positive(spec.g, tgrid, "g");

    CertificateReport out = merge({rep, f1rep, f2rep, grep});
    finalize(out);
    return out;
}

bool check_exponent_family(double rho, double sigma, double gamma, double theta) {
    return rho > 2.0 && theta > 2.0 && sigma + gamma > 2.0 && sigma < 2.0 && gamma < 2.0;
}

}  // namespace osserman::model
