#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "osserman/errors.hpp"
#include "osserman/model.hpp"

using namespace osserman;
using model::CertificateReport;
using model::NonlinearitySpec;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a * std::pow(b / a, double(i) / (n - 1));
    return v;
}

// independent composite-Simpson oracle used to cross-check the adaptive code
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// the example nonlinearity family with c_i = 1, rho = theta = 3, sigma = 1.5,
// gamma = 1, unit coefficients, f_i = 3t^2, g = 8(1+t^3)
NonlinearitySpec example_family() {
    NonlinearitySpec s;
    s.Fu = [](double, double u, double v) { return 3 * u * u + 1.5 * std::sqrt(u) * v; };
    s.Fv = [](double, double u, double v) { return std::pow(u, 1.5) + 3 * v * v; };
    s.dFu_du = [](double, double u, double v) { return 6 * u + 0.75 * v / std::sqrt(u); };
    s.dFu_dv = [](double, double u, double) { return 1.5 * std::sqrt(u); };
    s.dFv_du = [](double, double u, double) { return 1.5 * std::sqrt(u); };
    s.dFv_dv = [](double, double, double v) { return 6 * v; };
    s.a1 = s.a2 = s.a1sq = s.a2sq = [](double) { return 1.0; };
    s.b1 = s.b2 = [](double) { return 0.0; };
    s.f1 = s.f2 = [](double t) { return 3 * t * t; };
    s.g = [](double t) { return 8 * (1 + t * t * t); };
    s.q1 = s.q2 = 2.0;
    return s;
}

model::StructuralSamples default_samples() {
    return {linspace(0.0, 1.0, 9), logspace(0.1, 10.0, 12), logspace(0.1, 10.0, 12)};
}

}  // namespace

TEST_CASE("f-class: t^2 passes") {
    auto grid = linspace(0.0, 10.0, 21);
    auto rep = model::check_f_class([](double t) { return t * t; }, grid);
    CHECK(rep.passed);
    CHECK(rep.checks.size() == 3);
}

TEST_CASE("f-class: t^2-1 fails the origin condition with margin -1") {
    auto grid = linspace(0.0, 10.0, 21);
    auto rep = model::check_f_class([](double t) { return t * t - 1; }, grid);
    CHECK_FALSE(rep.passed);
    auto* c = rep.find("h(0)=0 (tol 1e-12)");
    REQUIRE(c != nullptr);
    CHECK(c->worst_margin == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(c->worst_point[0] == 0.0);
}

TEST_CASE("f-class: sin fails monotonicity between pi/2 and 3pi/2") {
    auto grid = linspace(0.0, 10.0, 41);
    auto rep = model::check_f_class([](double t) { return std::sin(t); }, grid);
    CHECK_FALSE(rep.passed);
    auto* c = rep.find("nondecreasing (tol 1e-12 rel)");
    REQUIRE(c != nullptr);
    CHECK(c->worst_margin < 0.0);
    CHECK(c->worst_point[0] > 1.5);
    CHECK(c->worst_point[0] < 4.8);
}

TEST_CASE("keller-osserman verdict matrix for power laws") {
    for (double p : {1.1, 1.5, 2.0, 3.0, 4.0}) {
        auto r = model::keller_osserman([p](double t) { return std::pow(t, p); });
        INFO("p = ", p);
        CHECK(r.converges);
        CHECK(r.status == model::KoStatus::Converges);
    }
    for (double p : {0.5, 1.0}) {
        auto r = model::keller_osserman([p](double t) { return std::pow(t, p); });
        INFO("p = ", p);
        CHECK_FALSE(r.converges);
    }
}

TEST_CASE("keller-osserman integral for h=t^2 equals 2*sqrt(3)") {
    // H = t^3/3, integrand sqrt(3) t^{-3/2}, closed form 2*sqrt(3)
    auto r = model::keller_osserman([](double t) { return t * t; });
    REQUIRE(r.converges);
    CHECK(r.integral == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-4));
}

TEST_CASE("keller-osserman declares the harmonic borderline divergent") {
    auto r = model::keller_osserman([](double t) { return t; });
    CHECK(r.status == model::KoStatus::Diverges);
}

TEST_CASE("keller-osserman on exp(t)-1 converges and matches a Simpson oracle") {
    auto h = [](double t) { return std::expm1(t); };
    auto r = model::keller_osserman(h);
    REQUIRE(r.converges);
    // independent oracle: H(t) = e^t - 1 - t, integrand decays like e^{-t/2};
    // truncation at t = 200 leaves a remainder ~ e^{-100}
    auto phi = [](double t) { return 1.0 / std::sqrt(std::expm1(t) - t); };
    double ref = simpson(phi, 1.0, 60.0, 60000) + simpson(phi, 60.0, 200.0, 20000);
    CHECK(r.integral == doctest::Approx(ref).epsilon(1e-4));
}

TEST_CASE("tail integral closed forms") {
    CHECK(model::tail_integral([](double t) { return t * t; }, 2.0) ==
          doctest::Approx(0.5).epsilon(1e-8));
    CHECK(model::tail_integral([](double t) { return t * t * t; }, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-8));
    CHECK_THROWS_AS(model::tail_integral([](double t) { return t; }, 1.0), TailDiverges);
}

TEST_CASE("tail integral of the example dominator matches a Simpson oracle") {
    auto g = [](double t) { return 8 * (1 + t * t * t); };
    double got = model::tail_integral(g, 0.5);
    auto recip = [&](double t) { return 1.0 / g(t); };
    double ref = simpson(recip, 0.5, 2000.0, 400000) + 1.0 / (16.0 * 2000.0 * 2000.0);
    CHECK(got == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("invert_tail closed forms and range errors") {
    auto g2 = [](double t) { return t * t; };
    auto g3 = [](double t) { return t * t * t; };
    CHECK(model::invert_tail(g2, 0.25) == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(model::invert_tail(g3, 0.125) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK_THROWS_AS(model::invert_tail(g2, 0.0), OutOfRange);
    CHECK_THROWS_AS(model::invert_tail(g2, -1.0), OutOfRange);
    CHECK_THROWS_AS(model::invert_tail(g2, 2e12, 1e-12), OutOfRange);
}

TEST_CASE("property: tail integral is strictly decreasing in s") {
    auto g = [](double t) { return 8 * (1 + t * t * t); };
    double prev = model::tail_integral(g, 0.25);
    for (double s : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        double cur = model::tail_integral(g, s);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("property: invert_tail inverts tail_integral on random power laws") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> pdist(1.05, 5.0);
    std::uniform_real_distribution<double> sdist(0.5, 4.0);
    for (int i = 0; i < 100; ++i) {
        double p = pdist(rng);
        double s = sdist(rng);
        auto g = [p](double t) { return std::pow(t, p); };
        double z = model::tail_integral(g, s);
        double w = model::invert_tail(g, z);
        INFO("p=", p, " s=", s);
        CHECK(w == doctest::Approx(s).epsilon(1e-8));
    }
}

TEST_CASE("structural verification passes on the example family") {
    auto rep = model::verify_structural(example_family(), default_samples());
    INFO(rep.to_json().dump(2));
    CHECK(rep.passed);
    for (const auto& c : rep.checks) CHECK(c.worst_margin >= 0.0);
}

TEST_CASE("structural verification fails when f1 is too large") {
    auto spec = example_family();
    spec.f1 = [](double t) { return 4 * t * t; };
    auto rep = model::verify_structural(spec, default_samples());
    CHECK_FALSE(rep.passed);
    auto* c = rep.find("Fu minorant: Fu(x,t,s) >= a1(x)*f1(t)");
    REQUIRE(c != nullptr);
    CHECK(c->worst_margin < 0.0);
    // worst at large t, small s: 1.5 sqrt(t) s - t^2 is most negative there
    CHECK(c->worst_point[1] == doctest::Approx(10.0));
    CHECK(c->worst_point[2] == doctest::Approx(0.1));
    double expect = 3 * 100.0 + 1.5 * std::sqrt(10.0) * 0.1 - 4 * 100.0;
    CHECK(c->worst_margin == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("structural verification fails when g grows too slowly") {
    auto spec = example_family();
    spec.g = [](double t) { return t * t; };
    auto rep = model::verify_structural(spec, default_samples());
    CHECK_FALSE(rep.passed);
    auto* c = rep.find("g dominates diagonal: g(t) > max F_i(x,t,t)/a_i^2(x) (slack 1e-12)");
    REQUIRE(c != nullptr);
    double expect = 100.0 - (3 * 100.0 + 1.5 * std::pow(10.0, 1.5));
    CHECK(c->worst_margin == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("property: passing certificate is monotone in g") {
    auto spec = example_family();
    auto rep = model::verify_structural(spec, default_samples());
    REQUIRE(rep.passed);
    auto bumped = spec;
    bumped.g = [](double t) { return 8 * (1 + t * t * t) + 5.0; };
    auto rep2 = model::verify_structural(bumped, default_samples());
    CHECK(rep2.passed);
    auto* c1 = rep.find("g dominates diagonal: g(t) > max F_i(x,t,t)/a_i^2(x) (slack 1e-12)");
    auto* c2 = rep2.find("g dominates diagonal: g(t) > max F_i(x,t,t)/a_i^2(x) (slack 1e-12)");
    CHECK(c2->worst_margin >= c1->worst_margin);
}

TEST_CASE("exponent family") {
    CHECK(model::check_exponent_family(3, 1.5, 1, 3));
    CHECK_FALSE(model::check_exponent_family(2, 1.5, 1, 3));
    CHECK_FALSE(model::check_exponent_family(3, 2.5, 0.1, 3));
    CHECK_FALSE(model::check_exponent_family(3, 1.0, 1.0, 3));  // sigma+gamma = 2
    CHECK_FALSE(model::check_exponent_family(3, 1.5, 2.0, 3));  // gamma = 2
}

TEST_CASE("q-range validation") {
    auto spec = example_family();
    spec.q1 = 3.0;
    CHECK_THROWS_WITH_AS(model::validate(spec), "q1 must lie in (0,2]", PreconditionError);
    spec.q1 = 2.0;
    spec.q2 = 0.0;
    CHECK_THROWS_AS(model::validate(spec), PreconditionError);
}

TEST_CASE("certificate JSON shape") {
    auto rep = model::check_f_class([](double t) { return t * t; }, linspace(0, 1, 5));
    auto j = rep.to_json();
    CHECK(j["passed"].is_boolean());
    CHECK(j["samples_used"].is_number());
    CHECK(j["checks"].is_array());
    CHECK(j["checks"][0]["name"].is_string());
    CHECK(j["checks"][0]["worst_margin"].is_number());
}
