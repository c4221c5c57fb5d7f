// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance [--expect-fail i,j,...]
// Exit status is 0 when the failing criteria are exactly the expected ones.

#include <chrono>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "reglab/blayer.hpp"
#include "reglab/criteria.hpp"
#include "reglab/kernels.hpp"
#include "reglab/pdesim.hpp"
#include "reglab/quadrature.hpp"
#include "reglab/spectral.hpp"

using namespace reglab;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    /// Records one check; any miss fails the criterion.
    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [miss: " << what << "]";
        }
    }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

bool irregular(Verdict v) { return v == Verdict::irregular_nonsingular || v == Verdict::irregular_singular; }

void table_values(Outcome& o) {
    struct Row {
        double l, value, tol;
    };
    const Row rows[] = {{1, -31.16, 0.05},      {2, -1.83, 0.02},  {3, -0.2647, 0.005}, {4, -0.008152, 1e-3},
                        {5, 0.0483, 2e-3},      {7.5, -0.0097, 2e-3}, {8, -0.027, 3e-3}};
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& r : rows) {
        const double lam = top_eigenvalue(r.l);
        o.detail << " l=" << fmt(r.l) << ":" << fmt(lam);
        o.check(std::abs(lam - r.value) <= r.tol, "l=" + fmt(r.l));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.detail << " time=" << fmt(secs) << "s";
    o.check(secs < 120, "runtime");
}

void branch_roots(Outcome& o) {
    const auto b = branch_trace(3.5, 14, 0.05);
    for (double r : b.roots) o.detail << " " << fmt(r);
    if (b.roots.size() < 4) {
        o.check(false, "fewer than four roots");
        return;
    }
    o.check(std::abs(b.roots[0] - 4.0775) <= 0.003, "l1");
    o.check(std::abs(b.roots[1] - 7.25) <= 0.05, "l2");
    o.check(b.roots[2] >= 9.5 && b.roots[2] <= 10.5, "l3");
    o.check(b.roots[3] >= 12.5 && b.roots[3] <= 13.5, "l4");
}

void poincare_chain(Outcome& o) {
    const double lam = poincare_lambda(1);
    const double ls = regularity_bound();
    o.detail << " Lambda0(1)=" << fmt(lam) << " l*=" << fmt(ls);
    o.check(std::abs(lam - 31.285) <= 0.05, "Lambda0(1)");
    o.check(std::abs(ls - 3.9779) <= 0.002, "l*");
    for (double l : {1.0, 2.0, 3.0, 3.9}) {
        const double v = top_eigenvalue(l);
        o.check(v < 0, "sign at l=" + fmt(l));
    }
}

void hermite_system(Outcome& o) {
    // y^k expansions of the adjoint polynomials for the biharmonic operator, k = 0..6
    const std::vector<Polynomial> expected = {
        Polynomial{Rational(1)},
        Polynomial{Rational(0), 1},
        Polynomial{Rational(0), 0, 1},
        Polynomial{Rational(0), 0, 0, 1},
        Polynomial{Rational(24), 0, 0, 0, 1},
        Polynomial{Rational(0), 120, 0, 0, 0, 1},
        Polynomial{Rational(0), 0, 360, 0, 0, 0, 1},
    };
    for (int k = 0; k <= 6; ++k) o.check(hermite_pair(2, k).psi_star_poly == expected[k], "psi*_" + std::to_string(k));
    for (int k = 0; k <= 12; ++k) {
        const auto hp = hermite_pair(2, k);
        o.check(hp.lambda == Rational(-k, 4), "eigenvalue k=" + std::to_string(k));
        o.check((apply_adjoint_operator(2, hp.psi_star_poly) - hp.psi_star_poly * hp.lambda).is_zero(),
                "identity k=" + std::to_string(k));
    }
    const auto rep = orthonormality_matrix(2, 6, 1e-10);
    o.detail << " |G-I|max=" << fmt(rep.max_deviation);
    o.check(rep.max_deviation <= 1e-6, "orthonormality");
}

void kernel_constants_check(Outcome& o) {
    const auto kc = kernel_constants(EquationFamily::biharmonic());
    const double d0 = 3.0 * std::pow(2.0, -11.0 / 3.0);
    const double b0 = std::pow(3.0, 1.5) * std::pow(2.0, -11.0 / 3.0);
    o.check(std::abs(kc.d0 - d0) <= 4 * DBL_EPSILON * d0, "d0");
    o.check(std::abs(kc.b0 - b0) <= 4 * DBL_EPSILON * b0, "b0");
    o.check(std::abs(kc.alpha - 4.0 / 3.0) <= DBL_EPSILON, "alpha");
    const auto fit = kernel_asymptotics_fit(EquationFamily::biharmonic(), 5.0, 9.0, 60);
    o.detail << " fit_rms=" << fmt(fit.residual);
    o.check(fit.residual <= 1e-3, "asymptotic fit on [5,9]");
    const auto fam = EquationFamily::biharmonic();
    const double mass = adaptive_quadrature([&](double y) { return eval_kernel(fam, y, 1e-13); }, -60.0, 60.0, 1e-11).value;
    o.detail << " mass-1=" << fmt(mass - 1);
    o.check(std::abs(mass - 1) <= 1e-8, "mass");
    const double lhs = std::pow(kc.d0, -0.75);
    const double rhs = std::pow(3.0, -0.75) * std::pow(2.0, 2.75);
    o.detail << " C*=" << fmt(lhs);
    o.check(std::abs(lhs - rhs) <= 4 * DBL_EPSILON * rhs, "d0^(-3/4) identity");
}

void boundary_layers(Outcome& o) {
    for (auto f : {LayerFamily::biharmonic(), LayerFamily::dispersion3()}) {
        const auto bvp = solve_bl_bvp(f, 30.0);
        const auto exact = closed_form_profile(f, 30.0);
        const double d = (bvp.g - exact.g).cwiseAbs().maxCoeff();
        o.detail << " " << f.name() << "_sup=" << fmt(d);
        o.check(d <= 1e-6, f.name() + " profile");
    }
    const double g1 = wall_constants(solve_bl_bvp(LayerFamily::biharmonic())).gamma1;
    o.check(std::abs(g1 - std::pow(2.0, -4.0 / 3.0)) <= 1e-8, "gamma1");
    const auto p = solve_bl_bvp(LayerFamily::pme4(), 60.0, 1e-12, 1201);
    o.detail << " pme4: G(0)=" << fmt(p.g(0)) << " G'(0)=" << fmt(p.wall(1)) << " G(inf)=" << fmt(p.far_field)
             << " overshoots=" << p.overshoots();
    o.check(p.g(0) == 0.0 && p.wall(1) == 0.0, "pme4 wall");
    o.check(std::abs(p.far_field - 1.0) <= 1e-4, "pme4 far field");
    o.check(p.overshoots() == 1, "pme4 overshoot");
}

void criterion_thresholds(Outcome& o) {
    const auto bih = kernel_constants(EquationFamily::biharmonic());
    const auto disp = kernel_constants(EquationFamily::dispersion3());
    const double cb = std::pow(3.0, -0.75) * std::pow(2.0, 2.75);
    const double cl = std::pow(3 * std::sqrt(3.0) / 2, 2.0 / 3);
    const double eps = 1e-8;

    const auto bih_at = BoundaryFunction::power_log(cb, 0.75);
    o.check(classify_biharmonic(apply_cutoff(bih_at, bih), bih).verdict == Verdict::regular, "biharmonic at C*");
    o.check(irregular(classify_biharmonic(BoundaryFunction::power_log(cb * (1 + eps), 0.75), bih).verdict),
            "biharmonic above C*");

    o.check(classify_heat(BoundaryFunction::petrovskii_sqrt_log(2)).verdict == Verdict::regular, "heat at 2");
    o.check(irregular(classify_heat(BoundaryFunction::petrovskii_sqrt_log(2 * (1 + eps))).verdict), "heat above 2");

    const auto disp_at = BoundaryFunction::power_log(1, 4.0 / 3);
    o.check(classify_dispersion(Side::right, apply_cutoff(disp_at, disp)).verdict == Verdict::regular,
            "dispersion right at 4/3");
    o.check(irregular(classify_dispersion(Side::right, BoundaryFunction::power_log(1, 4.0 / 3 + eps)).verdict),
            "dispersion right above 4/3");

    o.check(classify_dispersion(Side::left, BoundaryFunction::power_log(cl, 2.0 / 3)).verdict == Verdict::regular,
            "dispersion left at C*");
    o.check(irregular(classify_dispersion(Side::left, BoundaryFunction::power_log(cl * (1 + eps), 2.0 / 3)).verdict),
            "dispersion left above C*");

    // oscillatory regular verdicts need the cut-off; uncut inputs stay indeterminate
    int uncut_cases = 0;
    for (double r : {0.5, 0.8, 1.0}) {
        const auto v = classify_biharmonic(BoundaryFunction::power_log(r * cb, 0.75), bih);
        o.check(v.verdict == Verdict::indeterminate && v.tail.sign_alternating, "uncut biharmonic r=" + fmt(r));
        ++uncut_cases;
    }
    for (double g : {1.0, 4.0 / 3}) {
        const auto v = classify_dispersion(Side::right, BoundaryFunction::power_log(1, g));
        o.check(v.verdict == Verdict::indeterminate && v.tail.sign_alternating, "uncut dispersion g=" + fmt(g));
        ++uncut_cases;
    }
    o.detail << " C*=" << fmt(cb) << " C*_left=" << fmt(cl) << " uncut_cases=" << uncut_cases;
}

void pde_cross_validation(Outcome& o) {
    struct Row {
        double l, value, tol, tau_a, tau_b;
    };
    const Row rows[] = {{1, -31.16, 0.10, 0.2, 1.0}, {2, -1.83, 0.04, 2, 10}, {3, -0.2647, 0.01, 10, 50},
                        {4, -0.008152, 2e-3, 50, 400}, {5, 0.0483, 4e-3, 50, 400}};
    for (const auto& r : rows) {
        SimConfig cfg;
        cfg.phi = BoundaryFunction::constant(r.l);
        cfg.tau_end = r.tau_b;
        cfg.track_a0 = false;
        const double sigma = fit_rate(simulate(cfg), r.tau_a, r.tau_b);
        o.detail << " l=" << fmt(r.l) << ":" << fmt(sigma);
        o.check(std::abs(sigma - r.value) <= r.tol, "rate l=" + fmt(r.l));
    }
    const auto p2 = verify_P2();
    o.detail << " P2=" << (p2.pass ? "pass" : "fail");
    o.check(p2.pass && p2.runs.size() == 6, "verify_P2");
}

void pme4_asymptotics(Outcome& o) {
    const auto tr = integrate_a0(A0Model::pme4_reduced, BoundaryFunction::constant(1), 1.0, 1e5);
    const auto fit = fit_log_power(tr, 1e3, 1e5);
    const double target = std::pow(3.0, 1.5) * std::pow(2.0, -5.5);
    o.detail << " power=" << fmt(fit.power) << " K=" << fmt(fit.amplitude) << " target=" << fmt(target);
    o.check(std::abs(fit.power + 1.5) <= 0.05, "power");
    o.check(std::abs(fit.amplitude / target - 1) <= 0.15, "amplitude");
    const double e = pme4_critical().exponent;
    const auto one = pme4_reduced_outcome(BoundaryFunction::power_log(1, e));
    const auto two = pme4_reduced_outcome(BoundaryFunction::power_log(2, e));
    o.detail << " C:" << (one.tends_to_zero ? "regular" : "irregular") << " 2C:"
             << (two.tends_to_zero ? "regular" : "irregular");
    o.check(one.tends_to_zero == two.tends_to_zero, "C vs 2C");
}

void pencil(Outcome& o) {
    for (int k = 0; k <= 8; ++k) {
        const auto pp = pencil_pair(k);
        const std::string tag = " k=" + std::to_string(k);
        o.check(pp.lambda_plus == Rational(-k, 2) && pp.lambda_minus == Rational(-k - 2, 2), "eigenvalues" + tag);
        o.check(pencil_characteristic(k, pp.lambda_plus).is_zero() && pencil_characteristic(k, pp.lambda_minus).is_zero(),
                "characteristic" + tag);
        o.check(pp.psi_star_poly.degree() == k && apply_pencil(pp.lambda_plus, pp.psi_star_poly).is_zero(),
                "annihilation" + tag);
    }
    o.detail << " k=0..8 exact";
}

void majorant(Outcome& o) {
    const auto d1 = majorant_deficiency(1, 1e-11);
    const auto d2 = majorant_deficiency(2, 1e-11);
    std::vector<double> ys;
    for (int i = 0; i < 1000; ++i) ys.push_back(-20.0 + 40.0 * i / 999.0);
    const double excess = d2.pointwise_excess(ys);
    o.detail << " D1*=" << fmt(d1.d_star) << " D2*=" << fmt(d2.d_star) << " excess=" << fmt(excess);
    o.check(std::abs(d1.d_star - 1.0) <= 1e-9, "D1*");
    o.check(d2.d_star > 1.0, "D2*");
    o.check(excess <= 1e-15, "pointwise bound");
}

std::set<int> parse_list(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> expected_fail;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--expect-fail" && i + 1 < argc) {
            expected_fail = parse_list(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: acceptance [--expect-fail i,j,...]\n");
            return 2;
        }
    }

    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"table of top eigenvalues", table_values},
        {"branch roots", branch_roots},
        {"Poincare chain", poincare_chain},
        {"Hermite system", hermite_system},
        {"kernel constants", kernel_constants_check},
        {"boundary layers", boundary_layers},
        {"criterion thresholds", criterion_thresholds},
        {"PDE and spectrum cross-check", pde_cross_validation},
        {"porous-medium asymptotics", pme4_asymptotics},
        {"pencil", pencil},
        {"majorant deficiency", majorant},
    };

    std::set<int> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) failed.insert(id);
        std::printf("%s %2d %s:%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    o.detail.str().c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%zu/%zu passed\n", criteria.size() - failed.size(), criteria.size());
    if (failed != expected_fail) {
        std::printf("failing set differs from the expected one\n");
        return 1;
    }
    return 0;
}
