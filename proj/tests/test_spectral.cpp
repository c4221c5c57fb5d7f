#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "reglab/errors.hpp"
#include "reglab/spectral.hpp"

using namespace reglab;
using doctest::Approx;

namespace {

double solve(double l, SpectralMethod method, Parity parity = Parity::even) {
    IntervalEigenProblem p;
    p.l = l;
    p.method = method;
    p.parity = parity;
    return interval_spectrum(p, 1).front().lambda.real();
}

const EigenBranch& mid_branch() {
    static const EigenBranch br = branch_trace(3.5, 8.0, 0.05);
    return br;
}

}  // namespace

TEST_CASE("clamped D^4 eigenvalue against the beam frequency equation") {
    const double L0 = poincare_lambda(1.0);
    CHECK(L0 == Approx(31.285).epsilon(0.05 / 31.285));
    const double mu = std::pow(L0, 0.25);
    CHECK(std::abs(std::cosh(2 * mu) * std::cos(2 * mu) - 1.0) < 1e-10);
    CHECK(mu == Approx(2.3650).epsilon(1e-4));
    CHECK(poincare_lambda(2.0) == Approx(L0 / 16).epsilon(1e-15));
    CHECK_THROWS_AS(poincare_lambda(0.0), DomainError);
}

TEST_CASE("regularity bound") {
    const double ls = regularity_bound();
    CHECK(std::abs(ls - 3.9779) < 2e-3);
    CHECK(ls == Approx(std::pow(8 * 31.285, 0.25)).epsilon(1e-4));
    for (double l = 0.5; l < ls; l += 0.5) CHECK(top_eigenvalue(l) < 0);
}

TEST_CASE("top even eigenvalue reproduces the tabulated branch") {
    const std::vector<std::pair<double, double>> table = {
        {1, -31.16},    {2, -1.831},     {3, -0.2647},    {4, -0.008152},  {4.0775, 1.132e-5},
        {5, 0.0483},    {6, 0.04591},    {7.25, 0.00167}, {7.5, -0.009673}, {8, -0.02687},
        {9, -0.01797},  {10, -0.000841}, {11, 0.003892},  {12, 0.001719},  {13, -0.000547}};
    for (const auto& [l, expected] : table) {
        CAPTURE(l);
        const double got = top_eigenvalue(l);
        CHECK(std::abs(got - expected) <= std::max(1e-3 * std::abs(expected), 2e-6));
    }
    CHECK(std::abs(top_eigenvalue(1.0) + 31.16) < 0.05);
    CHECK(std::abs(top_eigenvalue(4.0) + 0.008152) < 1e-3);
    CHECK(std::abs(top_eigenvalue(5.0) - 0.0483) < 2e-3);
}

TEST_CASE("shooting and collocation agree") {
    for (double l : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        for (Parity par : {Parity::even, Parity::odd}) {
            CAPTURE(l);
            const double s = solve(l, SpectralMethod::shooting, par);
            const double c = solve(l, SpectralMethod::collocation, par);
            CHECK(std::abs(s - c) <= std::max(1e-4 * std::abs(s), 1e-6));
        }
    }
}

TEST_CASE("full-interval shooting matches the parity split") {
    IntervalEigenProblem p;
    p.l = 2.0;
    p.parity = Parity::full;
    const auto full = interval_spectrum(p, 2);
    CHECK(full[0].lambda.real() == Approx(solve(2.0, SpectralMethod::shooting, Parity::even)).epsilon(1e-8));
    CHECK(full[1].lambda.real() == Approx(solve(2.0, SpectralMethod::shooting, Parity::odd)).epsilon(1e-8));
}

TEST_CASE("k-th eigenfunction at l = 1 has k interior zeros") {
    for (SpectralMethod method : {SpectralMethod::shooting, SpectralMethod::collocation}) {
        IntervalEigenProblem p;
        p.l = 1.0;
        p.parity = Parity::full;
        p.method = method;
        const auto pairs = interval_spectrum(p, 5);
        REQUIRE(pairs.size() == 5);
        for (int k = 0; k < 5; ++k) {
            CAPTURE(k);
            CHECK(pairs[k].zero_count == k);
            CHECK(std::abs(pairs[k].lambda.imag()) < 1e-8);
            CHECK(pairs[k].psi.cwiseAbs().maxCoeff() == Approx(1.0));
            CHECK_FALSE(pairs[k].flagged);
        }
        for (int k = 0; k + 1 < 5; ++k) CHECK(pairs[k].lambda.real() > pairs[k + 1].lambda.real());
    }
}

TEST_CASE("drift term is negligible on short intervals") {
    for (double l : {0.5, 1.0, 1.2}) {
        const double L = poincare_lambda(l);
        CHECK(std::abs(top_eigenvalue(l) + L) / L <= 0.01);
    }
    // The drift shifts the eigenvalue up by about 1/8, so the relative gap grows like l^4.
    for (double l : {0.5, 1.0, 1.5}) {
        const double gap = top_eigenvalue(l) + poincare_lambda(l);
        CHECK(gap > 0);
        CHECK(gap <= 0.125);
        CHECK(gap == Approx(0.125).epsilon(0.05));
    }
}

TEST_CASE("collocation top eigenvalue is real on sampled intervals") {
    for (int l = 1; l <= 13; ++l) {
        IntervalEigenProblem p;
        p.l = l;
        p.method = SpectralMethod::collocation;
        p.parity = Parity::full;
        const auto e = interval_spectrum(p, 1).front();
        CAPTURE(l);
        CHECK(std::abs(e.lambda.imag()) <= 1e-6);
        CHECK_FALSE(e.flagged);
    }
}

TEST_CASE("branch on [3.5, 8] is continuous and has two roots") {
    const auto& br = mid_branch();
    REQUIRE(br.l.size() == 91);
    for (std::size_t i = 0; i + 1 < br.l.size(); ++i) {
        CHECK(br.l[i] < br.l[i + 1]);
        CHECK(std::abs(br.lambda0[i + 1] - br.lambda0[i]) < 0.05);
    }
    REQUIRE(br.roots.size() == 2);
    CHECK(std::abs(br.roots[0] - 4.0775) <= 3e-3);
    CHECK(std::abs(br.roots[1] - 7.25) <= 0.05);
    for (double r : br.roots) {
        auto it = std::lower_bound(br.l.begin(), br.l.end(), r);
        const std::size_t i = it - br.l.begin();
        CHECK(br.lambda0[i - 1] * br.lambda0[i] < 0);
    }
    for (std::size_t i = 0; i < br.l.size(); ++i)
        if (br.l[i] < regularity_bound()) CHECK(br.lambda0[i] < 0);
}

TEST_CASE("branch on [9, 14] locates the next two roots") {
    const auto br = branch_trace(9.0, 14.0, 0.1);
    REQUIRE(br.roots.size() == 2);
    CHECK(br.roots[0] >= 9.5);
    CHECK(br.roots[0] <= 10.5);
    CHECK(br.roots[1] >= 12.5);
    CHECK(br.roots[1] <= 13.5);
    // the tabulated samples bracket the fourth root between 12.6 and 12.7
    CHECK(br.roots[1] == Approx(12.6436).epsilon(1e-4));
    CHECK(br.roots[0] == Approx(10.0839).epsilon(1e-4));
}

TEST_CASE("branch_trace rejects bad ranges") {
    CHECK_THROWS_AS(branch_trace(0.0, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(branch_trace(2.0, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(branch_trace(1.0, 2.0, 0.0), DomainError);
}

TEST_CASE("boundary-layer profile satisfies its matching conditions") {
    for (double l : {8.0, 9.5, 11.0, 14.0}) {
        const auto bl = bl_eigenvalue_approx(l);
        const double L = std::pow(l, 4.0 / 3.0);
        CAPTURE(l);
        CHECK(std::abs(bl.V(0) - 1.0) < 1e-8);
        CHECK(std::abs(bl.V(L)) < 1e-8);
        CHECK(std::abs(bl.V(L, 1)) < 1e-8);
        // derivative formula against central differences
        const double z = 0.4 * L, h = 1e-4;
        CHECK(bl.V(z, 1) == Approx((bl.V(z + h) - bl.V(z - h)) / (2 * h)).epsilon(1e-6));
        CHECK(bl.d_hat == Approx(3.0 * std::pow(2.0, -11.0 / 3.0) + std::pow(2.0, -5.0 / 3.0)));
        // layer equation -V'''' - V'/4 = 0
        for (double zz : {0.5 * L, 0.9 * L, L - 1.0})
            CHECK(std::abs(bl.V(zz, 4) + bl.V(zz, 1) / 4) <= 1e-12 * (1 + std::abs(bl.V(zz, 1))));
    }
}

TEST_CASE("boundary-layer approximation changes sign near the large roots") {
    std::vector<double> ls, vals;
    for (double l = 8.0; l <= 14.0 + 1e-9; l += 0.05) {
        ls.push_back(l);
        vals.push_back(bl_eigenvalue_approx(l).lambda0);
    }
    std::vector<double> changes;
    for (std::size_t i = 0; i + 1 < ls.size(); ++i)
        if (vals[i] * vals[i + 1] < 0) changes.push_back(0.5 * (ls[i] + ls[i + 1]));
    const auto br = branch_trace(9.0, 14.0, 0.1);
    REQUIRE(br.roots.size() == 2);
    for (double r : br.roots) {
        double nearest = 1e9;
        for (double c : changes) nearest = std::min(nearest, std::abs(c - r));
        CAPTURE(r);
        CHECK(nearest <= 0.5);
    }
    // signs alternate -, +, - across [8, 14]
    REQUIRE(changes.size() == 2);
    CHECK(vals.front() < 0);
    CHECK(vals.back() < 0);
    // and track the exact branch within a factor of three
    for (double l : {9.0, 11.0, 13.5}) {
        const double ratio = bl_eigenvalue_approx(l).lambda0 / top_eigenvalue(l);
        CHECK(ratio > 1.0 / 3);
        CHECK(ratio < 3.0);
    }
}
