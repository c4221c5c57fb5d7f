#include "reglab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "reglab/chebyshev.hpp"
#include "reglab/eigen_dense.hpp"
#include "reglab/errors.hpp"
#include "reglab/ode.hpp"
#include "reglab/roots.hpp"

namespace reglab {

namespace {

using Vec = Eigen::VectorXd;
using std::numbers::pi;

void check_l(double l) {
    if (!(l > 0) || !std::isfinite(l)) throw DomainError("half-length l must be positive");
}

int order_of(const EquationFamily& f) {
    if (f.tag != FamilyTag::parabolic) throw DomainError("interval eigenproblem needs a parabolic family");
    return f.m;
}

/// Smallest eigenvalue of (-1)^m D^(2m) on the clamped interval (-1, 1).
double unit_clamped_eigenvalue(int m) {
    static std::mutex mu;
    static std::map<int, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(m); it != cache.end()) return it->second;
    double value;
    if (m == 2) {
        // Clamped-beam frequency equation cosh(2 mu) cos(2 mu) = 1.
        auto f = [](double mu) { return std::cosh(2 * mu) * std::cos(2 * mu) - 1.0; };
        const double mu = find_root(f, 2.0, 2.7, 1e-15).x;
        value = std::pow(mu, 4);
    } else if (m == 1) {
        value = pi * pi / 4;
    } else {
        const int N = 48;
        const auto D = cheb_clamped_derivatives(N, m, 2 * m);
        Eigen::MatrixXd A = (m % 2 == 0 ? 1.0 : -1.0) * D[2 * m];
        const auto dec = dense_eigenvalues(A, false);
        value = dec.values(dec.values.size() - 1).real();
    }
    cache[m] = value;
    return value;
}

/// Upper bound of the real spectrum from the energy estimate.
double energy_top(double l, int m) { return 1.0 / (4.0 * m) - unit_clamped_eigenvalue(m) / std::pow(l, 2 * m); }

/// Initial-data indices left free by the parity at y = 0 (or by the clamped end at y = -l).
std::vector<int> free_indices(int m, Parity parity) {
    std::vector<int> idx;
    for (int i = 0; i < 2 * m; ++i) {
        if (parity == Parity::even && i % 2 == 0) idx.push_back(i);
        if (parity == Parity::odd && i % 2 == 1) idx.push_back(i);
        if (parity == Parity::full && i >= m) idx.push_back(i);
    }
    return idx;
}

struct ShootingSystem {
    double l;
    int m;
    Parity parity;
    double lambda;
    double tol;

    double start() const { return parity == Parity::full ? -l : 0.0; }

    auto rhs() const {
        const int n = 2 * m;
        const double sign = m % 2 == 1 ? 1.0 : -1.0;
        const double lam = lambda;
        const double mm = m;
        return [n, sign, lam, mm](double y, const Vec& s) {
            Vec d(n);
            for (int i = 0; i + 1 < n; ++i) d(i) = s(i + 1);
            d(n - 1) = sign * (lam * s(0) + y * s(1) / (2 * mm));
            return d;
        };
    }

    OdeOptions<double> options() const {
        OdeOptions<double> opt;
        opt.rtol = tol;
        opt.atol = tol * 1e-3;
        opt.record_steps = false;
        return opt;
    }

    /// Clamped-end values Psi^(i)(l), i < m, of the fundamental solutions as columns.
    Eigen::MatrixXd end_matrix() const {
        const auto idx = free_indices(m, parity);
        Eigen::MatrixXd M(m, m);
        for (int j = 0; j < m; ++j) {
            Vec y0 = Vec::Zero(2 * m);
            y0(idx[j]) = 1.0;
            const auto tr = integrate_ode<double>(rhs(), y0, start(), l, options());
            M.col(j) = tr.back().head(m);
        }
        return M;
    }
};

double normalised_det(const Eigen::MatrixXd& M) {
    double scale = 1.0;
    for (int j = 0; j < M.cols(); ++j) scale *= std::max(M.col(j).norm(), 1e-300);
    return M.determinant() / scale;
}

int count_zeros(const Vec& psi, const Vec& grid, double l) {
    const double cut = 1e-7 * psi.cwiseAbs().maxCoeff();
    int zeros = 0;
    int last_sign = 0;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        if (std::abs(grid(i)) > l * (1 - 1e-2)) continue;
        if (std::abs(psi(i)) <= cut) continue;
        const int s = psi(i) > 0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++zeros;
        last_sign = s;
    }
    return zeros;
}

void normalise_max(Vec& psi) {
    Eigen::Index k;
    psi.cwiseAbs().maxCoeff(&k);
    if (psi(k) != 0) psi /= psi(k);
}

Eigenpair shooting_pair(double l, int m, Parity parity, double lambda, int samples, double tol) {
    ShootingSystem sys{l, m, parity, lambda, tol};
    const Eigen::MatrixXd M = sys.end_matrix();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const Vec sv = svd.singularValues();
    const Vec coef = svd.matrixV().col(m - 1);
    const auto idx = free_indices(m, parity);
    Vec y0 = Vec::Zero(2 * m);
    for (int j = 0; j < m; ++j) y0(idx[j]) = coef(j);

    Eigenpair e;
    e.lambda = lambda;
    e.parity = parity;
    e.grid = Vec::LinSpaced(2 * samples + 1, -l, l);
    e.psi.resize(e.grid.size());
    auto opt = sys.options();
    if (parity == Parity::full) {
        opt.output_points.assign(e.grid.data() + 1, e.grid.data() + e.grid.size());
        const auto tr = integrate_ode<double>(sys.rhs(), y0, -l, l, opt);
        for (Eigen::Index i = 0; i < e.grid.size(); ++i) e.psi(i) = tr.y[i](0);
    } else {
        opt.output_points.assign(e.grid.data() + samples + 1, e.grid.data() + e.grid.size());
        const auto tr = integrate_ode<double>(sys.rhs(), y0, 0.0, l, opt);
        const double mirror = parity == Parity::even ? 1.0 : -1.0;
        for (int i = 0; i <= samples; ++i) {
            e.psi(samples + i) = tr.y[i](0);
            e.psi(samples - i) = mirror * tr.y[i](0);
        }
    }
    normalise_max(e.psi);
    e.residual = sv(m - 1) / sv(0);
    e.zero_count = count_zeros(e.psi, e.grid, l);
    e.flagged = e.residual > std::max(1e3 * tol, 1e-6);
    return e;
}

std::vector<Eigenpair> shooting_spectrum(const IntervalEigenProblem& p, int count) {
    const int m = order_of(p.family);
    const double tol = std::max(p.tol, 1e-13);
    auto det = [&](double lam) { return shooting_determinant(p.l, m, p.parity, lam, tol); };
    const double top = energy_top(p.l, m);
    double hi = top + 0.01 * std::max(std::abs(top), 1.0);
    double f_hi = det(hi);
    std::vector<Eigenpair> out;
    const int samples = p.n > 0 ? p.n : 200;
    // The spectrum is unbounded below; the scan budget only guards against runaway searches.
    for (int steps = 0; steps < 20000 && static_cast<int>(out.size()) < count; ++steps) {
        const double lo = hi - 0.05 * std::max(std::abs(hi), 0.5);
        const double f_lo = det(lo);
        if ((f_lo < 0) != (f_hi < 0)) {
            const double root = find_root(det, lo, hi, tol * std::max(1.0, std::abs(lo))).x;
            out.push_back(shooting_pair(p.l, m, p.parity, root, samples, tol));
        }
        hi = lo;
        f_hi = f_lo;
    }
    if (static_cast<int>(out.size()) < count)
        throw NumericalError("shooting scan exhausted before finding all eigenvalues; use collocation");
    return out;
}

struct CollocationResult {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
    Eigen::MatrixXd A;
    Vec nodes;
};

CollocationResult collocate(double l, int m, int N, bool vectors) {
    const auto D = cheb_clamped_derivatives(N, m, 2 * m);
    const Vec x = cheb_nodes(N).segment(1, N - 1);
    const double sign = m % 2 == 1 ? 1.0 : -1.0;
    Eigen::MatrixXd A = sign * D[2 * m] / std::pow(l, 2 * m);
    A -= (x * l).asDiagonal() * D[1] / (2.0 * m * l);
    // Shift-invert keeps the physical end of the spectrum away from the
    // O(N^(4m)) spurious eigenvalues of the differentiation matrices.
    const double shift = 1.0 / (4.0 * m) + 1.0;
    Eigen::MatrixXd S = A - shift * Eigen::MatrixXd::Identity(N - 1, N - 1);
    Eigen::MatrixXd inv = S.partialPivLu().inverse();
    const auto dec = dense_eigenvalues(inv, vectors);
    CollocationResult r;
    r.values.resize(dec.values.size());
    for (Eigen::Index i = 0; i < dec.values.size(); ++i) r.values(i) = shift + 1.0 / dec.values(i);
    std::vector<Eigen::Index> order(r.values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (r.values(a).real() != r.values(b).real()) return r.values(a).real() > r.values(b).real();
        return r.values(a).imag() > r.values(b).imag();
    });
    Eigen::VectorXcd sorted(r.values.size());
    Eigen::MatrixXcd vecs;
    if (vectors) vecs.resize(N - 1, r.values.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted(i) = r.values(order[i]);
        if (vectors) vecs.col(i) = dec.vectors.col(order[i]);
    }
    r.values = sorted;
    r.vectors = vecs;
    r.A = A;
    r.nodes = x * l;
    return r;
}

Parity classify_parity(const Vec& v) {
    const Vec rev = v.reverse();
    return (v - rev).norm() <= (v + rev).norm() ? Parity::even : Parity::odd;
}

std::vector<Eigenpair> collocation_spectrum(const IntervalEigenProblem& p, int count) {
    const int m = order_of(p.family);
    const int N = p.n > 0 ? p.n : (p.l <= 8 ? 96 : 160);
    const auto base = collocate(p.l, m, N, true);
    Eigen::VectorXcd fine;
    if (p.two_grid) fine = collocate(p.l, m, 2 * N, false).values;
    const double a_norm = base.A.norm();

    std::vector<Eigenpair> out;
    for (Eigen::Index i = 0; i < base.values.size() && static_cast<int>(out.size()) < count; ++i) {
        Eigen::VectorXcd v = base.vectors.col(i);
        Eigen::Index k;
        v.cwiseAbs().maxCoeff(&k);
        v *= std::abs(v(k)) / v(k);
        Vec re = v.real();
        const Parity par = classify_parity(re);
        if (p.parity != Parity::full && par != p.parity) continue;

        Eigenpair e;
        e.lambda = base.values(i);
        e.parity = par;
        e.grid.resize(N + 1);
        e.grid << p.l, base.nodes, -p.l;
        e.grid.reverseInPlace();
        e.psi.resize(N + 1);
        e.psi << 0.0, re, 0.0;
        e.psi.reverseInPlace();
        normalise_max(e.psi);
        const Eigen::VectorXcd r = base.A.cast<std::complex<double>>() * v - e.lambda * v;
        e.residual = r.norm() / (v.norm() * a_norm);
        e.zero_count = count_zeros(e.psi, e.grid, p.l);
        if (p.two_grid) {
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < fine.size(); ++j) best = std::min(best, std::abs(fine(j) - e.lambda));
            if (best > 1e-6 * std::max(1.0, std::abs(e.lambda))) e.flagged = true;
        }
        if (e.residual > std::max(p.tol, 1e-12)) e.flagged = true;
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

std::string to_string(Parity p) {
    switch (p) {
        case Parity::even: return "even";
        case Parity::odd: return "odd";
        case Parity::full: return "full";
    }
    return "?";
}

double poincare_lambda(double l) {
    check_l(l);
    return unit_clamped_eigenvalue(2) / std::pow(l, 4);
}

double regularity_bound() { return std::pow(8.0 * unit_clamped_eigenvalue(2), 0.25); }

double shooting_determinant(double l, int m, Parity parity, double lambda, double tol) {
    check_l(l);
    if (m < 1) throw DomainError("order m must be at least 1");
    ShootingSystem sys{l, m, parity, lambda, tol};
    return normalised_det(sys.end_matrix());
}

std::vector<Eigenpair> interval_spectrum(const IntervalEigenProblem& p, int count) {
    check_l(p.l);
    if (count < 1) throw DomainError("count must be at least 1");
    if (p.method == SpectralMethod::shooting) return shooting_spectrum(p, count);
    return collocation_spectrum(p, count);
}

double top_eigenvalue(double l, int m, double tol) {
    IntervalEigenProblem p;
    p.l = l;
    p.family = EquationFamily::parabolic(m);
    p.tol = tol;
    p.n = 8;
    return shooting_spectrum(p, 1).front().lambda.real();
}

double top_eigenvalue_near(double l, double guess, double window, int m, double tol) {
    check_l(l);
    auto det = [&](double lam) { return shooting_determinant(l, m, Parity::even, lam, tol); };
    const double top = energy_top(l, m) + 0.01 * std::max(std::abs(energy_top(l, m)), 1.0);
    double w = std::max(window, 1e-6);
    for (int attempt = 0; attempt < 12; ++attempt) {
        const double hi = std::min(guess + w, top);
        const double lo = guess - w;
        double b_lo, b_hi;
        if (hi > lo && scan_bracket(det, lo, hi, 8, true, b_lo, b_hi))
            return find_root(det, b_lo, b_hi, tol * std::max(1.0, std::abs(b_lo))).x;
        w *= 2;
    }
    return top_eigenvalue(l, m, tol);
}

double branch_value(double l, double lambda_guess, int m) {
    return top_eigenvalue_near(l, lambda_guess, 0.02 * std::max(std::abs(lambda_guess), 0.05), m);
}

EigenBranch branch_trace(double l_min, double l_max, double step, int m) {
    if (!(l_min > 0) || !(l_max > l_min) || !(step > 0)) throw DomainError("branch_trace needs 0 < l_min < l_max, step > 0");
    EigenBranch br;
    const int n = static_cast<int>(std::ceil((l_max - l_min) / step - 1e-9));
    double trend = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double l = std::min(l_min + i * step, l_max);
        double lam;
        if (i == 0) {
            lam = top_eigenvalue(l, m);
        } else {
            const double prev = br.lambda0.back();
            const double guess = prev + trend;
            const double window = std::max({3 * std::abs(trend), 1e-3 * std::abs(prev), 1e-4});
            lam = top_eigenvalue_near(l, guess, window, m);
            const double jump = std::abs(lam - prev);
            if (i > 1 && jump > 10 * std::abs(trend) && jump > 1e-3) {
                IntervalEigenProblem p;
                p.l = l;
                p.family = EquationFamily::parabolic(m);
                p.method = SpectralMethod::collocation;
                p.two_grid = false;
                const double seed = collocation_spectrum(p, 1).front().lambda.real();
                lam = top_eigenvalue_near(l, seed, 1e-3 * std::max(std::abs(seed), 0.05), m);
                ++br.reseeds;
            }
        }
        if (!br.lambda0.empty()) trend = lam - br.lambda0.back();
        br.l.push_back(l);
        br.lambda0.push_back(lam);
    }
    for (std::size_t i = 0; i + 1 < br.l.size(); ++i) {
        const double a = br.lambda0[i], b = br.lambda0[i + 1];
        if ((a < 0) == (b < 0)) continue;
        const double la = br.l[i], lb = br.l[i + 1];
        auto f = [&](double l) {
            const double t = (l - la) / (lb - la);
            const double guess = a + t * (b - a);
            return top_eigenvalue_near(l, guess, std::max(std::abs(b - a), 1e-4), m);
        };
        br.roots.push_back(find_root(f, la, lb, 1e-7).x);
    }
    return br;
}

double BlEigenApprox::V(double z, int k) const {
    const double zeta = std::pow(l, 4.0 / 3.0) - z;
    if (k == 0) return c3 - std::exp(-b * zeta) * (c1 * std::cos(a * zeta) + c2 * std::sin(a * zeta));
    const std::complex<double> mu(-b, a);
    const std::complex<double> c(c1, -c2);
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    return -sign * (c * std::pow(mu, k) * std::exp(mu * zeta)).real();
}

BlEigenApprox bl_eigenvalue_approx(double l) {
    check_l(l);
    BlEigenApprox r;
    r.l = l;
    r.b = std::pow(2.0, -5.0 / 3.0);
    r.a = std::sqrt(3.0) * r.b;
    const double L = std::pow(l, 4.0 / 3.0);
    // Layer anchored at the wall z = L, decaying towards the centre.
    const double decay = std::exp(-r.b * L);
    const double den = 1.0 - decay * (std::cos(r.a * L) + std::sin(r.a * L) / std::sqrt(3.0));
    r.c1 = 1.0 / den;
    r.c2 = r.c1 / std::sqrt(3.0);
    r.c3 = r.c1;
    const Vec F = eval_kernel_derivatives(EquationFamily::biharmonic(), l, 1);
    r.lambda0 = -l * r.V(L, 3) * F(0) + std::pow(l, 2.0 / 3.0) * r.V(L, 2) * F(1);
    const auto kc = kernel_constants(EquationFamily::biharmonic());
    r.d_hat = kc.d0 + r.b;
    r.b_hat = (kc.b0 + r.a) / 2;
    return r;
}

}  // namespace reglab
