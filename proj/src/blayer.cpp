#include "reglab/blayer.hpp"

#include <algorithm>
#include <cmath>

#include "reglab/errors.hpp"
#include "reglab/ode.hpp"
#include "reglab/roots.hpp"

namespace reglab {

namespace {

using Vec = Eigen::VectorXd;
using cplx = std::complex<double>;

constexpr int wall_sample_count = 15;
constexpr double wall_sample_step = 1e-2;

/// Coefficient of e^(n) = kappa e in the once-integrated, linearised far-field equation.
double far_coefficient(const LayerFamily& f) {
    switch (f.kind) {
        case LayerKind::parabolic: return (f.m % 2 == 0 ? 1.0 : -1.0) / (2.0 * f.m);
        case LayerKind::dispersion3: return 1.0 / 3.0;
        case LayerKind::pme4: return 1.0 / 12.0;
    }
    return 0.0;
}

/// Roots of r^n = kappa.
std::vector<cplx> far_roots(const LayerFamily& f) {
    const int n = f.integrated_order();
    const double kappa = far_coefficient(f);
    const double mod = std::pow(std::abs(kappa), 1.0 / n);
    const double base = kappa > 0 ? 0.0 : M_PI;
    std::vector<cplx> roots;
    for (int k = 0; k < n; ++k) roots.push_back(std::polar(mod, (base + 2 * M_PI * k) / n));
    return roots;
}

struct ModalForm {
    std::vector<cplx> roots;
    std::vector<cplx> coef;
};

/// e = sum c_k e^(r_k xi) over the decaying roots, fitted to the wall conditions.
const ModalForm& modal_form(const LayerFamily& f) {
    static thread_local std::vector<std::pair<LayerFamily, ModalForm>> cache;
    for (const auto& [key, value] : cache)
        if (key == f) return value;
    ModalForm mf;
    for (const cplx& r : far_roots(f))
        if (r.real() < 0) mf.roots.push_back(r);
    const int nw = f.wall_conditions();
    if (static_cast<int>(mf.roots.size()) != nw) throw DomainError("layer family has no decaying modal solution");
    Eigen::MatrixXcd M(nw, nw);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nw);
    rhs(0) = -1.0;
    for (int j = 0; j < nw; ++j)
        for (int k = 0; k < nw; ++k) M(j, k) = std::pow(mf.roots[k], j);
    const Eigen::VectorXcd c = M.partialPivLu().solve(rhs);
    mf.coef.assign(c.data(), c.data() + nw);
    cache.emplace_back(f, mf);
    return cache.back().second;
}

/// Real rows w with w . s = 0 exactly for states in the decaying subspace, and the
/// projector onto that subspace along the growing modes.
struct FarField {
    Eigen::MatrixXd rows;
    Eigen::MatrixXd projector;
};

FarField far_field(const LayerFamily& f) {
    const int n = f.integrated_order();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
    A(n - 1, 0) += far_coefficient(f);
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    const Eigen::MatrixXcd V = es.eigenvectors();
    const Eigen::MatrixXcd W = V.inverse();
    FarField ff;
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(n, n);
    std::vector<Eigen::RowVectorXd> rows;
    for (int k = 0; k < n; ++k) {
        const cplx r = es.eigenvalues()(k);
        if (r.real() <= 0) continue;
        P -= V.col(k) * W.row(k);
        if (std::abs(r.imag()) < 1e-14) {
            rows.push_back(W.row(k).real());
        } else if (r.imag() > 0) {
            rows.push_back(W.row(k).real());
            rows.push_back(W.row(k).imag());
        }
    }
    ff.rows.resize(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t i = 0; i < rows.size(); ++i) ff.rows.row(static_cast<Eigen::Index>(i)) = rows[i];
    ff.projector = P.real();
    return ff;
}

void fill_gammas(BoundaryLayerProfile& p) {
    const int nw = p.family.wall_conditions();
    p.gamma1 = p.wall(nw);
    p.gamma2 = p.wall(nw + 1);
}

Vec uniform_grid(double L, int samples) {
    if (!(L > 0) || samples < 3) throw DomainError("layer grid needs L > 0 and at least 3 samples");
    return Vec::LinSpaced(samples, 0.0, L);
}

/// Fornberg weights for the k-th derivative at 0 from nodes 0, h, ..., (q-1) h.
Vec fd_weights(int q, int k, double h) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(q, k + 1);
    c(0, 0) = 1.0;
    double c1 = 1.0, c4 = 0.0;
    for (int i = 1; i < q; ++i) {
        const int mn = std::min(i, k);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = i * h;
        for (int j = 0; j < i; ++j) {
            const double c3 = (i - j) * h;
            c2 *= c3;
            if (j == i - 1) {
                for (int d = mn; d >= 1; --d) c(i, d) = c1 * (d * c(i - 1, d - 1) - c5 * c(i - 1, d)) / c2;
                c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
            }
            for (int d = mn; d >= 1; --d) c(j, d) = (c4 * c(j, d) - d * c(j, d - 1)) / c3;
            c(j, 0) = c4 * c(j, 0) / c3;
        }
        c1 = c2;
    }
    return c.col(k);
}

double hermite(const Vec& x, const Vec& y, const Vec& dy, double s) {
    if (s <= x(0)) return y(0) + dy(0) * (s - x(0));
    const Eigen::Index n = x.size();
    if (s >= x(n - 1)) return y(n - 1);
    const double h = x(1) - x(0);
    Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>((s - x(0)) / h), n - 2);
    const double t = (s - x(i)) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * y(i) + h10 * h * dy(i) + h01 * y(i + 1) + h11 * h * dy(i + 1);
}

OdeOptions<double> layer_options(double tol) {
    OdeOptions<double> opt;
    opt.rtol = tol;
    opt.atol = tol;
    opt.record_steps = false;
    return opt;
}

BoundaryLayerProfile linear_bvp(const LayerFamily& f, double L, double tol, int samples) {
    const int n = f.integrated_order();
    const int nw = f.wall_conditions();
    const double kappa = far_coefficient(f);
    auto rhs = [n, kappa](double, const Vec& s) {
        Vec d(n);
        for (int i = 0; i + 1 < n; ++i) d(i) = s(i + 1);
        d(n - 1) = kappa * s(0);
        return d;
    };
    const FarField ff = far_field(f);
    const int unknowns = n - nw;
    if (ff.rows.rows() != unknowns) throw NumericalError("growing modes do not match the free wall data");

    // Shooting: the far-field rows are affine in the free wall derivatives.
    const double L_match = std::min(L, 4.0);
    Vec base = Vec::Zero(n);
    base(0) = -1.0;
    auto end_state = [&](const Vec& s0) { return integrate_ode<double>(rhs, s0, 0.0, L_match, layer_options(tol)).back(); };
    const Vec r0 = ff.rows * end_state(base);
    Eigen::MatrixXd J(unknowns, unknowns);
    for (int j = 0; j < unknowns; ++j) {
        Vec e = Vec::Zero(n);
        e(nw + j) = 1.0;
        J.col(j) = ff.rows * end_state(e);
    }
    Vec s0 = base;
    if (unknowns > 0) s0.tail(unknowns) = J.fullPivLu().solve(-r0);

    BoundaryLayerProfile p;
    p.family = f;
    p.source = ProfileSource::bvp;
    p.truncation = L;
    p.xi = uniform_grid(L, samples);
    p.g.resize(samples);
    p.dg.resize(samples);
    Vec s = s0;
    double since_projection = 0.0;
    for (int i = 0; i < samples; ++i) {
        if (i > 0) {
            s = integrate_ode<double>(rhs, s, p.xi(i - 1), p.xi(i), layer_options(tol)).back();
            since_projection += p.xi(i) - p.xi(i - 1);
            if (since_projection >= 1.0) {
                s = ff.projector * s;
                since_projection = 0.0;
            }
        }
        p.g(i) = 1.0 + s(0);
        p.dg(i) = n > 1 ? s(1) : kappa * s(0);
    }
    const int nd = std::max(n + 1, nw + 2);
    p.wall = Vec::Zero(nd);
    for (int k = 0; k < nd; ++k) {
        if (k < n) p.wall(k) = s0(k);
        else p.wall(k) = kappa * p.wall(k - n);
    }
    p.wall(0) += 1.0;
    fill_gammas(p);
    p.far_field = p.g(samples - 1);
    p.wall_step = wall_sample_step;
    p.wall_samples.resize(wall_sample_count);
    OdeOptions<double> opt = layer_options(tol);
    for (int j = 1; j < wall_sample_count; ++j) opt.output_points.push_back(j * wall_sample_step);
    const auto tr = integrate_ode<double>(rhs, s0, 0.0, (wall_sample_count - 1) * wall_sample_step, opt);
    for (int j = 0; j < wall_sample_count; ++j) p.wall_samples(j) = 1.0 + tr.y[j](0);
    return p;
}

/// G''' = (cbrt(G) - 1)/4 with G = G' = 0 at the wall and G''(0) = c.
struct PmeLayer {
    static constexpr double start = 1e-4;

    static Vec rhs(double, const Vec& s) {
        Vec d(3);
        d << s(1), s(2), (std::cbrt(s(0)) - 1.0) / 4;
        return d;
    }

    /// Wall series G = c x^2/2 - x^3/24 + k x^(11/3) with k = (c/2)^(1/3) (27/440)/4.
    static Vec series(double c, double x) {
        const double k = std::cbrt(c / 2) * 27.0 / 1760.0;
        Vec s(3);
        s << c * x * x / 2 - x * x * x / 24 + k * std::pow(x, 11.0 / 3.0),
            c * x - x * x / 8 + k * (11.0 / 3.0) * std::pow(x, 8.0 / 3.0),
            c - x / 4 + k * (11.0 / 3.0) * (8.0 / 3.0) * std::pow(x, 5.0 / 3.0);
        return s;
    }

    /// Growing-mode content e'' + r e' + r^2 e of e = G - 1 at L, r = 12^(-1/3).
    static double mismatch(double c, double L, double tol) {
        OdeOptions<double> opt = layer_options(tol);
        opt.stop = [](double, const Vec& s) { return std::abs(s(0) - 1.0) > 1e3; };
        const auto tr = integrate_ode<double>(rhs, series(c, start), start, L, opt);
        const Vec& s = tr.back();
        const double r = std::pow(12.0, -1.0 / 3.0);
        return s(2) + r * s(1) + r * r * (s(0) - 1.0);
    }
};

/// Projector removing the growing mode of the far field linearised about G.
Eigen::Matrix3d pme_projector(double G) {
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    A(0, 1) = A(1, 2) = 1.0;
    A(2, 0) = 1.0 / (12.0 * std::cbrt(G * G));
    Eigen::EigenSolver<Eigen::Matrix3d> es(A);
    const Eigen::Matrix3cd V = es.eigenvectors();
    const Eigen::Matrix3cd W = V.inverse();
    Eigen::Matrix3cd P = Eigen::Matrix3cd::Identity();
    for (int k = 0; k < 3; ++k)
        if (es.eigenvalues()(k).real() > 0) P -= V.col(k) * W.row(k);
    return P.real();
}

BoundaryLayerProfile pme_bvp(double L, double tol, int samples) {
    const double t = std::max(tol, 1e-13);
    // Beyond this length the growing mode amplifies integration noise past the far-field target.
    const double L_match = std::min(L, 30.0);
    auto f = [&](double c) { return PmeLayer::mismatch(c, L_match, t); };
    double lo, hi;
    if (!scan_bracket(f, 0.02, 4.0, 80, false, lo, hi))
        throw NumericalError("pme4 layer: no wall curvature matches the far field");
    const double c = find_root(f, lo, hi, 1e-15).x;

    BoundaryLayerProfile p;
    p.family = LayerFamily::pme4();
    p.source = ProfileSource::bvp;
    p.truncation = L;
    p.xi = uniform_grid(L, samples);
    p.g.resize(samples);
    p.dg.resize(samples);
    p.g(0) = 0.0;
    p.dg(0) = 0.0;
    Vec s = PmeLayer::series(c, PmeLayer::start);
    double x = PmeLayer::start, since_projection = 0.0;
    for (int i = 1; i < samples; ++i) {
        s = integrate_ode<double>(PmeLayer::rhs, s, x, p.xi(i), layer_options(t)).back();
        since_projection += p.xi(i) - x;
        x = p.xi(i);
        Vec e = s;
        e(0) -= 1.0;
        // Once the state is close to G = 1 the dynamics are linear up to O(e^2).
        if (since_projection >= 1.0 && e.cwiseAbs().maxCoeff() < 1e-3) {
            e = pme_projector(s(0)) * e;
            s = e;
            s(0) += 1.0;
            since_projection = 0.0;
        }
        p.g(i) = s(0);
        p.dg(i) = s(1);
    }
    p.wall = Vec::Zero(4);
    p.wall << 0.0, 0.0, c, -0.25;
    fill_gammas(p);
    p.far_field = p.g(samples - 1);
    p.wall_step = wall_sample_step;
    p.wall_samples.resize(wall_sample_count);
    OdeOptions<double> wopt = layer_options(t);
    for (int j = 1; j < wall_sample_count; ++j) wopt.output_points.push_back(j * wall_sample_step);
    const auto wt = integrate_ode<double>(PmeLayer::rhs, PmeLayer::series(c, PmeLayer::start), PmeLayer::start,
                                          (wall_sample_count - 1) * wall_sample_step, wopt);
    p.wall_samples(0) = 0.0;
    for (int j = 1; j < wall_sample_count; ++j) p.wall_samples(j) = wt.y[j](0);
    return p;
}

}  // namespace

LayerFamily LayerFamily::parabolic(int m) {
    if (m < 1) throw DomainError("parabolic layer needs m >= 1");
    return {LayerKind::parabolic, m};
}

LayerFamily LayerFamily::from(const EquationFamily& f) {
    switch (f.tag) {
        case FamilyTag::parabolic: return parabolic(f.m);
        case FamilyTag::dispersion3: return dispersion3();
        case FamilyTag::beam4: break;
    }
    throw DomainError("the beam equation has no stationary wall layer");
}

int LayerFamily::integrated_order() const {
    switch (kind) {
        case LayerKind::parabolic: return 2 * m - 1;
        case LayerKind::dispersion3: return 2;
        case LayerKind::pme4: return 3;
    }
    return 0;
}

int LayerFamily::wall_conditions() const {
    switch (kind) {
        case LayerKind::parabolic: return m;
        case LayerKind::dispersion3: return 1;
        case LayerKind::pme4: return 2;
    }
    return 0;
}

std::string LayerFamily::name() const {
    switch (kind) {
        case LayerKind::parabolic: return m == 1 ? "heat" : m == 2 ? "biharmonic" : "parabolic-m" + std::to_string(m);
        case LayerKind::dispersion3: return "dispersion3";
        case LayerKind::pme4: return "pme4";
    }
    return "?";
}

double BoundaryLayerProfile::operator()(double s) const {
    if (source == ProfileSource::closed_form && family.kind != LayerKind::pme4) return closed_form_value(family, s);
    return hermite(xi, g, dg, s);
}

int BoundaryLayerProfile::overshoots(double threshold) const {
    int count = 0;
    for (Eigen::Index i = 1; i + 1 < g.size(); ++i)
        if (g(i) >= g(i - 1) && g(i) > g(i + 1) && g(i) - 1.0 > threshold) ++count;
    return count;
}

int BoundaryLayerProfile::far_field_crossings(double threshold) const {
    int count = 0, last = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double e = g(i) - 1.0;
        if (std::abs(e) <= threshold) continue;
        const int s = e > 0 ? 1 : -1;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

std::vector<cplx> characteristic_roots(const LayerFamily& f) {
    std::vector<cplx> roots = far_roots(f);
    if (f.kind != LayerKind::pme4) roots.insert(roots.begin(), cplx(0.0, 0.0));
    std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return roots;
}

double closed_form_value(const LayerFamily& f, double s, int k) {
    if (f.kind == LayerKind::pme4) throw DomainError("the pme4 layer has no closed form");
    if (k < 0) throw DomainError("derivative order must be non-negative");
    const ModalForm& mf = modal_form(f);
    cplx sum = 0.0;
    for (std::size_t i = 0; i < mf.roots.size(); ++i) sum += mf.coef[i] * std::pow(mf.roots[i], k) * std::exp(mf.roots[i] * s);
    return (k == 0 ? 1.0 : 0.0) + sum.real();
}

BoundaryLayerProfile closed_form_profile(const LayerFamily& f, double L, int samples) {
    BoundaryLayerProfile p;
    p.family = f;
    p.source = ProfileSource::closed_form;
    p.truncation = L;
    p.xi = uniform_grid(L, samples);
    p.g.resize(samples);
    p.dg.resize(samples);
    for (int i = 0; i < samples; ++i) {
        p.g(i) = closed_form_value(f, p.xi(i));
        p.dg(i) = closed_form_value(f, p.xi(i), 1);
    }
    const int nd = std::max(f.integrated_order() + 1, f.wall_conditions() + 2);
    p.wall.resize(nd);
    for (int k = 0; k < nd; ++k) p.wall(k) = closed_form_value(f, 0.0, k);
    fill_gammas(p);
    p.far_field = 1.0;
    p.wall_step = wall_sample_step;
    p.wall_samples.resize(wall_sample_count);
    for (int j = 0; j < wall_sample_count; ++j) p.wall_samples(j) = closed_form_value(f, j * wall_sample_step);
    return p;
}

BoundaryLayerProfile biharmonic_profile(double L, int samples) {
    BoundaryLayerProfile p = closed_form_profile(LayerFamily::biharmonic(), L, samples);
    const double beta = std::pow(2.0, -5.0 / 3.0);
    const double w = std::sqrt(3.0) * beta;
    for (int i = 0; i < samples; ++i) {
        const double x = p.xi(i);
        p.g(i) = 1.0 - std::exp(-beta * x) * (std::cos(w * x) + std::sin(w * x) / std::sqrt(3.0));
    }
    return p;
}

BoundaryLayerProfile heat_profile(double L, int samples) {
    BoundaryLayerProfile p = closed_form_profile(LayerFamily::heat(), L, samples);
    for (int i = 0; i < samples; ++i) p.g(i) = 1.0 - std::exp(-p.xi(i) / 2);
    return p;
}

BoundaryLayerProfile dispersion_profile(double L, int samples) {
    BoundaryLayerProfile p = closed_form_profile(LayerFamily::dispersion3(), L, samples);
    for (int i = 0; i < samples; ++i) p.g(i) = 1.0 - std::exp(-p.xi(i) / std::sqrt(3.0));
    return p;
}

BoundaryLayerProfile solve_bl_bvp(const LayerFamily& f, double L, double tol, int samples) {
    if (!(L > 0)) throw DomainError("truncation length must be positive");
    if (f.kind == LayerKind::pme4) return pme_bvp(L, tol, samples);
    return linear_bvp(f, L, tol, samples);
}

double richardson_wall_derivative(const Vec& samples, double h, int k) {
    const int q = k + 3;
    if (samples.size() < 2 * (q - 1) + 1) throw DomainError("not enough wall samples for this derivative order");
    const Vec w1 = fd_weights(q, k, h);
    const Vec w2 = fd_weights(q, k, 2 * h);
    double d1 = 0.0, d2 = 0.0;
    for (int j = 0; j < q; ++j) {
        d1 += w1(j) * samples(j);
        d2 += w2(j) * samples(2 * j);
    }
    const double gain = std::pow(2.0, q - k);
    return (gain * d1 - d2) / (gain - 1.0);
}

WallConstants wall_constants(const BoundaryLayerProfile& p) {
    if (p.source == ProfileSource::closed_form) return {p.gamma1, p.gamma2};
    const int nw = p.family.wall_conditions();
    return {richardson_wall_derivative(p.wall_samples, p.wall_step, nw),
            richardson_wall_derivative(p.wall_samples, p.wall_step, nw + 1)};
}

}  // namespace reglab
