#include "reglab/pdesim.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "reglab/blayer.hpp"

namespace reglab {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

int order(SimFamily f) { return f == SimFamily::heat ? 1 : 2; }

/// F on a uniform grid in |y| with cubic Hermite interpolation, shared per family.
class KernelTable {
public:
    explicit KernelTable(SimFamily f) : family_(equation_family(f)) {}

    double operator()(double y) {
        y = std::abs(y);
        ensure(y);
        const std::size_t i = std::min(static_cast<std::size_t>(y / kStep), f_.size() - 2);
        const double t = (y - i * kStep) / kStep;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * f_[i] + (t3 - 2 * t2 + t) * kStep * df_[i] + (-2 * t3 + 3 * t2) * f_[i + 1] +
               (t3 - t2) * kStep * df_[i + 1];
    }

private:
    static constexpr double kStep = 0.01;

    void ensure(double y) {
        while ((f_.size() < 2) || (f_.size() - 1) * kStep < y + kStep) {
            const double yj = f_.size() * kStep;
            const Eigen::VectorXd d = eval_kernel_derivatives(family_, yj, 1);
            f_.push_back(d[0]);
            df_.push_back(d[1]);
        }
    }

    EquationFamily family_;
    std::vector<double> f_, df_;
};

double kernel_value(SimFamily family, double y) {
    static std::mutex mu;
    static std::map<SimFamily, KernelTable> tables;
    std::lock_guard lock(mu);
    auto it = tables.find(family);
    if (it == tables.end()) it = tables.emplace(family, KernelTable(family)).first;
    return it->second(y);
}

struct PhiEval {
    SimBoundary phi;

    double operator()(double tau) const {
        return std::visit([tau](const auto& p) { return p(tau); }, phi);
    }
    bool constant() const {
        const auto* b = std::get_if<BoundaryFunction>(&phi);
        return b && b->is_constant();
    }
    /// phi'(tau) / phi(tau)
    double log_rate(double tau) const {
        if (constant()) return 0.0;
        const double h = 1e-6 * std::max(1.0, tau);
        return (std::log((*this)(tau + h)) - std::log((*this)(tau - h))) / (2 * h);
    }
};

double simpson(const Eigen::VectorXd& f, double h) {
    const Eigen::Index n = f.size() - 1;
    double s = f[0] + f[n];
    for (Eigen::Index i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
    return s * h / 3;
}

/// Spatial operator on the interior nodes 1..n-1 at a given phi and drift coefficient.
Eigen::SparseMatrix<double> spatial_operator(SimFamily family, int n, double phi, double drift) {
    const int N = n - 1;
    const double h = 2.0 / n;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(5 * N);
    auto add = [&](int row, int col, double v) {
        if (col >= 0 && col < N) t.emplace_back(row, col, v);
    };
    for (int r = 0; r < N; ++r) {
        const double z = -1 + (r + 1) * h;
        if (family == SimFamily::biharmonic) {
            const double k = -std::pow(phi, -4) / std::pow(h, 4);
            // ghost values mirror the interior so that w_z = 0 at the walls
            const double centre = (r == 0 || r == N - 1) ? 7.0 : 6.0;
            add(r, r - 2, k);
            add(r, r - 1, -4 * k);
            add(r, r, centre * k);
            add(r, r + 1, -4 * k);
            add(r, r + 2, k);
        } else {
            const double k = std::pow(phi, -2) / (h * h);
            add(r, r - 1, k);
            add(r, r, -2 * k);
            add(r, r + 1, k);
        }
        const double a = drift * z / (2 * h);
        add(r, r + 1, a);
        add(r, r - 1, -a);
    }
    Eigen::SparseMatrix<double> L(N, N);
    L.setFromTriplets(t.begin(), t.end());
    return L;
}

Eigen::VectorXd full_profile(const Eigen::VectorXd& interior) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(interior.size() + 2);
    w.segment(1, interior.size()) = interior;
    return w;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::string to_string(SimFamily f) { return f == SimFamily::heat ? "heat" : "biharmonic"; }

EquationFamily equation_family(SimFamily f) {
    return f == SimFamily::heat ? EquationFamily::heat() : EquationFamily::biharmonic();
}

Eigen::VectorXd InitialData::sample(SimFamily family, const Eigen::VectorXd& z) const {
    Eigen::VectorXd w(z.size());
    std::vector<double> a, b;
    if (kind == InitialKind::random_smooth) {
        if (modes < 1) throw DomainError("random-smooth data needs at least one mode");
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> normal;
        for (int k = 0; k < modes; ++k) {
            a.push_back(normal(gen));
            b.push_back(normal(gen));
        }
    }
    if (kind == InitialKind::bump && !(width > 0)) throw DomainError("bump width must be positive");
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        double base = 1.0;
        if (kind == InitialKind::bump) {
            base = std::exp(-std::pow((z[i] - center) / width, 2));
        } else if (kind == InitialKind::random_smooth) {
            base = 0.0;
            for (int k = 0; k < modes; ++k) {
                const double arg = k * std::numbers::pi * z[i] / 2;
                base += (a[k] * std::cos(arg) + b[k] * std::sin(arg)) / ((1.0 + k) * (1.0 + k));
            }
        }
        w[i] = base * std::pow(1 - z[i] * z[i], order(family));
    }
    const double m = w.cwiseAbs().maxCoeff();
    if (!(m > 0)) throw DomainError("initial data vanishes identically");
    return w / m;
}

std::string InitialData::describe() const {
    std::ostringstream os;
    switch (kind) {
        case InitialKind::polynomial: os << "polynomial"; break;
        case InitialKind::bump: os << "bump(center=" << center << ", width=" << width << ")"; break;
        case InitialKind::random_smooth: os << "random_smooth(seed=" << seed << ", modes=" << modes << ")"; break;
    }
    return os.str();
}

double first_coefficient(SimFamily family, double phi, const Eigen::VectorXd& z, const Eigen::VectorXd& w) {
    Eigen::VectorXd f(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) f[i] = w[i] * kernel_value(family, phi * z[i]);
    return phi * simpson(f, z[1] - z[0]);
}

SimResult simulate(const SimConfig& cfg) {
    if (cfg.n < 64 || cfg.n % 2) throw DomainError("grid size must be even and at least 64");
    if (!(cfg.tau_end > cfg.tau0)) throw DomainError("tau_end must exceed tau0");
    if (!(cfg.rtol > 0) || !(cfg.dt_init > 0) || !(cfg.dt_max >= cfg.dt_init) || !(cfg.dt_min > 0))
        throw DomainError("invalid time-step policy");
    if (cfg.samples < 2) throw DomainError("at least two trace samples are needed");
    const PhiEval phi{cfg.phi};
    if (!phi.constant() && cfg.tau0 < std::numbers::e)
        throw DomainError("non-constant boundaries start at tau0 >= e");
    for (double s : cfg.snapshot_taus)
        if (s < cfg.tau0 || s > cfg.tau_end) throw DomainError("snapshot outside the simulated span");

    const int n = cfg.n;
    const double h = 2.0 / n;
    Eigen::VectorXd z(n + 1);
    for (int i = 0; i <= n; ++i) z[i] = -1 + i * h;
    const Eigen::VectorXd w0 = cfg.initial.sample(cfg.family, z);
    Eigen::VectorXd w = w0.segment(1, n - 1);
    Eigen::VectorXd w_prev;
    const double drift0 = cfg.family == SimFamily::heat ? -0.5 : -0.25;

    // stop points: trace samples (geometric in tau - tau0) and snapshots
    const double span = cfg.tau_end - cfg.tau0;
    const double kappa = std::log(1000.0);
    std::vector<double> stops;
    for (int k = 0; k < cfg.samples; ++k)
        stops.push_back(cfg.tau0 + span * std::expm1(kappa * k / (cfg.samples - 1)) / std::expm1(kappa));
    stops.back() = cfg.tau_end;
    for (double s : cfg.snapshot_taus) stops.push_back(s);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }),
                stops.end());

    SimResult r;
    r.family = cfg.family;
    auto record = [&](double tau) {
        const double p = phi(tau);
        const Eigen::VectorXd full = full_profile(w);
        r.tau.push_back(tau);
        r.phi.push_back(p);
        r.sup_norm.push_back(full.cwiseAbs().maxCoeff());
        r.a0.push_back(cfg.track_a0 ? first_coefficient(cfg.family, p, z, full) : nan);
        for (double s : cfg.snapshot_taus)
            if (std::abs(s - tau) <= 1e-12 * std::max(1.0, std::abs(s)))
                r.snapshots.push_back({tau, p, z, full, r.a0.back()});
    };
    auto is_sample = [&](double tau) {
        return std::any_of(stops.begin(), stops.end(), [tau](double s) { return s == tau; });
    };

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_be, lu_bdf;
    bool analysed = false;
    double tau = cfg.tau0;
    record(tau);
    std::size_t next = 1;
    double dt = cfg.dt_init;
    double dt_prev = 0.0;
    const Eigen::SparseMatrix<double> I = [&] {
        Eigen::SparseMatrix<double> e(n - 1, n - 1);
        e.setIdentity();
        return e;
    }();

    while (next < stops.size()) {
        const double target = stops[next];
        double step = std::min(dt, target - tau);
        const bool clipped = step < dt;
        const double t1 = tau + step;
        const double p1 = phi(t1);
        const Eigen::SparseMatrix<double> L = spatial_operator(cfg.family, n, p1, drift0 + phi.log_rate(t1));
        const Eigen::SparseMatrix<double> A_be = I - step * L;
        if (!analysed) {
            lu_be.analyzePattern(A_be);
            lu_bdf.analyzePattern(A_be);
            analysed = true;
        }
        lu_be.factorize(A_be);
        const Eigen::VectorXd x_be = lu_be.solve(w);
        Eigen::VectorXd accepted = x_be;
        double err = 0.0;
        if (dt_prev > 0) {
            const double om = step / dt_prev;
            lu_bdf.factorize((1 + 2 * om) / (1 + om) * I - step * L);
            const Eigen::VectorXd x_bdf = lu_bdf.solve((1 + om) * w - om * om / (1 + om) * w_prev);
            const double scale = std::max(x_bdf.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
            err = (x_bdf - x_be).cwiseAbs().maxCoeff() / scale;
            // heat: fall back to backward Euler (an M-matrix solve) when BDF2 would break positivity
            const bool keep_sign = cfg.family == SimFamily::heat && w.minCoeff() >= 0 && x_bdf.minCoeff() < 0;
            if (keep_sign) ++r.positivity_fallbacks;
            else accepted = x_bdf;
        }
        if (!accepted.allFinite()) {
            std::ostringstream os;
            os << "non-finite state at tau = " << t1 << " (dt = " << step << ", phi = " << p1 << ")";
            throw SimulationError(os.str(), tau);
        }
        const double factor = err > 0 ? 0.9 * std::sqrt(cfg.rtol / err) : 2.0;
        if (err > cfg.rtol) {
            ++r.rejected;
            dt = step * std::max(0.2, factor);
            if (dt < cfg.dt_min) {
                std::ostringstream os;
                os << "time step underflow at tau = " << tau << " (dt = " << dt << ")";
                throw SimulationError(os.str(), tau);
            }
            continue;
        }
        ++r.steps;
        w_prev = w;
        w = accepted;
        tau = t1;
        dt_prev = step;
        // keep the BDF2 step ratio below 2 for zero-stability
        const double grow = std::clamp(factor, 0.2, 2.0);
        dt = std::min({cfg.dt_max, (clipped ? std::max(dt, step) : step) * grow, 2 * step});
        if (clipped || tau == target) {
            tau = target;
            if (is_sample(tau)) record(tau);
            ++next;
        }
    }

    r.final_state = {tau, phi(tau), z, full_profile(w), r.a0.back()};
    r.sigma_fit = fit_rate(r, cfg.tau0 + span / 8, cfg.tau_end);
    return r;
}

double fit_rate(const SimResult& r, double tau_a, double tau_b, TraceKind trace) {
    if (r.tau.empty()) throw DomainError("empty simulation result");
    const double eps = 1e-9 * std::max(1.0, std::abs(r.tau.back()));
    if (!(tau_b > tau_a) || tau_a < r.tau.front() - eps || tau_b > r.tau.back() + eps)
        throw DomainError("fit window outside the simulated span");
    const std::vector<double>& v = trace == TraceKind::sup_norm ? r.sup_norm : r.a0;
    std::vector<double> x, y;
    std::vector<std::size_t> idx;
    bool sign_change = false;
    for (std::size_t i = 0; i < r.tau.size(); ++i) {
        if (r.tau[i] < tau_a - eps || r.tau[i] > tau_b + eps) continue;
        if (!std::isfinite(v[i])) throw DomainError("trace not available on the fit window");
        if (!idx.empty() && v[i] * v[idx.back()] <= 0) sign_change = true;
        idx.push_back(i);
    }
    if (idx.size() < 3) throw DomainError("fewer than three samples in the fit window");
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const double a = std::abs(v[idx[j]]);
        if (sign_change) {
            // envelope: interior local maxima of |trace|
            if (j == 0 || j + 1 == idx.size()) continue;
            if (!(a >= std::abs(v[idx[j - 1]]) && a >= std::abs(v[idx[j + 1]]))) continue;
        }
        if (!(a > 0)) continue;
        x.push_back(r.tau[idx[j]]);
        y.push_back(std::log(a));
    }
    if (x.size() < 2) throw DomainError("not enough envelope maxima in the fit window");
    return least_squares_slope(x, y);
}

BlSnapshotReport bl_snapshot_check(const SimResult& r, double tau_star, double xi_max) {
    const ProfileSnapshot* s = nullptr;
    for (const auto& snap : r.snapshots)
        if (std::abs(snap.tau - tau_star) <= 1e-9 * std::max(1.0, std::abs(tau_star))) s = &snap;
    if (!s && std::abs(r.final_state.tau - tau_star) <= 1e-9 * std::max(1.0, std::abs(tau_star))) s = &r.final_state;
    if (!s) throw DomainError("no profile snapshot at the requested tau");
    if (!std::isfinite(s->a0) || s->a0 == 0) throw DomainError("snapshot has no first coefficient");
    const int m = order(r.family);
    const LayerFamily layer = LayerFamily::parabolic(m);
    const double stretch = std::pow(s->phi, 2.0 * m / (2.0 * m - 1));
    BlSnapshotReport rep;
    rep.tau = s->tau;
    rep.dominance = std::abs(s->a0) / s->w.cwiseAbs().maxCoeff();
    rep.inconclusive = rep.dominance < 0.9;
    for (Eigen::Index i = s->z.size() - 1; i >= 0; --i) {
        const double xi = stretch * (1 - s->z[i]);
        if (xi > xi_max) break;
        rep.deviation = std::max(rep.deviation, std::abs(s->w[i] - s->a0 * closed_form_value(layer, xi)) / std::abs(s->a0));
        ++rep.points;
    }
    return rep;
}

ExpansionReport expansion_check(SimFamily family, const ProfileSnapshot& s, int k_max, double z_max) {
    if (k_max < 0) throw DomainError("k_max must be nonnegative");
    const int m = order(family);
    const EquationFamily fam = equation_family(family);
    const Eigen::Index N = s.z.size();
    Eigen::MatrixXd d(N, k_max + 1);
    for (Eigen::Index i = 0; i < N; ++i) d.row(i) = eval_kernel_derivatives(fam, s.phi * s.z[i], k_max).transpose();
    ExpansionReport rep;
    std::vector<HermitePair> pairs;
    for (int k = 0; k <= k_max; ++k) {
        pairs.push_back(hermite_pair(m, k));
        const double sgn = k % 2 ? -1.0 : 1.0;
        const Eigen::VectorXd f = (s.w.array() * d.col(k).array()).matrix() * (sgn * pairs.back().norm);
        rep.coefficients.push_back(s.phi * simpson(f, s.z[1] - s.z[0]));
    }
    double vmax = 0, err = 0;
    for (Eigen::Index i = 0; i < N; ++i) {
        if (std::abs(s.z[i]) > z_max) continue;
        double sum = 0;
        for (int k = 0; k <= k_max; ++k) sum += rep.coefficients[k] * pairs[k].psi_star(s.phi * s.z[i]);
        vmax = std::max(vmax, std::abs(s.w[i]));
        err = std::max(err, std::abs(s.w[i] - sum));
    }
    rep.deviation = err / vmax;
    return rep;
}

P2Report verify_P2(const std::vector<unsigned>& seeds, int n) {
    P2Report rep;
    rep.pass = true;
    for (double l : {4.0, 5.0}) {
        for (unsigned seed : seeds) {
            SimConfig cfg;
            cfg.phi = BoundaryFunction::constant(l);
            cfg.n = n;
            cfg.tau_end = 400;
            cfg.initial = InitialData::random_smooth(seed);
            cfg.track_a0 = false;
            SimResult r = simulate(cfg);
            const double sigma = fit_rate(r, 50, 400);
            const bool ok = l == 4.0 ? sigma < 0 : sigma > 0;
            rep.runs.push_back({l, seed, sigma, ok});
            if (!ok) {
                rep.pass = false;
                rep.failures.push_back(std::move(r));
            }
        }
    }
    return rep;
}

}  // namespace reglab
