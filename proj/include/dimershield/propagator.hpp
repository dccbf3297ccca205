#pragma once

// Log-derivative propagation of the coupled radial equations, absorbing
// short-range boundary, asymptotic matching and scattering observables.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dimershield/coupling.hpp"
#include "dimershield/error.hpp"
#include "dimershield/units.hpp"

namespace dimershield {

using cplx = std::complex<double>;

struct PropagatorOptions {
    double R_min = 50.0;
    double R_mid = 600.0;
    double R_max = 3.0e4;
    double inner_step = 0.5;     // bohr, fixed sector width below R_mid
    double outer_ratio = 0.001;  // sector width / R above R_mid
    bool absorbing = true;
    double threshold_eps = 1e-12;      // local wavenumber floor at R_min (1/bohr)
    double offdiag_fraction = 0.5;     // asymptotic coupling check at R_max, relative to E_coll
    bool born_tail = true;             // first-order R^-3 correction beyond R_max
};

// Sector boundaries from R_min to R_max.
inline std::vector<double> sector_grid(const PropagatorOptions& opt) {
    if (!(opt.R_min > 0 && opt.R_min < opt.R_mid && opt.R_mid < opt.R_max))
        throw ConfigError("radial limits must satisfy 0 < R_min < R_mid < R_max");
    if (!(opt.inner_step > 0 && opt.outer_ratio > 0)) throw ConfigError("step sizes must be positive");
    std::vector<double> g;
    const int n_in = std::max(1, static_cast<int>(std::ceil((opt.R_mid - opt.R_min) / opt.inner_step)));
    for (int i = 0; i <= n_in; ++i) g.push_back(opt.R_min + (opt.R_mid - opt.R_min) * i / n_in);
    const int n_out = std::max(1, static_cast<int>(std::ceil(std::log(opt.R_max / opt.R_mid) /
                                                            std::log1p(opt.outer_ratio))));
    const double f = std::pow(opt.R_max / opt.R_mid, 1.0 / n_out);
    double R = opt.R_mid;
    for (int i = 1; i < n_out; ++i) g.push_back(R *= f);
    g.push_back(opt.R_max);
    return g;
}

// U(R) = 2 mu (V(R) - E), written into the matrix argument.
using CouplingFn = std::function<void(double, Eigen::MatrixXd&)>;

inline CouplingFn coupling_from_w(const WMatrices& W, double mu, double E) {
    return [&W, mu, E](double R, Eigen::MatrixXd& U) {
        U = W.at(R);
        U.diagonal().array() -= E;
        U *= 2.0 * mu;
    };
}

// Boundary log-derivative at R_min: incoming waves in locally open channels,
// decaying solutions in closed ones. Reflecting variant uses a hard wall.
inline Eigen::MatrixXcd absorbing_init(const Eigen::MatrixXd& U, double eps = 1e-12,
                                       Diagnostics* diag = nullptr) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(U);
    const int n = static_cast<int>(U.rows());
    Eigen::VectorXcd y(n);
    for (int k = 0; k < n; ++k) {
        double lam = es.eigenvalues()(k);
        if (std::abs(lam) < eps * eps) {
            if (diag) diag->warn("channel at threshold at R_min; wavenumber perturbed");
            lam = -eps * eps;
        }
        y(k) = lam < 0 ? cplx(0.0, -std::sqrt(-lam)) : cplx(std::sqrt(lam), 0.0);
    }
    const Eigen::MatrixXcd V = es.eigenvectors().cast<cplx>();
    return V * y.asDiagonal() * V.transpose();
}

inline Eigen::MatrixXcd reflecting_init(int n, double value = 1e20) {
    return Eigen::MatrixXcd::Identity(n, n) * value;
}

namespace detail {

// Reference half-sector propagators for a constant diagonal potential p.
inline void reference_y(double p, double h, double& y1, double& y2) {
    if (std::abs(p) * h * h < 1e-8) {
        y1 = 1.0 / h + p * h / 3.0;
        y2 = 1.0 / h - p * h / 6.0;
    } else if (p < 0) {
        const double k = std::sqrt(-p);
        y1 = k / std::tan(k * h);
        y2 = k / std::sin(k * h);
    } else {
        const double k = std::sqrt(p);
        const double x = k * h;
        y1 = k / std::tanh(x);
        y2 = x > 300.0 ? 0.0 : k / std::sinh(x);
    }
}

inline void half_sector(Eigen::MatrixXcd& Y, const Eigen::VectorXd& y1, const Eigen::VectorXd& y2) {
    Eigen::MatrixXcd Z = Y;
    Z.diagonal() += y1.cast<cplx>();
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(Y.rows(), Y.cols());
    rhs.diagonal() = y2.cast<cplx>();
    Eigen::MatrixXcd X = Z.partialPivLu().solve(rhs);
    Y = -(y2.cast<cplx>().asDiagonal() * X);
    Y.diagonal() += y1.cast<cplx>();
}

}  // namespace detail

// Propagates Y from grid.front() to grid.back() using sectors with a
// diagonal constant reference potential and Simpson-weighted residual
// corrections.
inline Eigen::MatrixXcd propagate(const CouplingFn& U, Eigen::MatrixXcd Y, const std::vector<double>& grid) {
    if (grid.size() < 2) throw ConfigError("sector grid needs at least two points");
    const int n = static_cast<int>(Y.rows());
    Eigen::MatrixXd Ua(n, n), Uc(n, n), Ub(n, n);
    U(grid.front(), Ua);
    Eigen::VectorXd y1(n), y2(n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t s = 0; s + 1 < grid.size(); ++s) {
        const double a = grid[s], b = grid[s + 1];
        const double h = 0.5 * (b - a);
        U(a + h, Uc);
        U(b, Ub);
        const Eigen::VectorXd P = Uc.diagonal();
        for (int k = 0; k < n; ++k) detail::reference_y(P(k), h, y1(k), y2(k));

        Eigen::MatrixXd dA = Ua;
        dA.diagonal() -= P;
        Y += (h / 3.0) * dA.cast<cplx>();
        detail::half_sector(Y, y1, y2);

        Eigen::MatrixXd dC = Uc;
        dC.diagonal() -= P;
        const Eigen::MatrixXd Q = (I - (h * h / 6.0) * dC).partialPivLu().solve(dC);
        Y += (4.0 * h / 3.0) * Q.cast<cplx>();
        detail::half_sector(Y, y1, y2);

        Eigen::MatrixXd dB = Ub;
        dB.diagonal() -= P;
        Y += (h / 3.0) * dB.cast<cplx>();
        std::swap(Ua, Ub);
    }
    return Y;
}

// Convenience overload on W matrices with total energy E.
inline Eigen::MatrixXcd propagate(const WMatrices& W, double E, double mu, const PropagatorOptions& opt,
                                  Diagnostics* diag = nullptr) {
    W.check_dimensions();
    const auto U = coupling_from_w(W, mu, E);
    Eigen::MatrixXd U0;
    U(opt.R_min, U0);
    Eigen::MatrixXcd Y0 = opt.absorbing ? absorbing_init(U0, opt.threshold_eps, diag)
                                        : reflecting_init(W.size());
    return propagate(U, std::move(Y0), sector_grid(opt));
}

// Riccati-Bessel x j_L(x), x y_L(x) and their derivatives.
struct RiccatiValues {
    double j, jp, n, np;
};

inline RiccatiValues riccati(int L, double x) {
    auto jh = [x](int l) { return l < 0 ? std::cos(x) : x * std::sph_bessel(l, x); };
    auto nh = [x](int l) { return l < 0 ? std::sin(x) : x * std::sph_neumann(l, x); };
    RiccatiValues r;
    r.j = jh(L);
    r.n = nh(L);
    r.jp = jh(L - 1) - L / x * r.j;
    r.np = nh(L - 1) - L / x * r.n;
    return r;
}

// d/dx ln(x k_L(x)) for the exponentially decaying Riccati function.
inline double decaying_log_derivative(int L, double x) {
    double s = 0.0, ds = 0.0, term = 1.0;
    for (int j = 0; j <= L; ++j) {
        if (j > 0) term *= static_cast<double>((L + j) * (L - j + 1)) / (2.0 * j);
        const double xp = std::pow(x, -j);
        s += term * xp;
        ds -= j * term * xp / x;
    }
    return -1.0 + ds / s;
}

// Integral of xj_a(x) xj_b(x) / x^3 from x0 to infinity, for |a - b| in {0, 2}.
inline double dipolar_tail_integral(int a, int b, double x0) {
    if (a > b) std::swap(a, b);
    double total;
    if (b == a) {
        if (a == 0) return 0.0;
        total = 1.0 / (2.0 * a * (a + 1.0));
    } else if (b == a + 2) {
        total = 1.0 / (6.0 * (a + 1.0) * (a + 2.0));
    } else {
        return 0.0;
    }
    if (x0 <= 0) return total;
    auto f = [a, b](double x) {
        if (x == 0.0) return 0.0;
        return std::sph_bessel(a, x) * std::sph_bessel(b, x) / x;
    };
    const double inner = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, x0, 20, 1e-13);
    return total - inner;
}

// Asymptotic channel set used for matching. Each incoming pair state (one
// per partial wave) is placed first within its threshold cluster.
struct ChannelSet {
    AsymptoticChannels asym;
    std::vector<int> incoming;  // columns of asym.T, lowest partial wave first
    double E_incoming = 0.0;    // threshold of the incoming channels
    bool identical = false;     // identical internal states in the incoming channels
};

inline double degeneracy_tolerance(const Eigen::VectorXd& e) {
    const double scale = e.size() ? e.cwiseAbs().maxCoeff() : 0.0;
    return 1e-12 * std::max(scale, 1e-300);
}

// Projects each incoming pair state onto its degenerate asymptotic channel
// cluster and orthonormalizes the remainder of the cluster.
inline ChannelSet prepare_channels(const WMatrices& W, const std::vector<PairFunction>& basis,
                                   const std::vector<Eigen::VectorXd>& incoming_states, bool identical) {
    if (incoming_states.empty()) throw ConfigError("no incoming pair state");
    ChannelSet cs;
    cs.asym = asymptotic_channels(W, basis);
    cs.identical = identical;
    const int n = W.size();
    const double tol = degeneracy_tolerance(cs.asym.energy);
    for (std::size_t s = 0; s < incoming_states.size(); ++s) {
        const auto& state = incoming_states[s];
        if (state.size() != n) throw DimensionError("incoming state has wrong length");
        const Eigen::VectorXd ov = cs.asym.T.transpose() * state;
        Eigen::Index best;
        ov.cwiseAbs().maxCoeff(&best);
        const double e0 = cs.asym.energy(best);
        std::vector<int> cluster;
        for (int k = 0; k < n; ++k)
            if (std::abs(cs.asym.energy(k) - e0) <= tol && cs.asym.L[k] == cs.asym.L[best] &&
                cs.asym.M_L[k] == cs.asym.M_L[best])
                cluster.push_back(k);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (int k : cluster) v += ov(k) * cs.asym.T.col(k);
        const double nv = v.norm();
        if (nv < 1e-6) throw ConfigError("incoming state has no overlap with the asymptotic channels");
        v /= nv;
        std::vector<Eigen::VectorXd> cols{v};
        for (int k : cluster) {
            Eigen::VectorXd c = cs.asym.T.col(k);
            for (const auto& u : cols) c -= u.dot(c) * u;
            if (c.norm() > 1e-8 && cols.size() < cluster.size()) cols.push_back(c / c.norm());
        }
        for (std::size_t t = 0; t < cluster.size(); ++t) cs.asym.T.col(cluster[t]) = cols[t];
        if (std::find(cs.incoming.begin(), cs.incoming.end(), cluster.front()) != cs.incoming.end())
            throw ConfigError("two incoming states share one channel cluster");
        const double e = v.dot(W.W0 * v);
        if (s == 0) cs.E_incoming = e;
        else if (std::abs(e - cs.E_incoming) > 1e3 * tol)
            throw ConfigError("incoming states lie at different thresholds");
        cs.incoming.push_back(cluster.front());
    }
    return cs;
}

struct FinalChannelGroup {
    double threshold = 0.0;
    double sigma = 0.0;
    double rate = 0.0;
};

// Cross sections are for the lowest incoming partial wave (index 0 of S);
// the *_all members sum over every incoming partial wave of the block.
struct ScatteringResult {
    Eigen::MatrixXcd S;  // open x open, incoming channels first
    double E_coll = 0.0;
    Eigen::VectorXd k_open;
    std::vector<int> open_L;
    std::vector<double> open_threshold;
    int n_incoming = 1;
    int L_in = 0;
    double g = 1.0;
    double sigma_el = 0.0, sigma_loss = 0.0, sigma_inel = 0.0;
    std::vector<FinalChannelGroup> state_to_state;  // inelastic, grouped by threshold
    double rate_el = 0.0, rate_loss = 0.0, rate_inel = 0.0;  // atomic units
    double sigma_el_all = 0.0, sigma_loss_all = 0.0, sigma_inel_all = 0.0;
    double rate_el_all = 0.0, rate_loss_all = 0.0, rate_inel_all = 0.0;
    cplx a_complex{0.0, 0.0};
    bool p_wave = false;

    double alpha() const { return a_complex.real(); }
    double beta() const { return -a_complex.imag(); }
    // absorbed plus inelastic
    double rate_total_loss() const { return rate_loss + rate_inel; }
    double rate_total_loss_all() const { return rate_loss_all + rate_inel_all; }
};

// Matches Y at R to Riccati-Bessel functions and derives the scattering
// observables for the incoming channels.
inline ScatteringResult extract_smatrix(const Eigen::MatrixXcd& Y, const WMatrices& W, const ChannelSet& cs,
                                        double E_tot, double mu, double R,
                                        double offdiag_fraction = 0.5, bool born_tail = true) {
    const int n = W.size();
    if (Y.rows() != n) throw DimensionError("log-derivative and W sizes differ");
    if (cs.incoming.empty()) throw ConfigError("channel set has no incoming channel");
    const auto& ac = cs.asym;
    const double E_coll = E_tot - cs.E_incoming;
    if (!(E_coll > 0)) throw ConfigError("collision energy must be positive");

    // residual coupling left out of the reference functions
    const Eigen::MatrixXd T3 = ac.T.transpose() * W.W3 * ac.T;
    const Eigen::MatrixXd T6 = ac.T.transpose() * W.W6 * ac.T;
    const int in = cs.incoming.front();
    double resid = 0.0;
    for (int k = 0; k < n; ++k)
        if (k != in) resid = std::max(resid, std::abs(T3(in, k) / std::pow(R, 3) + T6(in, k) / std::pow(R, 6)));
    if (resid > offdiag_fraction * E_coll)
        throw AsymptoteError("residual coupling at R_max is " + std::to_string(resid / E_coll) +
                             " of the collision energy; increase R_max");

    const Eigen::MatrixXcd Yc = ac.T.transpose().cast<cplx>() * Y * ac.T.cast<cplx>();
    std::vector<int> open = cs.incoming;
    for (int k = 0; k < n; ++k)
        if (ac.energy(k) < E_tot && std::find(open.begin(), open.end(), k) == open.end()) open.push_back(k);
    const int no = static_cast<int>(open.size());
    const int ni = static_cast<int>(cs.incoming.size());
    std::vector<bool> is_open(n, false);
    for (int k : open) is_open[k] = true;

    Eigen::VectorXd kk = Eigen::VectorXd::Zero(n);
    std::vector<RiccatiValues> rv(n);
    Eigen::MatrixXcd A = Yc;
    for (int k = 0; k < n; ++k) {
        const double e = 2.0 * mu * (E_tot - ac.energy(k));
        if (is_open[k]) {
            if (!(e > 0)) throw ConfigError("incoming channel is closed");
            kk(k) = std::sqrt(e);
            rv[k] = riccati(ac.L[k], kk(k) * R);
            const double s = 1.0 / std::sqrt(kk(k));
            A.col(k) *= s * rv[k].n;
            A(k, k) -= kk(k) * s * rv[k].np;
        } else {
            const double kap = std::sqrt(-e);
            A(k, k) -= kap * decaying_log_derivative(ac.L[k], kap * R);
        }
    }
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n, no);
    for (int c = 0; c < no; ++c) {
        const int k = open[c];
        const double s = 1.0 / std::sqrt(kk(k));
        B.col(c) = Yc.col(k) * (s * rv[k].j);
        B(k, c) -= kk(k) * s * rv[k].jp;
    }
    const Eigen::MatrixXcd X = A.partialPivLu().solve(B);
    Eigen::MatrixXcd K(no, no);
    for (int r = 0; r < no; ++r)
        for (int c = 0; c < no; ++c) K(r, c) = X(open[r], c);
    const double tol = degeneracy_tolerance(ac.energy);
    if (born_tail) {
        // dipolar phase accumulated beyond R between channels of the incoming threshold
        for (int r = 0; r < no; ++r)
            for (int c = 0; c < no; ++c) {
                const int kr = open[r], kc = open[c];
                if (std::abs(ac.energy(kr) - cs.E_incoming) > tol ||
                    std::abs(ac.energy(kc) - cs.E_incoming) > tol || T3(kr, kc) == 0.0)
                    continue;
                const double k = kk(kr);
                K(r, c) -= 2.0 * mu * T3(kr, kc) * k * dipolar_tail_integral(ac.L[kr], ac.L[kc], k * R);
            }
    }
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(no, no);
    const cplx i1(0.0, 1.0);

    ScatteringResult res;
    res.S = (I + i1 * K) * (I - i1 * K).partialPivLu().inverse();
    res.E_coll = E_coll;
    res.k_open.resize(no);
    for (int c = 0; c < no; ++c) {
        res.k_open(c) = kk(open[c]);
        res.open_L.push_back(ac.L[open[c]]);
        res.open_threshold.push_back(ac.energy(open[c]));
    }
    res.n_incoming = ni;
    res.L_in = ac.L[in];
    res.g = cs.identical ? 2.0 : 1.0;
    const double k0 = res.k_open(0);
    const double pref = res.g * M_PI / (k0 * k0);
    const double v = k0 / mu;
    auto elastic = [&](int c) { return std::abs(res.open_threshold[c] - cs.E_incoming) <= tol; };

    for (int i = 0; i < ni; ++i) {
        double el = 0.0, inel = 0.0, sum = 0.0;
        for (int c = 0; c < no; ++c) {
            const double p = std::norm(res.S(i, c));
            sum += p;
            if (elastic(c)) {
                el += std::norm((c == i ? 1.0 : 0.0) - res.S(i, c));
                continue;
            }
            inel += p;
            if (i != 0) continue;
            auto it = std::find_if(res.state_to_state.begin(), res.state_to_state.end(), [&](const auto& g) {
                return std::abs(g.threshold - res.open_threshold[c]) <= tol;
            });
            if (it == res.state_to_state.end()) {
                res.state_to_state.push_back({res.open_threshold[c], 0.0, 0.0});
                it = std::prev(res.state_to_state.end());
            }
            it->sigma += pref * p;
        }
        const double loss = std::max(0.0, 1.0 - sum);
        if (i == 0) {
            res.sigma_el = pref * el;
            res.sigma_inel = pref * inel;
            res.sigma_loss = pref * loss;
        }
        res.sigma_el_all += pref * el;
        res.sigma_inel_all += pref * inel;
        res.sigma_loss_all += pref * loss;
    }
    res.rate_el = v * res.sigma_el;
    res.rate_loss = v * res.sigma_loss;
    res.rate_inel = v * res.sigma_inel;
    res.rate_el_all = v * res.sigma_el_all;
    res.rate_loss_all = v * res.sigma_loss_all;
    res.rate_inel_all = v * res.sigma_inel_all;
    for (auto& g : res.state_to_state) g.rate = v * g.sigma;
    std::sort(res.state_to_state.begin(), res.state_to_state.end(),
              [](const auto& x, const auto& y) { return x.threshold < y.threshold; });
    const cplx ratio = (1.0 - res.S(0, 0)) / (1.0 + res.S(0, 0));
    if (res.L_in == 0) {
        res.a_complex = ratio / (i1 * k0);
    } else {
        res.p_wave = true;
        const cplx vol = ratio / (i1 * std::pow(k0, 2 * res.L_in + 1));
        res.a_complex = cplx(std::cbrt(vol.real()), std::cbrt(vol.imag()));
    }
    return res;
}

// One complete calculation: channel preparation, propagation and matching.
inline ScatteringResult scatter(const WMatrices& W, const std::vector<PairFunction>& basis,
                                const std::vector<Eigen::VectorXd>& incoming_states, bool identical,
                                double E_coll, double mu, const PropagatorOptions& opt,
                                Diagnostics* diag = nullptr) {
    const ChannelSet cs = prepare_channels(W, basis, incoming_states, identical);
    const double E_tot = cs.E_incoming + E_coll;
    const Eigen::MatrixXcd Y = propagate(W, E_tot, mu, opt, diag);
    return extract_smatrix(Y, W, cs, E_tot, mu, opt.R_max, opt.offdiag_fraction, opt.born_tail);
}

// Pair state (|v1 v2> + eta (-1)^L |v2 v1>) |L M_L>, normalized, expressed
// over the symmetrized basis functions with the given partial wave.
inline Eigen::VectorXd incoming_pair_state(const std::vector<PairFunction>& basis, const Eigen::VectorXd& v1,
                                           const Eigen::VectorXd& v2, int L, int M_L, int eta) {
    const double sign = eta * angular::parity_sign(L);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const auto& f = basis[k];
        if (f.L != L || f.M_L != M_L) continue;
        const int a = f.idx1, b = f.idx2;
        out(k) = 2.0 * f.norm() * (v1(a) * v2(b) + sign * v1(b) * v2(a));
    }
    const double nv = out.norm();
    if (nv < 1e-12) throw ConfigError("incoming pair state vanishes for L = " + std::to_string(L));
    return out / nv;
}

// Runs f(i) for i in [0, n) on up to `threads` workers. Each index is handled
// exactly once; results should be stored by index.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) f(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace dimershield
