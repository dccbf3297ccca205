#pragma once

// Channel coupling matrices (internal, centrifugal, dipole-dipole, dispersion),
// adiabatic curves and turning points.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimershield/angular.hpp"
#include "dimershield/error.hpp"
#include "dimershield/monomer.hpp"
#include "dimershield/pairbasis.hpp"

namespace dimershield {

// Matrix elements between symmetrized pair functions of one model.
class PairCoupling {
public:
    explicit PairCoupling(const MonomerModel& model) : model_(model) {
        for (int q = -1; q <= 1; ++q) dip_[q + 1] = model.spec().mu * model.c1(q);
    }

    const MonomerModel& model() const { return model_; }

    // <bra| h1 + h2 |ket>
    double internal(const PairFunction& bra, const PairFunction& ket) const {
        if (bra.L != ket.L || bra.M_L != ket.M_L) return 0.0;
        auto prim = [&](int a, int b, int ap, int bp) {
            const auto& H = model_.hamiltonian();
            double v = 0.0;
            if (b == bp) v += H(a, ap);
            if (a == ap) v += H(b, bp);
            return v;
        };
        return symmetrize(bra, ket, prim);
    }

    // coefficient of R^-3 of the dipole-dipole operator
    double dipole_dipole(const PairFunction& bra, const PairFunction& ket) const {
        const int dL = std::abs(bra.L - ket.L);
        if (dL != 0 && dL != 2) return 0.0;
        const int ns = model_.spin_count();
        auto prim = [&](int a, int b, int ap, int bp) {
            if (a % ns != ap % ns || b % ns != bp % ns) return 0.0;
            return dd_primitive(a / ns, b / ns, bra.L, bra.M_L, ap / ns, bp / ns, ket.L, ket.M_L);
        };
        return symmetrize(bra, ket, prim);
    }

    // unsymmetrized element between rotor products |r1 r2 L M>
    double dd_primitive(int r1, int r2, int L, int M, int r1p, int r2p, int Lp, int Mp) const {
        const int q = Mp - M;
        if (std::abs(q) > 2) return 0.0;
        const double ang = angular::spherical_c(L, M, 2, -q, Lp, Mp);
        if (ang == 0.0) return 0.0;
        double sum = 0.0;
        for (int q1 = -1; q1 <= 1; ++q1) {
            const int q2 = q - q1;
            if (q2 < -1 || q2 > 1) continue;
            const double d1 = dip_[q1 + 1](r1, r1p);
            if (d1 == 0.0) continue;
            const double d2 = dip_[q2 + 1](r2, r2p);
            if (d2 == 0.0) continue;
            sum += angular::clebsch_gordan(1, q1, 1, q2, 2, q) * d1 * d2;
        }
        return -std::sqrt(6.0) * angular::parity_sign(q) * ang * sum;
    }

private:
    template <class Prim>
    double symmetrize(const PairFunction& bra, const PairFunction& ket, Prim prim) const {
        const double direct = prim(bra.idx1, bra.idx2, ket.idx1, ket.idx2);
        const double exch = prim(bra.idx1, bra.idx2, ket.idx2, ket.idx1);
        const double sign = ket.eta * angular::parity_sign(ket.L);
        return 2.0 * bra.norm() * ket.norm() * (direct + sign * exch);
    }

    const MonomerModel& model_;
    std::array<Eigen::MatrixXd, 3> dip_;
};

// Symmetrized element of the dipole-dipole coefficient between two functions.
inline double dd_element(const PairCoupling& pc, const PairFunction& bra, const PairFunction& ket) {
    return pc.dipole_dipole(bra, ket);
}

// W matrices over one list of functions (no folding).
inline WMatrices assemble_w(const PairCoupling& pc, const std::vector<PairFunction>& basis) {
    const int n = static_cast<int>(basis.size());
    WMatrices W = WMatrices::zero(n);
    const double mu = pc.model().spec().reduced_mass();
    const double c6 = pc.model().spec().C6_elec;
    for (int a = 0; a < n; ++a) {
        W.W2(a, a) = basis[a].L * (basis[a].L + 1.0) / (2.0 * mu);
        W.W6(a, a) = -c6;
        for (int b = a; b < n; ++b) {
            const double w0 = pc.internal(basis[a], basis[b]);
            const double w3 = pc.dipole_dipole(basis[a], basis[b]);
            W.W0(a, b) = W.W0(b, a) = w0;
            W.W3(a, b) = W.W3(b, a) = w3;
        }
    }
    return W;
}

// W matrices over class 1 with class 2 folded in at second order.
inline WMatrices assemble_folded(const PairCoupling& pc, const BasisPartition& part,
                                 const FoldOptions& opt) {
    FoldInput in;
    in.class1 = assemble_w(pc, part.class1);
    const int n1 = static_cast<int>(part.class1.size());
    const int n2 = static_cast<int>(part.class2.size());
    if (n2 == 0) return in.class1;
    in.W0_12 = Eigen::MatrixXd::Zero(n1, n2);
    in.W3_12 = Eigen::MatrixXd::Zero(n1, n2);
    in.E2.resize(n2);
    for (int k = 0; k < n2; ++k) {
        const auto& fk = part.class2[k];
        // rotor-pair energy, so the second-order terms are identity in spin space
        const auto& rot = pc.model().rotors();
        in.E2(k) = rot[pc.model().rotor_of(fk.idx1)].energy + rot[pc.model().rotor_of(fk.idx2)].energy;
        for (int a = 0; a < n1; ++a) {
            in.W0_12(a, k) = pc.internal(part.class1[a], fk);
            in.W3_12(a, k) = pc.dipole_dipole(part.class1[a], fk);
        }
    }
    return van_vleck_fold(in, opt);
}

// Asymptotic channels: eigenvectors of W0 within each (L, M_L) sub-block.
struct AsymptoticChannels {
    Eigen::MatrixXd T;          // columns are channel vectors in the function basis
    Eigen::VectorXd energy;     // thresholds
    std::vector<int> L;
    std::vector<int> M_L;
};

inline AsymptoticChannels asymptotic_channels(const WMatrices& W,
                                              const std::vector<PairFunction>& basis) {
    const int n = W.size();
    if (static_cast<int>(basis.size()) != n) throw DimensionError("basis and W sizes differ");
    AsymptoticChannels ac;
    ac.T = Eigen::MatrixXd::Zero(n, n);
    ac.energy.resize(n);
    ac.L.assign(n, 0);
    ac.M_L.assign(n, 0);
    std::vector<std::pair<int, int>> keys;
    for (const auto& f : basis) keys.push_back({f.L, f.M_L});
    std::vector<std::pair<int, int>> uniq = keys;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    struct Item {
        double e;
        int L, ML;
        Eigen::VectorXd v;
    };
    std::vector<Item> items;
    for (const auto& key : uniq) {
        std::vector<int> idx;
        for (int a = 0; a < n; ++a)
            if (keys[a] == key) idx.push_back(a);
        const int m = static_cast<int>(idx.size());
        Eigen::MatrixXd B(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) B(a, b) = W.W0(idx[a], idx[b]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
        for (int k = 0; k < m; ++k) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
            int big = 0;
            for (int a = 0; a < m; ++a) {
                v(idx[a]) = es.eigenvectors()(a, k);
                if (std::abs(es.eigenvectors()(a, k)) > std::abs(es.eigenvectors()(big, k))) big = a;
            }
            if (es.eigenvectors()(big, k) < 0) v = -v;
            items.push_back({es.eigenvalues()(k), key.first, key.second, v});
        }
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
        const double s = std::max({std::abs(x.e), std::abs(y.e), 1e-300});
        if (std::abs(x.e - y.e) > 1e-13 * s) return x.e < y.e;
        return std::tie(x.L, x.ML) < std::tie(y.L, y.ML);
    });
    for (int k = 0; k < n; ++k) {
        ac.T.col(k) = items[k].v;
        ac.energy(k) = items[k].e;
        ac.L[k] = items[k].L;
        ac.M_L[k] = items[k].ML;
    }
    return ac;
}

struct AdiabatCurve {
    std::vector<double> R_grid;
    std::vector<double> values;
    std::vector<int> channel_character;  // dominant asymptotic channel per grid point
    int asymptotic_channel = -1;         // channel index at the largest R
    bool splice_warning = false;
    double min_overlap = 1.0;
};

inline std::vector<double> log_grid(double r0, double r1, int n) {
    if (n < 2 || !(r1 > r0) || !(r0 > 0)) throw ConfigError("invalid radial grid");
    std::vector<double> g(n);
    const double l0 = std::log(r0), l1 = std::log(r1);
    for (int i = 0; i < n; ++i) g[i] = std::exp(l0 + (l1 - l0) * i / (n - 1));
    g.front() = r0;
    g.back() = r1;
    return g;
}

// Eigenvalue tracks of V(R), followed from the largest R inward by maximal
// eigenvector overlap.
inline std::vector<AdiabatCurve> adiabats(const WMatrices& W, const std::vector<double>& R_grid,
                                          const AsymptoticChannels* asym = nullptr) {
    const int n = W.size();
    const int m = static_cast<int>(R_grid.size());
    for (int i = 1; i < m; ++i)
        if (!(R_grid[i] > R_grid[i - 1])) throw ConfigError("radial grid must increase");
    std::vector<AdiabatCurve> tracks(n);
    for (auto& t : tracks) {
        t.R_grid = R_grid;
        t.values.assign(m, 0.0);
        t.channel_character.assign(m, 0);
    }
    std::vector<int> slot(n);  // eigenvalue index at current R for each track
    Eigen::MatrixXd prev;
    for (int g = m - 1; g >= 0; --g) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W.at(R_grid[g]));
        const Eigen::MatrixXd& V = es.eigenvectors();
        if (g == m - 1) {
            for (int t = 0; t < n; ++t) slot[t] = t;
        } else {
            const Eigen::MatrixXd O = (prev.transpose() * V).cwiseAbs();
            std::vector<bool> used(n, false);
            std::vector<int> order(n);
            for (int t = 0; t < n; ++t) order[t] = t;
            // assign the most confident tracks first
            std::vector<double> best(n);
            for (int t = 0; t < n; ++t) best[t] = O.row(t).maxCoeff();
            std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return best[x] > best[y]; });
            std::vector<int> next(n);
            for (int t : order) {
                int arg = -1;
                double b1 = -1, b2 = -1;
                for (int k = 0; k < n; ++k) {
                    if (used[k]) continue;
                    if (O(t, k) > b1) {
                        b2 = b1;
                        b1 = O(t, k);
                        arg = k;
                    } else if (O(t, k) > b2) {
                        b2 = O(t, k);
                    }
                }
                used[arg] = true;
                next[t] = arg;
                auto& tr = tracks[t];
                tr.min_overlap = std::min(tr.min_overlap, b1);
                if (b2 >= 0 && b1 - b2 < 0.01) tr.splice_warning = true;
            }
            // reorder so that track t follows eigenvector next[t]
            Eigen::MatrixXd reordered(n, n);
            for (int t = 0; t < n; ++t) reordered.col(t) = V.col(next[t]);
            for (int t = 0; t < n; ++t) slot[t] = next[t];
            prev = reordered;
            for (int t = 0; t < n; ++t) {
                tracks[t].values[g] = es.eigenvalues()(slot[t]);
                if (asym) {
                    Eigen::VectorXd ov = (asym->T.transpose() * V.col(slot[t])).cwiseAbs();
                    Eigen::Index arg;
                    ov.maxCoeff(&arg);
                    tracks[t].channel_character[g] = static_cast<int>(arg);
                }
            }
            continue;
        }
        prev = V;
        for (int t = 0; t < n; ++t) {
            tracks[t].values[g] = es.eigenvalues()(t);
            if (asym) {
                Eigen::VectorXd ov = (asym->T.transpose() * V.col(t)).cwiseAbs();
                Eigen::Index arg;
                ov.maxCoeff(&arg);
                tracks[t].channel_character[g] = static_cast<int>(arg);
                tracks[t].asymptotic_channel = static_cast<int>(arg);
            }
        }
    }
    return tracks;
}

// The track that correlates with a given asymptotic channel at the largest R.
inline const AdiabatCurve& adiabat_for_channel(const std::vector<AdiabatCurve>& tracks, int channel) {
    for (const auto& t : tracks)
        if (t.asymptotic_channel == channel) return t;
    throw ConfigError("no adiabat correlates with channel " + std::to_string(channel));
}

// Natural cubic spline in log R through an adiabat, for root finding and
// quadrature between grid points.
class AdiabatInterpolant {
public:
    explicit AdiabatInterpolant(const AdiabatCurve& c) : x_(c.R_grid.size()), y_(c.values) {
        const int n = static_cast<int>(x_.size());
        if (n < 3) throw ConfigError("adiabat needs at least three points");
        for (int i = 0; i < n; ++i) x_[i] = std::log(c.R_grid[i]);
        m_.assign(n, 0.0);
        std::vector<double> a(n), b(n), cc(n), d(n);
        for (int i = 1; i < n - 1; ++i) {
            const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
            a[i] = h0;
            b[i] = 2 * (h0 + h1);
            cc[i] = h1;
            d[i] = 6 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        }
        for (int i = 2; i < n - 1; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * cc[i - 1];
            d[i] -= w * d[i - 1];
        }
        for (int i = n - 2; i >= 1; --i) m_[i] = (d[i] - cc[i] * m_[i + 1]) / b[i];
    }

    double operator()(double R) const {
        const double x = std::log(R);
        const int n = static_cast<int>(x_.size());
        if (x <= x_.front()) return y_.front();
        if (x >= x_.back()) return y_.back();
        const int i = static_cast<int>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
        const int j = std::min(i + 1, n - 1);
        const double h = x_[j] - x_[i];
        const double t = (x - x_[i]) / h, s = 1.0 - t;
        return s * y_[i] + t * y_[j] + h * h / 6.0 * ((s * s * s - s) * m_[i] + (t * t * t - t) * m_[j]);
    }

    double r_min() const { return std::exp(x_.front()); }
    double r_max() const { return std::exp(x_.back()); }

private:
    std::vector<double> x_, y_, m_;
};

// Outermost crossing of V(R) = E with V > E inside (repulsive wall).
inline double turning_point(const std::function<double(double)>& V, const std::vector<double>& grid,
                            double E) {
    for (int i = static_cast<int>(grid.size()) - 1; i > 0; --i) {
        const double lo = grid[i - 1], hi = grid[i];
        const double flo = V(lo) - E, fhi = V(hi) - E;
        if (flo > 0.0 && fhi <= 0.0) {
            double a = lo, b = hi;
            while ((b - a) > 1e-7 * b) {
                const double mid = 0.5 * (a + b);
                if (V(mid) - E > 0.0) a = mid;
                else b = mid;
            }
            return 0.5 * (a + b);
        }
    }
    throw NoBarrierError("adiabat has no repulsive wall crossing the energy");
}

inline double turning_point(const AdiabatCurve& adiabat, double E) {
    AdiabatInterpolant f(adiabat);
    return turning_point([&](double R) { return f(R); }, adiabat.R_grid, E);
}

}  // namespace dimershield
