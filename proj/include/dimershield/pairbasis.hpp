#pragma once

// Exchange-symmetrized two-molecule channel functions, class-1/class-2
// partition by rotor pair, and the second-order Van Vleck fold.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "dimershield/angular.hpp"
#include "dimershield/error.hpp"
#include "dimershield/monomer.hpp"

namespace dimershield {

enum class SpinMode { spin_free, full, mf_window };

struct SpinSelection {
    SpinMode mode = SpinMode::spin_free;
    int window = 1;                 // only for mf_window
    HalfInt mf_init1, mf_init2;     // per-molecule m_f of the incoming pair

    static SpinSelection spin_free() { return {}; }
    static SpinSelection full() { return {SpinMode::full, 0, {}, {}}; }
    static SpinSelection mfr(int w, HalfInt mf1 = {}, HalfInt mf2 = {}) {
        return {SpinMode::mf_window, w, mf1, mf2};
    }
};

// Unordered pair of field-dressed rotor states.
struct RotorPair {
    RotorLabel a, b;  // a <= b
    static RotorPair make(RotorLabel x, RotorLabel y) {
        if (y < x) std::swap(x, y);
        return {x, y};
    }
    bool identical() const { return a == b; }
    auto operator<=>(const RotorPair&) const = default;
    std::string str() const {
        return "(" + std::to_string(a.n_tilde) + "," + std::to_string(a.m_n) + ")+(" +
               std::to_string(b.n_tilde) + "," + std::to_string(b.m_n) + ")";
    }
};

struct PairFunction {
    int idx1 = 0, idx2 = 0;  // monomer product functions of the model, idx1 <= idx2
    RotorLabel rotor1, rotor2;
    HalfInt mA1, mB1, mA2, mB2;
    bool spin_free = true;
    int L = 0, M_L = 0;
    int eta = 1;
    bool identical = false;  // identical-pair normalization
    double energy = 0.0;     // diagonal asymptotic internal energy

    RotorPair rotor_pair() const { return RotorPair::make(rotor1, rotor2); }
    HalfInt m_f1() const { return HalfInt::integer(rotor1.m_n) + mA1 + mB1; }
    HalfInt m_f2() const { return HalfInt::integer(rotor2.m_n) + mA2 + mB2; }
    HalfInt M_tot() const { return m_f1() + m_f2() + HalfInt::integer(M_L); }
    double norm() const { return 1.0 / std::sqrt(2.0 * (identical ? 2.0 : 1.0)); }

    std::string str() const {
        auto mono = [&](RotorLabel r, HalfInt a, HalfInt b) {
            std::string s = "(" + std::to_string(r.n_tilde) + "," + std::to_string(r.m_n) + ")";
            if (!spin_free) s += "[" + a.str() + "," + b.str() + "]";
            return s;
        };
        return mono(rotor1, mA1, mB1) + "+" + mono(rotor2, mA2, mB2) + " L=" + std::to_string(L) +
               " ML=" + std::to_string(M_L);
    }
};

struct BasisOptions {
    int L_max = 20;
    HalfInt M_tot;
    int eta = 1;
    SpinSelection spin;
    std::optional<int> L_parity;                 // 0 even, 1 odd; unset keeps both
    std::optional<std::set<RotorPair>> rotor_pairs;  // restrict to these rotor pairs
};

namespace detail {

inline bool spin_allowed(const MonomerModel& model, const SpinSelection& sel, int i, int j) {
    if (sel.mode != SpinMode::mf_window) return true;
    auto ok = [&](int k, HalfInt init) {
        return std::abs((model.m_f(k) - init).twice) <= 2 * sel.window;
    };
    return (ok(i, sel.mf_init1) && ok(j, sel.mf_init2)) ||
           (ok(i, sel.mf_init2) && ok(j, sel.mf_init1));
}

inline PairFunction make_function(const MonomerModel& model, int i, int j, int L, int ML, int eta) {
    PairFunction f;
    f.idx1 = i;
    f.idx2 = j;
    const auto& sb = model.spins();
    f.rotor1 = model.rotors()[model.rotor_of(i)].label;
    f.rotor2 = model.rotors()[model.rotor_of(j)].label;
    f.mA1 = sb.mA(model.spin_of(i));
    f.mB1 = sb.mB(model.spin_of(i));
    f.mA2 = sb.mA(model.spin_of(j));
    f.mB2 = sb.mB(model.spin_of(j));
    f.spin_free = !model.with_spin();
    f.L = L;
    f.M_L = ML;
    f.eta = eta;
    f.identical = (i == j);
    const auto& H = model.hamiltonian();
    f.energy = H(i, i) + H(j, j);
    return f;
}

inline bool canonical_less(const PairFunction& x, const PairFunction& y) {
    if (x.energy != y.energy) {
        const double scale = std::max(std::abs(x.energy), std::abs(y.energy));
        if (std::abs(x.energy - y.energy) > 1e-13 * scale) return x.energy < y.energy;
    }
    return std::tie(x.L, x.M_L, x.idx1, x.idx2) < std::tie(y.L, y.M_L, y.idx1, y.idx2);
}

}  // namespace detail

// All symmetrized functions of one M_tot block, canonically ordered.
inline std::vector<PairFunction> enumerate_basis(const MonomerModel& model, const BasisOptions& opt,
                                                 Diagnostics* diag = nullptr) {
    if (opt.L_max < 0) throw ConfigError("L_max must be non-negative");
    if (opt.eta != 1 && opt.eta != -1) throw ConfigError("eta must be +1 or -1");
    if (opt.spin.mode != SpinMode::spin_free && !model.with_spin())
        throw ConfigError("spin mode requested on a spin-free monomer model");
    std::vector<PairFunction> out;
    const int n = model.size();
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (opt.rotor_pairs) {
                const auto rp = RotorPair::make(model.rotors()[model.rotor_of(i)].label,
                                                model.rotors()[model.rotor_of(j)].label);
                if (!opt.rotor_pairs->count(rp)) continue;
            }
            if (!detail::spin_allowed(model, opt.spin, i, j)) continue;
            const HalfInt m = model.m_f(i) + model.m_f(j);
            const HalfInt ML2 = opt.M_tot - m;
            if (!ML2.is_integer()) continue;
            const int ML = ML2.twice / 2;
            for (int L = std::abs(ML); L <= opt.L_max; ++L) {
                if (opt.L_parity && (L % 2) != *opt.L_parity) continue;
                if (i == j && opt.eta * (L % 2 == 0 ? 1 : -1) != 1) continue;
                out.push_back(detail::make_function(model, i, j, L, ML, opt.eta));
            }
        }
    }
    std::sort(out.begin(), out.end(), detail::canonical_less);
    if (out.empty() && diag) diag->warn("M_tot " + opt.M_tot.str() + " unreachable with L_max " +
                                        std::to_string(opt.L_max));
    return out;
}

// Unordered internal pair functions (no partial wave) over a set of rotor pairs.
inline std::size_t count_internal_pairs(const MonomerModel& model, const std::set<RotorPair>& pairs,
                                        const SpinSelection& sel) {
    std::size_t count = 0;
    for (int i = 0; i < model.size(); ++i)
        for (int j = i; j < model.size(); ++j) {
            const auto rp = RotorPair::make(model.rotors()[model.rotor_of(i)].label,
                                            model.rotors()[model.rotor_of(j)].label);
            if (!pairs.count(rp)) continue;
            if (!detail::spin_allowed(model, sel, i, j)) continue;
            ++count;
        }
    return count;
}

// Rotor pairs ordered by distance of their spin-free pair energy from that
// of the reference pair. Degenerate groups are ordered with identical-rotor
// pairs first, then lexicographically.
inline std::vector<RotorPair> rank_rotor_pairs(const MonomerModel& model, RotorPair reference) {
    std::vector<std::pair<double, RotorPair>> all;
    const auto& rot = model.rotors();
    const double e_ref =
        rot[model.rotor_index(reference.a)].energy + rot[model.rotor_index(reference.b)].energy;
    for (std::size_t x = 0; x < rot.size(); ++x)
        for (std::size_t y = x; y < rot.size(); ++y)
            all.push_back({std::abs(rot[x].energy + rot[y].energy - e_ref),
                           RotorPair::make(rot[x].label, rot[y].label)});
    const double tol = 1e-9 * model.spec().b;
    std::stable_sort(all.begin(), all.end(), [&](const auto& p, const auto& q) {
        if (std::abs(p.first - q.first) > tol) return p.first < q.first;
        if (p.second.identical() != q.second.identical()) return p.second.identical();
        return p.second < q.second;
    });
    std::vector<RotorPair> out;
    for (const auto& p : all) out.push_back(p.second);
    return out;
}

struct BasisPartition {
    std::vector<PairFunction> class1, class2;
    std::vector<RotorPair> class1_rotor_pairs;
    int N_rot = 0;
    // distinct internal pair functions (ignoring the partial wave) in class 1
    std::size_t N_pair() const {
        std::set<std::pair<int, int>> seen;
        for (const auto& f : class1) seen.insert({f.idx1, f.idx2});
        return seen.size();
    }
};

inline std::vector<RotorPair> select_class1(const MonomerModel& model, RotorPair incoming, int N_rot,
                                            Diagnostics* diag = nullptr) {
    auto ranked = rank_rotor_pairs(model, incoming);
    if (N_rot > static_cast<int>(ranked.size())) {
        if (diag) diag->warn("N_rot " + std::to_string(N_rot) + " clamped to " +
                             std::to_string(ranked.size()));
        N_rot = static_cast<int>(ranked.size());
    }
    if (N_rot < 1) throw ConfigError("N_rot must be at least 1");
    ranked.resize(N_rot);
    if (std::find(ranked.begin(), ranked.end(), incoming) == ranked.end())
        throw ConfigError("incoming rotor pair missing from class 1");
    return ranked;
}

inline BasisPartition partition_class1(const MonomerModel& model,
                                       const std::vector<PairFunction>& basis,
                                       const PairFunction& incoming, int N_rot,
                                       Diagnostics* diag = nullptr) {
    BasisPartition p;
    p.class1_rotor_pairs = select_class1(model, incoming.rotor_pair(), N_rot, diag);
    p.N_rot = static_cast<int>(p.class1_rotor_pairs.size());
    std::set<RotorPair> keep(p.class1_rotor_pairs.begin(), p.class1_rotor_pairs.end());
    bool found = false;
    for (const auto& f : basis) {
        if (keep.count(f.rotor_pair())) p.class1.push_back(f);
        else p.class2.push_back(f);
        if (f.idx1 == incoming.idx1 && f.idx2 == incoming.idx2 && f.L == incoming.L &&
            f.M_L == incoming.M_L)
            found = true;
    }
    if (!found) throw ConfigError("incoming function is not in the basis");
    return p;
}

// Power-of-R coefficient matrices: V(R) = W0 + W2/R^2 + W3/R^3 + W6/R^6.
struct WMatrices {
    Eigen::MatrixXd W0, W2, W3, W6;

    int size() const { return static_cast<int>(W0.rows()); }

    static WMatrices zero(int n) {
        return {Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
                Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
    }

    Eigen::MatrixXd at(double R) const {
        const double r2 = 1.0 / (R * R);
        return W0 + r2 * W2 + (r2 / R) * W3 + (r2 * r2 * r2) * W6;
    }

    void check_dimensions() const {
        const int n = size();
        for (const auto* m : {&W0, &W2, &W3, &W6})
            if (m->rows() != n || m->cols() != n) throw DimensionError("W matrices differ in size");
    }
};

// Couplings between an explicit class (1) and a folded class (2).
struct FoldInput {
    WMatrices class1;                // within class 1
    Eigen::MatrixXd W0_12, W3_12;    // class 1 x class 2
    Eigen::VectorXd E2;              // asymptotic class-2 energies
};

struct FoldOptions {
    double E_ref = 0.0;
    double barrier_radius = 300.0;  // bohr, where the gap test is evaluated
    double gap_factor = 10.0;
    bool check_gap = true;
};

inline WMatrices van_vleck_fold(const FoldInput& in, const FoldOptions& opt) {
    const int n1 = in.class1.size();
    const int n2 = static_cast<int>(in.E2.size());
    if (in.W0_12.rows() != n1 || in.W3_12.rows() != n1 || in.W0_12.cols() != n2 ||
        in.W3_12.cols() != n2)
        throw DimensionError("fold coupling blocks have inconsistent shapes");
    Eigen::VectorXd inv(n2);
    const double rb3 = std::pow(opt.barrier_radius, 3);
    for (int k = 0; k < n2; ++k) {
        const double gap = opt.E_ref - in.E2(k);
        if (opt.check_gap) {
            const double coupling = (in.W0_12.col(k) + in.W3_12.col(k) / rb3).cwiseAbs().maxCoeff();
            if (std::abs(gap) <= opt.gap_factor * coupling)
                throw NearDegeneracyError("class-2 function " + std::to_string(k) +
                                              " is too close to the reference energy",
                                          static_cast<std::size_t>(k));
        }
        inv(k) = 1.0 / gap;
    }
    WMatrices out = in.class1;
    const Eigen::MatrixXd A0 = in.W0_12 * inv.asDiagonal();
    const Eigen::MatrixXd A3 = in.W3_12 * inv.asDiagonal();
    Eigen::MatrixXd d0 = A0 * in.W0_12.transpose();
    Eigen::MatrixXd d3 = A0 * in.W3_12.transpose() + A3 * in.W0_12.transpose();
    Eigen::MatrixXd d6 = A3 * in.W3_12.transpose();
    out.W0 += 0.5 * (d0 + d0.transpose());
    out.W3 += 0.5 * (d3 + d3.transpose());
    out.W6 += 0.5 * (d6 + d6.transpose());
    return out;
}

// Convenience form on a full matrix set with index lists for the two classes.
inline WMatrices van_vleck_fold(const WMatrices& full, const std::vector<int>& class1,
                                const std::vector<int>& class2, const FoldOptions& opt) {
    full.check_dimensions();
    const int n1 = static_cast<int>(class1.size());
    const int n2 = static_cast<int>(class2.size());
    FoldInput in;
    in.class1 = WMatrices::zero(n1);
    for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n1; ++b) {
            in.class1.W0(a, b) = full.W0(class1[a], class1[b]);
            in.class1.W2(a, b) = full.W2(class1[a], class1[b]);
            in.class1.W3(a, b) = full.W3(class1[a], class1[b]);
            in.class1.W6(a, b) = full.W6(class1[a], class1[b]);
        }
    in.W0_12.resize(n1, n2);
    in.W3_12.resize(n1, n2);
    in.E2.resize(n2);
    for (int k = 0; k < n2; ++k) {
        in.E2(k) = full.W0(class2[k], class2[k]);
        for (int a = 0; a < n1; ++a) {
            in.W0_12(a, k) = full.W0(class1[a], class2[k]);
            in.W3_12(a, k) = full.W3(class1[a], class2[k]);
        }
    }
    return van_vleck_fold(in, opt);
}

// Basis name in the spin-N<pairs>-L<Lmax> style.
inline std::string basis_name(bool spin, std::size_t n_pair, int L_max) {
    return std::string(spin ? "spin" : "spinfree") + "-N" + std::to_string(n_pair) + "-L" +
           std::to_string(L_max);
}

}  // namespace dimershield
