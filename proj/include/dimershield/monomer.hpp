#pragma once

// Single-molecule Hamiltonian: rigid rotor in a static field plus nuclear
// hyperfine terms, written as a sum of (rotor operator) x (spin operator).

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimershield/angular.hpp"
#include "dimershield/error.hpp"
#include "dimershield/molecule.hpp"
#include "dimershield/units.hpp"

namespace dimershield {

struct RotorLabel {
    int n_tilde = 0;
    int m_n = 0;
    auto operator<=>(const RotorLabel&) const = default;
};

struct FieldDressedRotor {
    RotorLabel label;
    double energy = 0.0;
    int n_min = 0;            // coeffs[k] multiplies |n_min + k, m_n>
    Eigen::VectorXd coeffs;
    double d = 0.0;           // space-fixed dipole mu <C^1_0>
};

// Free-rotor functions |n m>, n = 0..n_max, ordered by n then m.
class FreeRotorBasis {
public:
    explicit FreeRotorBasis(int n_max) : n_max_(n_max) {
        for (int n = 0; n <= n_max; ++n)
            for (int m = -n; m <= n; ++m) states_.push_back({n, m});
    }
    int n_max() const { return n_max_; }
    int size() const { return static_cast<int>(states_.size()); }
    int n(int idx) const { return states_[idx].first; }
    int m(int idx) const { return states_[idx].second; }
    int index(int n, int m) const { return n * n + (m + n); }

    // <n m| C^k_q |n' m'> over the whole basis.
    Eigen::MatrixXd spherical(int k, int q) const {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(size(), size());
        for (int a = 0; a < size(); ++a)
            for (int b = 0; b < size(); ++b)
                M(a, b) = angular::spherical_c(n(a), m(a), k, q, n(b), m(b));
        return M;
    }

    // spherical component n_q of the rotational angular momentum
    Eigen::MatrixXd angmom(int q) const {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(size(), size());
        for (int a = 0; a < size(); ++a)
            for (int b = 0; b < size(); ++b)
                if (n(a) == n(b))
                    M(a, b) = angular::angmom_component(HalfInt::integer(n(a)),
                                                        HalfInt::integer(m(a)), q,
                                                        HalfInt::integer(m(b)));
        return M;
    }

private:
    int n_max_;
    std::vector<std::pair<int, int>> states_;
};

// Eigenpairs of b n^2 - mu F cos(theta) for one m_n, sorted by energy.
inline std::vector<FieldDressedRotor> stark_states(const MoleculeSpec& spec, double F, int m_n,
                                                   int n_max) {
    const int m = std::abs(m_n);
    if (n_max < m)
        throw TruncationError("n_max = " + std::to_string(n_max) + " cannot hold m_n = " +
                              std::to_string(m_n));
    if (F < 0.0) throw ConfigError("field must be non-negative");
    const int dim = n_max - m + 1;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd C1 = Eigen::MatrixXd::Zero(dim, dim);
    for (int a = 0; a < dim; ++a) {
        const int n = m + a;
        H(a, a) = spec.b * n * (n + 1);
        for (int c = 0; c < dim; ++c) C1(a, c) = angular::spherical_c(n, m_n, 1, 0, m + c, m_n);
    }
    H -= spec.mu * F * C1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    std::vector<FieldDressedRotor> out;
    for (int a = 0; a < dim; ++a) {
        FieldDressedRotor r;
        r.label = {m + a, m_n};
        r.energy = es.eigenvalues()(a);
        r.n_min = m;
        r.coeffs = es.eigenvectors().col(a);
        if (r.coeffs(a) < 0.0) r.coeffs = -r.coeffs;
        r.d = spec.mu * r.coeffs.dot(C1 * r.coeffs);
        out.push_back(std::move(r));
    }
    return out;
}

// Product nuclear-spin basis |m_A m_B>, m_A outer, both ascending.
class SpinBasis {
public:
    SpinBasis(HalfInt iA, HalfInt iB) : iA_(iA), iB_(iB) {
        for (int a = -iA.twice; a <= iA.twice; a += 2)
            for (int b = -iB.twice; b <= iB.twice; b += 2)
                states_.push_back({HalfInt::from_twice(a), HalfInt::from_twice(b)});
        const auto sa = angular::spin_components(iA);
        const auto sb = angular::spin_components(iB);
        const Eigen::MatrixXd IA = Eigen::MatrixXd::Identity(iA.twice + 1, iA.twice + 1);
        const Eigen::MatrixXd IB = Eigen::MatrixXd::Identity(iB.twice + 1, iB.twice + 1);
        for (int q = 0; q < 3; ++q) {
            a_[q] = kron(sa[q], IB);
            b_[q] = kron(IA, sb[q]);
        }
    }

    HalfInt iA() const { return iA_; }
    HalfInt iB() const { return iB_; }
    int size() const { return static_cast<int>(states_.size()); }
    HalfInt mA(int s) const { return states_[s].first; }
    HalfInt mB(int s) const { return states_[s].second; }
    HalfInt m_total(int s) const { return mA(s) + mB(s); }
    int index(HalfInt ma, HalfInt mb) const {
        return ((ma.twice + iA_.twice) / 2) * (iB_.twice + 1) + (mb.twice + iB_.twice) / 2;
    }

    const Eigen::MatrixXd& iA_q(int q) const { return a_[q + 1]; }
    const Eigen::MatrixXd& iB_q(int q) const { return b_[q + 1]; }

    // rank-2 coupled product [x (x) y]^2_p of two spin vectors
    static Eigen::MatrixXd rank2(const std::array<Eigen::MatrixXd, 3>& x,
                                 const std::array<Eigen::MatrixXd, 3>& y, int p) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x[0].rows(), x[0].cols());
        for (int q1 = -1; q1 <= 1; ++q1) {
            const int q2 = p - q1;
            if (q2 < -1 || q2 > 1) continue;
            out += angular::clebsch_gordan(1, q1, 1, q2, 2, p) * (x[q1 + 1] * y[q2 + 1]);
        }
        return out;
    }
    const std::array<Eigen::MatrixXd, 3>& a_components() const { return a_; }
    const std::array<Eigen::MatrixXd, 3>& b_components() const { return b_; }

    static Eigen::MatrixXd kron(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
        Eigen::MatrixXd out(x.rows() * y.rows(), x.cols() * y.cols());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j)
                out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        return out;
    }

private:
    HalfInt iA_, iB_;
    std::vector<std::pair<HalfInt, HalfInt>> states_;
    std::array<Eigen::MatrixXd, 3> a_, b_;
};

// One rotor-operator x spin-operator product term of the hyperfine Hamiltonian.
struct ProductTerm {
    Eigen::MatrixXd rotor;  // over free-rotor functions
    Eigen::MatrixXd spin;   // over the product spin basis
};

// Hyperfine terms: quadrupole on both nuclei, spin-rotation, scalar and tensor
// spin-spin. The field-free rotor and Stark parts are not included.
inline std::vector<ProductTerm> hyperfine_terms(const MoleculeSpec& spec, const FreeRotorBasis& rb,
                                                const SpinBasis& sb) {
    std::vector<ProductTerm> terms;
    const auto& A = sb.a_components();
    const auto& B = sb.b_components();
    auto quad_prefactor = [](double eQq, HalfInt i) {
        const double ii = i.value();
        if (i.twice < 2 || eQq == 0.0) return 0.0;
        return eQq * std::sqrt(6.0) / (4.0 * ii * (2.0 * ii - 1.0));
    };
    const double qa = quad_prefactor(spec.eQq_A, sb.iA());
    const double qb = quad_prefactor(spec.eQq_B, sb.iB());
    const double tensor = spec.c3 * std::sqrt(6.0);
    if (qa != 0.0 || qb != 0.0 || tensor != 0.0) {
        for (int p = -2; p <= 2; ++p) {
            Eigen::MatrixXd S = Eigen::MatrixXd::Zero(sb.size(), sb.size());
            if (qa != 0.0) S += qa * SpinBasis::rank2(A, A, -p);
            if (qb != 0.0) S += qb * SpinBasis::rank2(B, B, -p);
            if (tensor != 0.0) S += tensor * SpinBasis::rank2(A, B, -p);
            terms.push_back({rb.spherical(2, p), angular::parity_sign(p) * S});
        }
    }
    if (spec.c_A != 0.0 || spec.c_B != 0.0) {
        for (int q = -1; q <= 1; ++q) {
            Eigen::MatrixXd S = spec.c_A * sb.iA_q(-q) + spec.c_B * sb.iB_q(-q);
            terms.push_back({rb.angmom(q), angular::parity_sign(q) * S});
        }
    }
    if (spec.c4 != 0.0) {
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(sb.size(), sb.size());
        for (int q = -1; q <= 1; ++q)
            S += angular::parity_sign(q) * (sb.iA_q(q) * sb.iB_q(-q));
        terms.push_back({Eigen::MatrixXd::Identity(rb.size(), rb.size()), spec.c4 * S});
    }
    return terms;
}

struct HyperfineLabel {
    enum class Scheme { uncoupled, coupled };
    Scheme scheme = Scheme::uncoupled;
    HalfInt mA, mB;
    int symmetry = 0;  // +1/-1 for (m,-m) combinations, 0 otherwise
    HalfInt i, m_i;
    double weight = 0.0;

    std::string str() const {
        if (scheme == Scheme::coupled) return "(" + i.str() + "," + m_i.str() + ")";
        std::string s = "(" + mA.str() + "," + mB.str() + ")";
        if (symmetry > 0) s += "+";
        if (symmetry < 0) s += "-";
        return s;
    }
};

struct HyperfineState {
    RotorLabel manifold;
    HalfInt m_f;
    double energy = 0.0;      // absolute
    double energy_rel = 0.0;  // relative to the spin-free manifold level
    HyperfineLabel label;     // in the molecule's preferred scheme
    HyperfineLabel uncoupled_label;
    HyperfineLabel coupled_label;
    std::vector<HyperfineLabel> candidates;  // filled when the label is ambiguous
    bool ambiguous = false;
    double manifold_weight = 0.0;
    double d = 0.0;
    double delta_d = 0.0;
    Eigen::VectorXd vector;  // over MonomerModel product functions
};

// Monomer model in the basis (field-dressed rotor) x (product spin). Rotor
// states with n_tilde <= n_tilde_max are kept; the free-rotor expansion uses
// n <= n_max.
class MonomerModel {
public:
    MonomerModel(const MoleculeSpec& spec, double F, int n_max, int n_tilde_max, bool with_spin)
        : spec_(spec),
          F_(F),
          n_max_(n_max),
          n_tilde_max_(n_tilde_max),
          with_spin_(with_spin),
          free_(n_max),
          spins_(with_spin ? spec.iA : HalfInt{}, with_spin ? spec.iB : HalfInt{}) {
        if (n_tilde_max > n_max)
            throw TruncationError("n_tilde_max " + std::to_string(n_tilde_max) +
                                  " exceeds n_max " + std::to_string(n_max));
        for (int m = -n_tilde_max; m <= n_tilde_max; ++m) {
            auto st = stark_states(spec, F, m, n_max);
            for (auto& r : st)
                if (r.label.n_tilde <= n_tilde_max) rotors_.push_back(std::move(r));
        }
        std::sort(rotors_.begin(), rotors_.end(),
                  [](const auto& x, const auto& y) { return x.label < y.label; });
        const int nf = free_.size();
        const int nr = static_cast<int>(rotors_.size());
        coeff_ = Eigen::MatrixXd::Zero(nf, nr);
        for (int r = 0; r < nr; ++r) {
            const auto& st = rotors_[r];
            for (int k = 0; k < st.coeffs.size(); ++k)
                coeff_(free_.index(st.n_min + k, st.label.m_n), r) = st.coeffs(k);
        }
        for (int q = -1; q <= 1; ++q) c1_[q + 1] = coeff_.transpose() * free_.spherical(1, q) * coeff_;

        const int ns = spins_.size();
        h_ = Eigen::MatrixXd::Zero(nr * ns, nr * ns);
        for (int r = 0; r < nr; ++r)
            for (int s = 0; s < ns; ++s) h_(r * ns + s, r * ns + s) = rotors_[r].energy;
        if (with_spin) {
            hf_ = Eigen::MatrixXd::Zero(nr * ns, nr * ns);
            for (const auto& t : hyperfine_terms(spec, free_, spins_)) {
                const Eigen::MatrixXd Rd = coeff_.transpose() * t.rotor * coeff_;
                hf_ += SpinBasis::kron(Rd, t.spin);
            }
            hf_ = 0.5 * (hf_ + hf_.transpose()).eval();
            h_ += hf_;
        } else {
            hf_ = Eigen::MatrixXd::Zero(nr * ns, nr * ns);
        }
    }

    const MoleculeSpec& spec() const { return spec_; }
    double field() const { return F_; }
    int n_max() const { return n_max_; }
    int n_tilde_max() const { return n_tilde_max_; }
    bool with_spin() const { return with_spin_; }
    const SpinBasis& spins() const { return spins_; }
    const std::vector<FieldDressedRotor>& rotors() const { return rotors_; }
    int rotor_count() const { return static_cast<int>(rotors_.size()); }
    int spin_count() const { return spins_.size(); }
    int size() const { return rotor_count() * spin_count(); }

    int rotor_index(RotorLabel l) const {
        for (int r = 0; r < rotor_count(); ++r)
            if (rotors_[r].label == l) return r;
        throw TruncationError("rotor state (" + std::to_string(l.n_tilde) + "," +
                              std::to_string(l.m_n) + ") not in basis");
    }
    int product_index(int r, int s) const { return r * spin_count() + s; }
    int rotor_of(int idx) const { return idx / spin_count(); }
    int spin_of(int idx) const { return idx % spin_count(); }
    HalfInt m_f(int idx) const {
        return HalfInt::integer(rotors_[rotor_of(idx)].label.m_n) + spins_.m_total(spin_of(idx));
    }

    // internal Hamiltonian (rotor + Stark + hyperfine) over product functions
    const Eigen::MatrixXd& hamiltonian() const { return h_; }
    const Eigen::MatrixXd& hyperfine() const { return hf_; }
    // <r| C^1_q |r'> between dressed rotor states
    const Eigen::MatrixXd& c1(int q) const { return c1_[q + 1]; }
    // rotor-space transformation free -> dressed
    const Eigen::MatrixXd& coefficients() const { return coeff_; }
    const FreeRotorBasis& free_basis() const { return free_; }

    // space-fixed dipole operator mu C^1_0 over product functions
    Eigen::MatrixXd dipole_z() const {
        return SpinBasis::kron(spec_.mu * c1_[1],
                               Eigen::MatrixXd::Identity(spin_count(), spin_count()));
    }

    std::vector<int> block_indices(HalfInt mf) const {
        std::vector<int> idx;
        for (int k = 0; k < size(); ++k)
            if (m_f(k) == mf) idx.push_back(k);
        return idx;
    }

    std::vector<HalfInt> mf_values() const {
        std::vector<HalfInt> v;
        for (int k = 0; k < size(); ++k) v.push_back(m_f(k));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }

private:
    MoleculeSpec spec_;
    double F_;
    int n_max_, n_tilde_max_;
    bool with_spin_;
    FreeRotorBasis free_;
    SpinBasis spins_;
    std::vector<FieldDressedRotor> rotors_;
    Eigen::MatrixXd coeff_;
    std::array<Eigen::MatrixXd, 3> c1_;
    Eigen::MatrixXd h_, hf_;
};

namespace detail {

inline void assign_labels(const SpinBasis& sb, const Eigen::VectorXd& spin_amp, HyperfineState& st) {
    const double norm = spin_amp.squaredNorm();
    // uncoupled scheme, with (m,-m) pairs combined into +/- combinations
    std::vector<HyperfineLabel> all_u;
    for (int s = 0; s < sb.size(); ++s) {
        const HalfInt a = sb.mA(s), b = sb.mB(s);
        HyperfineLabel l;
        l.scheme = HyperfineLabel::Scheme::uncoupled;
        const bool paired = (a + b).twice == 0 && a.twice != 0 &&
                            std::abs(b.twice) <= sb.iA().twice && std::abs(a.twice) <= sb.iB().twice;
        if (paired) {
            if (a.twice > 0) continue;  // handle each pair once, labelled with m_A < 0
            const int partner = sb.index(b, a);
            const double c1 = spin_amp(s), c2 = spin_amp(partner);
            for (int sym : {+1, -1}) {
                HyperfineLabel p = l;
                p.mA = a;
                p.mB = b;
                p.symmetry = sym;
                p.weight = 0.5 * (c1 + sym * c2) * (c1 + sym * c2) / norm;
                all_u.push_back(p);
            }
        } else {
            l.mA = a;
            l.mB = b;
            l.weight = spin_amp(s) * spin_amp(s) / norm;
            all_u.push_back(l);
        }
    }
    // coupled scheme |i m_i>
    std::vector<HyperfineLabel> all_c;
    for (int i2 = std::abs(sb.iA().twice - sb.iB().twice); i2 <= sb.iA().twice + sb.iB().twice;
         i2 += 2) {
        for (int mi2 = -i2; mi2 <= i2; mi2 += 2) {
            double amp = 0.0;
            for (int s = 0; s < sb.size(); ++s) {
                if ((sb.mA(s) + sb.mB(s)).twice != mi2) continue;
                amp += angular::clebsch_gordan(sb.iA(), sb.mA(s), sb.iB(), sb.mB(s),
                                               HalfInt::from_twice(i2), HalfInt::from_twice(mi2)) *
                       spin_amp(s);
            }
            HyperfineLabel l;
            l.scheme = HyperfineLabel::Scheme::coupled;
            l.i = HalfInt::from_twice(i2);
            l.m_i = HalfInt::from_twice(mi2);
            l.weight = amp * amp / norm;
            all_c.push_back(l);
        }
    }
    auto by_weight = [](const HyperfineLabel& x, const HyperfineLabel& y) {
        return x.weight > y.weight;
    };
    std::stable_sort(all_u.begin(), all_u.end(), by_weight);
    std::stable_sort(all_c.begin(), all_c.end(), by_weight);
    st.uncoupled_label = all_u.front();
    st.coupled_label = all_c.front();
    st.candidates.clear();
    auto close = [](const std::vector<HyperfineLabel>& v) {
        return v.size() > 1 && v[0].weight - v[1].weight < 1e-3;
    };
    st.ambiguous = false;
    if (close(all_u)) st.candidates.insert(st.candidates.end(), all_u.begin(), all_u.begin() + 2);
    if (close(all_c)) st.candidates.insert(st.candidates.end(), all_c.begin(), all_c.begin() + 2);
}

}  // namespace detail

// Diagonalizes the monomer model block by block in m_f and returns all
// eigenstates (energies absolute). Used by hyperfine_levels and by the pair
// code to define asymptotic monomer states.
struct MonomerEigenstate {
    HalfInt m_f;
    double energy;
    Eigen::VectorXd vector;  // over product functions of the model
};

inline std::vector<MonomerEigenstate> diagonalize_blocks(const MonomerModel& model) {
    std::vector<MonomerEigenstate> out;
    const auto& H = model.hamiltonian();
    for (HalfInt mf : model.mf_values()) {
        const auto idx = model.block_indices(mf);
        const int n = static_cast<int>(idx.size());
        Eigen::MatrixXd B(n, n);
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) B(a, c) = H(idx[a], idx[c]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
        for (int k = 0; k < n; ++k) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(model.size());
            for (int a = 0; a < n; ++a) v(idx[a]) = es.eigenvectors()(a, k);
            out.push_back({mf, es.eigenvalues()(k), std::move(v)});
        }
    }
    return out;
}

// Hyperfine levels of the model that correlate with one rotor manifold.
inline std::vector<HyperfineState> manifold_levels(const MonomerModel& model, RotorLabel manifold) {
    const int r0 = model.rotor_index(manifold);
    const int ns = model.spin_count();
    const double e0 = model.rotors()[r0].energy;
    const double d0 = model.rotors()[r0].d;
    const Eigen::MatrixXd dz = model.dipole_z();
    const auto& sb = model.spins();

    std::vector<HyperfineState> out;
    for (HalfInt mf : model.mf_values()) {
        int wanted = 0;
        for (int s = 0; s < ns; ++s)
            if (HalfInt::integer(manifold.m_n) + sb.m_total(s) == mf) ++wanted;
        if (wanted == 0) continue;
        const auto idx = model.block_indices(mf);
        const int n = static_cast<int>(idx.size());
        Eigen::MatrixXd B(n, n);
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) B(a, c) = model.hamiltonian()(idx[a], idx[c]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
        std::vector<std::pair<double, int>> weights;
        for (int k = 0; k < n; ++k) {
            double w = 0.0;
            for (int a = 0; a < n; ++a)
                if (model.rotor_of(idx[a]) == r0) w += es.eigenvectors()(a, k) * es.eigenvectors()(a, k);
            weights.push_back({w, k});
        }
        std::stable_sort(weights.begin(), weights.end(),
                         [](const auto& x, const auto& y) { return x.first > y.first; });
        for (int t = 0; t < wanted; ++t) {
            const int k = weights[t].second;
            HyperfineState st;
            st.manifold = manifold;
            st.m_f = mf;
            st.energy = es.eigenvalues()(k);
            st.energy_rel = st.energy - e0;
            st.manifold_weight = weights[t].first;
            st.vector = Eigen::VectorXd::Zero(model.size());
            for (int a = 0; a < n; ++a) st.vector(idx[a]) = es.eigenvectors()(a, k);
            st.d = st.vector.dot(dz * st.vector);
            st.delta_d = d0 != 0.0 ? (st.d - d0) / d0 : 0.0;
            Eigen::VectorXd spin_amp = st.vector.segment(r0 * ns, ns);
            detail::assign_labels(sb, spin_amp, st);
            out.push_back(std::move(st));
        }
    }
    // preferred scheme: whichever labels carry the larger mean weight
    double wu = 0.0, wc = 0.0;
    for (const auto& s : out) {
        wu += s.uncoupled_label.weight;
        wc += s.coupled_label.weight;
    }
    const bool coupled = wc > wu;
    for (auto& s : out) {
        s.label = coupled ? s.coupled_label : s.uncoupled_label;
        if (s.label.weight < 0.5) s.ambiguous = true;
        if (!s.candidates.empty()) s.ambiguous = true;
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& x, const auto& y) { return x.energy_rel > y.energy_rel; });
    return out;
}

inline constexpr int default_n_max = 5;

// Hyperfine levels correlating with (n_tilde, m_n) at field F, using the
// complete free-rotor space n <= n_max.
inline std::vector<HyperfineState> hyperfine_levels(const MoleculeSpec& spec, double F,
                                                    RotorLabel manifold,
                                                    int n_max = default_n_max) {
    if (manifold.n_tilde > n_max || std::abs(manifold.m_n) > manifold.n_tilde)
        throw TruncationError("manifold not available at n_max = " + std::to_string(n_max));
    MonomerModel model(spec, F, n_max, n_max, true);
    return manifold_levels(model, manifold);
}

// States with the largest and smallest dipole deviation Delta d_j (largest
// and smallest |d_j|). Ties within 1e-12 are all returned.
inline std::pair<std::vector<HyperfineState>, std::vector<HyperfineState>> extreme_dipole_states(
    const std::vector<HyperfineState>& levels) {
    if (levels.empty()) throw ConfigError("extreme_dipole_states needs at least one level");
    auto key = [](const HyperfineState& s) { return s.delta_d != 0.0 ? s.delta_d : std::abs(s.d); };
    double hi_v = key(levels.front()), lo_v = hi_v;
    for (const auto& s : levels) {
        hi_v = std::max(hi_v, key(s));
        lo_v = std::min(lo_v, key(s));
    }
    const double tol = 1e-12 * std::max({std::abs(hi_v), std::abs(lo_v), 1e-300});
    std::vector<HyperfineState> hi, lo;
    for (const auto& s : levels) {
        if (std::abs(key(s) - hi_v) <= tol) hi.push_back(s);
        if (std::abs(key(s) - lo_v) <= tol) lo.push_back(s);
    }
    return {hi, lo};
}

}  // namespace dimershield
