#pragma once

// Independent oracles and reference data shared by the unit tests and the
// acceptance runner.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dimershield/dimershield.hpp"

namespace support {

namespace ds = dimershield;
using cplx = std::complex<double>;

inline std::string data_file(const std::string& name) {
    return std::string(DIMERSHIELD_DATA_DIR) + "/molecules/" + name + ".json";
}

inline ds::MoleculeSpec molecule(const std::string& name) { return ds::load_molecule(data_file(name)); }

// ---- brute-force angular quadrature ----

inline cplx ylm(int l, int m, double theta, double phi) {
    const int am = std::abs(m);
    const double v = std::sph_legendre(l, am, theta);
    cplx y = v * std::exp(cplx(0.0, am * phi));
    if (m < 0) y = std::conj(y) * ((am % 2) ? -1.0 : 1.0);
    return y;
}

// <l m| f(unit vector) |l' m'> on a 40-point Gauss-Legendre x 48-point
// trapezoid grid (exact for the polynomial degrees used here).
template <class F>
cplx angular_integral(int l, int m, int lp, int mp, F f) {
    static std::vector<double> x, w;
    if (x.empty()) {
        const auto& a = boost::math::quadrature::gauss<double, 40>::abscissa();
        const auto& ww = boost::math::quadrature::gauss<double, 40>::weights();
        for (std::size_t i = 0; i < a.size(); ++i) {
            x.push_back(a[i]);
            w.push_back(ww[i]);
            if (a[i] != 0.0) {
                x.push_back(-a[i]);
                w.push_back(ww[i]);
            }
        }
    }
    constexpr int np = 48;
    cplx s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double th = std::acos(x[i]);
        for (int j = 0; j < np; ++j) {
            const double ph = 2.0 * M_PI * j / np;
            const double u[3] = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), x[i]};
            s += w[i] * (2.0 * M_PI / np) * std::conj(ylm(l, m, th, ph)) * f(u) * ylm(lp, mp, th, ph);
        }
    }
    return s;
}

// Dipole-dipole coefficient between rotor products |a b L M> and |a' b' L' M'>
// from the Cartesian form sum_ij d1_i d2_j (delta_ij - 3 R_i R_j), for free
// rotors with unit dipole.
inline double dd_quadrature(ds::RotorLabel a, ds::RotorLabel b, int L, int M, ds::RotorLabel ap,
                            ds::RotorLabel bp, int Lp, int Mp) {
    cplx A1[3], A2[3], B[3][3];
    for (int i = 0; i < 3; ++i) {
        A1[i] = angular_integral(a.n_tilde, a.m_n, ap.n_tilde, ap.m_n, [i](const double* u) { return u[i]; });
        A2[i] = angular_integral(b.n_tilde, b.m_n, bp.n_tilde, bp.m_n, [i](const double* u) { return u[i]; });
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            B[i][j] = angular_integral(L, M, Lp, Mp, [i, j](const double* u) {
                return (i == j ? 1.0 : 0.0) - 3.0 * u[i] * u[j];
            });
    cplx q = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) q += A1[i] * A2[j] * B[i][j];
    return q.real();
}

// <l m| C^2_q |l' m'> by quadrature, C^2_q = sqrt(4 pi / 5) Y_2q.
inline double c2_quadrature(int l, int m, int q, int lp, int mp) {
    const double pref = std::sqrt(4.0 * M_PI / 5.0);
    return (pref * angular_integral(l, m, lp, mp, [q](const double* u) {
                const double th = std::acos(std::clamp(u[2], -1.0, 1.0));
                const double ph = std::atan2(u[1], u[0]);
                return ylm(2, q, th, ph);
            })).real();
}

// ---- 12-4 soft-wall single-channel model ----

// int_1^inf sqrt(x^-4 - x^-12) dx
inline double twelve_four_phase_constant() {
    auto f = [](double t) {
        // x = 1/t, dx = dt / t^2
        const double v = std::pow(t, 4) - std::pow(t, 12);
        return v > 0 ? std::sqrt(v) / (t * t) : 0.0;
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-13);
}

// Zero-energy scattering length of V = C4 (R_t^8 / R^12 - 1 / R^4) with
// beta^2 = 2 mu C4, from the propagator with an exact R^-4 tail match.
inline double twelve_four_alpha(double mu, double R_t, double beta) {
    const double C4 = beta * beta / (2.0 * mu);
    const double Rt8 = std::pow(R_t, 8);
    auto U = [&](double R, Eigen::MatrixXd& u) {
        u.resize(1, 1);
        const double r4 = 1.0 / std::pow(R, 4);
        u(0, 0) = 2.0 * mu * C4 * r4 * (Rt8 * r4 * r4 - 1.0);
    };
    const double R0 = 0.55 * R_t, R1 = 400.0 * R_t;
    const int n = static_cast<int>(std::ceil(std::log(R1 / R0) / 5e-5));
    const auto grid = ds::log_grid(R0, R1, n);
    const auto Y = ds::propagate(U, ds::reflecting_init(1), grid);
    const double y = Y(0, 0).real();
    const double cot_theta = (1.0 / R1 - y) * R1 * R1 / beta;
    const double theta = std::atan2(1.0, cot_theta);
    const double c = theta - beta / R1;
    return -beta / std::tan(c);
}

// ---- hyperfine goldens ----

struct GoldenLevel {
    int multiplicity;   // 2 for +/- m rows
    double delta_d;     // relative dipole deviation
    double energy_kHz;  // relative to the spin-free level
};

struct GoldenTable {
    std::string molecule;
    double field_kV_cm;
    double dd_rel_tol;
    std::vector<GoldenLevel> rows;
};

inline std::vector<GoldenTable> golden_tables() {
    return {
        {"Na39K", 7.1, 0.02,
         {{1, -4.168e-5, 19.1}, {2, -4.157e-5, 18.6}, {1, -4.171e-5, 17.6}, {2, -2.683e-5, 12.2},
          {2, -2.695e-5, 11.5}, {2, 2.680e-5, -11.5}, {2, 2.682e-5, -12.0}, {2, 4.167e-5, -17.5},
          {1, 4.173e-5, -19.1}, {1, 4.173e-5, -19.1}}},
        {"NaCs", 2.5, 0.05,
         {{2, -5.3e-6, 22.1}, {2, -7.9e-6, 22.0}, {2, -4.5e-6, 21.3}, {2, -0.6e-6, 20.5},
          {2, 2.2e-6, 20.0}, {1, 3.2e-6, 19.8}, {2, -8.4e-6, 3.96}, {2, -3.9e-6, 1.88},
          {2, 3.0e-6, 0.06}, {2, 7.6e-6, -1.10}, {1, 9.2e-6, -1.50}, {2, -11e-6, -11.3},
          {2, 3.3e-6, -15.2}, {2, 11e-6, -17.4}, {1, 13e-6, -18.1}, {2, -5.3e-6, -25.1},
          {2, 3.7e-6, -27.4}, {1, 6.7e-6, -28.2}}},
        // printed with a 1e4 scale, values below are the 1e5-scaled magnitudes
        {"Li7Rb87", 11.0, 0.05,
         {{1, -9.28e-5, 95.1}, {2, -9.31e-5, 94.9}, {2, -9.36e-5, 93.5}, {2, -9.33e-5, 86.7},
          {1, -9.30e-5, 85.9}, {2, 9.28e-5, -85.9}, {2, 9.34e-5, -89.6}, {2, 9.35e-5, -93.3},
          {1, 9.31e-5, -96.3}, {1, 9.31e-5, -96.4}}},
    };
}

struct GoldenCheck {
    std::size_t n_levels = 0, n_expected = 0;
    double max_energy_err_kHz = 0.0;
    double max_dd_rel_err = 0.0;
    std::size_t energy_failures = 0, dd_failures = 0;
};

// Compares computed levels to a table, both ordered by decreasing energy.
// Rows whose printed value has fewer significant figures than the relative
// tolerance allows are checked against half a unit in the last printed digit.
inline GoldenCheck check_golden(const GoldenTable& t, double energy_tol_kHz = 0.3) {
    const auto spec = molecule(t.molecule);
    const auto lv = ds::hyperfine_levels(spec, ds::units::kV_cm(t.field_kV_cm), {1, 0});
    std::vector<GoldenLevel> exp;
    for (const auto& r : t.rows)
        for (int k = 0; k < r.multiplicity; ++k) exp.push_back(r);
    GoldenCheck out;
    out.n_levels = lv.size();
    out.n_expected = exp.size();
    if (lv.size() != exp.size()) return out;
    for (std::size_t k = 0; k < lv.size(); ++k) {
        const double e = ds::units::as_kHz(lv[k].energy_rel);
        const double de = std::abs(e - exp[k].energy_kHz);
        out.max_energy_err_kHz = std::max(out.max_energy_err_kHz, de);
        if (de > energy_tol_kHz) ++out.energy_failures;
        const double rel = std::abs(lv[k].delta_d - exp[k].delta_d) / std::abs(exp[k].delta_d);
        out.max_dd_rel_err = std::max(out.max_dd_rel_err, rel);
        if (rel > t.dd_rel_tol) ++out.dd_failures;
    }
    return out;
}

// ---- spin-1/2 toy molecule ----

inline ds::MoleculeSpec toy_spin_half() {
    auto s = molecule("Na39K");
    s.name = "toy-spin-half";
    s.iA = ds::HalfInt::from_twice(1);
    s.iB = ds::HalfInt::from_twice(1);
    s.eQq_A = 0.0;
    s.eQq_B = 0.0;
    s.c3 = ds::units::MHz(1.0);
    return s;
}

}  // namespace support
