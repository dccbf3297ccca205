#pragma once

// Semiclassical scattering-length model for a shielded R^-4 well and the
// spin-changing rate scaling between molecules.

#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dimershield/coupling.hpp"
#include "dimershield/error.hpp"
#include "dimershield/molecule.hpp"

namespace dimershield {

inline const double sqrt_8_15 = std::sqrt(8.0 / 15.0);

// d1 d2 mu_red in atomic units (hbar = 4 pi eps0 = 1).
inline double dipole_length(double d1, double d2, double mu_red) { return d1 * d2 * mu_red; }

inline double alpha_from_phi(double R_t, double D, double Phi) {
    const double x = Phi - M_PI / 4.0;
    if (std::abs(std::cos(x)) < 1e-9) throw PoleError("phase at a pole of tan(Phi - pi/4)");
    return R_t - sqrt_8_15 * D * std::tan(x);
}

// Branch of the inverse nearest to branch_hint.
inline double phi_from_alpha(double alpha0, double R_t, double D, double branch_hint) {
    if (D == 0.0) throw ConfigError("dipole length must be nonzero");
    const double base = M_PI / 4.0 + std::atan((R_t - alpha0) / (sqrt_8_15 * D));
    const double n = std::round((branch_hint - base) / M_PI);
    return base + n * M_PI;
}

inline bool model_valid(double Phi, double limit = 10.0) {
    return std::abs(std::tan(Phi - M_PI / 4.0)) <= limit;
}

struct PhaseIntegral {
    double Phi = 0.0;
    double R_t = 0.0;
    bool has_well = false;
    double tail = 0.0;  // part beyond the last grid point
};

// Integral of sqrt(2 mu max(-V, 0)) over [R_t, R_end] on the given breakpoints,
// plus an analytic -C4/R^4 tail fitted at R_end.
inline PhaseIntegral phase_integral(const std::function<double(double)>& V, double R_t,
                                    const std::vector<double>& breaks, double mu, bool add_tail = true) {
    PhaseIntegral out;
    out.R_t = R_t;
    auto f = [&](double R) {
        const double v = V(R);
        return v < 0.0 ? std::sqrt(-2.0 * mu * v) : 0.0;
    };
    std::vector<double> pts{R_t};
    for (double b : breaks)
        if (b > R_t) pts.push_back(b);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, pts[i], pts[i + 1], 10, 1e-9);
    if (add_tail && pts.size() > 1) {
        const double Rl = pts.back();
        const double v = V(Rl);
        if (v < 0.0) out.tail = std::sqrt(-2.0 * mu * v) * Rl;  // int sqrt(2 mu C4)/R^2 from Rl
    }
    out.Phi = sum + out.tail;
    out.has_well = out.Phi > 0.0;
    return out;
}

// Zero-energy phase integral over an adiabat, energies relative to E_ref.
inline PhaseIntegral phase_integral(const AdiabatCurve& adiabat, double mu, double E_ref) {
    AdiabatInterpolant spline(adiabat);
    auto V = [&](double R) { return spline(R) - E_ref; };
    double R_t;
    try {
        R_t = turning_point(V, adiabat.R_grid, 0.0);
    } catch (const NoBarrierError&) {
        return {};
    }
    return phase_integral(V, R_t, adiabat.R_grid, mu);
}

inline double da_dD(double a, double R_t, double D, double Phi) {
    const double x = Phi - M_PI / 4.0;
    const double c = std::cos(x);
    if (std::abs(c) < 1e-9) throw PoleError("phase at a pole of tan(Phi - pi/4)");
    return (a - 2.0 * R_t) / D - 2.0 * Phi * sqrt_8_15 / (c * c);
}

struct ModelInputs {
    double alpha0 = 0.0;
    double R_t0 = 0.0;
    double D0 = 0.0;
    double Phi0 = 0.0;
};

inline double delta_alpha(const ModelInputs& m, double delta_d_j, double delta_d_jp) {
    if (delta_d_j == 0.0 && delta_d_jp == 0.0) return 0.0;
    return m.D0 * (delta_d_j + delta_d_jp) * da_dD(m.alpha0, m.R_t0, m.D0, m.Phi0);
}

// Builds model inputs from a spin-free scattering length, turning point and
// phase-integral branch estimate.
inline ModelInputs model_inputs(double alpha0, double R_t0, double D0, double phi_estimate) {
    if (!(D0 > 0.0)) throw ConfigError("spin-free dipole length must be positive");
    if (!(R_t0 > 0.0)) throw ConfigError("turning point must be positive");
    ModelInputs m;
    m.alpha0 = alpha0;
    m.R_t0 = R_t0;
    m.D0 = D0;
    m.Phi0 = phi_from_alpha(alpha0, R_t0, D0, phi_estimate);
    return m;
}

// m^{5/2} mu^4 (eQq)_max^{5/2} / b^2
inline double rate_scaling_factor(const MoleculeSpec& s) {
    if (!(s.b > 0.0)) throw ConfigError(s.name + ": rotational constant must be positive");
    const double q = std::max(std::abs(s.eQq_A), std::abs(s.eQq_B));
    return std::pow(s.mass, 2.5) * std::pow(s.mu, 4) * std::pow(q, 2.5) / (s.b * s.b);
}

// Expected spin-changing rate of B relative to A.
inline double rate_scaling(const MoleculeSpec& a, const MoleculeSpec& b) {
    return rate_scaling_factor(b) / rate_scaling_factor(a);
}

}  // namespace dimershield
