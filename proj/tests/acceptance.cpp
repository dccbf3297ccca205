// Acceptance runner: one PASS / FAIL / SOFT-FAIL line per criterion.
// Exit status is nonzero only when a criterion FAILs.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "support.hpp"

namespace ds = dimershield;
using namespace support;

namespace {

enum class Status { pass, fail, soft_fail };

struct Outcome {
    Status status = Status::fail;
    std::string detail;
};

const char* status_name(Status s) {
    switch (s) {
        case Status::pass: return "PASS";
        case Status::soft_fail: return "SOFT-FAIL";
        default: return "FAIL";
    }
}

std::string num(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

// ---- 1: hyperfine goldens ----

Outcome hyperfine_goldens() {
    bool ok = true;
    std::ostringstream os;
    for (const auto& t : golden_tables()) {
        const auto c = check_golden(t);
        const bool good = c.n_levels == c.n_expected && c.energy_failures == 0 && c.dd_failures == 0;
        ok = ok && good;
        os << t.molecule << ": " << c.n_levels << "/" << c.n_expected << " levels, max |dE| "
           << num(c.max_energy_err_kHz, 3) << " kHz (tol 0.3), max dd rel " << num(c.max_dd_rel_err, 3)
           << " (tol " << t.dd_rel_tol << "); ";
    }
    return verdict(ok, os.str());
}

// ---- 2: angular algebra against quadrature ----

Outcome angular_oracle() {
    ds::MoleculeSpec sp;
    sp.name = "unit-rotor";
    sp.mass = 1e5;
    sp.b = 1e-6;
    sp.mu = 1.0;
    ds::MonomerModel m(sp, 0.0, 4, 4, false);
    ds::PairCoupling pc(m);
    std::mt19937 rng(20240611);
    auto pick = [&](int n_max) {
        const int n = static_cast<int>(rng() % (n_max + 1));
        return ds::RotorLabel{n, static_cast<int>(rng() % (2 * n + 1)) - n};
    };
    auto neighbour = [&](ds::RotorLabel x) {
        const int n = x.n_tilde + ((x.n_tilde == 0 || rng() % 2) ? 1 : -1);
        int mm = x.m_n + static_cast<int>(rng() % 3) - 1;
        if (std::abs(mm) > n) mm = 0;
        return ds::RotorLabel{n, mm};
    };
    double err_dd = 0.0, err_c2 = 0.0;
    int nonzero = 0;
    for (int t = 0; t < 200; ++t) {
        const auto a = pick(3), b = pick(3);
        const auto ap = neighbour(a), bp = neighbour(b);
        const int L = static_cast<int>(rng() % 6);
        const int M = static_cast<int>(rng() % (2 * L + 1)) - L;
        const int Mp = M + (a.m_n + b.m_n) - (ap.m_n + bp.m_n);
        int Lp = L + 2 * (static_cast<int>(rng() % 3) - 1);
        if (Lp < 0) Lp = L;
        while (std::abs(Mp) > Lp) Lp += 2;
        const double code = pc.dd_primitive(m.rotor_index(a), m.rotor_index(b), L, M, m.rotor_index(ap),
                                            m.rotor_index(bp), Lp, Mp);
        if (code != 0.0) ++nonzero;
        err_dd = std::max(err_dd, std::abs(code - dd_quadrature(a, b, L, M, ap, bp, Lp, Mp)));
    }
    for (int t = 0; t < 200; ++t) {
        const int l = static_cast<int>(rng() % 7);
        const int m1 = static_cast<int>(rng() % (2 * l + 1)) - l;
        const int q = static_cast<int>(rng() % 5) - 2;
        int lp = l + static_cast<int>(rng() % 5) - 2;
        if (lp < 0) lp = l;
        int mp = m1 - q;
        while (std::abs(mp) > lp) lp += 2;
        const double code = ds::angular::spherical_c(l, m1, 2, q, lp, mp);
        err_c2 = std::max(err_c2, std::abs(code - c2_quadrature(l, m1, q, lp, mp)));
    }
    const bool ok = err_dd <= 1e-10 && err_c2 <= 1e-10 && nonzero > 50;
    return verdict(ok, "200 dipole-dipole (" + std::to_string(nonzero) + " nonzero) max err " + num(err_dd, 3) +
                           "; 200 rank-2 max err " + num(err_c2, 3) + " (tol 1e-10)");
}

// ---- 3: propagator ----

double square_well_alpha(double mu, double V0, double R0, double E, double h) {
    auto U = [&](double R, Eigen::MatrixXd& u) {
        u.resize(1, 1);
        u(0, 0) = 2.0 * mu * ((R <= R0 ? -V0 : 0.0) - E);
    };
    const int n = static_cast<int>(std::round(R0 / h));
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) g.push_back(1e-9 + (R0 - 1e-9) * i / n);
    const auto Y = ds::propagate(U, ds::reflecting_init(1, 1e15), g);
    ds::ChannelSet cs;
    cs.asym.T = Eigen::MatrixXd::Identity(1, 1);
    cs.asym.energy = Eigen::VectorXd::Zero(1);
    cs.asym.L = {0};
    cs.asym.M_L = {0};
    cs.incoming = {0};
    return ds::extract_smatrix(Y, ds::WMatrices::zero(1), cs, E, mu, R0).alpha();
}

ds::ScanConfig small_nak() {
    ds::ScanConfig c;
    c.spec = molecule("Na39K");
    c.N_rot = 4;
    c.L_max = 4;
    c.n_tilde_max = 3;
    c.all_partial_waves = false;
    return c;
}

Outcome propagator_checks() {
    std::ostringstream os;
    bool ok = true;
    // (a) square well at finite energy
    {
        const double mu = 1.0, V0 = 2.0, R0 = 5.0, E = 1e-6;
        const double k = std::sqrt(2 * mu * E), kin = std::sqrt(2 * mu * (E + V0));
        const double delta = std::atan(k / kin * std::tan(kin * R0)) - k * R0;
        const double exact = -std::tan(delta) / k;
        const double a = square_well_alpha(mu, V0, R0, E, 1e-3);
        const double rel = std::abs(a / exact - 1.0);
        ok = ok && rel <= 1e-6;
        os << "(a) square well rel err " << num(rel, 3) << " (tol 1e-6); ";
    }
    const double F = ds::units::kV_cm(7.1), E = ds::units::nK(10);
    // (b) unitarity without absorption
    {
        auto c = small_nak();
        c.prop.absorbing = false;
        const auto r = ds::run_point(ds::setup_block(c, F), c, E);
        double dev = 1.0;
        if (r.ok) {
            const auto& S = r.result.S;
            dev = (S.adjoint() * S - Eigen::MatrixXcd::Identity(S.rows(), S.cols())).cwiseAbs().maxCoeff();
        }
        ok = ok && r.ok && dev <= 1e-8;
        os << "(b) |S^+S - 1| " << num(dev, 3) << " over " << (r.ok ? r.result.S.rows() : 0)
           << " open channels (tol 1e-8); ";
    }
    // (c) absorption bounds
    double alpha_ref = 0.0;
    {
        auto c = small_nak();
        const auto r = ds::run_point(ds::setup_block(c, F), c, E);
        double smax = 2.0;
        if (r.ok) {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r.result.S);
            smax = svd.singularValues().maxCoeff();
            alpha_ref = r.result.alpha();
        }
        ok = ok && r.ok && smax <= 1.0 + 1e-8;
        os << "(c) max singular value " << num(smax, 12) << " (tol 1 + 1e-8); ";
    }
    // (d) halved steps
    {
        auto c = small_nak();
        c.prop.inner_step *= 0.5;
        c.prop.outer_ratio *= 0.5;
        const auto r = ds::run_point(ds::setup_block(c, F), c, E);
        const double rel = r.ok ? std::abs(r.result.alpha() / alpha_ref - 1.0) : 1.0;
        ok = ok && r.ok && rel < 1e-3;
        os << "(d) alpha " << num(alpha_ref, 8) << " -> " << (r.ok ? num(r.result.alpha(), 8) : "error")
           << " rel change " << num(rel, 3) << " (tol 1e-3)";
    }
    return verdict(ok, os.str());
}

// ---- 4: Van Vleck scaling ----

// Relative error of the folded lowest eigenvalue against the second-order
// shift, for a 2 + 4 channel family with coupling only between classes. The
// exact eigenvalue is the one correlating with the folded level.
double fold_relative_error(const Eigen::VectorXd& E1, const Eigen::VectorXd& E2, const Eigen::MatrixXd& V,
                           double lambda) {
    ds::FoldInput in;
    in.class1 = ds::WMatrices::zero(2);
    in.class1.W0 = E1.asDiagonal();
    in.W0_12 = lambda * V;
    in.W3_12 = Eigen::MatrixXd::Zero(2, 4);
    in.E2 = E2;
    ds::FoldOptions fo;
    fo.E_ref = E1.minCoeff();
    fo.check_gap = false;
    const auto W = ds::van_vleck_fold(in, fo);
    const double e_fold = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(W.W0).eigenvalues().minCoeff();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(6, 6);
    H.topLeftCorner(2, 2) = E1.asDiagonal();
    H.bottomRightCorner(4, 4) = E2.asDiagonal();
    H.topRightCorner(2, 4) = lambda * V;
    H.bottomLeftCorner(4, 2) = lambda * V.transpose();
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues();
    Eigen::Index k;
    (ev.array() - e_fold).abs().minCoeff(&k);
    const double e_exact = ev(k);
    return std::abs(e_fold - e_exact) / std::abs(e_fold - E1.minCoeff());
}

Outcome van_vleck_scaling() {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::ostringstream os;
    bool ok = true;
    for (int member = 0; member < 5; ++member) {
        Eigen::VectorXd E1(2), E2(4);
        E1 << 0.0, 0.3 + 0.2 * std::abs(u(rng));
        for (int k = 0; k < 4; ++k) E2(k) = (k % 2 ? -1.0 : 1.0) * (1.0 + 2.0 * std::abs(u(rng)));
        Eigen::MatrixXd V(2, 4);
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 4; ++k) V(i, k) = u(rng);
        const double gap = E2.cwiseAbs().minCoeff();
        std::vector<double> x, y;
        for (int s = 0; s <= 8; ++s) {
            const double lambda = gap * std::pow(10.0, -3.0 + 2.0 * s / 8.0) / V.cwiseAbs().maxCoeff();
            x.push_back(std::log(lambda * V.cwiseAbs().maxCoeff() / gap));
            y.push_back(std::log(fold_relative_error(E1, E2, V, lambda)));
        }
        const double n = static_cast<double>(x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            sx += x[k];
            sy += y[k];
            sxx += x[k] * x[k];
            sxy += x[k] * y[k];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        ok = ok && std::abs(slope - 2.0) <= 0.1;
        os << (member ? ", " : "log-log slopes ") << num(slope, 4);
    }
    os << " (target 2.0 +/- 0.1)";
    return verdict(ok, os.str());
}

// ---- 5: spin-free shielding rates ----

Outcome shielding_rates() {
    ds::ScanConfig c;
    c.spec = molecule("Na39K");
    c.N_rot = 14;
    c.L_max = 20;
    c.n_tilde_max = 5;
    const double E = ds::units::nK(10);
    const auto hi = ds::summed_rates(c, ds::units::kV_cm(7.1), E, 4);
    const auto lo = ds::summed_rates(c, ds::units::kV_cm(6.6), E, 4);
    if (!hi.ok || !lo.ok) return {Status::fail, "a block failed to run"};
    const double el = ds::units::as_cm3_s(hi.rate_el);
    const double loss71 = ds::units::as_cm3_s(hi.rate_total_loss());
    const double loss66 = ds::units::as_cm3_s(lo.rate_total_loss());
    const bool c1 = el / loss71 >= 1e4;
    const bool c2 = loss66 / loss71 >= 1e2;
    const bool c3 = el >= 1e-10 / 3.0 && el <= 3e-10;
    std::ostringstream os;
    os << "7.1 kV/cm: elastic " << num(el) << " cm3/s, total loss " << num(loss71) << " (ratio " << num(el / loss71)
       << ", need >= 1e4) " << (c1 ? "ok" : "no") << "; 6.6 kV/cm loss " << num(loss66) << " (ratio "
       << num(loss66 / loss71) << ", need >= 1e2) " << (c2 ? "ok" : "no") << "; elastic vs 1e-10 factor "
       << num(std::max(el / 1e-10, 1e-10 / el), 3) << " (need <= 3) " << (c3 ? "ok" : "no")
       << "; alpha0 " << num(hi.alpha, 6) << " bohr";
    if (!c1 || !c2) return {Status::fail, os.str()};
    if (!c3) return {Status::soft_fail, os.str() + "; elastic magnitude set by alpha0, see decision notes"};
    return {Status::pass, os.str()};
}

// ---- 6: semiclassical closure ----

Outcome semiclassical_closure() {
    const double mu = 56467.0;
    const double I = twelve_four_phase_constant();
    std::mt19937 rng(606);
    std::uniform_real_distribution<double> pick_rt(200.0, 2000.0), pick_phi(15.0, 40.0);
    double worst = 0.0, worst_phi_err = 0.0;
    int n = 0;
    while (n < 20) {
        const double R_t = pick_rt(rng), Phi = pick_phi(rng);
        if (std::abs(std::tan(Phi - M_PI / 4.0)) >= 5.0) continue;
        const double beta = Phi * R_t / I;
        const double D = beta / ds::sqrt_8_15;
        const double C4 = beta * beta / (2.0 * mu);
        const double Rt8 = std::pow(R_t, 8);
        auto V = [&](double R) { return C4 / std::pow(R, 4) * (Rt8 / std::pow(R, 8) - 1.0); };
        const auto breaks = ds::log_grid(R_t, 1e3 * R_t, 200);
        const double phi_lib = ds::phase_integral(V, R_t, breaks, mu).Phi;
        worst_phi_err = std::max(worst_phi_err, std::abs(phi_lib - Phi) / Phi);
        const double model = ds::alpha_from_phi(R_t, D, phi_lib);
        const double exact = twelve_four_alpha(mu, R_t, beta);
        worst = std::max(worst, std::abs(model - exact) / std::max(std::abs(exact), beta));
        ++n;
    }
    const bool ok = worst <= 0.05 && worst_phi_err <= 1e-6;
    return verdict(ok, "20 wells, Phi in [15, 40], |tan| < 5: max |da| / max(|a|, beta) " + num(worst, 3) +
                           " (tol 0.05); phase integral rel err " + num(worst_phi_err, 3));
}

// ---- 7: delta-alpha linearity ----

Outcome delta_alpha_linearity() {
    ds::ScanConfig c;
    c.spec = toy_spin_half();
    c.N_rot = 4;
    c.L_max = 4;
    c.n_tilde_max = 3;
    c.all_partial_waves = false;
    const double F = ds::units::kV_cm(7.1), E = ds::units::nK(10);
    const auto levels = ds::hyperfine_levels(c.spec, F, c.manifold);

    ds::ScanConfig c0 = c;
    c0.spin = ds::SpinSelection::spin_free();
    const auto blk0 = ds::setup_block(c0, F);
    const auto r0 = ds::run_point(blk0, c0, E);
    if (!r0.ok) return {Status::fail, "spin-free block: " + r0.error};
    const double alpha0 = r0.result.alpha();

    c.spin = ds::SpinSelection::full();
    std::vector<double> x, y;
    for (int i = 0; i < static_cast<int>(levels.size()); ++i)
        for (int j = i; j < static_cast<int>(levels.size()); ++j) {
            c.state1 = i;
            c.state2 = j;
            const auto r = ds::run_point(ds::setup_block(c, F), c, E);
            if (!r.ok) return {Status::fail, "pair " + std::to_string(i) + "," + std::to_string(j) + ": " + r.error};
            x.push_back(levels[i].delta_d + levels[j].delta_d);
            y.push_back(r.result.alpha() - alpha0);
        }
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k] / n;
        my += y[k] / n;
    }
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    const double slope = sxy / sxx;
    const double r2 = sxy * sxy / (sxx * syy);

    const auto& model = *blk0.model;
    const double mu = c.spec.reduced_mass();
    const double d = model.rotors()[model.rotor_index(c.manifold)].d;
    const double D0 = ds::dipole_length(d, d, mu);
    const auto ia = ds::incoming_adiabat(blk0, ds::log_grid(c.prop.R_min, 2e4, 600));
    const auto pi = ds::phase_integral(ia.curve, mu, ia.E_threshold);
    if (!pi.has_well) return {Status::fail, "no attractive well on the spin-free adiabat"};
    const auto mi = ds::model_inputs(alpha0, pi.R_t, D0, pi.Phi);
    const double model_slope = D0 * ds::da_dD(mi.alpha0, mi.R_t0, mi.D0, mi.Phi0);
    const double ratio = model_slope / slope;
    const bool ok = r2 >= 0.999 && ratio >= 1.0 / 3.0 && ratio <= 3.0;
    return verdict(ok, std::to_string(x.size()) + " spin pairs, R^2 " + num(r2, 6) + " (need >= 0.999), slope " +
                           num(slope) + " bohr, model D0 da/dD " + num(model_slope) + " bohr, ratio " +
                           num(ratio, 3) + " (need within a factor of 3); alpha0 " + num(alpha0, 6));
}

// ---- 8: rate scaling ----

Outcome scaling_law() {
    const auto nak = molecule("Na39K"), narb = molecule("Na87Rb"), nacs = molecule("NaCs");
    const double r1 = ds::rate_scaling(nak, narb), r2 = ds::rate_scaling(nak, nacs);
    const bool ok = r1 >= 1000.0 / 3.0 && r1 <= 3000.0 && r2 >= 10.0 / 3.0 && r2 <= 30.0;
    return verdict(ok, "NaRb/NaK " + num(r1) + " (target 1000), NaCs/NaK " + num(r2) + " (target 10)");
}

// ---- 9: basis counts ----

Outcome basis_counts() {
    struct Target {
        std::string molecule;
        double F_kV_cm;
        std::size_t full, mfr1;
    };
    const std::vector<Target> targets{{"Na39K", 7.1, 3224, 1110}, {"NaCs", 2.5, 12848, 1818}};
    const auto pair = ds::RotorPair::make({1, 0}, {1, 0});
    bool exact = true;
    std::ostringstream os;
    for (const auto& t : targets) {
        const auto spec = molecule(t.molecule);
        ds::MonomerModel model(spec, ds::units::kV_cm(t.F_kV_cm), ds::default_n_max, 3, true);
        const auto sel = ds::select_class1(model, pair, 14);
        const std::set<ds::RotorPair> pairs(sel.begin(), sel.end());
        const auto full = ds::count_internal_pairs(model, pairs, ds::SpinSelection::full());
        const auto mfr = ds::count_internal_pairs(model, pairs, ds::SpinSelection::mfr(1));
        exact = exact && full == t.full && mfr == t.mfr1;
        os << t.molecule << " full " << full << " (target " << t.full << "), MFR1 " << mfr << " (target " << t.mfr1
           << "); ";
    }
    if (exact) return {Status::pass, os.str()};
    const auto report = std::filesystem::path(DIMERSHIELD_SOURCE_DIR) / "docs" / "basis_counts.md";
    if (!std::filesystem::exists(report)) return {Status::fail, os.str() + "deviation without docs/basis_counts.md"};
    return {Status::soft_fail, os.str() + "deviation analysed in docs/basis_counts.md"};
}

// ---- 10: NaRb pole structure ----

Outcome narb_poles() {
    ds::ScanConfig c;
    c.spec = molecule("Na87Rb");
    c.N_rot = 14;
    c.L_max = 20;
    c.n_tilde_max = 5;
    c.all_partial_waves = false;
    const double E = ds::units::nK(10);
    std::vector<double> fields, alpha;
    for (int k = 0; k <= 12; ++k) fields.push_back(4.2 + 0.05 * k);
    std::ostringstream os;
    os << "alpha0(F):";
    for (double f : fields) {
        const auto r = ds::run_point(ds::setup_block(c, ds::units::kV_cm(f)), c, E);
        if (!r.ok) return {Status::fail, "F = " + num(f) + ": " + r.error};
        alpha.push_back(r.result.alpha());
        os << " " << num(f, 3) << ":" << num(alpha.back(), 4);
    }
    int crossings = 0;
    for (std::size_t k = 0; k + 1 < alpha.size(); ++k)
        if (alpha[k] * alpha[k + 1] < 0 && std::abs(alpha[k]) > 5000 && std::abs(alpha[k + 1]) > 5000) ++crossings;
    os << "; pole-like sign changes " << crossings;
    return verdict(crossings >= 1, os.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<int> only;
    app.add_option("--only", only, "criterion numbers to run");
    CLI11_PARSE(app, argc, argv);

    const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
        {1, {"hyperfine goldens", hyperfine_goldens}},
        {2, {"angular algebra oracle", angular_oracle}},
        {3, {"propagator validation", propagator_checks}},
        {4, {"Van Vleck scaling", van_vleck_scaling}},
        {5, {"spin-free shielding rates", shielding_rates}},
        {6, {"semiclassical closure", semiclassical_closure}},
        {7, {"delta-alpha linearity", delta_alpha_linearity}},
        {8, {"rate scaling law", scaling_law}},
        {9, {"basis-count targets", basis_counts}},
        {10, {"NaRb pole structure", narb_poles}},
    };
    int failures = 0;
    for (const auto& [id, entry] : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Outcome o;
        try {
            o = entry.second();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        if (o.status == Status::fail) ++failures;
        std::printf("criterion %d [%s] %s: %s\n", id, entry.first.c_str(), status_name(o.status), o.detail.c_str());
        std::fflush(stdout);
    }
    return failures ? 1 : 0;
}
