#pragma once

// Per-field block setup and field/energy scans over the work pool.

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dimershield/coupling.hpp"
#include "dimershield/monomer.hpp"
#include "dimershield/pairbasis.hpp"
#include "dimershield/propagator.hpp"

namespace dimershield {

struct ScanConfig {
    MoleculeSpec spec;
    std::vector<double> fields;    // au
    std::vector<double> energies;  // collision energies, au
    SpinSelection spin;            // mode and window; initial m_f filled in from the incoming states
    int L_max = 20;
    int N_rot = 14;
    std::optional<int> eta;        // defaults to the molecule's statistics
    int n_max = default_n_max;
    int n_tilde_max = default_n_max;
    RotorLabel manifold{1, 0};
    int state1 = 0, state2 = 0;    // hyperfine levels of the manifold, highest energy first
    std::optional<HalfInt> M_tot;  // defaults to the block holding the incoming s (or p) wave
    bool all_partial_waves = true; // treat every incoming partial wave, not only the lowest
    PropagatorOptions prop;
    double barrier_radius = 300.0;
    double gap_factor = 10.0;
    int threads = 1;
};

// Everything needed to run scattering calculations in one block at one field.
struct BlockSetup {
    double F = 0.0;
    std::shared_ptr<MonomerModel> model;
    BasisPartition partition;
    WMatrices W;  // over partition.class1, folded
    std::vector<Eigen::VectorXd> incoming;  // one pair state per incoming partial wave
    bool identical = false;
    int L_in = 0;
    HalfInt M_tot;
    std::string basis_name;
    std::size_t n_channels() const { return partition.class1.size(); }
};

inline BlockSetup setup_block(const ScanConfig& cfg, double F, Diagnostics* diag = nullptr) {
    BlockSetup blk;
    blk.F = F;
    const bool spin = cfg.spin.mode != SpinMode::spin_free;
    blk.model = std::make_shared<MonomerModel>(cfg.spec, F, cfg.n_max, cfg.n_tilde_max, spin);
    const auto& model = *blk.model;
    const int eta = cfg.eta.value_or(cfg.spec.eta);

    Eigen::VectorXd v1, v2;
    HalfInt mf1, mf2;
    if (spin) {
        const auto levels = manifold_levels(model, cfg.manifold);
        const int nl = static_cast<int>(levels.size());
        if (cfg.state1 < 0 || cfg.state1 >= nl || cfg.state2 < 0 || cfg.state2 >= nl)
            throw ConfigError("incoming state index out of range (" + std::to_string(nl) + " levels)");
        v1 = levels[cfg.state1].vector;
        v2 = levels[cfg.state2].vector;
        mf1 = levels[cfg.state1].m_f;
        mf2 = levels[cfg.state2].m_f;
        blk.identical = cfg.state1 == cfg.state2;
    } else {
        const int idx = model.product_index(model.rotor_index(cfg.manifold), 0);
        v1 = v2 = Eigen::VectorXd::Unit(model.size(), idx);
        mf1 = mf2 = HalfInt::integer(cfg.manifold.m_n);
        blk.identical = true;
    }
    const int parity = (blk.identical && eta == -1) ? 1 : 0;
    blk.M_tot = cfg.M_tot.value_or(mf1 + mf2);
    if (!(blk.M_tot - mf1 - mf2).is_integer())
        throw ConfigError("M_tot " + blk.M_tot.str() + " is not reachable from the incoming states");
    const int M_L = (blk.M_tot - mf1 - mf2).twice / 2;
    blk.L_in = std::abs(M_L) + ((std::abs(M_L) % 2) != parity ? 1 : 0);
    if (blk.L_in > cfg.L_max)
        throw ConfigError("M_tot " + blk.M_tot.str() + " needs L > L_max for the incoming states");

    BasisOptions bo;
    bo.L_max = cfg.L_max;
    bo.M_tot = blk.M_tot;
    bo.eta = eta;
    bo.spin = cfg.spin;
    bo.spin.mf_init1 = mf1;
    bo.spin.mf_init2 = mf2;
    bo.L_parity = blk.L_in % 2;
    const auto basis = enumerate_basis(model, bo, diag);

    const auto pair = RotorPair::make(cfg.manifold, cfg.manifold);
    auto in_fn = std::find_if(basis.begin(), basis.end(), [&](const PairFunction& f) {
        return f.rotor_pair() == pair && f.L == blk.L_in && f.M_L == M_L;
    });
    if (in_fn == basis.end()) throw ConfigError("incoming channel not present in the basis");
    blk.partition = partition_class1(model, basis, *in_fn, cfg.N_rot, diag);

    PairCoupling pc(model);
    FoldOptions fo;
    fo.E_ref = v1.dot(model.hamiltonian() * v1) + v2.dot(model.hamiltonian() * v2);
    fo.barrier_radius = cfg.barrier_radius;
    fo.gap_factor = cfg.gap_factor;
    blk.W = assemble_folded(pc, blk.partition, fo);
    const int L_last = cfg.all_partial_waves ? cfg.L_max : blk.L_in;
    for (int L = blk.L_in; L <= L_last; L += 2)
        blk.incoming.push_back(incoming_pair_state(blk.partition.class1, v1, v2, L, M_L, eta));
    blk.basis_name = basis_name(spin, blk.partition.N_pair(), cfg.L_max);
    return blk;
}

struct ScanRow {
    double F = 0.0;
    double E_coll = 0.0;
    HalfInt M_tot;
    bool ok = false;
    std::string error;
    ScatteringResult result;
    std::size_t n_channels = 0;
    std::string basis_name;
    double seconds = 0.0;
    std::vector<std::string> warnings;
};

inline ScanRow run_point(const BlockSetup& blk, const ScanConfig& cfg, double E_coll) {
    ScanRow row;
    row.F = blk.F;
    row.E_coll = E_coll;
    row.M_tot = blk.M_tot;
    row.n_channels = blk.n_channels();
    row.basis_name = blk.basis_name;
    const auto t0 = std::chrono::steady_clock::now();
    Diagnostics diag;
    try {
        row.result = scatter(blk.W, blk.partition.class1, blk.incoming, blk.identical, E_coll,
                             cfg.spec.reduced_mass(), cfg.prop, &diag);
        row.ok = true;
    } catch (const Error& e) {
        row.error = e.what();
    }
    row.warnings = diag.warnings;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

// Rows ordered by field, then energy. Failures are recorded per row.
inline std::vector<ScanRow> field_scan(const ScanConfig& cfg) {
    if (cfg.fields.empty() || cfg.energies.empty()) throw ConfigError("scan needs fields and energies");
    const std::size_t nf = cfg.fields.size(), ne = cfg.energies.size();
    std::vector<std::optional<BlockSetup>> blocks(nf);
    std::vector<std::string> setup_error(nf);
    parallel_for(nf, cfg.threads, [&](std::size_t i) {
        try {
            blocks[i] = setup_block(cfg, cfg.fields[i]);
        } catch (const Error& e) {
            setup_error[i] = e.what();
        }
    });
    std::vector<ScanRow> rows(nf * ne);
    parallel_for(nf * ne, cfg.threads, [&](std::size_t t) {
        const std::size_t i = t / ne, j = t % ne;
        if (!blocks[i]) {
            rows[t].F = cfg.fields[i];
            rows[t].E_coll = cfg.energies[j];
            rows[t].error = setup_error[i];
            return;
        }
        rows[t] = run_point(*blocks[i], cfg, cfg.energies[j]);
    });
    return rows;
}

// Adiabat that correlates with the lowest incoming channel of a block,
// with its threshold energy.
struct IncomingAdiabat {
    AdiabatCurve curve;
    double E_threshold = 0.0;
};

inline IncomingAdiabat incoming_adiabat(const BlockSetup& blk, const std::vector<double>& R_grid) {
    const ChannelSet cs = prepare_channels(blk.W, blk.partition.class1, blk.incoming, blk.identical);
    const auto tracks = adiabats(blk.W, R_grid, &cs.asym);
    return {adiabat_for_channel(tracks, cs.incoming.front()), cs.E_incoming};
}

// Rates summed over M_tot blocks 0..M_max; blocks with M_tot != 0 stand for
// both signs.
struct BlockSum {
    double F = 0.0, E_coll = 0.0;
    double rate_el = 0.0, rate_loss = 0.0, rate_inel = 0.0;  // atomic units
    double alpha = 0.0, beta = 0.0;                           // lowest partial wave of the first block
    std::vector<ScanRow> rows;
    bool ok = true;
    double rate_total_loss() const { return rate_loss + rate_inel; }
};

inline BlockSum summed_rates(ScanConfig cfg, double F, double E_coll, int M_max) {
    if (M_max < 0) throw ConfigError("M_max must be non-negative");
    BlockSum out;
    out.F = F;
    out.E_coll = E_coll;
    cfg.all_partial_waves = true;
    std::vector<std::optional<ScanRow>> rows(M_max + 1);
    parallel_for(rows.size(), cfg.threads, [&](std::size_t m) {
        ScanConfig c = cfg;
        c.threads = 1;
        c.M_tot = HalfInt::integer(static_cast<int>(m));
        try {
            rows[m] = run_point(setup_block(c, F), c, E_coll);
        } catch (const Error& e) {
            ScanRow r;
            r.F = F;
            r.E_coll = E_coll;
            r.M_tot = *c.M_tot;
            r.error = e.what();
            rows[m] = r;
        }
    });
    for (std::size_t m = 0; m < rows.size(); ++m) {
        const auto& r = *rows[m];
        out.rows.push_back(r);
        if (!r.ok) {
            out.ok = false;
            continue;
        }
        const double w = m == 0 ? 1.0 : 2.0;
        out.rate_el += w * r.result.rate_el_all;
        out.rate_loss += w * r.result.rate_loss_all;
        out.rate_inel += w * r.result.rate_inel_all;
        if (m == 0) {
            out.alpha = r.result.alpha();
            out.beta = r.result.beta();
        }
    }
    return out;
}

}  // namespace dimershield
