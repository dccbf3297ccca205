// dimershield: batch front-end for monomer tables, adiabats, scattering scans,
// the semiclassical model and rate scaling.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dimershield/dimershield.hpp"
#include "dimershield/report.hpp"

namespace ds = dimershield;
using ds::report::fmt;
using nlohmann::json;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

std::vector<std::filesystem::path> data_dirs() {
#ifdef DIMERSHIELD_DATA_DIR
    return {DIMERSHIELD_DATA_DIR};
#else
    return {};
#endif
}

double parse_number(const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ds::ConfigError("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw ds::ConfigError("not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep))
        if (!part.empty()) out.push_back(part);
    return out;
}

// Values from "a,b,c" items or "range:start:stop:step" (stop included).
std::vector<double> parse_values(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const auto& item : items) {
        if (item.rfind("range:", 0) == 0) {
            const auto p = split(item.substr(6), ':');
            if (p.size() != 3) throw ds::ConfigError("range needs start:stop:step, got '" + item + "'");
            const double a = parse_number(p[0]), b = parse_number(p[1]), st = parse_number(p[2]);
            if (!(st > 0) || b < a) throw ds::ConfigError("bad range '" + item + "'");
            const long n = std::lround(std::floor((b - a) / st + 1e-9));
            for (long k = 0; k <= n; ++k) out.push_back(a + k * st);
        } else {
            for (const auto& p : split(item, ',')) out.push_back(parse_number(p));
        }
    }
    return out;
}

ds::SpinSelection parse_spin_mode(const std::string& s) {
    if (s == "free") return ds::SpinSelection::spin_free();
    if (s == "full") return ds::SpinSelection::full();
    if (s.rfind("mfr:", 0) == 0) {
        const double w = parse_number(s.substr(4));
        if (w < 0 || w != std::floor(w)) throw ds::ConfigError("mfr window must be a non-negative integer");
        return ds::SpinSelection::mfr(static_cast<int>(w));
    }
    throw ds::ConfigError("spin mode must be free, full or mfr:<w>, got '" + s + "'");
}

std::pair<int, int> parse_pair(const std::string& s) {
    const auto p = split(s, ':');
    if (p.size() != 2) throw ds::ConfigError("expected i:j, got '" + s + "'");
    return {static_cast<int>(parse_number(p[0])), static_cast<int>(parse_number(p[1]))};
}

struct Common {
    std::string molecule = "Na39K";
    std::vector<std::string> field{"7.1"};
    std::string out = "out";
    int threads = 1;
};

struct Physics {
    std::vector<std::string> ecoll{"10"};
    std::string spin_mode = "free";
    int lmax = -1;
    int nrot = 14;
    int ntilde = ds::default_n_max;
    int eta = 0;
    std::vector<std::string> mtot;
    std::string states = "0:0";
    std::string manifold = "1:0";
    double r_min = 50, r_mid = 600, r_max = 3e4, inner_step = 0.5, outer_ratio = 0.001;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--molecule", c.molecule, "molecule file or name");
    sub->add_option("--field", c.field, "fields in kV/cm: list or range:start:stop:step");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

void add_physics(CLI::App* sub, Physics& p) {
    sub->add_option("--ecoll", p.ecoll, "collision energies in nK");
    sub->add_option("--spin-mode", p.spin_mode, "free | full | mfr:<w>");
    sub->add_option("--lmax", p.lmax, "maximum partial wave (default 20 spin-free, 6 with spin)");
    sub->add_option("--nrot", p.nrot, "class-1 rotor pairs");
    sub->add_option("--ntilde", p.ntilde, "largest field-dressed rotor level");
    sub->add_option("--eta", p.eta, "+1 or -1 exchange symmetry (default from molecule)");
    sub->add_option("--mtot", p.mtot, "M_tot blocks (default: block of the incoming s wave)");
    sub->add_option("--states", p.states, "incoming hyperfine levels i:j, highest energy first");
    sub->add_option("--manifold", p.manifold, "rotor manifold n:m");
    sub->add_option("--rmin", p.r_min, "inner boundary (bohr)");
    sub->add_option("--rmid", p.r_mid, "end of fixed steps (bohr)");
    sub->add_option("--rmax", p.r_max, "matching radius (bohr)");
    sub->add_option("--inner-step", p.inner_step, "fixed step (bohr)");
    sub->add_option("--outer-ratio", p.outer_ratio, "step/R beyond rmid");
}

ds::MoleculeSpec molecule(const Common& c) {
    return ds::load_molecule(ds::resolve_molecule_path(c.molecule, data_dirs()));
}

ds::ScanConfig scan_config(const Common& c, const Physics& p) {
    ds::ScanConfig cfg;
    cfg.spec = molecule(c);
    for (double f : parse_values(c.field)) cfg.fields.push_back(ds::units::kV_cm(f));
    for (double e : parse_values(p.ecoll)) cfg.energies.push_back(ds::units::nK(e));
    cfg.spin = parse_spin_mode(p.spin_mode);
    const bool spin = cfg.spin.mode != ds::SpinMode::spin_free;
    cfg.L_max = p.lmax >= 0 ? p.lmax : (spin ? 6 : 20);
    cfg.N_rot = p.nrot;
    cfg.n_tilde_max = p.ntilde;
    cfg.n_max = std::max(p.ntilde, ds::default_n_max);
    if (p.eta == 1 || p.eta == -1) cfg.eta = p.eta;
    else if (p.eta != 0) throw ds::ConfigError("eta must be +1 or -1");
    const auto [s1, s2] = parse_pair(p.states);
    cfg.state1 = s1;
    cfg.state2 = s2;
    const auto [n, m] = parse_pair(p.manifold);
    cfg.manifold = {n, m};
    cfg.prop.R_min = p.r_min;
    cfg.prop.R_mid = p.r_mid;
    cfg.prop.R_max = p.r_max;
    cfg.prop.inner_step = p.inner_step;
    cfg.prop.outer_ratio = p.outer_ratio;
    cfg.threads = c.threads;
    return cfg;
}

std::vector<std::optional<ds::HalfInt>> mtot_list(const Physics& p) {
    std::vector<std::optional<ds::HalfInt>> out;
    for (double v : parse_values(p.mtot)) out.push_back(ds::HalfInt::from_double(v));
    if (out.empty()) out.push_back(std::nullopt);
    return out;
}

json config_echo(const Common& c, const Physics* p, const std::string& cmd) {
    json j{{"subcommand", cmd}, {"molecule", c.molecule}, {"field_kV_cm", c.field}, {"out", c.out},
           {"threads", c.threads}};
    if (p) {
        j["ecoll_nK"] = p->ecoll;
        j["spin_mode"] = p->spin_mode;
        j["lmax"] = p->lmax;
        j["nrot"] = p->nrot;
        j["ntilde"] = p->ntilde;
        j["eta"] = p->eta;
        j["mtot"] = p->mtot;
        j["states"] = p->states;
        j["manifold"] = p->manifold;
        j["R_bohr"] = {{"min", p->r_min}, {"mid", p->r_mid}, {"max", p->r_max}};
        j["inner_step_bohr"] = p->inner_step;
        j["outer_ratio"] = p->outer_ratio;
    }
    return j;
}

json manifest_base(const json& echo) {
    return {{"tool", "dimershield"}, {"version", "0.1.0"}, {"config", echo}};
}

int cmd_monomer(const Common& c, const std::string& manifold_s, int n_max, ds::report::OutputSet& out) {
    const auto spec = molecule(c);
    const auto [n, m] = parse_pair(manifold_s);
    const auto fields = parse_values(c.field);
    ds::report::CsvTable stark({"F_kV_cm", "n_tilde", "m_n", "energy_MHz", "d_debye"});
    ds::report::CsvTable levels({"F_kV_cm", "index", "label", "m_f", "energy_kHz", "d_debye",
                                 "delta_d", "ambiguous"});
    for (double f : fields) {
        const double F = ds::units::kV_cm(f);
        ds::MonomerModel model(spec, F, n_max, n_max, false);
        for (const auto& r : model.rotors())
            stark.add({fmt(f), fmt(r.label.n_tilde), fmt(r.label.m_n), fmt(ds::units::as_MHz(r.energy)),
                       fmt(ds::units::as_debye(r.d))});
        const auto lv = ds::hyperfine_levels(spec, F, {n, m}, n_max);
        for (std::size_t k = 0; k < lv.size(); ++k)
            levels.add({fmt(f), fmt(k), lv[k].label.str(), lv[k].m_f.str(),
                        fmt(ds::units::as_kHz(lv[k].energy_rel)), fmt(ds::units::as_debye(lv[k].d)),
                        fmt(lv[k].delta_d), lv[k].ambiguous ? "1" : "0"});
    }
    out.write("stark.csv", stark.str());
    out.write("levels.csv", levels.str());
    json man = manifest_base(config_echo(c, nullptr, "monomer"));
    man["manifold"] = manifold_s;
    man["n_max"] = n_max;
    out.write_manifest(man);
    return 0;
}

int cmd_adiabats(const Common& c, const Physics& p, int npoints, int ntracks, ds::report::OutputSet& out) {
    auto cfg = scan_config(c, p);
    if (cfg.fields.size() != 1) throw ds::ConfigError("adiabats takes one field");
    cfg.M_tot = mtot_list(p).front();
    const auto blk = ds::setup_block(cfg, cfg.fields.front());
    const ds::ChannelSet cs = ds::prepare_channels(blk.W, blk.partition.class1, blk.incoming, blk.identical);
    const auto grid = ds::log_grid(p.r_min, p.r_max, npoints);
    const auto tracks = ds::adiabats(blk.W, grid, &cs.asym);
    std::vector<int> order(tracks.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return tracks[a].values.back() < tracks[b].values.back();
    });
    if (ntracks > 0 && ntracks < static_cast<int>(order.size())) order.resize(ntracks);
    std::vector<std::string> header{"R_bohr"};
    for (std::size_t t = 0; t < order.size(); ++t) {
        header.push_back("track" + std::to_string(t) + "_K");
        header.push_back("track" + std::to_string(t) + "_MHz");
    }
    ds::report::CsvTable tab(header);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<std::string> row{fmt(grid[g])};
        for (int t : order) {
            const double e = tracks[t].values[g] - cs.E_incoming;
            row.push_back(fmt(ds::units::as_kelvin(e)));
            row.push_back(fmt(ds::units::as_MHz(e)));
        }
        tab.add(row);
    }
    json side = json::array();
    for (std::size_t t = 0; t < order.size(); ++t) {
        const auto& tr = tracks[order[t]];
        const int ch = tr.asymptotic_channel;
        side.push_back({{"track", t},
                        {"asymptotic_channel", ch},
                        {"L", cs.asym.L[ch]},
                        {"M_L", cs.asym.M_L[ch]},
                        {"threshold_MHz", ds::units::as_MHz(cs.asym.energy(ch) - cs.E_incoming)},
                        {"incoming", ch == cs.incoming.front()},
                        {"splice_warning", tr.splice_warning},
                        {"character", tr.channel_character}});
    }
    out.write("adiabats.csv", tab.str());
    out.write("adiabats_characters.json", side.dump(1) + "\n");
    json man = manifest_base(config_echo(c, &p, "adiabats"));
    man["basis"] = blk.basis_name;
    man["M_tot"] = blk.M_tot.str();
    man["channels"] = blk.n_channels();
    out.write_manifest(man);
    return 0;
}

int cmd_scatter(const Common& c, const Physics& p, ds::report::OutputSet& out) {
    const auto base = scan_config(c, p);
    const auto fields_in = parse_values(c.field);
    const auto ecoll_in = parse_values(p.ecoll);
    std::vector<ds::ScanRow> rows;
    std::vector<std::size_t> field_idx;
    for (const auto& M : mtot_list(p)) {
        auto cfg = base;
        cfg.M_tot = M;
        const auto part = ds::field_scan(cfg);
        for (std::size_t k = 0; k < part.size(); ++k) {
            rows.push_back(part[k]);
            field_idx.push_back(k);
        }
    }
    std::size_t n_final = 0;
    for (const auto& r : rows)
        if (r.ok) n_final = std::max(n_final, r.result.state_to_state.size());

    std::vector<std::string> header{"F_kV_cm", "E_coll_nK", "M_tot", "channels",
                                    "k_elastic_cm3_s", "k_loss_cm3_s", "k_inelastic_cm3_s",
                                    "k_elastic_allL_cm3_s", "k_loss_allL_cm3_s", "k_inelastic_allL_cm3_s"};
    for (std::size_t g = 0; g < n_final; ++g) {
        header.push_back("k_final" + std::to_string(g) + "_cm3_s");
        header.push_back("dE_final" + std::to_string(g) + "_kHz");
    }
    for (const char* h : {"alpha_bohr", "beta_bohr", "flags"}) header.push_back(h);
    ds::report::CsvTable tab(header);
    json diag = json::array();
    bool failed = false;
    const std::size_t ne = ecoll_in.size();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        const std::size_t t = field_idx[k];
        std::vector<std::string> row{fmt(fields_in[t / ne]), fmt(ecoll_in[t % ne]), r.M_tot.str(),
                                     fmt(r.n_channels)};
        const auto& s = r.result;
        auto rate = [&](double v) { return r.ok ? fmt(ds::units::as_cm3_s(v)) : std::string("nan"); };
        for (double v : {s.rate_el, s.rate_loss, s.rate_inel, s.rate_el_all, s.rate_loss_all, s.rate_inel_all})
            row.push_back(rate(v));
        for (std::size_t g = 0; g < n_final; ++g) {
            if (r.ok && g < s.state_to_state.size()) {
                const auto& fg = s.state_to_state[g];
                row.push_back(fmt(ds::units::as_cm3_s(fg.rate)));
                row.push_back(fmt(ds::units::as_kHz(fg.threshold - s.open_threshold.front())));
            } else {
                row.push_back("");
                row.push_back("");
            }
        }
        row.push_back(r.ok ? fmt(s.alpha()) : "nan");
        row.push_back(r.ok ? fmt(s.beta()) : "nan");
        std::string flags = r.ok ? "ok" : "error";
        if (r.ok && s.p_wave) flags += ";p_wave";
        if (!r.warnings.empty()) flags += ";warnings";
        row.push_back(flags);
        tab.add(row);
        failed |= !r.ok;
        diag.push_back({{"row", k}, {"ok", r.ok}, {"error", r.error}, {"warnings", r.warnings},
                        {"basis", r.basis_name}, {"channels", r.n_channels}, {"seconds", r.seconds}});
    }
    out.write("scan.csv", tab.str());
    json man = manifest_base(config_echo(c, &p, "scatter"));
    std::vector<std::string> names;
    for (const auto& r : rows)
        if (!r.basis_name.empty() && std::find(names.begin(), names.end(), r.basis_name) == names.end())
            names.push_back(r.basis_name);
    man["basis"] = names;
    man["rows"] = diag;
    out.write_manifest(man);
    if (failed) {
        std::cerr << "dimershield: some scan rows failed, see manifest.json\n";
        return exit_numerical;
    }
    return 0;
}

struct ScanEntry {
    double F_kV_cm, alpha;
};

std::vector<ScanEntry> read_spin_free_scan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ds::ConfigError("cannot open scan file " + path);
    std::string line;
    if (!std::getline(in, line)) throw ds::ConfigError("empty scan file " + path);
    const auto head = split(line, ',');
    auto col = [&](const std::string& name) {
        const auto it = std::find(head.begin(), head.end(), name);
        if (it == head.end()) throw ds::ConfigError("scan file lacks column " + name);
        return static_cast<std::size_t>(it - head.begin());
    };
    const std::size_t cF = col("F_kV_cm"), cA = col("alpha_bohr"), cM = col("M_tot"), cFl = col("flags");
    std::vector<ScanEntry> out;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < head.size()) continue;
        if (cells[cM] != "0" || cells[cFl].rfind("ok", 0) != 0) continue;
        out.push_back({parse_number(cells[cF]), parse_number(cells[cA])});
    }
    if (out.empty()) throw ds::ConfigError("scan file has no usable M_tot = 0 rows");
    return out;
}

int cmd_model(const Common& c, const Physics& p, const std::string& scan_path, std::vector<std::string> pairs_s,
              ds::report::OutputSet& out) {
    auto cfg = scan_config(c, p);
    cfg.spin = ds::SpinSelection::spin_free();
    cfg.L_max = p.lmax >= 0 ? p.lmax : 20;
    const auto entries = read_spin_free_scan(scan_path);
    const double mu = cfg.spec.reduced_mass();
    const auto grid = ds::log_grid(p.r_min, 2.0e4, 600);

    std::vector<std::pair<int, int>> pairs;
    json pair_labels = json::array();
    for (const auto& s : pairs_s) pairs.push_back(parse_pair(s));
    if (pairs.empty()) {
        const auto lv = ds::hyperfine_levels(cfg.spec, ds::units::kV_cm(entries.front().F_kV_cm), cfg.manifold);
        const auto [hi, lo] = ds::extreme_dipole_states(lv);
        auto index_of = [&](const ds::HyperfineState& s) {
            for (std::size_t k = 0; k < lv.size(); ++k)
                if (lv[k].m_f == s.m_f && lv[k].energy == s.energy) return static_cast<int>(k);
            return 0;
        };
        const int h = index_of(hi.front()), l = index_of(lo.front());
        pairs = {{h, h}, {l, l}, {h, l}};
    }
    std::vector<std::string> header{"F_kV_cm", "alpha0_bohr", "R_t_bohr", "Phi_rad", "Phi_integral_rad", "D0_bohr"};
    for (const auto& [i, j] : pairs) header.push_back("delta_alpha_j" + std::to_string(i) + "_j" + std::to_string(j) + "_bohr");
    header.push_back("valid");
    ds::report::CsvTable tab(header);
    bool first = true;
    for (const auto& e : entries) {
        const double F = ds::units::kV_cm(e.F_kV_cm);
        const auto blk = ds::setup_block(cfg, F);
        const auto& rot = blk.model->rotors()[blk.model->rotor_index(cfg.manifold)];
        const double D0 = ds::dipole_length(rot.d, rot.d, mu);
        const auto ia = ds::incoming_adiabat(blk, grid);
        const auto pi = ds::phase_integral(ia.curve, mu, ia.E_threshold);
        const auto lv = ds::hyperfine_levels(cfg.spec, F, cfg.manifold);
        std::vector<std::string> row{fmt(e.F_kV_cm), fmt(e.alpha), fmt(pi.R_t)};
        bool valid = pi.has_well && D0 > 0;
        ds::ModelInputs mi;
        if (valid) {
            mi = ds::model_inputs(e.alpha, pi.R_t, D0, pi.Phi);
            valid = ds::model_valid(mi.Phi0);
        }
        row.push_back(valid || pi.has_well ? fmt(mi.Phi0) : "nan");
        row.push_back(fmt(pi.Phi));
        row.push_back(fmt(D0));
        for (const auto& [i, j] : pairs) {
            if (i < 0 || j < 0 || i >= static_cast<int>(lv.size()) || j >= static_cast<int>(lv.size()))
                throw ds::ConfigError("state pair index out of range");
            if (first) pair_labels.push_back({{"i", i}, {"j", j}, {"label_i", lv[i].label.str()},
                                              {"label_j", lv[j].label.str()}});
            double da = std::nan("");
            if (pi.has_well && D0 > 0) {
                try {
                    da = ds::delta_alpha(mi, lv[i].delta_d, lv[j].delta_d);
                } catch (const ds::PoleError&) {
                    valid = false;
                }
            }
            row.push_back(fmt(da));
        }
        row.push_back(valid ? "1" : "0");
        tab.add(row);
        first = false;
    }
    out.write("model.csv", tab.str());
    json man = manifest_base(config_echo(c, &p, "model"));
    man["scan"] = scan_path;
    man["pairs"] = pair_labels;
    out.write_manifest(man);
    return 0;
}

int cmd_scaling(const std::vector<std::string>& mols, ds::report::OutputSet& out) {
    if (mols.empty()) throw ds::ConfigError("scaling needs at least one molecule");
    std::vector<ds::MoleculeSpec> specs;
    for (const auto& m : mols) specs.push_back(ds::load_molecule(ds::resolve_molecule_path(m, data_dirs())));
    ds::report::CsvTable tab({"molecule", "factor", "ratio"});
    for (const auto& s : specs)
        tab.add({s.name, fmt(ds::rate_scaling_factor(s)), fmt(ds::rate_scaling(specs.front(), s))});
    out.write("scaling.csv", tab.str());
    json man = manifest_base({{"subcommand", "scaling"}, {"molecules", mols}});
    out.write_manifest(man);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shielded ultracold molecule collisions"};
    app.require_subcommand(1);

    Common c_mono, c_adi, c_sc, c_model, c_scal;
    Physics p_adi, p_sc, p_model;

    auto* mono = app.add_subcommand("monomer", "Stark map and hyperfine level tables");
    add_common(mono, c_mono);
    std::string manifold = "1:0";
    int n_max = ds::default_n_max;
    mono->add_option("--manifold", manifold, "rotor manifold n:m");
    mono->add_option("--nmax", n_max, "free-rotor basis size");

    auto* adi = app.add_subcommand("adiabats", "adiabatic curves for one field");
    add_common(adi, c_adi);
    add_physics(adi, p_adi);
    int npoints = 400, ntracks = 20;
    adi->add_option("--npoints", npoints, "radial grid points");
    adi->add_option("--ntracks", ntracks, "lowest tracks exported (0 for all)");

    auto* sc = app.add_subcommand("scatter", "coupled-channel scan over fields and energies");
    add_common(sc, c_sc);
    add_physics(sc, p_sc);

    auto* model = app.add_subcommand("model", "semiclassical delta alpha from a spin-free scan");
    add_common(model, c_model);
    add_physics(model, p_model);
    std::string scan_path;
    std::vector<std::string> pairs;
    model->add_option("--scan", scan_path, "spin-free scan.csv")->required();
    model->add_option("--pairs", pairs, "state pairs i:j (default: extreme-dipole pairs)");

    auto* scal = app.add_subcommand("scaling", "spin-changing rate scaling between molecules");
    std::vector<std::string> mols;
    scal->add_option("--molecule", mols, "molecules, first is the reference")->required();
    scal->add_option("--out", c_scal.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    const Common& active = mono->parsed() ? c_mono : adi->parsed() ? c_adi : sc->parsed() ? c_sc
                           : model->parsed() ? c_model : c_scal;
    ds::report::OutputSet out(active.out);
    try {
        int rc = 0;
        if (mono->parsed()) rc = cmd_monomer(c_mono, manifold, n_max, out);
        else if (adi->parsed()) rc = cmd_adiabats(c_adi, p_adi, npoints, ntracks, out);
        else if (sc->parsed()) rc = cmd_scatter(c_sc, p_sc, out);
        else if (model->parsed()) rc = cmd_model(c_model, p_model, scan_path, pairs, out);
        else rc = cmd_scaling(mols, out);
        return rc;
    } catch (const ds::ConfigError& e) {
        out.remove_all();
        std::cerr << "dimershield: configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const ds::UnitError& e) {
        out.remove_all();
        std::cerr << "dimershield: configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const ds::Error& e) {
        out.remove_all();
        std::cerr << "dimershield: numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        out.remove_all();
        std::cerr << "dimershield: " << e.what() << "\n";
        return exit_numerical;
    }
}
