#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimershield/angular.hpp"
#include "dimershield/error.hpp"
#include "dimershield/units.hpp"

namespace dimershield {

// Monomer constants, all in atomic units after loading.
struct MoleculeSpec {
    std::string name;
    double mass = 0.0;  // molecular mass
    double b = 0.0;
    double mu = 0.0;  // body-frame dipole
    HalfInt iA, iB;
    double eQq_A = 0.0, eQq_B = 0.0;
    double c_A = 0.0, c_B = 0.0;
    double c3 = 0.0, c4 = 0.0;
    double C6_elec = 0.0;
    int eta = +1;  // exchange sign of the composite molecule: +1 boson, -1 fermion

    double reduced_mass() const { return 0.5 * mass; }

    bool spin_free() const {
        return eQq_A == 0.0 && eQq_B == 0.0 && c_A == 0.0 && c_B == 0.0 && c3 == 0.0 &&
               c4 == 0.0;
    }

    void validate() const {
        if (!(b > 0.0)) throw ConfigError(name + ": rotational constant must be positive");
        if (!(mass > 0.0)) throw ConfigError(name + ": mass must be positive");
        if (iA.twice < 0 || iB.twice < 0) throw ConfigError(name + ": negative nuclear spin");
        if (eta != 1 && eta != -1) throw ConfigError(name + ": statistics must be boson or fermion");
    }
};

namespace detail {

inline double spin_from_json(const nlohmann::json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        auto s = v.get<std::string>();
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return std::stod(s);
            return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("field '" + key + "' is not a nuclear spin");
}

inline double number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("molecule file is missing '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError("field '" + key + "' must be numeric");
    return j.at(key).get<double>();
}

}  // namespace detail

// Keys carry their unit as a suffix; values are converted on load.
inline MoleculeSpec molecule_from_json(const nlohmann::json& j) {
    MoleculeSpec s;
    if (!j.is_object()) throw ConfigError("molecule document must be a JSON object");
    s.name = j.value("name", std::string("unnamed"));
    s.mass = units::amu(detail::number(j, "mass_u"));
    s.b = units::GHz(detail::number(j, "b_GHz"));
    s.mu = units::debye(detail::number(j, "mu_D"));
    if (!j.contains("iA") || !j.contains("iB")) throw ConfigError("molecule file needs iA and iB");
    s.iA = HalfInt::from_double(detail::spin_from_json(j.at("iA"), "iA"));
    s.iB = HalfInt::from_double(detail::spin_from_json(j.at("iB"), "iB"));
    s.eQq_A = units::MHz(detail::number(j, "eQq_A_MHz"));
    s.eQq_B = units::MHz(detail::number(j, "eQq_B_MHz"));
    s.c_A = units::Hz(detail::number(j, "cA_Hz"));
    s.c_B = units::Hz(detail::number(j, "cB_Hz"));
    s.c3 = units::Hz(detail::number(j, "c3_Hz"));
    s.c4 = units::Hz(detail::number(j, "c4_Hz"));
    s.C6_elec = detail::number(j, "C6_elec_Eh_a0^6");
    const auto stats = j.value("statistics", std::string("boson"));
    if (stats == "boson") s.eta = 1;
    else if (stats == "fermion") s.eta = -1;
    else throw ConfigError("statistics must be 'boson' or 'fermion', got '" + stats + "'");
    s.validate();
    return s;
}

// Accepts a path, or a bare name looked up in $DIMERSHIELD_DATA (':'-separated)
// and then in the fallback directories.
inline std::filesystem::path resolve_molecule_path(
    const std::string& name_or_path, const std::vector<std::filesystem::path>& fallback = {}) {
    namespace fs = std::filesystem;
    if (fs::is_regular_file(name_or_path)) return name_or_path;
    std::vector<fs::path> dirs;
    if (const char* env = std::getenv("DIMERSHIELD_DATA")) {
        std::stringstream ss(env);
        std::string part;
        while (std::getline(ss, part, ':'))
            if (!part.empty()) dirs.emplace_back(part);
    }
    dirs.insert(dirs.end(), fallback.begin(), fallback.end());
    for (const auto& d : dirs) {
        for (const auto& cand : {d / name_or_path, d / (name_or_path + ".json"),
                                 d / "molecules" / (name_or_path + ".json")}) {
            if (fs::is_regular_file(cand)) return cand;
        }
    }
    throw ConfigError("molecule file '" + name_or_path + "' not found");
}

inline MoleculeSpec load_molecule(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open molecule file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed molecule file " + path.string() + ": " + e.what());
    }
    return molecule_from_json(j);
}

}  // namespace dimershield
