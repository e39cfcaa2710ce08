#include "qgs/model.hpp"

#include <cmath>
#include <sstream>

#include "qgs/error.hpp"
#include "qgs/units.hpp"

namespace qgs {

namespace {

constexpr std::array<const char*, kExcitedStates> kStateKeys{"s1", "s2"};

void require_finite(double v, const std::string& key) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidValue, key, "non-finite value");
}

double required_energy(const KeyValueDocument& doc, std::string_view section, const std::string& base) {
    if (auto v = get_energy_ev(doc, section, base)) return *v;
    throw Error(ErrorCode::MissingField, std::string(section) + "." + base);
}

} // namespace

double VibronicModel::zero_point_energy_ev() const {
    double zpe = 0.0;
    for (const auto& m : modes) zpe += 0.5 * m.frequency_ev;
    return zpe * n_monomers;
}

void validate(const VibronicModel& model) {
    if (model.n_monomers < 1 || model.n_monomers > 3)
        throw Error(ErrorCode::InvalidValue, "electronic.n_monomers", "supported range is 1..3");
    for (int a = 0; a < kExcitedStates; ++a) {
        const std::string s = kStateKeys[static_cast<std::size_t>(a)];
        require_finite(model.state_energies_ev[a], "electronic." + s + "_energy");
        require_finite(model.exciton_couplings_ev[a], "couplings." + s + "_exciton");
        require_finite(model.transition_dipoles[a], "electronic." + s + "_dipole");
        if (model.transition_dipoles[a] < 0.0)
            throw Error(ErrorCode::InvalidValue, "electronic." + s + "_dipole", "dipoles are non-negative by convention");
    }
    require_finite(model.gamma0_ev, "rates.gamma0");
    require_finite(model.ground_energy_ev, "electronic.ground_energy");
    if (model.gamma0_ev < 0.0) throw Error(ErrorCode::InvalidValue, "rates.gamma0", "must be >= 0");
    for (std::size_t k = 0; k < model.modes.size(); ++k) {
        const auto& m = model.modes[k];
        const std::string key = "modes.mode" + std::to_string(k + 1);
        require_finite(m.frequency_ev, key + "_frequency");
        if (!(m.frequency_ev > 0.0)) throw Error(ErrorCode::NonPositiveFrequency, key + "_frequency");
        for (double g : m.diagonal_coupling_ev) require_finite(g, key + "_g");
        require_finite(m.offdiagonal_coupling_ev, key + "_g_s1s2");
        if (m.default_cutoff < 0) throw Error(ErrorCode::InvalidValue, key + "_nmax", "must be >= 0");
    }
}

VibronicModel parse_model_config(std::string_view text) {
    const auto doc = KeyValueDocument::parse(text);
    for (const char* section : {"electronic", "couplings", "modes", "rates"})
        if (!doc.has_section(section)) throw Error(ErrorCode::MissingField, section);

    VibronicModel model;
    if (auto name = doc.get("electronic", "name")) model.id = *name;
    if (auto n = get_integer(doc, "electronic", "n_monomers")) model.n_monomers = static_cast<int>(*n);
    else throw Error(ErrorCode::MissingField, "electronic.n_monomers");
    model.ground_energy_ev = get_energy_ev(doc, "electronic", "ground_energy").value_or(0.0);

    for (int a = 0; a < kExcitedStates; ++a) {
        const std::string s = kStateKeys[static_cast<std::size_t>(a)];
        model.state_energies_ev[a] = required_energy(doc, "electronic", s + "_energy");
        model.transition_dipoles[a] = require_double(doc, "electronic", s + "_dipole");
        model.exciton_couplings_ev[a] = get_energy_ev(doc, "couplings", s + "_exciton").value_or(0.0);
    }
    model.gamma0_ev = get_energy_ev(doc, "rates", "gamma0").value_or(0.0);

    for (int k = 1;; ++k) {
        const std::string base = "mode" + std::to_string(k);
        const auto freq = get_energy_ev(doc, "modes", base + "_frequency");
        if (!freq) break;
        VibrationalMode mode;
        mode.name = doc.get("modes", base + "_name").value_or(base);
        mode.frequency_ev = *freq;
        mode.diagonal_coupling_ev[0] = get_energy_ev(doc, "modes", base + "_g_s1").value_or(0.0);
        mode.diagonal_coupling_ev[1] = get_energy_ev(doc, "modes", base + "_g_s2").value_or(0.0);
        mode.offdiagonal_coupling_ev = get_energy_ev(doc, "modes", base + "_g_s1s2").value_or(0.0);
        // Optional explicit lower triangle; must match the upper one.
        if (const auto lower = get_energy_ev(doc, "modes", base + "_g_s2s1")) {
            const double scale = std::max(std::abs(*lower), std::abs(mode.offdiagonal_coupling_ev));
            if (std::abs(*lower - mode.offdiagonal_coupling_ev) > 1e-12 * std::max(1.0, scale))
                throw Error(ErrorCode::NonHermitianCoupling, "modes." + base + "_g_s2s1",
                            "must equal " + base + "_g_s1s2");
        }
        if (auto n = get_integer(doc, "modes", base + "_nmax")) mode.default_cutoff = static_cast<int>(*n);
        model.modes.push_back(std::move(mode));
    }
    if (model.modes.empty()) throw Error(ErrorCode::MissingField, "modes");

    validate(model);
    return model;
}

VibronicModel load_model(const std::filesystem::path& path) {
    const auto doc = KeyValueDocument::load(path); // surfaces ConfigError for missing files
    return parse_model_config(doc.to_string());
}

std::string serialize_model(const VibronicModel& model) {
    KeyValueDocument doc;
    doc.set("electronic", "name", model.id);
    doc.set("electronic", "n_monomers", std::to_string(model.n_monomers));
    doc.set("electronic", "ground_energy_ev", format_double(model.ground_energy_ev));
    for (int a = 0; a < kExcitedStates; ++a) {
        const std::string s = kStateKeys[static_cast<std::size_t>(a)];
        doc.set("electronic", s + "_energy_ev", format_double(model.state_energies_ev[a]));
        doc.set("electronic", s + "_dipole", format_double(model.transition_dipoles[a]));
    }
    for (int a = 0; a < kExcitedStates; ++a) {
        const std::string s = kStateKeys[static_cast<std::size_t>(a)];
        doc.set("couplings", s + "_exciton_ev", format_double(model.exciton_couplings_ev[a]));
    }
    for (std::size_t k = 0; k < model.modes.size(); ++k) {
        const auto& m = model.modes[k];
        const std::string base = "mode" + std::to_string(k + 1);
        if (m.name != base) doc.set("modes", base + "_name", m.name);
        doc.set("modes", base + "_frequency_ev", format_double(m.frequency_ev));
        doc.set("modes", base + "_g_s1_ev", format_double(m.diagonal_coupling_ev[0]));
        doc.set("modes", base + "_g_s2_ev", format_double(m.diagonal_coupling_ev[1]));
        doc.set("modes", base + "_g_s1s2_ev", format_double(m.offdiagonal_coupling_ev));
        doc.set("modes", base + "_nmax", std::to_string(m.default_cutoff));
    }
    doc.set("rates", "gamma0_ev", format_double(model.gamma0_ev));
    return doc.to_string();
}

} // namespace qgs
