// model.hpp: linear vibronic-coupling exciton model
//
// Electronic space: global ground |G> plus single-exciton states |m, a>
// (monomer m in excited state a in {S1, S2}, all others in the ground state).
// Every monomer carries the same set of harmonic modes.

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qgs/config.hpp"

namespace qgs {

inline constexpr int kExcitedStates = 2; // S1, S2
enum class Excited : int { S1 = 0, S2 = 1 };

struct VibrationalMode {
    std::string name;
    double frequency_ev = 0.0;
    std::array<double, kExcitedStates> diagonal_coupling_ev{};  // g_{aa}
    double offdiagonal_coupling_ev = 0.0;                        // g_{S1,S2}
    int default_cutoff = 5;                                      // n_max used when no truncation is given
};

struct VibronicModel {
    std::string id = "model";
    int n_monomers = 1;
    std::array<double, kExcitedStates> state_energies_ev{};
    std::array<double, kExcitedStates> transition_dipoles{};
    std::array<double, kExcitedStates> exciton_couplings_ev{}; // nearest neighbour, open chain
    std::vector<VibrationalMode> modes;                        // per monomer
    double gamma0_ev = 0.0;
    double ground_energy_ev = 0.0;

    int modes_per_monomer() const { return static_cast<int>(modes.size()); }
    int mode_instances() const { return n_monomers * modes_per_monomer(); }
    // Instance j = monomer * modes_per_monomer + mode
    const VibrationalMode& mode_of_instance(int instance) const {
        return modes[static_cast<std::size_t>(instance % modes_per_monomer())];
    }
    double zero_point_energy_ev() const;
};

// Throws qgs::Error (NonPositiveFrequency, InvalidValue, ...) on violation.
void validate(const VibronicModel& model);

VibronicModel parse_model_config(std::string_view text);
VibronicModel load_model(const std::filesystem::path& path);
std::string serialize_model(const VibronicModel& model);

} // namespace qgs
