#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prethermal/exact.hpp"
#include "prethermal/lattice.hpp"
#include "prethermal/observables.hpp"
#include "prethermal/stochastic.hpp"

namespace prethermal {

enum class CouplingSource { PowerLaw, Trap };
enum class ModelKind { Exact, Xy, SpinWave };
enum class GapBasis { SpinWave, Full };

const char* to_string(ModelKind m);
ModelKind parse_model(std::string_view name);  // throws ConfigError

/// Everything one run needs. Frequencies are entered in kHz (ordinary
/// frequency) and converted on use. See README for the key reference.
struct RunConfig {
    int n_ions = 7;
    CouplingSource source = CouplingSource::PowerLaw;
    std::optional<double> j_max_khz;  // power law default 0.6; trap: rescales the Rabi frequency
    double alpha = 0.55;              // power-law exponent, or target exponent for the trap

    Geometry geometry = Geometry::HarmonicTrap;
    double omega_x_khz = 4800.0;
    double omega_z_khz = 500.0;  // harmonic trap axial frequency
    double spacing_um = 4.0;     // uniform chain
    std::optional<double> detuning_khz;  // mu - omega_x; tuned to `alpha` when absent
    double rabi_khz = 100.0;
    double mass_amu = 170.9363258;
    double wavelength_nm = 355.0;  // Raman beams at 90 degrees: dk = sqrt2 * 2 pi / lambda

    double b_khz = 10.0;
    ModelKind model = ModelKind::Exact;
    std::vector<std::string> pattern_specs{"1"};
    double t_max = 25.0;  // units of 1/J_max
    int n_points = 60;
    int full_space_cap = default_full_space_cap;

    int noise_samples = 0;
    NoiseModel noise;
    int n_shots = 3000;

    std::vector<double> alpha_grid{0.55, 1.33};
    GapBasis gap_basis = GapBasis::SpinWave;

    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 1;

    /// Flat `key = value` text; '#' starts a comment.
    static RunConfig parse(std::string_view text);
    static RunConfig load(const std::filesystem::path& path);

    void validate() const;
    std::vector<ExcitationPattern> patterns() const;
    TrapConfig trap_config() const;
    double default_j_max() const;  // rad/s, power law
};

std::map<std::string, std::string> parse_key_values(std::string_view text,
                                                    std::map<std::string, int>* lines = nullptr);

}  // namespace prethermal
