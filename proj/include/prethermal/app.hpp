#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "prethermal/config.hpp"
#include "prethermal/coupling.hpp"
#include "prethermal/exact.hpp"
#include "prethermal/lattice.hpp"
#include "prethermal/stochastic.hpp"

namespace prethermal::app {

struct CouplingSetup {
    CouplingMatrix jm;
    std::optional<TrapConfig> trap;
    std::optional<PhononModes> modes;
};

/// Couplings for `cfg`, with `alpha` overriding cfg.alpha when given.
CouplingSetup build_couplings(const RunConfig& cfg, std::optional<double> alpha = std::nullopt);

/// Seconds for the configured grid, t_max in units of 1/J_max.
std::vector<double> time_grid(const RunConfig& cfg, double j_max);

/// One trajectory of `model` with couplings scaled and the field shifted by `draw`.
QuenchTrace run_model(ModelKind model, const CouplingMatrix& jm, double b,
                      const ExcitationPattern& psi0, std::span<const double> times,
                      const NoiseDraw& draw = {}, int full_space_cap = default_full_space_cap);

/// Noise-averaged when cfg.noise_samples > 0, a single run otherwise.
QuenchTrace run_trace(const RunConfig& cfg, const CouplingMatrix& jm, const ExcitationPattern& psi0,
                      std::span<const double> times);

using Files = std::vector<std::filesystem::path>;

Files cmd_couplings(const RunConfig& cfg);
Files cmd_evolve(const RunConfig& cfg);
Files cmd_gge(const RunConfig& cfg);
Files cmd_gaps(const RunConfig& cfg);
Files cmd_shots(const RunConfig& cfg);
Files cmd_sweep_alpha(const RunConfig& cfg);

/// 0 success, 2 configuration/argument errors, 3 numeric errors.
int exit_code_for(const std::exception& e);

}  // namespace prethermal::app
