#include "prethermal/app.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "prethermal/errors.hpp"
#include "prethermal/io.hpp"
#include "prethermal/spinwave.hpp"
#include "prethermal/units.hpp"

namespace prethermal::app {

namespace fs = std::filesystem;

namespace {

NoiseModel noise_model(const RunConfig& cfg) {
    NoiseModel m = cfg.noise;
    m.seed = cfg.seed;
    return m;
}

std::string tag(const RunConfig& cfg, ModelKind model, const ExcitationPattern& p) {
    return std::string(to_string(model)) + "_n" + std::to_string(cfg.n_ions) + "_p" + p.label();
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

nlohmann::ordered_json describe(const RunConfig& cfg, const CouplingSetup& setup) {
    nlohmann::ordered_json j;
    j["n_ions"] = cfg.n_ions;
    j["coupling_source"] = cfg.source == CouplingSource::PowerLaw ? "power_law" : "trap";
    j["alpha"] = cfg.alpha;
    if (setup.jm.alpha_fit) j["alpha_fit"] = *setup.jm.alpha_fit;
    j["j_max_khz"] = units::to_khz(setup.jm.j_max);
    if (setup.trap) {
        j["geometry"] = setup.trap->geometry == Geometry::Uniform ? "uniform" : "harmonic";
        j["detuning_khz"] = units::to_khz(setup.trap->mu - setup.trap->omega_x);
        j["rabi_khz"] = units::to_khz(setup.trap->rabi);
    }
    j["b_khz"] = cfg.b_khz;
    j["seed"] = cfg.seed;
    return j;
}

const ExcitationPattern& single_pattern(const std::vector<ExcitationPattern>& patterns) {
    if (patterns.front().count() != 1)
        throw ConfigError("patterns", "gap spectra need a single-excitation first pattern");
    return patterns.front();
}

double min_gap_over_jmax(const RunConfig& cfg, const CouplingMatrix& jm, const ExcitationPattern& psi0,
                         std::vector<PairGap>* all) {
    const double b = units::khz(cfg.b_khz);
    std::vector<PairGap> gaps = cfg.gap_basis == GapBasis::SpinWave
                                    ? pair_gap_spectrum(build_spinwave(jm, b), psi0)
                                    : full_pair_gap_spectrum(build_full_ising(jm, b, cfg.full_space_cap), psi0);
    const double g = min_weighted_gap(gaps) / jm.j_max;
    if (all) *all = std::move(gaps);
    return g;
}

}  // namespace

CouplingSetup build_couplings(const RunConfig& cfg, std::optional<double> alpha) {
    const double a = alpha.value_or(cfg.alpha);
    if (cfg.source == CouplingSource::PowerLaw)
        return {power_law_couplings(cfg.n_ions, cfg.default_j_max(), a), std::nullopt, std::nullopt};

    TrapConfig tc = cfg.trap_config();
    const PhononModes modes = transverse_modes(tc);
    if (!cfg.detuning_khz) tc = tune_alpha(tc, modes, a).cfg;
    if (cfg.j_max_khz) tc = with_j_max(tc, modes, units::khz(*cfg.j_max_khz));
    return {ion_couplings(tc, modes), tc, modes};
}

std::vector<double> time_grid(const RunConfig& cfg, double j_max) {
    return uniform_time_grid(cfg.t_max / j_max, cfg.n_points);
}

QuenchTrace run_model(ModelKind model, const CouplingMatrix& jm, double b, const ExcitationPattern& psi0,
                      std::span<const double> times, const NoiseDraw& draw, int full_space_cap) {
    const CouplingMatrix scaled = draw.j_scale == 1.0 ? jm : jm.scaled(draw.j_scale);
    const double field = b + draw.b_offset;
    switch (model) {
        case ModelKind::Exact: return evolve(build_full_ising(scaled, field, full_space_cap), psi0, times);
        case ModelKind::Xy: return evolve(build_xy_sector(scaled, field, psi0.count()), psi0, times);
        case ModelKind::SpinWave: return evolve_spinwave(build_spinwave(scaled, field), psi0, times);
    }
    throw InvalidArgument("unknown model");
}

QuenchTrace run_trace(const RunConfig& cfg, const CouplingMatrix& jm, const ExcitationPattern& psi0,
                      std::span<const double> times) {
    const double b = units::khz(cfg.b_khz);
    auto run = [&](const NoiseDraw& d) { return run_model(cfg.model, jm, b, psi0, times, d, cfg.full_space_cap); };
    if (cfg.noise_samples == 0) return run({});
    return noise_average(run, noise_model(cfg), cfg.noise_samples);
}

Files cmd_couplings(const RunConfig& cfg) {
    const CouplingSetup setup = build_couplings(cfg);
    const fs::path dir = cfg.output_dir;
    Files files;

    files.push_back(dir / "couplings.csv");
    io::write_coupling_csv(files.back(), setup.jm);

    files.push_back(dir / "alpha.json");
    write_json(files.back(), describe(cfg, setup));

    const SpinWaveSystem sw = build_spinwave(setup.jm, units::khz(cfg.b_khz));
    files.push_back(dir / "spectrum.csv");
    io::write_series_csv(files.back(), "nu_rad_per_s", sw.nus, "eigenvalues of the zero-diagonal coupling matrix");

    if (setup.trap) {
        files.push_back(dir / "potential.csv");
        io::write_potential_csv(files.back(), effective_potential(setup.jm));
        files.push_back(dir / "modes.csv");
        io::write_modes_csv(files.back(), *setup.modes);
        files.push_back(dir / "lambda.csv");
        io::write_series_csv(files.back(), "lambda_rad_per_s", eigen_spectrum_lambda(*setup.trap, *setup.modes),
                             "coupling matrix eigenvalue per phonon mode");
        if (setup.trap->geometry == Geometry::HarmonicTrap) {
            const Equilibrium eq = equilibrium_positions(*setup.trap);
            files.push_back(dir / "positions.csv");
            io::write_series_csv(files.back(), "z_m",
                                 Eigen::Map<const Eigen::VectorXd>(eq.positions.data(),
                                                                   static_cast<Eigen::Index>(eq.positions.size())));
        }
    }
    return files;
}

Files cmd_evolve(const RunConfig& cfg) {
    const CouplingSetup setup = build_couplings(cfg);
    const auto times = time_grid(cfg, setup.jm.j_max);
    const double b = units::khz(cfg.b_khz);
    const SpinWaveSystem sw = build_spinwave(setup.jm, b);
    const fs::path dir = cfg.output_dir;
    Files files;

    for (const auto& psi0 : cfg.patterns()) {
        const std::string name = tag(cfg, cfg.model, psi0);
        const QuenchTrace trace = run_trace(cfg, setup.jm, psi0, times);
        files.push_back(dir / ("trace_" + name + ".csv"));
        io::write_trace_csv(files.back(), trace);
        files.push_back(dir / ("summary_" + name + ".csv"));
        io::write_trace_summary_csv(files.back(), trace);

        const GgeState gge = gge_state(sw, psi0);
        files.push_back(dir / ("gge_" + name + ".csv"));
        io::write_site_csv(files.back(), "sz_gge", gge.sz_gge);

        std::optional<Eigen::VectorXd> de;
        if (cfg.model != ModelKind::SpinWave) {
            const HamiltonianRep h = cfg.model == ModelKind::Exact
                                         ? build_full_ising(setup.jm, b, cfg.full_space_cap)
                                         : build_xy_sector(setup.jm, b, psi0.count());
            if (h.dimension() <= 4096) {
                de = diagonal_ensemble(h, psi0);
                files.push_back(dir / ("de_" + name + ".csv"));
                io::write_site_csv(files.back(), "sz_de", *de);
            }
        }

        nlohmann::ordered_json m = describe(cfg, setup);
        m["model"] = to_string(cfg.model);
        m["pattern"] = psi0.label();
        m["t_max_over_jmax"] = cfg.t_max;
        m["n_points"] = cfg.n_points;
        m["noise_samples"] = cfg.noise_samples;
        m["c_time_average"] = trace.c_cumulative.back();
        m["c_gge"] = observable_c(gge.sz_gge);
        if (de) m["c_de"] = observable_c(*de);
        files.push_back(dir / ("manifest_" + name + ".json"));
        write_json(files.back(), m);
    }
    return files;
}

Files cmd_gge(const RunConfig& cfg) {
    const CouplingSetup setup = build_couplings(cfg);
    const SpinWaveSystem sw = build_spinwave(setup.jm, units::khz(cfg.b_khz));
    const fs::path dir = cfg.output_dir;
    Files files;
    for (const auto& psi0 : cfg.patterns()) {
        const GgeState gge = gge_state(sw, psi0);
        const std::string name = "n" + std::to_string(cfg.n_ions) + "_p" + psi0.label();
        files.push_back(dir / ("gge_" + name + ".csv"));
        io::write_site_csv(files.back(), "sz_gge", gge.sz_gge);

        files.push_back(dir / ("gge_modes_" + name + ".csv"));
        io::CsvWriter w(files.back(), {"mode", "nu_rad_per_s", "epsilon_rad_per_s", "occupation", "lambda"},
                        "lambda = inf marks an empty mode");
        for (int k = 0; k < sw.size(); ++k) {
            w.cell(k).cell(sw.nus(k)).cell(sw.epsilons(k)).cell(gge.d_occupations(k));
            if (std::isinf(gge.lambdas(k)))
                w.cell(std::string_view("inf"));
            else
                w.cell(gge.lambdas(k));
            w.end_row();
        }
    }
    return files;
}

Files cmd_gaps(const RunConfig& cfg) {
    const ExcitationPattern psi0 = single_pattern(cfg.patterns());
    const fs::path dir = cfg.output_dir;
    Files files{dir / "gaps.csv", dir / "gaps_min.csv"};
    io::CsvWriter all(files[0], {"alpha", "alpha_fit", "dE_over_jmax", "weight"},
                      "pairs of eigenstates overlapping the initial state");
    io::CsvWriter mins(files[1], {"alpha", "alpha_fit", "min_gap_over_jmax"}, "weight above 1e-3");
    for (double a : cfg.alpha_grid) {
        const CouplingSetup setup = build_couplings(cfg, a);
        std::vector<PairGap> gaps;
        const double g = min_gap_over_jmax(cfg, setup.jm, psi0, &gaps);
        const double fit = setup.jm.alpha_fit.value_or(std::nan(""));
        for (const auto& p : gaps) {
            all.cell(a).cell(fit).cell(p.delta_e / setup.jm.j_max).cell(p.weight);
            all.end_row();
        }
        mins.cell(a).cell(fit).cell(g);
        mins.end_row();
    }
    return files;
}

Files cmd_shots(const RunConfig& cfg) {
    const CouplingSetup setup = build_couplings(cfg);
    const auto times = time_grid(cfg, setup.jm.j_max);
    const std::vector<double> t_end{times.back()};
    const double b = units::khz(cfg.b_khz);
    const NoiseModel noise = noise_model(cfg);
    const fs::path dir = cfg.output_dir;
    Files files;
    for (const auto& target : cfg.patterns()) {
        const std::string name = tag(cfg, cfg.model, target);
        auto dynamics = [&](const ExcitationPattern& p) -> Eigen::VectorXd {
            return run_model(cfg.model, setup.jm, b, p, t_end, {}, cfg.full_space_cap).sz.row(0).transpose();
        };
        std::vector<ShotRecord> shots = sample_pipeline(target, dynamics, noise, cfg.n_shots);
        files.push_back(dir / ("shots_" + name + ".txt"));
        io::write_shots(files.back(), shots);

        const PostselectResult r = postselect(shots, target.count());
        const Eigen::VectorXd ideal = dynamics(target);
        files.push_back(dir / ("postselect_" + name + ".csv"));
        io::CsvWriter w(files.back(), {"site", "sz", "sz_stderr", "sz_ideal"},
                        "post-selected on " + std::to_string(target.count()) + " excitations at t_max");
        for (int i = 0; i < cfg.n_ions; ++i) {
            w.cell(i + 1).cell(r.sz(i)).cell(r.sz_stderr(i)).cell(ideal(i));
            w.end_row();
        }
        files.push_back(dir / ("acceptance_" + name + ".csv"));
        io::CsvWriter acc(files.back(), {"n_shots", "accepted", "accepted_fraction"});
        acc.cell(cfg.n_shots).cell(r.accepted).cell(r.accepted_fraction);
        acc.end_row();
    }
    return files;
}

Files cmd_sweep_alpha(const RunConfig& cfg) {
    const auto patterns = cfg.patterns();
    const auto n_alpha = static_cast<int>(cfg.alpha_grid.size());
    struct Row {
        double alpha_fit = 0.0;
        double j_max = 0.0;
        std::vector<double> c_avg, c_gge;
        std::vector<double> min_gap;
    };
    std::vector<Row> rows(n_alpha);
    std::vector<std::exception_ptr> errors(n_alpha);

#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n_alpha; ++k) {
        try {
            const CouplingSetup setup = build_couplings(cfg, cfg.alpha_grid[k]);
            const auto times = time_grid(cfg, setup.jm.j_max);
            const SpinWaveSystem sw = build_spinwave(setup.jm, units::khz(cfg.b_khz));
            Row& row = rows[k];
            row.alpha_fit = setup.jm.alpha_fit.value_or(std::nan(""));
            row.j_max = setup.jm.j_max;
            for (const auto& p : patterns) {
                row.c_avg.push_back(run_trace(cfg, setup.jm, p, times).c_cumulative.back());
                row.c_gge.push_back(observable_c(gge_state(sw, p).sz_gge));
                row.min_gap.push_back(p.count() == 1 ? min_gap_over_jmax(cfg, setup.jm, p, nullptr) : std::nan(""));
            }
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    const fs::path dir = cfg.output_dir;
    Files files{dir / ("sweep_alpha_" + std::string(to_string(cfg.model)) + ".csv")};
    io::CsvWriter w(files[0], {"alpha", "alpha_fit", "j_max_khz", "pattern", "C_time_average", "C_gge",
                               "min_gap_over_jmax"},
                    "C_time_average over t <= t_max; min gap empty unless single excitation");
    for (int k = 0; k < n_alpha; ++k)
        for (std::size_t p = 0; p < patterns.size(); ++p) {
            w.cell(cfg.alpha_grid[k]).cell(rows[k].alpha_fit).cell(units::to_khz(rows[k].j_max));
            w.cell(patterns[p].label()).cell(rows[k].c_avg[p]).cell(rows[k].c_gge[p]);
            if (std::isnan(rows[k].min_gap[p]))
                w.cell(std::string_view{});
            else
                w.cell(rows[k].min_gap[p]);
            w.end_row();
        }
    return files;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e) ||
        dynamic_cast<const SizeError*>(&e) || dynamic_cast<const BasisError*>(&e))
        return 2;
    if (dynamic_cast<const NumericError*>(&e)) return 3;
    return 1;
}

}  // namespace prethermal::app
