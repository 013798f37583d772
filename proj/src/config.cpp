#include "prethermal/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "prethermal/errors.hpp"
#include "prethermal/units.hpp"

namespace prethermal {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        const auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!piece.empty()) out.emplace_back(piece);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(x))
        throw ConfigError(key, "expected a number, got '" + v + "'");
    return x;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
    Int x{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError(key, "expected an integer, got '" + v + "'");
    return x;
}

const std::set<std::string>& trap_keys() {
    static const std::set<std::string> keys{"geometry",  "omega_x_khz", "omega_z_khz", "spacing_um",
                                            "detuning_khz", "rabi_khz", "mass_amu",    "wavelength_nm"};
    return keys;
}

}  // namespace

const char* to_string(ModelKind m) {
    switch (m) {
        case ModelKind::Exact: return "exact";
        case ModelKind::Xy: return "xy";
        case ModelKind::SpinWave: return "spinwave";
    }
    return "?";
}

ModelKind parse_model(std::string_view name) {
    if (name == "exact") return ModelKind::Exact;
    if (name == "xy") return ModelKind::Xy;
    if (name == "spinwave") return ModelKind::SpinWave;
    throw ConfigError("model", "expected exact, xy or spinwave, got '" + std::string(name) + "'");
}

std::map<std::string, std::string> parse_key_values(std::string_view text, std::map<std::string, int>* lines) {
    std::map<std::string, std::string> kv;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        ++line_no;
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("", "expected 'key = value'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("", "empty key", line_no);
        if (value.empty()) throw ConfigError(key, "empty value", line_no);
        if (kv.contains(key)) throw ConfigError(key, "duplicate key", line_no);
        kv.emplace(key, value);
        if (lines) (*lines)[key] = line_no;
    }
    return kv;
}

RunConfig RunConfig::parse(std::string_view text) {
    std::map<std::string, int> lines;
    const auto kv = parse_key_values(text, &lines);
    RunConfig c;
    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    try {
        if (auto v = get("coupling")) {
            if (*v == "power_law") c.source = CouplingSource::PowerLaw;
            else if (*v == "trap") c.source = CouplingSource::Trap;
            else throw ConfigError("coupling", "expected power_law or trap, got '" + *v + "'");
        }
        for (const auto& [key, value] : kv) {
            if (c.source == CouplingSource::PowerLaw && trap_keys().contains(key))
                throw ConfigError(key, "only valid with coupling = trap");
            if (key == "coupling") continue;
            else if (key == "n_ions") c.n_ions = to_int<int>(key, value);
            else if (key == "j_max_khz") c.j_max_khz = to_double(key, value);
            else if (key == "alpha") c.alpha = to_double(key, value);
            else if (key == "geometry") {
                if (value == "harmonic") c.geometry = Geometry::HarmonicTrap;
                else if (value == "uniform") c.geometry = Geometry::Uniform;
                else throw ConfigError(key, "expected harmonic or uniform, got '" + value + "'");
            } else if (key == "omega_x_khz") c.omega_x_khz = to_double(key, value);
            else if (key == "omega_z_khz") c.omega_z_khz = to_double(key, value);
            else if (key == "spacing_um") c.spacing_um = to_double(key, value);
            else if (key == "detuning_khz") c.detuning_khz = to_double(key, value);
            else if (key == "rabi_khz") c.rabi_khz = to_double(key, value);
            else if (key == "mass_amu") c.mass_amu = to_double(key, value);
            else if (key == "wavelength_nm") c.wavelength_nm = to_double(key, value);
            else if (key == "b_khz") c.b_khz = to_double(key, value);
            else if (key == "model") c.model = parse_model(value);
            else if (key == "patterns") c.pattern_specs = split(value, ';');
            else if (key == "t_max") c.t_max = to_double(key, value);
            else if (key == "n_points") c.n_points = to_int<int>(key, value);
            else if (key == "full_space_cap") c.full_space_cap = to_int<int>(key, value);
            else if (key == "noise_samples") c.noise_samples = to_int<int>(key, value);
            else if (key == "noise_j_sigma") c.noise.j_relative_sigma = to_double(key, value);
            else if (key == "noise_b_offset_khz") c.noise.b_offset_sigma = units::khz(to_double(key, value));
            else if (key == "prep_fidelity") c.noise.prep_flip_fidelity = to_double(key, value);
            else if (key == "detection_error") c.noise.detection_error = to_double(key, value);
            else if (key == "n_shots") c.n_shots = to_int<int>(key, value);
            else if (key == "alpha_grid") {
                c.alpha_grid.clear();
                for (const auto& a : split(value, ',')) c.alpha_grid.push_back(to_double(key, a));
            } else if (key == "gap_basis") {
                if (value == "spinwave") c.gap_basis = GapBasis::SpinWave;
                else if (value == "full") c.gap_basis = GapBasis::Full;
                else throw ConfigError(key, "expected spinwave or full, got '" + value + "'");
            } else if (key == "output_dir") c.output_dir = value;
            else if (key == "seed") c.seed = to_int<std::uint64_t>(key, value);
            else throw ConfigError(key, "unknown key");
        }
        c.noise.seed = c.seed;
        c.validate();
    } catch (const ConfigError& e) {
        if (e.line() > 0) throw;
        auto it = lines.find(e.key());
        if (it == lines.end()) throw;
        const std::string prefix = "config key '" + e.key() + "': ";
        std::string msg = e.what();
        if (msg.starts_with(prefix)) msg = msg.substr(prefix.size());
        throw ConfigError(e.key(), msg, it->second);
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void RunConfig::validate() const {
    auto positive = [](const char* key, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be > 0");
    };
    if (n_ions < 2 || n_ions > 512) throw ConfigError("n_ions", "must be in [2, 512]");
    if (j_max_khz) positive("j_max_khz", *j_max_khz);
    if (source == CouplingSource::PowerLaw) {
        if (!(alpha > 0.0 && alpha <= 10.0)) throw ConfigError("alpha", "must be in (0, 10]");
    } else {
        if (!(alpha > 0.0 && alpha < 3.0)) throw ConfigError("alpha", "trap target must be in (0, 3)");
        positive("omega_x_khz", omega_x_khz);
        positive("rabi_khz", rabi_khz);
        positive("mass_amu", mass_amu);
        positive("wavelength_nm", wavelength_nm);
        if (geometry == Geometry::HarmonicTrap) {
            positive("omega_z_khz", omega_z_khz);
            if (omega_z_khz >= omega_x_khz) throw ConfigError("omega_z_khz", "must be below omega_x_khz");
        } else {
            positive("spacing_um", spacing_um);
        }
        if (detuning_khz && *detuning_khz == 0.0) throw ConfigError("detuning_khz", "must be nonzero");
    }
    positive("b_khz", b_khz);
    positive("t_max", t_max);
    if (n_points < 2) throw ConfigError("n_points", "must be >= 2");
    if (full_space_cap < 1 || full_space_cap > 24) throw ConfigError("full_space_cap", "must be in [1, 24]");
    if (model == ModelKind::Exact && n_ions > full_space_cap)
        throw ConfigError("model", "exact model needs n_ions <= full_space_cap (" +
                                       std::to_string(full_space_cap) + ")");
    if (pattern_specs.empty()) throw ConfigError("patterns", "at least one pattern required");
    try {
        (void)patterns();
    } catch (const InvalidArgument& e) {
        throw ConfigError("patterns", e.what());
    }
    if (noise_samples < 0) throw ConfigError("noise_samples", "must be >= 0");
    if (!(noise.j_relative_sigma >= 0.0)) throw ConfigError("noise_j_sigma", "must be >= 0");
    if (!(noise.b_offset_sigma >= 0.0)) throw ConfigError("noise_b_offset_khz", "must be >= 0");
    if (!(noise.prep_flip_fidelity > 0.0 && noise.prep_flip_fidelity <= 1.0))
        throw ConfigError("prep_fidelity", "must be in (0, 1]");
    if (!(noise.detection_error >= 0.0 && noise.detection_error < 1.0))
        throw ConfigError("detection_error", "must be in [0, 1)");
    if (n_shots < 1) throw ConfigError("n_shots", "must be >= 1");
    if (alpha_grid.empty()) throw ConfigError("alpha_grid", "must not be empty");
    for (double a : alpha_grid)
        if (!(a > 0.0 && a <= 10.0)) throw ConfigError("alpha_grid", "every value must be in (0, 10]");
    if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

std::vector<ExcitationPattern> RunConfig::patterns() const {
    std::vector<ExcitationPattern> out;
    for (const auto& s : pattern_specs) out.push_back(ExcitationPattern::parse(s, n_ions));
    return out;
}

TrapConfig RunConfig::trap_config() const {
    TrapConfig c = geometry == Geometry::Uniform ? TrapConfig::ytterbium_uniform(n_ions, spacing_um * 1e-6)
                                                 : TrapConfig::ytterbium_harmonic(n_ions, units::khz(omega_z_khz));
    c.omega_x = units::khz(omega_x_khz);
    c.mass = mass_amu * units::atomic_mass_unit;
    if (geometry == Geometry::Uniform) c.omega_z = effective_axial_frequency(c.mass, c.charge, c.spacing);
    c.rabi = units::khz(rabi_khz);
    c.delta_k = std::numbers::sqrt2 * units::two_pi / (wavelength_nm * 1e-9);
    c.mu = c.omega_x + units::khz(detuning_khz.value_or(10.0));
    return c;
}

double RunConfig::default_j_max() const { return units::khz(j_max_khz.value_or(0.6)); }

}  // namespace prethermal
