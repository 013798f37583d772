#include "prethermal/io.hpp"

#include <array>
#include <charconv>

#include "prethermal/errors.hpp"

namespace prethermal::io {

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns,
                     std::string_view description)
    : columns_(columns.size()) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary);
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    out_ << "# schema: ";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    if (!description.empty()) out_ << "; " << description;
    out_ << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_double(v))); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::string_view(std::to_string(v))); }

CsvWriter& CsvWriter::cell(std::string_view v) {
    if (filled_ >= columns_) throw Error("csv: too many cells in row");
    if (filled_) out_ << ',';
    out_ << v;
    ++filled_;
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) throw Error("csv: incomplete row");
    out_ << '\n';
    filled_ = 0;
}

void write_series_csv(const std::filesystem::path& path, std::string_view column,
                      const Eigen::VectorXd& values, std::string_view description) {
    CsvWriter w(path, {"index", std::string(column)}, description);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        w.cell(static_cast<long long>(i)).cell(values(i));
        w.end_row();
    }
}

void write_coupling_csv(const std::filesystem::path& path, const CouplingMatrix& jm) {
    CsvWriter w(path, {"i", "j", "J_rad_per_s"}, "sites 1-based, full matrix including the diagonal");
    for (int i = 0; i < jm.size(); ++i)
        for (int j = 0; j < jm.size(); ++j) {
            w.cell(i + 1).cell(j + 1).cell(jm.j(i, j));
            w.end_row();
        }
}

void write_potential_csv(const std::filesystem::path& path, const EffectivePotential& pot) {
    CsvWriter w(path, {"site", "U_rad_per_s"}, "U = -J_ii shifted to minimum 0");
    for (Eigen::Index i = 0; i < pot.u.size(); ++i) {
        w.cell(static_cast<long long>(i + 1)).cell(pot.u(i));
        w.end_row();
    }
}

void write_modes_csv(const std::filesystem::path& path, const PhononModes& modes) {
    CsvWriter w(path, {"mode", "site", "V", "kappa", "omega_rad_per_s"}, "omega empty when not attached");
    for (int m = 0; m < modes.size(); ++m)
        for (Eigen::Index i = 0; i < modes.mode_matrix.rows(); ++i) {
            w.cell(m).cell(static_cast<long long>(i + 1)).cell(modes.mode_matrix(i, m)).cell(modes.kappas(m));
            if (modes.frequencies.size() == modes.kappas.size())
                w.cell(modes.frequencies(m));
            else
                w.cell(std::string_view{});
            w.end_row();
        }
}

void write_trace_csv(const std::filesystem::path& path, const QuenchTrace& trace) {
    CsvWriter w(path, {"t_seconds", "site", "sz"}, "model " + trace.model);
    for (std::size_t t = 0; t < trace.size(); ++t)
        for (int i = 0; i < trace.n_sites(); ++i) {
            w.cell(trace.times[t]).cell(i + 1).cell(trace.sz(static_cast<Eigen::Index>(t), i));
            w.end_row();
        }
}

void write_trace_summary_csv(const std::filesystem::path& path, const QuenchTrace& trace) {
    CsvWriter w(path, {"t_seconds", "C", "C_cumulative", "n_excitations", "n_samples"},
                "model " + trace.model);
    for (std::size_t t = 0; t < trace.size(); ++t) {
        w.cell(trace.times[t]).cell(trace.c_series[t]).cell(trace.c_cumulative[t]).cell(trace.n_excitations[t]);
        w.cell(trace.n_samples);
        w.end_row();
    }
}

void write_site_csv(const std::filesystem::path& path, std::string_view column, const Eigen::VectorXd& values) {
    CsvWriter w(path, {"site", std::string(column)});
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        w.cell(static_cast<long long>(i + 1)).cell(values(i));
        w.end_row();
    }
}

void write_shots(const std::filesystem::path& path, const std::vector<ShotRecord>& shots) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    for (const auto& s : shots) out << s.bitstring() << '\n';
}

}  // namespace prethermal::io
