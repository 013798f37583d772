#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "prethermal/coupling.hpp"
#include "prethermal/lattice.hpp"
#include "prethermal/observables.hpp"
#include "prethermal/spinwave.hpp"
#include "prethermal/stochastic.hpp"

namespace prethermal::io {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// CSV with a leading '# schema: ...' comment, a header row and LF rows.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns,
              std::string_view description = {});

    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(std::string_view v);
    void end_row();

private:
    std::ofstream out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

void write_series_csv(const std::filesystem::path& path, std::string_view column,
                      const Eigen::VectorXd& values, std::string_view description = {});
void write_coupling_csv(const std::filesystem::path& path, const CouplingMatrix& jm);
void write_potential_csv(const std::filesystem::path& path, const EffectivePotential& pot);
void write_modes_csv(const std::filesystem::path& path, const PhononModes& modes);
void write_trace_csv(const std::filesystem::path& path, const QuenchTrace& trace);
void write_trace_summary_csv(const std::filesystem::path& path, const QuenchTrace& trace);
void write_site_csv(const std::filesystem::path& path, std::string_view column,
                    const Eigen::VectorXd& values);
void write_shots(const std::filesystem::path& path, const std::vector<ShotRecord>& shots);

}  // namespace prethermal::io
