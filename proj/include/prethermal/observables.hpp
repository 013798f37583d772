#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace prethermal {

/// Initial product state: all spins down except the listed (1-based) sites.
class ExcitationPattern {
public:
    ExcitationPattern(int n_ions, std::vector<int> flipped);

    /// Parses "2,4" (comma or space separated); "" or "none" is the empty pattern.
    static ExcitationPattern parse(std::string_view text, int n_ions);

    int n_ions() const noexcept { return n_ions_; }
    const std::vector<int>& flipped() const noexcept { return flipped_; }
    int count() const noexcept { return static_cast<int>(flipped_.size()); }
    bool is_up(int site) const;

    std::uint64_t bitmask() const;
    Eigen::VectorXd occupations() const;  // n_i in {0, 1}
    Eigen::VectorXd sz() const;           // +1 up, -1 down
    ExcitationPattern mirror() const;     // i -> N+1-i
    std::string label() const;            // "2-4", "none"

    friend bool operator==(const ExcitationPattern&, const ExcitationPattern&) = default;

private:
    int n_ions_;
    std::vector<int> flipped_;
};

/// Position-weighted excitation location, -1 at the left edge and +1 at the right.
double observable_c(std::span<const double> sz);
double observable_c(const Eigen::VectorXd& sz);

struct QuenchTrace {
    std::string model;
    std::vector<double> times;          // seconds
    Eigen::MatrixXd sz;                 // rows: times, cols: sites
    std::vector<double> c_series;
    std::vector<double> c_cumulative;   // running mean over the sampled grid
    std::vector<double> n_excitations;  // sum_i (sz_i + 1) / 2
    int n_samples = 1;

    static QuenchTrace from_sz(std::string model, std::vector<double> times, Eigen::MatrixXd sz);

    int n_sites() const { return static_cast<int>(sz.cols()); }
    std::size_t size() const { return times.size(); }

    /// Running mean of every site up to and including time index `upto`.
    Eigen::VectorXd cumulative_sz(std::size_t upto) const;
    Eigen::VectorXd time_averaged_sz() const { return cumulative_sz(size() - 1); }
};

/// n_points uniform samples of [0, t_max], endpoints included.
std::vector<double> uniform_time_grid(double t_max, int n_points);

}  // namespace prethermal
