#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "prethermal/observables.hpp"
#include "prethermal/units.hpp"

namespace prethermal {

struct NoiseModel {
    double j_relative_sigma = 0.12;
    double b_offset_sigma = units::two_pi * 30.0;  // rad/s
    double prep_flip_fidelity = 0.97;
    double detection_error = 0.05;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Child generator for Monte-Carlo stream `index`; independent of scheduling.
std::mt19937_64 child_generator(std::uint64_t seed, std::uint64_t index);

/// One slow-noise realisation: couplings scaled by `j_scale`, field shifted by `b_offset`.
struct NoiseDraw {
    double j_scale = 1.0;
    double b_offset = 0.0;
};

NoiseDraw draw_noise(const NoiseModel& model, std::uint64_t index);

using TraceRun = std::function<QuenchTrace(const NoiseDraw&)>;

/// Averages sz and C pointwise over `n_samples` noise draws. Samples run in
/// parallel; the average is accumulated in sample order.
QuenchTrace noise_average(const TraceRun& base_run, const NoiseModel& model, int n_samples);

struct ShotRecord {
    std::vector<std::uint8_t> bits;  // 1 = up
    int excitations = 0;
    bool accepted = false;

    std::string bitstring() const;
};

/// Drops each flip of the target pattern independently with probability
/// 1 - prep_flip_fidelity.
ExcitationPattern corrupt_pattern(const ExcitationPattern& target, const NoiseModel& model,
                                  std::mt19937_64& rng);

/// Independent Bernoulli draws from p_i = (sz_i + 1)/2, then detection flips.
std::vector<ShotRecord> sample_shots(const Eigen::VectorXd& sz, const NoiseModel& model,
                                     int n_shots);

using SzOracle = std::function<Eigen::VectorXd(const ExcitationPattern&)>;

/// Preparation errors, dynamics and readout: every shot corrupts `target`,
/// asks `dynamics` for sz of the state actually prepared, and samples it.
std::vector<ShotRecord> sample_pipeline(const ExcitationPattern& target, const SzOracle& dynamics,
                                        const NoiseModel& model, int n_shots);

struct PostselectResult {
    double accepted_fraction = 0.0;
    int accepted = 0;
    Eigen::VectorXd sz;
    Eigen::VectorXd sz_stderr;
};

/// Keeps shots with exactly k excitations (marking them accepted).
PostselectResult postselect(std::span<ShotRecord> shots, int k);

}  // namespace prethermal
