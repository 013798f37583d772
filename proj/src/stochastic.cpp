#include "prethermal/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <string>
#include <vector>

#include "prethermal/errors.hpp"

namespace prethermal {

void NoiseModel::validate() const {
    if (!(j_relative_sigma >= 0.0)) throw InvalidArgument("noise: j_relative_sigma must be >= 0");
    if (!(b_offset_sigma >= 0.0)) throw InvalidArgument("noise: b_offset_sigma must be >= 0");
    if (!(prep_flip_fidelity > 0.0 && prep_flip_fidelity <= 1.0))
        throw InvalidArgument("noise: prep_flip_fidelity must be in (0, 1]");
    if (!(detection_error >= 0.0 && detection_error < 1.0))
        throw InvalidArgument("noise: detection_error must be in [0, 1)");
}

std::mt19937_64 child_generator(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x5eedc0deu};
    return std::mt19937_64(seq);
}

NoiseDraw draw_noise(const NoiseModel& model, std::uint64_t index) {
    auto rng = child_generator(model.seed, index);
    NoiseDraw d;
    if (model.j_relative_sigma > 0.0) {
        std::normal_distribution<double> scale(1.0, model.j_relative_sigma);
        do {
            d.j_scale = scale(rng);
        } while (!(d.j_scale > 0.0));
    }
    if (model.b_offset_sigma > 0.0) d.b_offset = std::normal_distribution<double>(0.0, model.b_offset_sigma)(rng);
    return d;
}

QuenchTrace noise_average(const TraceRun& base_run, const NoiseModel& model, int n_samples) {
    model.validate();
    if (n_samples < 1) throw InvalidArgument("noise average: n_samples must be >= 1");
    if (model.j_relative_sigma == 0.0 && model.b_offset_sigma == 0.0) {
        QuenchTrace tr = base_run(NoiseDraw{});
        tr.n_samples = n_samples;
        return tr;
    }
    std::vector<QuenchTrace> runs(static_cast<std::size_t>(n_samples));
    std::vector<std::exception_ptr> errors(runs.size());
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < n_samples; ++s) {
        try {
            runs[s] = base_run(draw_noise(model, static_cast<std::uint64_t>(s)));
        } catch (...) {
            errors[s] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(runs.front().sz.rows(), runs.front().sz.cols());
    for (const auto& r : runs) {
        if (r.sz.rows() != sum.rows() || r.sz.cols() != sum.cols())
            throw InvalidArgument("noise average: runs disagree on the time grid");
        sum += r.sz;
    }
    QuenchTrace avg = QuenchTrace::from_sz(runs.front().model, runs.front().times, sum / n_samples);
    avg.n_samples = n_samples;
    return avg;
}

std::string ShotRecord::bitstring() const {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) s[i] = '1';
    return s;
}

ExcitationPattern corrupt_pattern(const ExcitationPattern& target, const NoiseModel& model, std::mt19937_64& rng) {
    if (model.prep_flip_fidelity >= 1.0) return target;
    std::bernoulli_distribution ok(model.prep_flip_fidelity);
    std::vector<int> kept;
    for (int s : target.flipped())
        if (ok(rng)) kept.push_back(s);
    return ExcitationPattern(target.n_ions(), std::move(kept));
}

namespace {

ShotRecord sample_bits(const Eigen::VectorXd& sz, double detection_error, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    ShotRecord shot;
    shot.bits.resize(static_cast<std::size_t>(sz.size()));
    for (Eigen::Index i = 0; i < sz.size(); ++i) {
        const double p = std::clamp((sz(i) + 1.0) / 2.0, 0.0, 1.0);
        bool up = uni(rng) < p;
        if (detection_error > 0.0 && uni(rng) < detection_error) up = !up;
        shot.bits[i] = up ? 1 : 0;
        shot.excitations += up ? 1 : 0;
    }
    return shot;
}

constexpr std::uint64_t prep_stream = 0x9e3779b97f4a7c15ull;

}  // namespace

std::vector<ShotRecord> sample_shots(const Eigen::VectorXd& sz, const NoiseModel& model, int n_shots) {
    model.validate();
    if (n_shots < 0) throw InvalidArgument("sample_shots: n_shots must be >= 0");
    if ((sz.array() < -1.0 - 1e-9).any() || (sz.array() > 1.0 + 1e-9).any())
        throw InvalidArgument("sample_shots: magnetizations must lie in [-1, 1]");
    std::vector<ShotRecord> shots(static_cast<std::size_t>(n_shots));
#pragma omp parallel for schedule(static)
    for (int s = 0; s < n_shots; ++s) {
        auto rng = child_generator(model.seed, static_cast<std::uint64_t>(s));
        shots[s] = sample_bits(sz, model.detection_error, rng);
    }
    return shots;
}

std::vector<ShotRecord> sample_pipeline(const ExcitationPattern& target, const SzOracle& dynamics,
                                        const NoiseModel& model, int n_shots) {
    model.validate();
    if (n_shots < 0) throw InvalidArgument("sample_pipeline: n_shots must be >= 0");
    std::vector<ExcitationPattern> prepared;
    prepared.reserve(static_cast<std::size_t>(n_shots));
    for (int s = 0; s < n_shots; ++s) {
        auto rng = child_generator(model.seed ^ prep_stream, static_cast<std::uint64_t>(s));
        prepared.push_back(corrupt_pattern(target, model, rng));
    }
    std::map<std::vector<int>, Eigen::VectorXd> cache;
    for (const auto& p : prepared)
        if (!cache.contains(p.flipped())) cache.emplace(p.flipped(), dynamics(p));

    std::vector<ShotRecord> shots(static_cast<std::size_t>(n_shots));
#pragma omp parallel for schedule(static)
    for (int s = 0; s < n_shots; ++s) {
        auto rng = child_generator(model.seed, static_cast<std::uint64_t>(s));
        shots[s] = sample_bits(cache.at(prepared[s].flipped()), model.detection_error, rng);
    }
    return shots;
}

PostselectResult postselect(std::span<ShotRecord> shots, int k) {
    if (shots.empty()) throw InvalidArgument("postselect: no shots");
    const auto n = static_cast<Eigen::Index>(shots.front().bits.size());
    Eigen::VectorXd ups = Eigen::VectorXd::Zero(n);
    int accepted = 0;
    for (auto& shot : shots) {
        shot.accepted = shot.excitations == k;
        if (!shot.accepted) continue;
        ++accepted;
        for (Eigen::Index i = 0; i < n; ++i) ups(i) += shot.bits[i];
    }
    PostselectResult r;
    r.accepted = accepted;
    r.accepted_fraction = static_cast<double>(accepted) / static_cast<double>(shots.size());
    if (accepted == 0)
        throw EmptySelectionError("postselect: no shot has exactly " + std::to_string(k) +
                                      " excitations (acceptance fraction 0)",
                                  r.accepted_fraction);
    const Eigen::VectorXd f = ups / accepted;
    r.sz = 2.0 * f.array() - 1.0;
    r.sz_stderr = 2.0 * (f.array() * (1.0 - f.array()) / accepted).sqrt();
    return r;
}

}  // namespace prethermal
