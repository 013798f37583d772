#include "prethermal/observables.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "prethermal/errors.hpp"

namespace prethermal {

ExcitationPattern::ExcitationPattern(int n_ions, std::vector<int> flipped)
    : n_ions_(n_ions), flipped_(std::move(flipped)) {
    if (n_ions_ < 1 || n_ions_ > 512) throw InvalidArgument("pattern: chain size must be in [1, 512]");
    std::sort(flipped_.begin(), flipped_.end());
    if (std::adjacent_find(flipped_.begin(), flipped_.end()) != flipped_.end())
        throw InvalidArgument("pattern: duplicate site");
    for (int s : flipped_)
        if (s < 1 || s > n_ions_)
            throw InvalidArgument("pattern: site " + std::to_string(s) + " outside [1, " +
                                  std::to_string(n_ions_) + "]");
}

ExcitationPattern ExcitationPattern::parse(std::string_view text, int n_ions) {
    std::vector<int> sites;
    std::string s(text);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        if (tok == "none") continue;
        int v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size())
            throw InvalidArgument("pattern: cannot parse site '" + tok + "'");
        sites.push_back(v);
    }
    return ExcitationPattern(n_ions, std::move(sites));
}

bool ExcitationPattern::is_up(int site) const {
    return std::binary_search(flipped_.begin(), flipped_.end(), site);
}

std::uint64_t ExcitationPattern::bitmask() const {
    if (n_ions_ > 64) throw SizeError("pattern: bitmask needs at most 64 sites");
    std::uint64_t m = 0;
    for (int s : flipped_) m |= std::uint64_t{1} << (s - 1);
    return m;
}

Eigen::VectorXd ExcitationPattern::occupations() const {
    Eigen::VectorXd n = Eigen::VectorXd::Zero(n_ions_);
    for (int s : flipped_) n(s - 1) = 1.0;
    return n;
}

Eigen::VectorXd ExcitationPattern::sz() const { return 2.0 * occupations().array() - 1.0; }

ExcitationPattern ExcitationPattern::mirror() const {
    std::vector<int> m;
    for (int s : flipped_) m.push_back(n_ions_ + 1 - s);
    return ExcitationPattern(n_ions_, std::move(m));
}

std::string ExcitationPattern::label() const {
    if (flipped_.empty()) return "none";
    std::string s;
    for (std::size_t i = 0; i < flipped_.size(); ++i) {
        if (i) s += '-';
        s += std::to_string(flipped_[i]);
    }
    return s;
}

double observable_c(std::span<const double> sz) {
    const auto n = static_cast<double>(sz.size());
    if (sz.size() < 2) throw InvalidArgument("observable C needs at least two sites");
    double c = 0.0;
    for (std::size_t k = 0; k < sz.size(); ++k) {
        const double i = static_cast<double>(k + 1);
        c += (2.0 * i - n - 1.0) / (n - 1.0) * (sz[k] + 1.0) / 2.0;
    }
    return c;
}

double observable_c(const Eigen::VectorXd& sz) {
    return observable_c(std::span<const double>(sz.data(), static_cast<std::size_t>(sz.size())));
}

QuenchTrace QuenchTrace::from_sz(std::string model, std::vector<double> times, Eigen::MatrixXd sz) {
    if (static_cast<std::size_t>(sz.rows()) != times.size())
        throw InvalidArgument("trace: time and magnetization rows differ");
    QuenchTrace tr;
    tr.model = std::move(model);
    tr.times = std::move(times);
    tr.sz = std::move(sz);
    double running = 0.0;
    for (Eigen::Index t = 0; t < tr.sz.rows(); ++t) {
        const Eigen::VectorXd row = tr.sz.row(t).transpose();
        const double c = observable_c(row);
        tr.c_series.push_back(c);
        running += c;
        tr.c_cumulative.push_back(running / static_cast<double>(t + 1));
        tr.n_excitations.push_back((row.array() + 1.0).sum() / 2.0);
    }
    return tr;
}

Eigen::VectorXd QuenchTrace::cumulative_sz(std::size_t upto) const {
    if (upto >= size()) throw InvalidArgument("trace: time index out of range");
    return sz.topRows(static_cast<Eigen::Index>(upto + 1)).colwise().mean().transpose();
}

std::vector<double> uniform_time_grid(double t_max, int n_points) {
    if (n_points < 1 || t_max < 0.0) throw InvalidArgument("time grid: need n_points >= 1 and t_max >= 0");
    std::vector<double> t(n_points, 0.0);
    for (int k = 1; k < n_points; ++k) t[k] = t_max * k / (n_points - 1);
    return t;
}

}  // namespace prethermal
