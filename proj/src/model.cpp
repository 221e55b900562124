#include "decaykit/model.hpp"

#include "decaykit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace decaykit {

Coupling Coupling::flat(double gamma, double emin, double cutoff) {
    if (!(gamma > 0.0)) throw DomainError("flat coupling: gamma must be positive");
    if (!(cutoff > emin)) throw DomainError("flat coupling: cutoff must exceed emin");
    Coupling c;
    const double g = std::sqrt(gamma / (2.0 * std::numbers::pi));
    c.energy_ = {emin, cutoff};
    c.amplitude_ = {g, g};
    c.flat_ = true;
    return c;
}

Coupling Coupling::tabulated(std::vector<double> energy, std::vector<double> amplitude) {
    if (energy.size() < 2 || energy.size() != amplitude.size())
        throw DomainError("tabulated coupling: need at least two (energy, amplitude) pairs");
    if (!std::is_sorted(energy.begin(), energy.end()) ||
        std::adjacent_find(energy.begin(), energy.end()) != energy.end())
        throw DomainError("tabulated coupling: energies must be strictly increasing");
    Coupling c;
    c.energy_ = std::move(energy);
    c.amplitude_ = std::move(amplitude);
    return c;
}

double Coupling::amplitude(double energy) const {
    if (energy < energy_.front() || energy > energy_.back()) return 0.0;
    if (flat_) return amplitude_.front();
    auto it = std::upper_bound(energy_.begin(), energy_.end(), energy);
    if (it == energy_.end()) return amplitude_.back();
    const auto k = static_cast<std::size_t>(it - energy_.begin());
    const double x0 = energy_[k - 1], x1 = energy_[k];
    const double w = (energy - x0) / (x1 - x0);
    return (1.0 - w) * amplitude_[k - 1] + w * amplitude_[k];
}

std::vector<double> Coupling::kinks() const {
    if (flat_ || energy_.size() <= 2) return {};
    return {energy_.begin() + 1, energy_.end() - 1};
}

namespace {

std::vector<Index> complement_of(Index dim, const std::vector<Index>& subspace) {
    std::vector<bool> in(static_cast<std::size_t>(dim), false);
    for (Index i : subspace) in[static_cast<std::size_t>(i)] = true;
    std::vector<Index> out;
    for (Index i = 0; i < dim; ++i)
        if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

double symmetrize(Eigen::MatrixXcd& h) {
    const Eigen::MatrixXcd herm = 0.5 * (h + h.adjoint());
    const double correction = (h - herm).norm();
    h = herm;
    return correction;
}

} // namespace

Eigen::MatrixXcd rows_cols(const Eigen::MatrixXcd& m, const std::vector<Index>& rows,
                           const std::vector<Index>& cols) {
    Eigen::MatrixXcd out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
    return out;
}

FiniteLevelModel::FiniteLevelModel(Eigen::MatrixXcd hamiltonian, std::vector<Index> subspace)
    : h_(std::move(hamiltonian)), subspace_(std::move(subspace)) {
    if (h_.rows() != h_.cols() || h_.rows() == 0)
        throw DomainError("model: Hamiltonian must be square and non-empty");
    if (subspace_.empty()) throw DomainError("model: subspace must not be empty");
    std::set<Index> seen;
    for (Index i : subspace_) {
        if (i < 0 || i >= h_.rows()) throw DomainError("model: subspace index out of range");
        if (!seen.insert(i).second) throw DomainError("model: duplicate subspace index");
    }
    correction_ = symmetrize(h_);
    complement_ = complement_of(h_.rows(), subspace_);

    auto spec = std::make_shared<ReservoirSpectrum>();
    if (!complement_.empty()) {
        const Eigen::MatrixXcd qhq = rows_cols(h_, complement_, complement_);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(qhq);
        if (solver.info() != Eigen::Success)
            throw NumericError("model: eigendecomposition of QHQ failed");
        spec->levels = solver.eigenvalues();
        spec->coupling = rows_cols(h_, subspace_, complement_) * solver.eigenvectors();
    } else {
        spec->levels.resize(0);
        spec->coupling.resize(subspace_dim(), 0);
    }
    reservoir_ = std::move(spec);
}

FiniteLevelModel::FiniteLevelModel(Eigen::MatrixXcd php, Continuum continuum)
    : h_(std::move(php)), continuum_(std::move(continuum)) {
    if (h_.rows() != h_.cols() || h_.rows() == 0)
        throw DomainError("model: PHP must be square and non-empty");
    if (static_cast<Index>(continuum_->couplings.size()) != h_.rows())
        throw DomainError("model: need one continuum coupling per subspace state");
    for (const auto& g : continuum_->couplings)
        if (g.lower() < continuum_->emin)
            throw DomainError("model: coupling support starts below the continuum threshold");
    correction_ = symmetrize(h_);
    for (Index i = 0; i < h_.rows(); ++i) subspace_.push_back(i);
}

const Continuum& FiniteLevelModel::continuum() const {
    if (!continuum_) throw DomainError("model: no continuum reservoir");
    return *continuum_;
}

const ReservoirSpectrum& FiniteLevelModel::reservoir() const {
    if (!reservoir_) throw DomainError("model: continuum models have no discrete reservoir spectrum");
    return *reservoir_;
}

std::optional<Index> FiniteLevelModel::subspace_position(Index state) const {
    auto it = std::find(subspace_.begin(), subspace_.end(), state);
    if (it == subspace_.end()) return std::nullopt;
    return static_cast<Index>(it - subspace_.begin());
}

FiniteLevelModel FiniteLevelModel::with_coupling_scaled(double factor) const {
    if (continuum_) {
        Continuum c = *continuum_;
        for (auto& g : c.couplings) {
            std::vector<double> e, a;
            if (g.is_flat()) {
                // |g|^2 scales by factor^2, so does the golden-rule width.
                const double width = 2.0 * std::numbers::pi * g.amplitude(g.lower()) * g.amplitude(g.lower());
                g = Coupling::flat(width * factor * factor, g.lower(), g.upper());
                continue;
            }
            // Rebuild the table with scaled amplitudes.
            std::vector<double> nodes{g.lower()};
            for (double k : g.kinks()) nodes.push_back(k);
            nodes.push_back(g.upper());
            for (double x : nodes) {
                e.push_back(x);
                a.push_back(factor * g.amplitude(x));
            }
            g = Coupling::tabulated(std::move(e), std::move(a));
        }
        return FiniteLevelModel(h_, std::move(c));
    }
    Eigen::MatrixXcd h = h_;
    for (Index p : subspace_)
        for (Index q : complement_) {
            h(p, q) *= factor;
            h(q, p) *= factor;
        }
    return FiniteLevelModel(std::move(h), subspace_);
}

} // namespace decaykit
