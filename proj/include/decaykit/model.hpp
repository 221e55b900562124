// model.hpp - finite-level models with a designated subspace (the P/Q split)
//
// A model is either fully discrete (Hermitian H on dim states, P spanned by
// a chosen set of basis vectors) or a subspace coupled to a continuum whose
// coupling amplitudes g_j(E) are given per subspace state.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <optional>
#include <vector>

namespace decaykit {

using cplx = std::complex<double>;
using Index = Eigen::Index;

// Real coupling amplitude g(E) supported on [lower, upper].
class Coupling {
public:
    // |g(E)|^2 = gamma / (2 pi) on [emin, cutoff]; golden-rule width gamma.
    static Coupling flat(double gamma, double emin, double cutoff);
    // Piecewise-linear g through (energy_k, amplitude_k); zero outside the table.
    static Coupling tabulated(std::vector<double> energy, std::vector<double> amplitude);

    double amplitude(double energy) const;
    double lower() const { return energy_.front(); }
    double upper() const { return energy_.back(); }
    bool is_flat() const { return flat_; }
    // Interior points where g is not smooth (table nodes).
    std::vector<double> kinks() const;

private:
    Coupling() = default;
    std::vector<double> energy_;
    std::vector<double> amplitude_;
    bool flat_ = false;
};

struct Continuum {
    Continuum() = default;
    Continuum(double threshold, std::vector<Coupling> g) : emin(threshold), couplings(std::move(g)) {}

    double emin = 0.0;
    std::vector<Coupling> couplings; // one per subspace state
};

// Eigen-data of the discrete QHQ block: QHQ = W diag(levels) W^dagger and
// coupling = PHQ W (n x m), so PHQ f(QHQ) QHP = coupling diag(f(levels)) coupling^dagger.
struct ReservoirSpectrum {
    Eigen::VectorXd levels;
    Eigen::MatrixXcd coupling;
};

class FiniteLevelModel {
public:
    // Discrete model. H is symmetrized; the norm of the correction is recorded.
    FiniteLevelModel(Eigen::MatrixXcd hamiltonian, std::vector<Index> subspace);
    // Subspace block PHP coupled to a continuum reservoir.
    FiniteLevelModel(Eigen::MatrixXcd php, Continuum continuum);

    Index dim() const { return h_.rows(); }
    Index subspace_dim() const { return static_cast<Index>(subspace_.size()); }
    const Eigen::MatrixXcd& hamiltonian() const { return h_; }
    const std::vector<Index>& subspace() const { return subspace_; }
    const std::vector<Index>& complement() const { return complement_; }
    double symmetrization_correction() const { return correction_; }

    bool has_continuum() const { return continuum_.has_value(); }
    const Continuum& continuum() const;
    // Only for discrete models.
    const ReservoirSpectrum& reservoir() const;

    // Position of basis index `state` inside the subspace, if it belongs to it.
    std::optional<Index> subspace_position(Index state) const;

    // Copy with PHQ and QHP multiplied by `factor` (continuum couplings likewise).
    FiniteLevelModel with_coupling_scaled(double factor) const;

private:
    Eigen::MatrixXcd h_;
    std::vector<Index> subspace_;
    std::vector<Index> complement_;
    double correction_ = 0.0;
    std::optional<Continuum> continuum_;
    std::shared_ptr<const ReservoirSpectrum> reservoir_;
};

Eigen::MatrixXcd rows_cols(const Eigen::MatrixXcd& m, const std::vector<Index>& rows,
                           const std::vector<Index>& cols);

} // namespace decaykit
