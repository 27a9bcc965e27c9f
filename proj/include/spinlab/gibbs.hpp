#pragma once

#include "linalg.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spinlab {

inline constexpr double kDefaultDegeneracyTol = 1e-9;

/// Unit-trace positive semidefinite operator on n qubits.
///
/// Optionally carries a factor F with rho = F F^dagger (the weighted
/// eigenvectors of a Gibbs state, for instance). Downstream quantities that
/// are square-root sensitive, concurrence in particular, use the factor when
/// present instead of re-diagonalizing rho.
class DensityMatrix {
  public:
    /// Checks Hermiticity (1e-12), unit trace (1e-12) and min eigenvalue >= -1e-10.
    static DensityMatrix from_matrix(ComplexMatrix m) {
        DensityMatrix r = assume_valid(std::move(m));
        const auto spec = hermitian_eig(r.matrix_);
        if (spec.eigenvalues.front() < -1e-10)
            throw ContractError("DensityMatrix: minimum eigenvalue " + std::to_string(spec.eigenvalues.front()) +
                                " below -1e-10");
        return r;
    }

    /// Checks shape, Hermiticity and trace but not positivity. For matrices
    /// that are positive by construction.
    static DensityMatrix assume_valid(ComplexMatrix m) {
        if (!m.is_square())
            throw ContractError("DensityMatrix: matrix is not square");
        const int n = qubit_count(m.rows());
        if (!m.is_hermitian(1e-12))
            throw ContractError("DensityMatrix: matrix is not Hermitian");
        const cplx tr = m.trace();
        if (std::abs(tr - 1.0) > 1e-12)
            throw ContractError("DensityMatrix: trace " + std::to_string(tr.real()) + " differs from 1");
        return DensityMatrix(std::move(m), n, std::nullopt);
    }

    /// rho = F F^dagger; F must have 2^n rows and unit Frobenius norm.
    static DensityMatrix from_factor(ComplexMatrix factor) {
        const int n = qubit_count(factor.rows());
        const double norm = factor.frobenius_norm();
        if (std::abs(norm * norm - 1.0) > 1e-12)
            throw ContractError("DensityMatrix: factor does not have unit norm");
        ComplexMatrix m = factor * factor.adjoint();
        return DensityMatrix(std::move(m), n, std::move(factor));
    }

    static DensityMatrix pure(std::span<const cplx> psi) {
        ComplexMatrix f(psi.size(), 1, std::vector<cplx>(psi.begin(), psi.end()));
        return from_factor(std::move(f));
    }

    const ComplexMatrix& matrix() const { return matrix_; }
    int qubits() const { return n_; }
    std::size_t dimension() const { return matrix_.rows(); }
    const std::optional<ComplexMatrix>& factor() const { return factor_; }

    double purity() const {
        // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        const double f = matrix_.frobenius_norm();
        return f * f;
    }

  private:
    DensityMatrix(ComplexMatrix m, int n, std::optional<ComplexMatrix> f)
        : matrix_(std::move(m)), n_(n), factor_(std::move(f)) {}

    ComplexMatrix matrix_;
    int n_ = 0;
    std::optional<ComplexMatrix> factor_;
};

/// Reduced state on `keep` (1-based sites). The factor, if any, is traced too.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
    if (rho.factor())
        return DensityMatrix::from_factor(partial_trace_factor(*rho.factor(), std::move(keep)));
    ComplexMatrix r = partial_trace(rho.matrix(), std::move(keep));
    return DensityMatrix::assume_valid(std::move(r));
}

/// Z = exp(-shift / t) * shifted_sum, with shift the ground energy so that
/// shifted_sum lies in [1, dim].
struct PartitionFunction {
    double shifted_sum = 1.0;
    double shift = 0.0;
    double temperature = 1.0;

    double value() const { return shifted_sum * std::exp(-shift / temperature); }
    double log_value() const { return std::log(shifted_sum) - shift / temperature; }
};

inline PartitionFunction partition_function(const HermitianSpectrum& spec, double t) {
    if (!(t >= 0.0))
        throw ContractError("partition_function: temperature must be >= 0");
    if (t == 0.0)
        throw ContractError("partition_function: t = 0 has no finite partition function; use ground_manifold");
    const double e0 = spec.eigenvalues.front();
    double sum = 0.0;
    for (double e : spec.eigenvalues)
        sum += std::exp(-(e - e0) / t);
    return {sum, e0, t};
}

inline PartitionFunction partition_function(const ComplexMatrix& h, double t) {
    if (!(t >= 0.0))
        throw ContractError("partition_function: temperature must be >= 0");
    return partition_function(hermitian_eig(h), t);
}

struct GroundManifold {
    double energy = 0.0;
    std::size_t degeneracy = 0;
    ComplexMatrix projector;
    ComplexMatrix basis; // orthonormal columns spanning the manifold
};

/// Number of lowest levels within tol * (1 + |E0|) of E0.
inline std::size_t ground_degeneracy(const std::vector<double>& eigenvalues, double tol = kDefaultDegeneracyTol) {
    const double e0 = eigenvalues.front();
    const double window = tol * (1.0 + std::abs(e0));
    std::size_t k = 0;
    while (k < eigenvalues.size() && eigenvalues[k] - e0 <= window)
        ++k;
    return k;
}

inline GroundManifold ground_manifold(const HermitianSpectrum& spec, double degeneracy_tol = kDefaultDegeneracyTol) {
    const std::size_t dim = spec.eigenvalues.size();
    const std::size_t deg = ground_degeneracy(spec.eigenvalues, degeneracy_tol);

    // Modified Gram-Schmidt over the selected eigenvectors.
    ComplexMatrix basis(dim, deg);
    for (std::size_t k = 0; k < deg; ++k) {
        std::vector<cplx> v(dim);
        for (std::size_t i = 0; i < dim; ++i)
            v[i] = spec.eigenvectors(i, k);
        for (std::size_t p = 0; p < k; ++p) {
            cplx dot = 0.0;
            for (std::size_t i = 0; i < dim; ++i)
                dot += std::conj(basis(i, p)) * v[i];
            for (std::size_t i = 0; i < dim; ++i)
                v[i] -= dot * basis(i, p);
        }
        double norm = 0.0;
        for (const auto& z : v)
            norm += std::norm(z);
        norm = std::sqrt(norm);
        if (norm < 1e-8)
            throw NumericError("ground_manifold: eigenvectors are linearly dependent");
        for (std::size_t i = 0; i < dim; ++i)
            basis(i, k) = v[i] / norm;
    }
    ComplexMatrix projector = basis * basis.adjoint();
    return {spec.eigenvalues.front(), deg, std::move(projector), std::move(basis)};
}

inline GroundManifold ground_manifold(const ComplexMatrix& h, double degeneracy_tol = kDefaultDegeneracyTol) {
    return ground_manifold(hermitian_eig(h), degeneracy_tol);
}

/// Gibbs state exp(-H/t)/Z with k_B = 1. At t = 0 this is the t -> 0+ limit:
/// the equal-weight mixture over the ground manifold.
inline DensityMatrix thermal_state(const HermitianSpectrum& spec, double t,
                                   double degeneracy_tol = kDefaultDegeneracyTol) {
    if (!(t >= 0.0))
        throw ContractError("thermal_state: temperature must be >= 0");
    const std::size_t dim = spec.eigenvalues.size();
    if (t == 0.0) {
        auto gm = ground_manifold(spec, degeneracy_tol);
        gm.basis *= 1.0 / std::sqrt(static_cast<double>(gm.degeneracy));
        return DensityMatrix::from_factor(std::move(gm.basis));
    }
    const double e0 = spec.eigenvalues.front();
    std::vector<double> w(dim);
    double sum = 0.0;
    std::size_t kept = 0;
    for (std::size_t k = 0; k < dim; ++k) {
        w[k] = std::exp(-(spec.eigenvalues[k] - e0) / t);
        sum += w[k];
        if (w[k] > 0.0)
            ++kept;
    }
    // Columns sqrt(w_k / Z) v_k; levels whose weight underflows are dropped.
    ComplexMatrix factor(dim, kept);
    std::size_t col = 0;
    for (std::size_t k = 0; k < dim; ++k) {
        if (w[k] == 0.0)
            continue;
        const double a = std::sqrt(w[k] / sum);
        for (std::size_t i = 0; i < dim; ++i)
            factor(i, col) = a * spec.eigenvectors(i, k);
        ++col;
    }
    // Renormalize against accumulated rounding in the eigenvectors.
    const double norm = factor.frobenius_norm();
    factor *= 1.0 / norm;
    return DensityMatrix::from_factor(std::move(factor));
}

inline DensityMatrix thermal_state(const ComplexMatrix& h, double t, double degeneracy_tol = kDefaultDegeneracyTol) {
    if (!(t >= 0.0))
        throw ContractError("thermal_state: temperature must be >= 0");
    return thermal_state(hermitian_eig(h), t, degeneracy_tol);
}

} // namespace spinlab
