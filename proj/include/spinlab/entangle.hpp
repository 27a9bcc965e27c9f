#pragma once

#include "gibbs.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace spinlab {

// Eigenvalues of R in [-kClampThreshold, 0) are roundoff and clamp to zero;
// anything lower means the input was not a density matrix.
inline constexpr double kClampThreshold = 1e-8;

struct ConcurrenceResult {
    std::pair<int, int> pair{1, 2};
    std::array<double, 4> lambdas{}; // descending
    double value = 0.0;
};

/// sigma^y x sigma^y in the computational basis (real).
inline ComplexMatrix spin_flip_operator() {
    return {{0.0, 0.0, 0.0, -1.0}, {0.0, 0.0, 1.0, 0.0}, {0.0, 1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0, 0.0}};
}

/// R = rho (sy x sy) rho* (sy x sy), conjugation entrywise in the computational
/// basis.
inline ComplexMatrix spin_flip_r(const DensityMatrix& rho_pair) {
    if (rho_pair.qubits() != 2)
        throw ContractError("spin_flip_r: expected a 2-qubit density matrix, got " +
                            std::to_string(rho_pair.qubits()) + " qubits");
    const ComplexMatrix yy = spin_flip_operator();
    const ComplexMatrix& rho = rho_pair.matrix();
    return rho * yy * rho.conjugate() * yy;
}

namespace detail {

// Factor F of rho = F F^dagger from an eigendecomposition of rho.
inline ComplexMatrix factor_from_spectrum(const ComplexMatrix& rho) {
    const auto s = hermitian_eig(rho);
    if (s.eigenvalues.front() < -kClampThreshold)
        throw NumericError("concurrence: density matrix has eigenvalue " + std::to_string(s.eigenvalues.front()) +
                           " below -" + std::to_string(kClampThreshold) + "; input is not positive semidefinite");
    // Eigenvalues at the roundoff level of the largest one are zeros whose
    // square roots would otherwise leak ~1e-8 into the lambdas.
    const double floor = 8.0 * std::numeric_limits<double>::epsilon() * s.eigenvalues.back();
    ComplexMatrix f(rho.rows(), rho.cols());
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
        const double a = s.eigenvalues[k] > floor ? std::sqrt(s.eigenvalues[k]) : 0.0;
        for (std::size_t i = 0; i < rho.rows(); ++i)
            f(i, k) = a * s.eigenvectors(i, k);
    }
    return f;
}

} // namespace detail

/// Square roots of the eigenvalues of R, descending.
///
/// With rho = F F^dagger these equal the singular values of the symmetric
/// matrix F^T (sy x sy) F. F is first compressed to at most four columns by a
/// Householder QR of F^dagger, which leaves those singular values unchanged,
/// and the 4x4 (or smaller) problem is solved by one-sided Jacobi. Unlike
/// taking square roots of eig(R), this keeps vanishing lambdas accurate to
/// machine precision.
inline std::array<double, 4> concurrence_lambdas(const DensityMatrix& rho_pair) {
    if (rho_pair.qubits() != 2)
        throw ContractError("concurrence: expected a 2-qubit density matrix, got " +
                            std::to_string(rho_pair.qubits()) + " qubits");
    ComplexMatrix f = rho_pair.factor() ? *rho_pair.factor() : detail::factor_from_spectrum(rho_pair.matrix());
    if (f.cols() > 4)
        f = qr_r_factor(f.adjoint()).adjoint();
    const ComplexMatrix tau = f.transpose() * spin_flip_operator() * f;
    const auto sv = singular_values(tau);
    std::array<double, 4> lambdas{};
    for (std::size_t k = 0; k < std::min<std::size_t>(4, sv.size()); ++k)
        lambdas[k] = sv[k];
    return lambdas;
}

inline double concurrence_from_lambdas(const std::array<double, 4>& lambdas) {
    const double sum = std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
    return std::clamp(2.0 * lambdas[0] - sum, 0.0, 1.0);
}

/// Wootters concurrence of a two-qubit state.
inline ConcurrenceResult concurrence(const DensityMatrix& rho_pair, std::pair<int, int> label = {1, 2}) {
    ConcurrenceResult r;
    r.pair = label;
    r.lambdas = concurrence_lambdas(rho_pair);
    r.value = concurrence_from_lambdas(r.lambdas);
    return r;
}

/// Concurrence between sites i and j (1-based) of an n-qubit state.
inline ConcurrenceResult pairwise_concurrence(const DensityMatrix& rho, int i, int j) {
    if (i == j)
        throw ContractError("pairwise_concurrence: sites must differ");
    const int n = rho.qubits();
    if (i < 1 || i > n || j < 1 || j > n)
        throw ContractError("pairwise_concurrence: site outside 1.." + std::to_string(n));
    const DensityMatrix reduced = partial_trace(rho, {i, j});
    return concurrence(reduced, {i, j});
}

} // namespace spinlab
