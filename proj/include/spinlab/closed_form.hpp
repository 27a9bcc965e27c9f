#pragma once

// Analytic results for the three-site open chain, kept independent of the
// exact-diagonalization path so the two can check each other.
//
// The xxz-dm expressions use the Plus anisotropy sign and
//   q = sqrt(Delta^2 + 8 (1 + D^2)),
// the Ising-DM ground state uses q_I = sqrt(1 + 8 D^2). Both definitions are
// confirmed against exact diagonalization in the acceptance suite.

#include "errors.hpp"

#include <array>
#include <cmath>

namespace spinlab::closed_form {

inline double q_xxz(double delta, double d) { return std::sqrt(delta * delta + 8.0 * (1.0 + d * d)); }

inline double q_ising(double d) { return std::sqrt(1.0 + 8.0 * d * d); }

/// Ferromagnetic level-crossing line of the xxz-dm chain: the fully polarized
/// doublet becomes the ground state below this anisotropy.
inline double delta_crossing(double d) { return -std::sqrt(1.0 + d * d); }

/// The alternative line -sqrt(1 + 8 D^2). Exact diagonalization rules it out as
/// the crossing locus; kept for comparison.
inline double delta_crossing_alt(double d) { return -std::sqrt(1.0 + 8.0 * d * d); }

struct XxzClosedForm {
    double j = 1.0;
    double delta = 0.0;
    double d = 0.0;

    double q() const { return q_xxz(delta, d); }
};

/// Z = 4 e^{J b Delta/4} cosh(J b q/4) + 4 e^{-J b Delta/4} cosh(J b Delta/4).
inline double partition_closed_form(double j, double delta, double d, double t) {
    if (!(t > 0.0))
        throw ContractError("partition_closed_form: t must be > 0");
    const double b = 1.0 / t;
    const double q = q_xxz(delta, d);
    const double x = j * b / 4.0;
    return 4.0 * std::exp(x * delta) * std::cosh(x * q) + 4.0 * std::exp(-x * delta) * std::cosh(x * delta);
}

/// The four square-root eigenvalues of R for the adjacent pair in the order
/// lambda1 = lambda2, lambda3, lambda4. Not sorted.
inline std::array<double, 4> lambdas_closed_form(double j, double delta, double d, double t) {
    if (!(t > 0.0))
        throw ContractError("lambdas_closed_form: t must be > 0");
    const double b = 1.0 / t;
    const double q = q_xxz(delta, d);
    const double x = j * b / 4.0;
    const double z = partition_closed_form(j, delta, d, t);
    const double s = std::sqrt(1.0 + d * d);
    const double ep = std::exp(x * delta);
    const double ch = std::cosh(x * q);
    const double sh = std::sinh(x * q);
    const double l12 = (0.5 + std::exp(-2.0 * x * delta) + ep * (0.5 * ch - delta / (2.0 * q) * sh)) / z;
    const double l3 = (0.5 + ep * (1.5 * ch + (delta - 8.0 * s) / (2.0 * q) * sh)) / z;
    const double l4 = (0.5 + ep * (1.5 * ch + (delta + 8.0 * s) / (2.0 * q) * sh)) / z;
    return {l12, l12, l3, l4};
}

/// T = 0 concurrence of the adjacent pair. Zero on and below the crossing
/// line, where the ground manifold contains the disentangled polarized states.
inline double c12_ground_xxz(double delta, double d) {
    const double s = std::sqrt(1.0 + d * d);
    if (delta <= -s)
        return 0.0;
    const double q = q_xxz(delta, d);
    return 2.0 * (q + delta - s) * s / (q * (q + delta));
}

/// T = 0 adjacent-pair concurrence of the antiferromagnetic Ising-DM chain in a
/// field, 2D/q_I.
inline double c12_ground_idm_af(double d, double h) {
    (void)h; // independent of the field in the region where this ground state applies
    return 2.0 * std::abs(d) / q_ising(d);
}

/// DM strength above which the ferromagnetic Ising-DM ground state in field h
/// becomes entangled.
inline double idm_f_threshold(double h) {
    if (!(h >= 0.0))
        throw ContractError("idm_f_threshold: h must be >= 0");
    const double a = 3.0 + 2.0 * h;
    return std::sqrt((a * a - 1.0) / 8.0);
}

/// LHS - RHS of the closed-form critical-temperature condition (J = 1):
///   ((1 + 8D)/q) sinh(b q/4) - cosh(b q/4) = e^{-b/4} + 2 e^{-3b/4}.
/// Evaluated verbatim for comparison only; the critical temperatures reported
/// by the analysis module come from root-finding the numeric concurrence.
inline double tc_equation_residual(double delta, double d, double t) {
    if (!(t > 0.0))
        throw ContractError("tc_equation_residual: t must be > 0");
    const double b = 1.0 / t;
    const double q = q_xxz(delta, d);
    const double x = b / 4.0;
    return (1.0 + 8.0 * d) / q * std::sinh(x * q) - std::cosh(x * q) - std::exp(-x) - 2.0 * std::exp(-3.0 * x);
}

/// Closed-form finite-temperature adjacent-pair concurrence with Z from
/// partition_closed_form. Comparison only: its exponents do not depend on
/// Delta and it disagrees with exact diagonalization.
inline double c12_thermal_reference(double j, double delta, double d, double t) {
    if (!(t > 0.0))
        throw ContractError("c12_thermal_reference: t must be > 0");
    const double b = 1.0 / t;
    const double q = q_xxz(delta, d);
    const double x = j * b / 4.0;
    const double z = partition_closed_form(j, delta, d, t);
    const double inner =
        (1.0 + 8.0 * d) / q * std::sinh(x * q) - std::cosh(x * q) - std::exp(-x) - 2.0 * std::exp(-3.0 * x);
    return std::exp(x) / z * std::max(inner, 0.0);
}

} // namespace spinlab::closed_form
