#pragma once

#include "linalg.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

namespace spinlab {

enum class ModelKind { XxzDm, IsingDm, IsingDmField };
enum class Boundary { Open, Periodic };
// Sign in front of the anisotropy term: Plus is the (J/4)(xx + yy + Delta zz + ...)
// form, Minus the (J/4)(xx + yy - Delta zz + ...) form reached after the
// sublattice rotation.
enum class DeltaSign { Plus, Minus };
enum class PauliAxis { X, Y, Z };

inline constexpr int kMaxQubits = 12;

/// Parameters of one spin Hamiltonian instance. Energies are in units where
/// the exchange `j` sets the scale; for the Ising kinds `j` plays the role of
/// the Ising coupling.
struct ModelSpec {
    ModelKind kind = ModelKind::XxzDm;
    double j = 1.0;
    double delta = 0.0;
    double d = 0.0;
    double h = 0.0;
    int n = 3;
    Boundary boundary = Boundary::Open;
    DeltaSign delta_sign = DeltaSign::Plus;

    void validate() const {
        if (n < 2)
            throw ContractError("ModelSpec: n must be >= 2, got " + std::to_string(n));
        if (n > kMaxQubits)
            throw DimensionError("ModelSpec: 2^" + std::to_string(n) + " exceeds dimension cap " +
                                 std::to_string(kDimensionCap));
        for (double v : {j, delta, d, h})
            if (!std::isfinite(v))
                throw ContractError("ModelSpec: parameters must be finite");
        if (kind != ModelKind::XxzDm && delta != 0.0)
            throw ContractError("ModelSpec: delta is unused for Ising kinds and must be 0");
        if (kind != ModelKind::IsingDmField && h != 0.0)
            throw ContractError("ModelSpec: h is only meaningful for kind ising-dm-field");
    }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// ---- names and the flat key=value form --------------------------------------

inline std::string_view to_string(ModelKind k) {
    switch (k) {
    case ModelKind::XxzDm: return "xxz-dm";
    case ModelKind::IsingDm: return "ising-dm";
    case ModelKind::IsingDmField: return "ising-dm-field";
    }
    return "?";
}

inline std::string_view to_string(Boundary b) { return b == Boundary::Open ? "open" : "periodic"; }
inline std::string_view to_string(DeltaSign s) { return s == DeltaSign::Plus ? "plus" : "minus"; }

inline ModelKind parse_model_kind(std::string_view s) {
    if (s == "xxz-dm") return ModelKind::XxzDm;
    if (s == "ising-dm") return ModelKind::IsingDm;
    if (s == "ising-dm-field") return ModelKind::IsingDmField;
    throw ContractError("unknown model kind '" + std::string(s) + "' (expected xxz-dm, ising-dm, ising-dm-field)");
}

inline Boundary parse_boundary(std::string_view s) {
    if (s == "open") return Boundary::Open;
    if (s == "periodic") return Boundary::Periodic;
    throw ContractError("unknown boundary '" + std::string(s) + "' (expected open or periodic)");
}

inline DeltaSign parse_delta_sign(std::string_view s) {
    if (s == "plus") return DeltaSign::Plus;
    if (s == "minus") return DeltaSign::Minus;
    throw ContractError("unknown delta_sign '" + std::string(s) + "' (expected plus or minus)");
}

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{})
        throw ContractError("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

inline double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v))
        throw ContractError("invalid number '" + std::string(s) + "' for " + std::string(what));
    return v;
}

inline int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ContractError("invalid integer '" + std::string(s) + "' for " + std::string(what));
    return v;
}

inline constexpr std::array<std::string_view, 8> kModelKeys = {"kind", "j",        "delta",   "d",
                                                                 "h",    "n", "boundary", "delta_sign"};

inline bool is_model_key(std::string_view key) {
    return std::find(kModelKeys.begin(), kModelKeys.end(), key) != kModelKeys.end();
}

/// Sets one field from its canonical key and textual value.
inline void set_model_field(ModelSpec& spec, std::string_view key, std::string_view value) {
    if (key == "kind") spec.kind = parse_model_kind(value);
    else if (key == "j") spec.j = parse_double(value, key);
    else if (key == "delta") spec.delta = parse_double(value, key);
    else if (key == "d") spec.d = parse_double(value, key);
    else if (key == "h") spec.h = parse_double(value, key);
    else if (key == "n") spec.n = parse_int(value, key);
    else if (key == "boundary") spec.boundary = parse_boundary(value);
    else if (key == "delta_sign") spec.delta_sign = parse_delta_sign(value);
    else throw ContractError("unknown model key '" + std::string(key) + "'");
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

/// Parses flat `key=value` lines; `#` starts a comment. Returns pairs in file
/// order so later lines win when applied.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string t = trim(line);
        if (t.empty())
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ContractError("line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty())
            throw ContractError("line " + std::to_string(lineno) + ": empty key");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

inline ModelSpec parse_model_spec(std::string_view text, ModelSpec base = {}) {
    for (const auto& [k, v] : parse_key_values(text))
        set_model_field(base, k, v);
    base.validate();
    return base;
}

inline std::string to_text(const ModelSpec& s) {
    std::string out;
    out += "kind=" + std::string(to_string(s.kind)) + "\n";
    out += "j=" + format_double(s.j) + "\n";
    out += "delta=" + format_double(s.delta) + "\n";
    out += "d=" + format_double(s.d) + "\n";
    out += "h=" + format_double(s.h) + "\n";
    out += "n=" + std::to_string(s.n) + "\n";
    out += "boundary=" + std::string(to_string(s.boundary)) + "\n";
    out += "delta_sign=" + std::string(to_string(s.delta_sign)) + "\n";
    return out;
}

// ---- operators ----------------------------------------------------------------

inline ComplexMatrix pauli(PauliAxis axis) {
    using namespace std::complex_literals;
    switch (axis) {
    case PauliAxis::X: return {{0.0, 1.0}, {1.0, 0.0}};
    case PauliAxis::Y: return {{0.0, -1i}, {1i, 0.0}};
    case PauliAxis::Z: return {{1.0, 0.0}, {0.0, -1.0}};
    }
    return ComplexMatrix::identity(2);
}

/// I x ... x sigma^axis x ... x I on n qubits, sigma at 1-based `site`
/// (site 1 is the most significant bit of the basis index).
inline ComplexMatrix pauli_on_site(PauliAxis axis, int site, int n) {
    if (n < 1 || n > kMaxQubits)
        throw DimensionError("pauli_on_site: n=" + std::to_string(n) + " outside 1.." + std::to_string(kMaxQubits));
    if (site < 1 || site > n)
        throw ContractError("pauli_on_site: site " + std::to_string(site) + " outside 1.." + std::to_string(n));
    ComplexMatrix r = site == 1 ? pauli(axis) : ComplexMatrix::identity(2);
    for (int s = 2; s <= n; ++s)
        r = kron(r, s == site ? pauli(axis) : ComplexMatrix::identity(2));
    return r;
}

/// Total magnetization sum_i sigma^z_i.
inline ComplexMatrix total_sz(int n) {
    const std::size_t dim = std::size_t{1} << n;
    ComplexMatrix m(dim, dim);
    for (std::size_t b = 0; b < dim; ++b)
        m(b, b) = static_cast<double>(n - 2 * std::popcount(b));
    return m;
}

inline std::vector<std::pair<int, int>> bonds(const ModelSpec& spec) {
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i < spec.n; ++i)
        out.emplace_back(i, i + 1);
    if (spec.boundary == Boundary::Periodic)
        out.emplace_back(spec.n, 1);
    return out;
}

namespace detail {

// 4x4 bond operator in the (site_i, site_j) basis, without the J/4 prefactor.
inline ComplexMatrix bond_operator(const ModelSpec& spec) {
    const auto x = pauli(PauliAxis::X);
    const auto y = pauli(PauliAxis::Y);
    const auto z = pauli(PauliAxis::Z);
    const ComplexMatrix dm = kron(x, y) - kron(y, x);
    if (spec.kind == ModelKind::XxzDm) {
        const double zz = spec.delta_sign == DeltaSign::Plus ? spec.delta : -spec.delta;
        return kron(x, x) + kron(y, y) + zz * kron(z, z) + spec.d * dm;
    }
    return kron(z, z) + spec.d * dm;
}

} // namespace detail

/// Hamiltonian matrix of the model on 2^n states.
///
///   xxz-dm:         (J/4) sum_b [xx + yy +/- Delta zz + D (xy - yx)]
///   ising-dm:       (J/4) sum_b [zz + D (xy - yx)]
///   ising-dm-field: the ising-dm terms + (J/4) h sum_i z_i
///
/// Bonds run over (i, i+1) for open chains and add (n, 1) for periodic ones.
inline ComplexMatrix build_hamiltonian(const ModelSpec& spec) {
    spec.validate();
    const int n = spec.n;
    const std::size_t dim = std::size_t{1} << n;
    const double pref = spec.j / 4.0;
    const ComplexMatrix bond = detail::bond_operator(spec);
    ComplexMatrix h(dim, dim);
    for (const auto& [si, sj] : bonds(spec)) {
        const std::size_t mi = std::size_t{1} << (n - si);
        const std::size_t mj = std::size_t{1} << (n - sj);
        for (std::size_t col = 0; col < dim; ++col) {
            const std::size_t in = ((col & mi) ? 2U : 0U) | ((col & mj) ? 1U : 0U);
            const std::size_t rest = col & ~(mi | mj);
            for (std::size_t out = 0; out < 4; ++out) {
                const cplx k = bond(out, in);
                if (k == cplx{})
                    continue;
                const std::size_t row = rest | ((out & 2U) ? mi : 0U) | ((out & 1U) ? mj : 0U);
                h(row, col) += pref * k;
            }
        }
    }
    if (spec.kind == ModelKind::IsingDmField && spec.h != 0.0) {
        for (std::size_t b = 0; b < dim; ++b)
            h(b, b) += pref * spec.h * static_cast<double>(n - 2 * std::popcount(b));
    }
    return h;
}

/// Sublattice pi-rotation about z (sigma^z on every odd site) maps an xxz-dm
/// chain with exchange j onto one with exchange -j and the opposite
/// anisotropy sign. For a ferromagnetic input (j < 0) the result has j = |j|.
/// Only defined for open chains: a periodic ring with odd n is not bipartite.
inline ModelSpec ferro_to_af_map(const ModelSpec& spec) {
    spec.validate();
    if (spec.kind != ModelKind::XxzDm)
        throw ContractError("ferro_to_af_map: requires kind xxz-dm");
    if (spec.boundary != Boundary::Open)
        throw ContractError("ferro_to_af_map: only defined for open boundary");
    ModelSpec out = spec;
    out.j = -spec.j;
    out.delta_sign = spec.delta_sign == DeltaSign::Plus ? DeltaSign::Minus : DeltaSign::Plus;
    return out;
}

/// The unitary of ferro_to_af_map: product of sigma^z over odd sites.
inline ComplexMatrix sublattice_rotation(int n) {
    const std::size_t dim = std::size_t{1} << n;
    ComplexMatrix u(dim, dim);
    for (std::size_t b = 0; b < dim; ++b) {
        int sign = 1;
        for (int s = 1; s <= n; s += 2)
            if (b >> (n - s) & 1U)
                sign = -sign;
        u(b, b) = static_cast<double>(sign);
    }
    return u;
}

} // namespace spinlab
