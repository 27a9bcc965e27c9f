#pragma once

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spinlab {

using cplx = std::complex<double>;

// Largest matrix side accepted anywhere in the library (2^12).
inline constexpr std::size_t kDimensionCap = 4096;

/// Dense complex matrix, row-major, value semantics.
class ComplexMatrix {
  public:
    ComplexMatrix() : ComplexMatrix(1, 1) {}

    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
        check_shape();
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        check_shape();
        if (data_.size() != rows_ * cols_)
            throw ContractError("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        check_shape();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw ContractError("ComplexMatrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::span<const double> d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const cplx> entries() const { return data_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                r(j, i) = (*this)(i, j);
        return r;
    }

    ComplexMatrix conjugate() const {
        ComplexMatrix r = *this;
        for (auto& z : r.data_)
            z = std::conj(z);
        return r;
    }

    cplx trace() const {
        cplx s = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i)
            s += (*this)(i, i);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : data_)
            m = std::max(m, std::abs(z));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : data_)
            s += std::norm(z);
        return std::sqrt(s);
    }

    // max|M - M^dagger| <= tol * (1 + max|M|)
    bool is_hermitian(double tol = 1e-12) const {
        if (!is_square())
            return false;
        const double bound = tol * (1.0 + max_abs());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i; j < cols_; ++j)
                if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > bound)
                    return false;
        return true;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k)
            data_[k] += o.data_[k];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k)
            data_[k] -= o.data_[k];
        return *this;
    }

    ComplexMatrix& operator*=(cplx s) {
        for (auto& z : data_)
            z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_)
            throw ContractError("matrix product: inner dimensions " + std::to_string(a.cols_) + " and " +
                                std::to_string(b.rows_) + " differ");
        ComplexMatrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{})
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    r(i, j) += aik * b(k, j);
            }
        return r;
    }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

  private:
    void check_shape() const {
        if (rows_ == 0 || cols_ == 0)
            throw ContractError("ComplexMatrix: rows and cols must be >= 1");
        if (rows_ > kDimensionCap || cols_ > kDimensionCap * kDimensionCap)
            throw DimensionError("ComplexMatrix: " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                                 " exceeds dimension cap " + std::to_string(kDimensionCap));
    }

    void require_same_shape(const ComplexMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw ContractError("matrix shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ContractError("max_abs_diff: shapes differ");
    double m = 0.0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t k = 0; k < ea.size(); ++k)
        m = std::max(m, std::abs(ea[k] - eb[k]));
    return m;
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

/// Kronecker product. Throws DimensionError when either resulting side exceeds
/// `cap`.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t cap = kDimensionCap) {
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    if (rows > cap || cols > cap)
        throw DimensionError("kron: result " + std::to_string(rows) + "x" + std::to_string(cols) +
                             " exceeds cap " + std::to_string(cap));
    ComplexMatrix r(rows, cols);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{})
                continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return r;
}

struct HermitianSpectrum {
    std::vector<double> eigenvalues; // ascending
    ComplexMatrix eigenvectors;      // column k belongs to eigenvalues[k]
};

namespace detail {

// Cyclic complex Jacobi on a dense Hermitian block. `a` is overwritten; on
// return its diagonal holds the eigenvalues and `v` the eigenvectors.
inline void jacobi_hermitian(ComplexMatrix& a, ComplexMatrix& v) {
    const std::size_t n = a.rows();
    v = ComplexMatrix::identity(n);
    const double scale = a.frobenius_norm();
    if (n == 1 || scale == 0.0)
        return;
    const double target = 1e-14 * scale;
    constexpr int kMaxSweeps = 100;

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    s += std::norm(a(i, j));
        return std::sqrt(s);
    };

    double off = off_norm();
    for (int sweep = 0; sweep < kMaxSweeps && off > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double g = std::abs(apq);
                if (g == 0.0)
                    continue;
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * g);
                double t;
                if (std::abs(theta) > 1e150)
                    t = 0.5 / theta;
                else
                    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const cplx e = apq / g;
                const cplx se = s * e;
                const cplx sec = s * std::conj(e);

                // A <- A J,  J = [[c, s e], [-s conj(e), c]] on (p, q)
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = c * akp - sec * akq;
                    a(k, q) = se * akp + c * akq;
                }
                // A <- J^dagger A
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = c * apk - se * aqk;
                    a(q, k) = sec * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();

                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = c * vkp - sec * vkq;
                    v(k, q) = se * vkp + c * vkq;
                }
            }
        off = off_norm();
    }
    if (off > target)
        throw NumericError("hermitian_eig: Jacobi did not converge, off-diagonal residual " + std::to_string(off) +
                           " (target " + std::to_string(target) + ")");
}

// Connected components of the nonzero pattern, each sorted ascending.
inline std::vector<std::vector<std::size_t>> block_structure(const ComplexMatrix& m) {
    const std::size_t n = m.rows();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (m(i, j) != cplx{} || m(j, i) != cplx{}) {
                const std::size_t ri = find(i), rj = find(j);
                if (ri != rj)
                    parent[std::max(ri, rj)] = std::min(ri, rj);
            }
    std::vector<std::vector<std::size_t>> blocks;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] == n) {
            slot[r] = blocks.size();
            blocks.emplace_back();
        }
        blocks[slot[r]].push_back(i);
    }
    return blocks;
}

// Rotate a unit vector so its first component above 1e-10 in modulus is real
// and positive.
inline void normalize_phase(ComplexMatrix& v, std::size_t col) {
    for (std::size_t i = 0; i < v.rows(); ++i) {
        const double r = std::abs(v(i, col));
        if (r > 1e-10) {
            const cplx ph = std::conj(v(i, col)) / r;
            for (std::size_t k = 0; k < v.rows(); ++k)
                v(k, col) *= ph;
            v(i, col) = r;
            return;
        }
    }
}

} // namespace detail

/// Eigendecomposition of a Hermitian matrix.
///
/// The matrix is first split into the connected components of its nonzero
/// pattern (symmetry sectors of a spin Hamiltonian show up this way), then
/// each block is diagonalized by cyclic complex Jacobi until the off-diagonal
/// Frobenius mass drops below 1e-14 of the block norm. Eigenvalues come back
/// ascending; ties keep basis order of their block, and every eigenvector is
/// phase-fixed so the output is deterministic.
inline HermitianSpectrum hermitian_eig(const ComplexMatrix& m) {
    if (!m.is_square())
        throw ContractError("hermitian_eig: matrix is not square");
    if (!m.is_hermitian())
        throw ContractError("hermitian_eig: matrix is not Hermitian");
    const std::size_t n = m.rows();

    struct Pair {
        double value;
        std::size_t block;
        std::size_t local;
    };
    std::vector<Pair> order;
    order.reserve(n);
    std::vector<ComplexMatrix> vectors;
    const auto blocks = detail::block_structure(m);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& idx = blocks[b];
        ComplexMatrix a(idx.size(), idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j)
                a(i, j) = 0.5 * (m(idx[i], idx[j]) + std::conj(m(idx[j], idx[i])));
        ComplexMatrix v(1, 1);
        detail::jacobi_hermitian(a, v);
        for (std::size_t k = 0; k < idx.size(); ++k)
            order.push_back({a(k, k).real(), b, k});
        vectors.push_back(std::move(v));
    }
    std::stable_sort(order.begin(), order.end(), [](const Pair& x, const Pair& y) { return x.value < y.value; });

    HermitianSpectrum out{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        const auto& p = order[k];
        out.eigenvalues[k] = p.value;
        const auto& idx = blocks[p.block];
        for (std::size_t i = 0; i < idx.size(); ++i)
            out.eigenvectors(idx[i], k) = vectors[p.block](i, p.local);
        detail::normalize_phase(out.eigenvectors, k);
    }
    return out;
}

/// V diag(f(e)) V^dagger for a spectral decomposition.
template <typename F> ComplexMatrix spectral_function(const HermitianSpectrum& s, F&& f) {
    const std::size_t n = s.eigenvalues.size();
    ComplexMatrix r(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = f(s.eigenvalues[k]);
        if (w == 0.0)
            continue;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vi = w * s.eigenvectors(i, k);
            if (vi == cplx{})
                continue;
            for (std::size_t j = 0; j < n; ++j)
                r(i, j) += vi * std::conj(s.eigenvectors(j, k));
        }
    }
    return r;
}

/// Singular values (descending) by one-sided Jacobi. Accurate to roughly
/// machine precision times the largest singular value, including the zero ones.
inline std::vector<double> singular_values(const ComplexMatrix& m) {
    // Work on the orientation with fewer columns.
    ComplexMatrix a = m.cols() <= m.rows() ? m : m.adjoint();
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    constexpr int kMaxSweeps = 100;
    constexpr double kEps = 1e-15;

    // Couplings below eps^2 |A|_F^2 cannot move any singular value by more
    // than eps |A|_F; skipping them avoids cycling on denormal columns.
    double total = 0.0;
    for (const auto& z : a.entries())
        total += std::norm(z);
    const double negligible = kEps * kEps * total;

    bool rotated = true;
    for (int sweep = 0; sweep < kMaxSweeps && rotated; ++sweep) {
        rotated = false;
        for (std::size_t p = 0; p + 1 < cols; ++p)
            for (std::size_t q = p + 1; q < cols; ++q) {
                double alpha = 0.0, beta = 0.0;
                cplx gamma = 0.0;
                for (std::size_t k = 0; k < rows; ++k) {
                    alpha += std::norm(a(k, p));
                    beta += std::norm(a(k, q));
                    gamma += std::conj(a(k, p)) * a(k, q);
                }
                const double g = std::abs(gamma);
                if (g <= negligible || g <= kEps * std::sqrt(alpha) * std::sqrt(beta))
                    continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx e = gamma / g;
                for (std::size_t k = 0; k < rows; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = c * akp - s * std::conj(e) * akq;
                    a(k, q) = s * e * akp + c * akq;
                }
            }
    }
    if (rotated)
        throw NumericError("singular_values: one-sided Jacobi did not converge");

    std::vector<double> sv(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < rows; ++k)
            s += std::norm(a(k, j));
        sv[j] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

/// Upper-triangular factor R of a Householder QR of `m` (rows >= cols gives a
/// cols x cols R; otherwise the leading rows x cols trapezoid).
inline ComplexMatrix qr_r_factor(const ComplexMatrix& m) {
    ComplexMatrix a = m;
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    const std::size_t steps = std::min(rows, cols);
    for (std::size_t k = 0; k < steps; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k; i < rows; ++i)
            norm2 += std::norm(a(i, k));
        const double xnorm = std::sqrt(norm2);
        if (xnorm == 0.0)
            continue;
        const cplx x0 = a(k, k);
        const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx{1.0};
        const cplx alpha = -phase * xnorm;
        std::vector<cplx> v(rows - k);
        v[0] = x0 - alpha;
        for (std::size_t i = k + 1; i < rows; ++i)
            v[i - k] = a(i, k);
        double vnorm2 = 0.0;
        for (const auto& z : v)
            vnorm2 += std::norm(z);
        if (vnorm2 == 0.0)
            continue;
        for (std::size_t j = k; j < cols; ++j) {
            cplx dot = 0.0;
            for (std::size_t i = k; i < rows; ++i)
                dot += std::conj(v[i - k]) * a(i, j);
            const cplx f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < rows; ++i)
                a(i, j) -= f * v[i - k];
        }
    }
    ComplexMatrix r(steps, cols);
    for (std::size_t i = 0; i < steps; ++i)
        for (std::size_t j = i; j < cols; ++j)
            r(i, j) = a(i, j);
    return r;
}

namespace detail {

// Map (kept index, traced index) -> full basis index for n qubits, site 1 the
// most significant bit. `keep` holds sorted 1-based sites.
inline std::vector<std::size_t> split_index_table(int n, const std::vector<int>& keep) {
    std::vector<int> traced;
    for (int s = 1; s <= n; ++s)
        if (!std::binary_search(keep.begin(), keep.end(), s))
            traced.push_back(s);
    const std::size_t dk = std::size_t{1} << keep.size();
    const std::size_t dt = std::size_t{1} << traced.size();
    std::vector<std::size_t> table(dk * dt);
    for (std::size_t a = 0; a < dk; ++a)
        for (std::size_t t = 0; t < dt; ++t) {
            std::size_t full = 0;
            for (std::size_t b = 0; b < keep.size(); ++b)
                if (a >> (keep.size() - 1 - b) & 1U)
                    full |= std::size_t{1} << (n - keep[b]);
            for (std::size_t b = 0; b < traced.size(); ++b)
                if (t >> (traced.size() - 1 - b) & 1U)
                    full |= std::size_t{1} << (n - traced[b]);
            table[a * dt + t] = full;
        }
    return table;
}

} // namespace detail

inline int qubit_count(std::size_t dim) {
    int n = 0;
    while ((std::size_t{1} << n) < dim)
        ++n;
    if ((std::size_t{1} << n) != dim)
        throw ContractError("dimension " + std::to_string(dim) + " is not a power of two");
    return n;
}

/// Sorts and checks a site set against n qubits.
inline std::vector<int> normalize_sites(std::vector<int> keep, int n) {
    if (keep.empty())
        throw ContractError("partial_trace: keep set is empty");
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
        throw ContractError("partial_trace: duplicate site in keep set");
    if (keep.front() < 1 || keep.back() > n)
        throw ContractError("partial_trace: site index out of range 1.." + std::to_string(n));
    return keep;
}

/// Reduced matrix on the sites in `keep` (1-based), tracing out the rest.
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, std::vector<int> keep) {
    if (!rho.is_square())
        throw ContractError("partial_trace: matrix is not square");
    const int n = qubit_count(rho.rows());
    keep = normalize_sites(std::move(keep), n);
    const std::size_t dk = std::size_t{1} << keep.size();
    const std::size_t dt = rho.rows() / dk;
    const auto table = detail::split_index_table(n, keep);
    ComplexMatrix r(dk, dk);
    for (std::size_t a = 0; a < dk; ++a)
        for (std::size_t b = 0; b < dk; ++b) {
            cplx s = 0.0;
            for (std::size_t t = 0; t < dt; ++t)
                s += rho(table[a * dt + t], table[b * dt + t]);
            r(a, b) = s;
        }
    return r;
}

/// Given F with rho = F F^dagger, returns F' with tr_rest(rho) = F' F'^dagger.
inline ComplexMatrix partial_trace_factor(const ComplexMatrix& factor, std::vector<int> keep) {
    const int n = qubit_count(factor.rows());
    keep = normalize_sites(std::move(keep), n);
    const std::size_t dk = std::size_t{1} << keep.size();
    const std::size_t dt = factor.rows() / dk;
    const auto table = detail::split_index_table(n, keep);
    ComplexMatrix r(dk, factor.cols() * dt);
    for (std::size_t a = 0; a < dk; ++a)
        for (std::size_t c = 0; c < factor.cols(); ++c)
            for (std::size_t t = 0; t < dt; ++t)
                r(a, c * dt + t) = factor(table[a * dt + t], c);
    return r;
}

} // namespace spinlab
