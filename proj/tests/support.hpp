// Shared helpers for the unit and acceptance suites: seeded generators and
// brute-force reference implementations that do not reuse library code paths.
#ifndef DHSC_TESTS_SUPPORT_HPP
#define DHSC_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dhsc/hankel.hpp"
#include "dhsc/model.hpp"
#include "dhsc/types.hpp"

namespace testing
{

using namespace dhsc;

inline ComplexVector random_complex(Index n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    ComplexVector v(n);
    for (Index i = 0; i < n; ++i)
        v[i] = Complex(g(rng), g(rng));
    return v;
}

inline ComplexMatrix random_complex(Index r, Index c, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    ComplexMatrix m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i)
            m(i, j) = Complex(g(rng), g(rng));
    return m;
}

inline Signal random_signal(const Dims& dims, std::mt19937_64& rng)
{
    return Signal(dims, random_complex(grid_size(dims), rng));
}

/// Random admissible split for each dimension.
inline LevelShape random_shape(const Dims& dims, std::mt19937_64& rng)
{
    std::vector<Index> rows;
    for (Index n : dims)
        rows.push_back(std::uniform_int_distribution<Index>(1, n)(rng));
    return LevelShape::with_rows(dims, rows);
}

inline std::vector<Index> digits(Index lin, const std::vector<Index>& extents)
{
    std::vector<Index> out(extents.size());
    for (std::size_t j = extents.size(); j-- > 0;) {
        out[j] = lin % extents[j];
        lin /= extents[j];
    }
    return out;
}

/// d-level Hankel matrix by explicit multi-index arithmetic.
inline ComplexMatrix naive_hankel(const ComplexVector& y, const LevelShape& shape)
{
    std::vector<Index> re, ce, ne;
    for (const auto& lv : shape.levels()) {
        re.push_back(lv.rows);
        ce.push_back(lv.cols);
        ne.push_back(lv.n);
    }
    Index rows = 1, cols = 1;
    for (std::size_t j = 0; j < re.size(); ++j) {
        rows *= re[j];
        cols *= ce[j];
    }
    ComplexMatrix h(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) {
            const auto a = digits(r, re);
            const auto b = digits(c, ce);
            Index lin    = 0;
            for (std::size_t j = 0; j < ne.size(); ++j)
                lin = lin * ne[j] + a[j] + b[j];
            h(r, c) = y[lin];
        }
    return h;
}

/// Reversal permutation matrix of size n.
inline RealMatrix flip(Index n)
{
    RealMatrix j = RealMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        j(i, n - 1 - i) = 1.0;
    return j;
}

/// Real-linear map y -> vec(F y) as a dense real matrix acting on
/// [Re y; Im y] and producing [Re vec; Im vec].
template <class Forward>
RealMatrix real_linear_matrix(Index n, Forward forward)
{
    Index out_len = -1;
    RealMatrix a;
    for (Index k = 0; k < 2 * n; ++k) {
        ComplexVector e = ComplexVector::Zero(n);
        e[k % n]        = k < n ? Complex(1, 0) : Complex(0, 1);
        const ComplexMatrix f = forward(e);
        const Eigen::Map<const ComplexVector> v(f.data(), f.size());
        if (out_len < 0) {
            out_len = v.size();
            a.resize(2 * out_len, 2 * n);
        }
        a.col(k).head(out_len) = v.real();
        a.col(k).tail(out_len) = v.imag();
    }
    return a;
}

/// Dense real least squares min ||A [Re y; Im y] - [Re g; Im g]||.
template <class Forward>
ComplexVector real_ls_oracle(Index n, Forward forward, const ComplexMatrix& g)
{
    const RealMatrix a = real_linear_matrix(n, forward);
    const Eigen::Map<const ComplexVector> v(g.data(), g.size());
    RealVector rhs(2 * v.size());
    rhs.head(v.size()) = v.real();
    rhs.tail(v.size()) = v.imag();
    const RealVector x = a.colPivHouseholderQr().solve(rhs);
    ComplexVector y(n);
    for (Index i = 0; i < n; ++i)
        y[i] = Complex(x[i], x[n + i]);
    return y;
}

/// Explicit Vandermonde factorization of the double Hankel matrix of an
/// on-circle instance: A1 S A2~^T with A2~ = [A2; A2 diag(conj(s_k)/s_k z_k^(1-N))].
inline ComplexMatrix factorized_double_hankel(const SpectralParams& p, const LevelShape& shape)
{
    const Index K = p.order();
    auto vdm      = [&](int side) {
        ComplexMatrix a = ComplexMatrix::Ones(1, K);
        for (std::size_t j = 0; j < shape.ndim(); ++j) {
            const auto& lv = shape.levels()[j];
            const Index m  = side == 0 ? lv.rows : lv.cols;
            ComplexMatrix next(a.rows() * m, K);
            for (Index k = 0; k < K; ++k)
                for (Index r = 0; r < a.rows(); ++r)
                    for (Index i = 0; i < m; ++i)
                        next(r * m + i, k) =
                            a(r, k) * std::pow(p.pole(k, Index(j)), double(i));
            a = next;
        }
        return a;
    };
    const ComplexMatrix a1 = vdm(0);
    const ComplexMatrix a2 = vdm(1);
    ComplexMatrix a2t(2 * a2.rows(), K);
    a2t.topRows(a2.rows()) = a2;
    for (Index k = 0; k < K; ++k) {
        Complex zk(1, 0);
        for (std::size_t j = 0; j < shape.ndim(); ++j)
            zk *= std::pow(p.pole(k, Index(j)), double(1 - shape.levels()[j].n));
        const Complex s = p.amps[k];
        a2t.col(k).tail(a2.rows()) = a2.col(k) * (std::conj(s) / s * zk);
    }
    return a1 * p.amps.asDiagonal() * a2t.transpose();
}

} // namespace testing

#endif /* DHSC_TESTS_SUPPORT_HPP */
