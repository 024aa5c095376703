#ifndef DHSC_HANKEL_HPP
#define DHSC_HANKEL_HPP

#include <vector>

#include "dhsc/types.hpp"

namespace dhsc
{

/// Hankel split of one dimension: rows + cols == n + 1.
struct Level
{
    Index n;
    Index rows;
    Index cols;
};

///
/// Geometry of a d-level Hankel matrix.
///
/// Level 0 is the outermost block level, matching the row-major layout of
/// `Signal`. The matrix has prod(rows) rows and prod(cols) columns.
///
class LevelShape
{
public:
    LevelShape() = default;
    explicit LevelShape(std::vector<Level> levels);

    /// rows_j = floor(fraction * (n_j + 1)), clamped to [1, n_j].
    static LevelShape split(const Dims& dims, double fraction = 0.6);
    /// Explicit row counts per dimension.
    static LevelShape with_rows(const Dims& dims, const std::vector<Index>& rows);

    const std::vector<Level>& levels() const noexcept { return levels_; }
    std::size_t ndim() const noexcept { return levels_.size(); }
    Dims dims() const;
    Index size() const noexcept { return size_; }
    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }

    /// Throws ArgumentError unless `dims` equals this shape's grid.
    void check_dims(const Dims& dims, const char* who) const;

private:
    std::vector<Level> levels_;
    Index size_ = 0;
    Index rows_ = 0;
    Index cols_ = 0;
};

///
/// Precomputed index map (r, c) -> signal index of the d-level Hankel matrix.
///
/// The map splits as row_offset[r] + col_offset[c]. Reversing both the row
/// and column multi-indices maps signal index n to size - 1 - n.
///
class HankelIndex
{
public:
    explicit HankelIndex(const LevelShape& shape);

    Index rows() const noexcept { return static_cast<Index>(row_offset_.size()); }
    Index cols() const noexcept { return static_cast<Index>(col_offset_.size()); }
    Index size() const noexcept { return size_; }
    Index operator()(Index r, Index c) const noexcept { return row_offset_[r] + col_offset_[c]; }

    /// Number of matrix entries that read each signal entry.
    const RealVector& weights() const noexcept { return weights_; }

    /// Forward map y -> H y.
    ComplexMatrix forward(const ComplexVector& y) const;
    /// Adjoint map: per signal index, the sum of G over its antidiagonal.
    ComplexVector antidiag_sums(const ComplexMatrix& g) const;

private:
    std::vector<Index> row_offset_;
    std::vector<Index> col_offset_;
    RealVector weights_;
    Index size_;
};

/// Matrix [G1 | G2] with G2 = J1 conj(G1) J2 when built from a signal.
struct DoubleHankelMatrix
{
    ComplexMatrix matrix;
    LevelShape shape;

    auto forward_block() const { return matrix.leftCols(shape.cols()); }
    auto backward_block() const { return matrix.rightCols(shape.cols()); }
};

/// d-level Hankel matrix: entry (r, c) = y at the multi-index sum of r and c.
ComplexMatrix level_hankel(const Signal& y, const LevelShape& shape);

/// Conjugate with every dimension reversed.
Signal conj_backward(const Signal& y);

/// [H y | J1 conj(H y) J2].
DoubleHankelMatrix double_hankel(const Signal& y, const LevelShape& shape);

/// Per-entry antidiagonal counts, product over dimensions.
Signal antidiag_weights(const LevelShape& shape);

/// Least-squares inverse of `level_hankel`: antidiagonal averages.
Signal level_hankel_pinv(const ComplexMatrix& g, const LevelShape& shape);

///
/// Exact least-squares inverse of `double_hankel`.
///
/// Minimizes ||H y - G1||^2 + ||J1 conj(H y) J2 - G2||^2 over y; since the
/// second block is conjugate-linear in y, the problem is real-linear and is
/// solved entrywise by
///   y_n = (sum_{antidiag n} G1 + conj(sum_{antidiag rev(n)} G2)) / (w_n + w_rev(n)).
///
Signal double_hankel_pinv(const ComplexMatrix& g, const LevelShape& shape);

/// Reversal matrix of one side (0 = rows, 1 = cols), built as the Kronecker
/// product of per-dimension reversal matrices.
RealMatrix reversal_matrix(const LevelShape& shape, int side);

} // namespace dhsc

#endif /* DHSC_HANKEL_HPP */
