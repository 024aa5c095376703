#include "dhsc/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dhsc
{

LevelShape::LevelShape(std::vector<Level> levels) : levels_(std::move(levels))
{
    if (levels_.empty())
        throw ArgumentError("LevelShape: need at least one level");
    size_ = rows_ = cols_ = 1;
    for (const auto& lv : levels_) {
        if (lv.n < 1 || lv.rows < 1 || lv.cols < 1 || lv.rows + lv.cols != lv.n + 1)
            throw ArgumentError("LevelShape: each level needs rows, cols >= 1 and rows + cols = n + 1"
                                " (got n=" + std::to_string(lv.n) + ", rows=" +
                                std::to_string(lv.rows) + ", cols=" + std::to_string(lv.cols) +
                                ")");
        size_ *= lv.n;
        rows_ *= lv.rows;
        cols_ *= lv.cols;
    }
}

LevelShape LevelShape::split(const Dims& dims, double fraction)
{
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ArgumentError("LevelShape::split: fraction must lie in (0, 1)");
    std::vector<Index> rows;
    for (Index n : dims) {
        auto r = static_cast<Index>(std::floor(fraction * static_cast<double>(n + 1)));
        rows.push_back(std::clamp<Index>(r, 1, std::max<Index>(n, 1)));
    }
    return with_rows(dims, rows);
}

LevelShape LevelShape::with_rows(const Dims& dims, const std::vector<Index>& rows)
{
    if (dims.size() != rows.size())
        throw ArgumentError("LevelShape::with_rows: one row count per dimension required");
    std::vector<Level> lv;
    for (std::size_t j = 0; j < dims.size(); ++j)
        lv.push_back({dims[j], rows[j], dims[j] + 1 - rows[j]});
    return LevelShape(std::move(lv));
}

Dims LevelShape::dims() const
{
    Dims d;
    for (const auto& lv : levels_)
        d.push_back(lv.n);
    return d;
}

void LevelShape::check_dims(const Dims& d, const char* who) const
{
    if (d != dims())
        throw ArgumentError(std::string(who) + ": signal grid does not match the Hankel shape");
}

// ---------------------------------------------------------------------------

HankelIndex::HankelIndex(const LevelShape& shape) : size_(shape.size())
{
    const auto dims    = shape.dims();
    const auto strides = row_major_strides(dims);
    const auto& lv     = shape.levels();

    auto offsets = [&](bool rows) {
        std::vector<Index> out{0};
        for (std::size_t j = 0; j < lv.size(); ++j) {
            const Index extent = rows ? lv[j].rows : lv[j].cols;
            std::vector<Index> next;
            next.reserve(out.size() * static_cast<std::size_t>(extent));
            for (Index base : out)
                for (Index a = 0; a < extent; ++a)
                    next.push_back(base + a * strides[j]);
            out = std::move(next);
        }
        return out;
    };
    row_offset_ = offsets(true);
    col_offset_ = offsets(false);

    weights_ = RealVector::Zero(size_);
    for (Index r : row_offset_)
        for (Index c : col_offset_)
            weights_[r + c] += 1.0;
}

ComplexMatrix HankelIndex::forward(const ComplexVector& y) const
{
    ComplexMatrix h(rows(), cols());
    for (Index c = 0; c < cols(); ++c)
        for (Index r = 0; r < rows(); ++r)
            h(r, c) = y[row_offset_[r] + col_offset_[c]];
    return h;
}

ComplexVector HankelIndex::antidiag_sums(const ComplexMatrix& g) const
{
    ComplexVector s = ComplexVector::Zero(size_);
    for (Index c = 0; c < cols(); ++c)
        for (Index r = 0; r < rows(); ++r)
            s[row_offset_[r] + col_offset_[c]] += g(r, c);
    return s;
}

// ---------------------------------------------------------------------------

ComplexMatrix level_hankel(const Signal& y, const LevelShape& shape)
{
    shape.check_dims(y.dims, "level_hankel");
    return HankelIndex(shape).forward(y.values);
}

Signal conj_backward(const Signal& y)
{
    return Signal(y.dims, y.values.reverse().conjugate());
}

DoubleHankelMatrix double_hankel(const Signal& y, const LevelShape& shape)
{
    shape.check_dims(y.dims, "double_hankel");
    HankelIndex idx(shape);
    DoubleHankelMatrix out{ComplexMatrix(shape.rows(), 2 * shape.cols()), shape};
    out.matrix.leftCols(shape.cols())  = idx.forward(y.values);
    out.matrix.rightCols(shape.cols()) = idx.forward(y.values.reverse().conjugate());
    return out;
}

Signal antidiag_weights(const LevelShape& shape)
{
    Signal w(shape.dims());
    w.values = HankelIndex(shape).weights().cast<Complex>();
    return w;
}

Signal level_hankel_pinv(const ComplexMatrix& g, const LevelShape& shape)
{
    if (g.rows() != shape.rows() || g.cols() != shape.cols())
        throw ArgumentError("level_hankel_pinv: matrix size does not match the Hankel shape");
    HankelIndex idx(shape);
    return Signal(shape.dims(), idx.antidiag_sums(g).cwiseQuotient(idx.weights().cast<Complex>()));
}

Signal double_hankel_pinv(const ComplexMatrix& g, const LevelShape& shape)
{
    if (g.rows() != shape.rows() || g.cols() != 2 * shape.cols())
        throw ArgumentError("double_hankel_pinv: matrix size does not match the double Hankel shape");
    HankelIndex idx(shape);
    const ComplexVector s1 = idx.antidiag_sums(g.leftCols(shape.cols()));
    const ComplexVector s2 = idx.antidiag_sums(g.rightCols(shape.cols()));
    const RealVector& w    = idx.weights();
    const ComplexVector num = s1 + s2.reverse().conjugate();
    const RealVector den    = w + w.reverse();
    return Signal(shape.dims(), num.cwiseQuotient(den.cast<Complex>()));
}

RealMatrix reversal_matrix(const LevelShape& shape, int side)
{
    if (side != 0 && side != 1)
        throw ArgumentError("reversal_matrix: side must be 0 (rows) or 1 (cols)");
    RealMatrix j = RealMatrix::Ones(1, 1);
    for (const auto& lv : shape.levels()) {
        const Index m = side == 0 ? lv.rows : lv.cols;
        RealMatrix jl = RealMatrix::Identity(m, m).rowwise().reverse();
        RealMatrix kron(j.rows() * m, j.cols() * m);
        for (Index a = 0; a < j.rows(); ++a)
            for (Index b = 0; b < j.cols(); ++b)
                kron.block(a * m, b * m, m, m) = j(a, b) * jl;
        j = std::move(kron);
    }
    return j;
}

} // namespace dhsc
