#ifndef DHSC_TYPES_HPP
#define DHSC_TYPES_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dhsc
{

using Index         = Eigen::Index;
using Complex       = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector    = Eigen::VectorXd;
using RealMatrix    = Eigen::MatrixXd;
using Dims          = std::vector<Index>;

/// Raised for malformed inputs: shape mismatches, out-of-range parameters.
class ArgumentError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when random instance generation cannot satisfy its constraints.
class GenerationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a subspace computation hits a rank collapse.
class DegeneracyError : public std::runtime_error
{
public:
    DegeneracyError(const std::string& what, Index deficient_rank)
        : std::runtime_error(what), rank_(deficient_rank)
    {
    }
    Index deficient_rank() const noexcept { return rank_; }

private:
    Index rank_;
};

/// Product of all grid sizes; throws on an empty or non-positive grid.
Index grid_size(const Dims& dims);

///
/// A d-way complex array stored row-major (last dimension fastest).
///
/// Linear index n corresponds to the multi-index (j_1, ..., j_d) with
/// n = sum_l j_l * prod_{m > l} N_m, all indices zero-based.
///
struct Signal
{
    Dims dims;
    ComplexVector values;

    Signal() = default;
    explicit Signal(Dims d);
    Signal(Dims d, ComplexVector v);

    Index size() const noexcept { return values.size(); }
    std::size_t ndim() const noexcept { return dims.size(); }

    Complex& operator[](Index n) { return values[n]; }
    const Complex& operator[](Index n) const { return values[n]; }
};

/// Row-major strides of a grid.
std::vector<Index> row_major_strides(const Dims& dims);

/// Decompose a linear index into a multi-index.
std::vector<Index> unravel(Index n, const Dims& dims);

} // namespace dhsc

#endif /* DHSC_TYPES_HPP */
