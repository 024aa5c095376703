#include "dhsc/types.hpp"

#include <utility>

namespace dhsc
{

Index grid_size(const Dims& dims)
{
    if (dims.empty())
        throw ArgumentError("grid must have at least one dimension");
    Index n = 1;
    for (Index d : dims) {
        if (d <= 0)
            throw ArgumentError("grid sizes must be positive");
        n *= d;
    }
    return n;
}

Signal::Signal(Dims d) : dims(std::move(d)), values(ComplexVector::Zero(grid_size(dims))) {}

Signal::Signal(Dims d, ComplexVector v) : dims(std::move(d)), values(std::move(v))
{
    if (values.size() != grid_size(dims))
        throw ArgumentError("signal length does not match its grid");
}

std::vector<Index> row_major_strides(const Dims& dims)
{
    std::vector<Index> strides(dims.size(), 1);
    for (std::size_t l = dims.size(); l-- > 1;)
        strides[l - 1] = strides[l] * dims[l];
    return strides;
}

std::vector<Index> unravel(Index n, const Dims& dims)
{
    std::vector<Index> idx(dims.size());
    for (std::size_t l = dims.size(); l-- > 0;) {
        idx[l] = n % dims[l];
        n /= dims[l];
    }
    return idx;
}

} // namespace dhsc
