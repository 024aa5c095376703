#ifndef DHSC_SRC_SVD_HPP
#define DHSC_SRC_SVD_HPP

#include "dhsc/types.hpp"

namespace dhsc::detail
{

struct ThinSvd
{
    ComplexMatrix u;
    RealVector s; // descending
    ComplexMatrix v;
};

/// Thin SVD through LAPACK's divide-and-conquer driver. `vectors` = false
/// computes singular values only.
ThinSvd thin_svd(const ComplexMatrix& m, bool vectors = true);

} // namespace dhsc::detail

#endif /* DHSC_SRC_SVD_HPP */
