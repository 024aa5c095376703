#include "svd.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <lapacke.h>

// OpenBLAS may split a factorization across its own threads, which changes
// summation order with the machine. Pin it to one thread when it is present;
// parallelism lives at the trial level instead.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace dhsc::detail
{

namespace
{

const bool blas_pinned = [] {
    if (openblas_set_num_threads)
        openblas_set_num_threads(1);
    return true;
}();

} // namespace

ThinSvd thin_svd(const ComplexMatrix& m, bool vectors)
{
    const lapack_int rows = static_cast<lapack_int>(m.rows());
    const lapack_int cols = static_cast<lapack_int>(m.cols());
    const lapack_int k    = std::min(rows, cols);
    ThinSvd out;
    out.s.resize(k);
    if (k == 0) {
        out.u = ComplexMatrix(m.rows(), 0);
        out.v = ComplexMatrix(m.cols(), 0);
        return out;
    }

    ComplexMatrix a = m; // zgesdd overwrites its input; Eigen storage is column-major
    ComplexMatrix vt;
    if (vectors) {
        out.u.resize(rows, k);
        vt.resize(k, cols);
    }
    const char job = vectors ? 'S' : 'N';
    auto* pa       = reinterpret_cast<lapack_complex_double*>(a.data());
    auto* pu       = vectors ? reinterpret_cast<lapack_complex_double*>(out.u.data()) : nullptr;
    auto* pvt      = vectors ? reinterpret_cast<lapack_complex_double*>(vt.data()) : nullptr;
    const lapack_int info =
        LAPACKE_zgesdd(LAPACK_COL_MAJOR, job, rows, cols, pa, rows, out.s.data(), pu,
                       std::max<lapack_int>(1, rows), pvt, std::max<lapack_int>(1, k));
    if (info != 0)
        throw std::runtime_error("zgesdd failed with info = " + std::to_string(info));
    if (vectors)
        out.v = vt.adjoint();
    return out;
}

} // namespace dhsc::detail
