#ifndef DHSC_RETRIEVE_HPP
#define DHSC_RETRIEVE_HPP

#include <cstdint>
#include <iosfwd>

#include "dhsc/hankel.hpp"
#include "dhsc/model.hpp"
#include "dhsc/solve.hpp"
#include "dhsc/types.hpp"

namespace dhsc
{

struct AmplitudeFit
{
    ComplexVector amps;
    double condition     = 1.0;  // 2-norm condition number of the Vandermonde system
    bool ill_conditioned = false; // condition > 1e8
};

struct PoleEstimates
{
    std::size_t d = 1;
    ComplexMatrix poles; // K x d
    ComplexVector amps;  // K
    RealVector circle_dist; // per pole: sum_l (|z_{k,l}| - 1)^2
    double amp_condition = 1.0;
    bool amp_ill_conditioned = false;

    Index order() const noexcept { return poles.rows(); }
    /// angle(z) / 2 pi wrapped into [0, 1).
    RealMatrix frequencies() const;
};

///
/// ESPRIT on the structured matrix of `y_hat`.
///
/// With the double model the backward data is part of the matrix, so this is
/// forward-backward ESPRIT. The K leading left singular vectors U give one
/// least-squares shift operator per dimension. For d = 1 the poles are the
/// eigenvalues of that operator; for d >= 2 the first operator's eigenvectors
/// T diagonalize every other operator, which pairs the per-dimension poles.
/// If the first dimension has repeated poles, T comes from a seeded random
/// unit-modulus combination of all operators instead.
///
/// Throws ArgumentError when K exceeds what the shift structure supports and
/// DegeneracyError when sigma_K / sigma_1 < 1e-12.
///
PoleEstimates estimate_poles(const Signal& y_hat, Index K, const LevelShape& shape,
                             HankelModel model = HankelModel::Double, std::uint64_t seed = 0);

/// Least-squares fit of y ~ sum_k s_k prod_l z_{k,l}^{j_l}; `poles` is K x d.
AmplitudeFit fit_amplitudes(const Signal& y_hat, const ComplexMatrix& poles);

/// d = 1: (1/K) sum_k ||z_k| - 1|.  d >= 2: sqrt((1/K) sum_k sum_l (|z_{k,l}| - 1)^2).
double distance_to_torus(const ComplexMatrix& poles);

/// Minimum over pole assignments of the RMS wrap-around frequency distance.
/// Brute force for K <= 8, greedy nearest pairs above. Rows are poles.
double freq_error(const RealMatrix& truth, const RealMatrix& estimate);
double freq_error(const SpectralParams& truth, const PoleEstimates& est);

/// `k,dim,pole_re,pole_im,amp_re,amp_im,abs_minus_1`
void write_poles_csv(std::ostream& os, const PoleEstimates& est);

} // namespace dhsc

#endif /* DHSC_RETRIEVE_HPP */
