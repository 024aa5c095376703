#ifndef DHSC_DIAG_HPP
#define DHSC_DIAG_HPP

#include <iosfwd>

#include "dhsc/hankel.hpp"
#include "dhsc/model.hpp"
#include "dhsc/types.hpp"

namespace dhsc
{

///
/// Incoherence of the double Hankel matrix of an on-circle instance.
///
/// With A1, A2 the row/column Vandermonde (Khatri-Rao for d >= 2) factors,
///   G1  = A1^H A1 / rows
///   G2  = conj(A2~^H A2~) / (2 cols),  A2~ = [A2; A2 Z^(1-N) S~]
///   G2' = conj(A2^H A2) / cols
/// where S~ = diag(sgn(s_k)^-2) and Z^(1-N) = prod_l Z_l^(1 - N_l).
///
struct IncoherenceReport
{
    double lambda_min_g1       = 0.0;
    double lambda_min_g2       = 0.0;
    double lambda_min_g2_prime = 0.0;
    double mu1                 = 0.0; // 1 / min(lambda_min_g1, lambda_min_g2)
    double c_s                 = 0.0;
    Index K                    = 0;
    Index N                    = 0;

    /// Order-wise sample bound c1 * mu1 * c_s * K * log^4 N (noiseless).
    /// The universal constant c1 is unknown; callers supply it.
    double sample_bound_estimate(double c1 = 1.0) const;
    /// Order-wise robust bound c1 * mu1^2 * c_s^2 * K^2 * log^3 N.
    double robust_sample_bound_estimate(double c1 = 1.0) const;
};

IncoherenceReport incoherence(const SpectralParams& params, const LevelShape& shape);

/// max(N / rows, N / (2 cols)).
double shape_factor(const LevelShape& shape);

struct RankProfile
{
    Index rank = 0;
    RealVector singular_values; // descending
};

/// #{k : sigma_k / sigma_1 >= tol}; the zero matrix has rank 0.
RankProfile numeric_rank(const ComplexMatrix& m, double tol = 1e-10);

/// Header and one row of the incoherence report CSV.
void write_incoherence_csv_header(std::ostream& os);
void write_incoherence_csv_row(std::ostream& os, const IncoherenceReport& r, double c1 = 1.0);

} // namespace dhsc

#endif /* DHSC_DIAG_HPP */
