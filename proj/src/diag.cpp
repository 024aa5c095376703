#include "dhsc/diag.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dhsc/csv.hpp"

namespace dhsc
{

namespace
{

// Khatri-Rao product of per-level Vandermonde matrices with `side` extents.
ComplexMatrix vandermonde(const ComplexMatrix& z, const LevelShape& shape, int side)
{
    const Index K = z.rows();
    ComplexMatrix a = ComplexMatrix::Ones(1, K);
    for (std::size_t j = 0; j < shape.ndim(); ++j) {
        const auto& lv = shape.levels()[j];
        const Index m  = side == 0 ? lv.rows : lv.cols;
        ComplexMatrix next(a.rows() * m, K);
        for (Index k = 0; k < K; ++k)
            for (Index r = 0; r < a.rows(); ++r)
                for (Index i = 0; i < m; ++i)
                    next(r * m + i, k) = a(r, k) * std::pow(z(k, Index(j)), double(i));
        a = std::move(next);
    }
    return a;
}

double min_eig(const ComplexMatrix& hermitian)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

} // namespace

double IncoherenceReport::sample_bound_estimate(double c1) const
{
    const double lg = std::log(static_cast<double>(N));
    return c1 * mu1 * c_s * static_cast<double>(K) * lg * lg * lg * lg;
}

double IncoherenceReport::robust_sample_bound_estimate(double c1) const
{
    const double lg = std::log(static_cast<double>(N));
    return c1 * mu1 * mu1 * c_s * c_s * static_cast<double>(K * K) * lg * lg * lg;
}

IncoherenceReport incoherence(const SpectralParams& params, const LevelShape& shape)
{
    params.validate();
    if (params.d != shape.ndim())
        throw ArgumentError("incoherence: params dimension does not match the shape");
    const Index K = params.order();
    if (K < 1)
        throw ArgumentError("incoherence: need K >= 1");
    for (Index k = 0; k < K; ++k)
        if (params.amps[k] == Complex(0.0, 0.0))
            throw ArgumentError("incoherence: zero amplitude has no phase");

    const ComplexMatrix z  = params.poles();
    const ComplexMatrix a1 = vandermonde(z, shape, 0);
    const ComplexMatrix a2 = vandermonde(z, shape, 1);

    // Z^(1-N) S~ as one diagonal
    ComplexVector twist(K);
    for (Index k = 0; k < K; ++k) {
        Complex zk(1.0, 0.0);
        for (std::size_t j = 0; j < shape.ndim(); ++j)
            zk *= std::pow(z(k, Index(j)), double(1 - shape.levels()[j].n));
        const Complex sgn = params.amps[k] / std::abs(params.amps[k]);
        twist[k]          = zk / (sgn * sgn);
    }
    ComplexMatrix a2t(2 * a2.rows(), K);
    a2t.topRows(a2.rows())    = a2;
    a2t.bottomRows(a2.rows()) = a2 * twist.asDiagonal();

    const double rows = static_cast<double>(shape.rows());
    const double cols = static_cast<double>(shape.cols());
    const ComplexMatrix g1  = a1.adjoint() * a1 / rows;
    const ComplexMatrix g2  = (a2t.adjoint() * a2t).conjugate() / (2.0 * cols);
    const ComplexMatrix g2p = (a2.adjoint() * a2).conjugate() / cols;

    IncoherenceReport r;
    r.K                   = K;
    r.N                   = shape.size();
    r.lambda_min_g1       = min_eig(g1);
    r.lambda_min_g2       = min_eig(g2);
    r.lambda_min_g2_prime = min_eig(g2p);
    // Rank-deficient Grams can round to a tiny negative eigenvalue; treat as 0.
    r.mu1 = 1.0 / std::max(0.0, std::min(r.lambda_min_g1, r.lambda_min_g2));
    r.c_s                 = shape_factor(shape);
    return r;
}

double shape_factor(const LevelShape& shape)
{
    const double n = static_cast<double>(shape.size());
    return std::max(n / static_cast<double>(shape.rows()),
                    n / (2.0 * static_cast<double>(shape.cols())));
}

RankProfile numeric_rank(const ComplexMatrix& m, double tol)
{
    if (!(tol > 0.0 && tol < 1.0))
        throw ArgumentError("numeric_rank: tol must lie in (0, 1)");
    RankProfile p;
    if (m.size() == 0)
        return p;
    p.singular_values = Eigen::BDCSVD<ComplexMatrix>(m).singularValues();
    const double top  = p.singular_values[0];
    if (!(top > 0.0))
        return p;
    while (p.rank < p.singular_values.size() && p.singular_values[p.rank] / top >= tol)
        ++p.rank;
    return p;
}

void write_incoherence_csv_header(std::ostream& os)
{
    os << "K,N,lambda_min_G1,lambda_min_G2,lambda_min_G2prime,mu1,c_s,sample_bound_estimate\n";
}

void write_incoherence_csv_row(std::ostream& os, const IncoherenceReport& r, double c1)
{
    os << r.K << ',' << r.N << ',' << csv::format(r.lambda_min_g1) << ','
       << csv::format(r.lambda_min_g2) << ',' << csv::format(r.lambda_min_g2_prime) << ','
       << csv::format(r.mu1) << ',' << csv::format(r.c_s) << ','
       << csv::format(r.sample_bound_estimate(c1)) << '\n';
}

} // namespace dhsc
