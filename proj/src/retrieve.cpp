#include "dhsc/retrieve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "dhsc/csv.hpp"

namespace dhsc
{

RealMatrix PoleEstimates::frequencies() const
{
    RealMatrix f(poles.rows(), poles.cols());
    for (Index k = 0; k < poles.rows(); ++k)
        for (Index l = 0; l < poles.cols(); ++l) {
            double turns = std::arg(poles(k, l)) / (2.0 * std::numbers::pi);
            turns -= std::floor(turns);
            f(k, l) = turns < 1.0 ? turns : 0.0;
        }
    return f;
}

namespace
{

// Rows of U whose level-j row digit is < rows_j - 1, and their shifted partners.
void shift_rows(const LevelShape& shape, std::size_t j, std::vector<Index>& up,
                std::vector<Index>& down)
{
    const auto& lv = shape.levels();
    Index inner    = 1;
    for (std::size_t l = j + 1; l < lv.size(); ++l)
        inner *= lv[l].rows;
    up.clear();
    down.clear();
    for (Index r = 0; r < shape.rows(); ++r) {
        const Index digit = (r / inner) % lv[j].rows;
        if (digit + 1 < lv[j].rows) {
            up.push_back(r);
            down.push_back(r + inner);
        }
    }
}

ComplexMatrix take_rows(const ComplexMatrix& u, const std::vector<Index>& rows)
{
    ComplexMatrix out(static_cast<Index>(rows.size()), u.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Index>(i)) = u.row(rows[i]);
    return out;
}

double min_pairwise_gap(const ComplexVector& v)
{
    double gap = std::numeric_limits<double>::infinity();
    for (Index a = 0; a < v.size(); ++a)
        for (Index b = 0; b < a; ++b)
            gap = std::min(gap, std::abs(v[a] - v[b]));
    return gap;
}

} // namespace

PoleEstimates estimate_poles(const Signal& y_hat, Index K, const LevelShape& shape,
                             HankelModel model, std::uint64_t seed)
{
    shape.check_dims(y_hat.dims, "estimate_poles");
    if (K < 1)
        throw ArgumentError("estimate_poles: K must be >= 1");
    const std::size_t d = shape.ndim();

    std::vector<std::vector<Index>> ups(d), downs(d);
    for (std::size_t j = 0; j < d; ++j) {
        shift_rows(shape, j, ups[j], downs[j]);
        if (static_cast<Index>(ups[j].size()) < K)
            throw ArgumentError("estimate_poles: K exceeds the shift-invariant subspace of level " +
                                std::to_string(j + 1));
    }

    const StructuredMap map(shape, model);
    const ComplexMatrix mat = map.forward(y_hat.values);
    if (K > std::min(mat.rows(), mat.cols()))
        throw ArgumentError("estimate_poles: K exceeds the structured matrix rank bound");

    Eigen::BDCSVD<ComplexMatrix> svd(mat, Eigen::ComputeThinU);
    const RealVector& sv = svd.singularValues();
    if (!(sv[0] > 0.0) || sv[K - 1] / sv[0] < 1e-12)
        throw DegeneracyError("estimate_poles: signal subspace has rank below " +
                                  std::to_string(K),
                              K);
    const ComplexMatrix u = svd.matrixU().leftCols(K);

    std::vector<ComplexMatrix> psi(d);
    for (std::size_t j = 0; j < d; ++j) {
        const ComplexMatrix u_up   = take_rows(u, ups[j]);
        const ComplexMatrix u_down = take_rows(u, downs[j]);
        psi[j]                     = u_up.colPivHouseholderQr().solve(u_down);
    }

    PoleEstimates est;
    est.d     = d;
    est.poles = ComplexMatrix(K, static_cast<Index>(d));

    Eigen::ComplexEigenSolver<ComplexMatrix> eig(psi[0], true);
    if (d == 1) {
        est.poles.col(0) = eig.eigenvalues();
    } else {
        ComplexMatrix t = eig.eigenvectors();
        if (min_pairwise_gap(eig.eigenvalues()) < 1e-6) {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
            ComplexMatrix mix = psi[0];
            for (std::size_t j = 1; j < d; ++j)
                mix += std::polar(1.0, unif(rng)) * psi[j];
            t = Eigen::ComplexEigenSolver<ComplexMatrix>(mix, true).eigenvectors();
        }
        const auto lu = t.partialPivLu();
        for (std::size_t j = 0; j < d; ++j) {
            const ComplexMatrix diag = lu.solve(psi[j] * t);
            est.poles.col(static_cast<Index>(j)) = diag.diagonal();
        }
    }

    est.circle_dist = RealVector::Zero(K);
    for (Index k = 0; k < K; ++k)
        for (Index l = 0; l < static_cast<Index>(d); ++l) {
            const double dev = std::abs(est.poles(k, l)) - 1.0;
            est.circle_dist[k] += dev * dev;
        }

    const AmplitudeFit fit   = fit_amplitudes(y_hat, est.poles);
    est.amps                 = fit.amps;
    est.amp_condition        = fit.condition;
    est.amp_ill_conditioned  = fit.ill_conditioned;
    return est;
}

AmplitudeFit fit_amplitudes(const Signal& y_hat, const ComplexMatrix& poles)
{
    if (poles.cols() != static_cast<Index>(y_hat.ndim()))
        throw ArgumentError("fit_amplitudes: pole dimension does not match the signal");
    const Index n = y_hat.size();
    const Index K = poles.rows();
    AmplitudeFit out;
    if (K == 0) {
        out.amps = ComplexVector(0);
        return out;
    }

    const auto strides = row_major_strides(y_hat.dims);
    ComplexMatrix v(n, K);
    for (Index k = 0; k < K; ++k) {
        for (Index i = 0; i < n; ++i) {
            Complex term(1.0, 0.0);
            Index rem = i;
            for (std::size_t l = 0; l < y_hat.ndim(); ++l) {
                term *= std::pow(poles(k, static_cast<Index>(l)),
                                 static_cast<double>(rem / strides[l]));
                rem %= strides[l];
            }
            v(i, k) = term;
        }
    }

    Eigen::JacobiSVD<ComplexMatrix> svd(v);
    const RealVector& s = svd.singularValues();
    out.condition       = s[K - 1] > 0.0 ? s[0] / s[K - 1] : std::numeric_limits<double>::infinity();
    out.ill_conditioned = out.condition > 1e8;
    out.amps            = v.colPivHouseholderQr().solve(y_hat.values);
    return out;
}

double distance_to_torus(const ComplexMatrix& poles)
{
    const Index K = poles.rows();
    if (K < 1)
        throw ArgumentError("distance_to_torus: need at least one pole");
    if (poles.cols() == 1) {
        double acc = 0.0;
        for (Index k = 0; k < K; ++k)
            acc += std::fabs(std::abs(poles(k, 0)) - 1.0);
        return acc / static_cast<double>(K);
    }
    double acc = 0.0;
    for (Index k = 0; k < K; ++k)
        for (Index l = 0; l < poles.cols(); ++l) {
            const double dev = std::abs(poles(k, l)) - 1.0;
            acc += dev * dev;
        }
    return std::sqrt(acc / static_cast<double>(K));
}

double freq_error(const RealMatrix& truth, const RealMatrix& estimate)
{
    if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
        throw ArgumentError("freq_error: model orders or dimensions differ");
    const Index K = truth.rows();
    if (K == 0)
        return 0.0;

    RealMatrix cost(K, K); // squared per-pole distance
    for (Index a = 0; a < K; ++a)
        for (Index b = 0; b < K; ++b) {
            double acc = 0.0;
            for (Index l = 0; l < truth.cols(); ++l) {
                const double w = wrap_distance(truth(a, l), estimate(b, l));
                acc += w * w;
            }
            cost(a, b) = acc;
        }

    double best = std::numeric_limits<double>::infinity();
    if (K <= 8) {
        std::vector<Index> perm(static_cast<std::size_t>(K));
        std::iota(perm.begin(), perm.end(), Index{0});
        do {
            double acc = 0.0;
            for (Index a = 0; a < K; ++a)
                acc += cost(a, perm[a]);
            best = std::min(best, acc);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        std::vector<bool> used_a(K, false), used_b(K, false);
        best = 0.0;
        for (Index step = 0; step < K; ++step) {
            double c = std::numeric_limits<double>::infinity();
            Index ba = 0, bb = 0;
            for (Index a = 0; a < K; ++a)
                for (Index b = 0; b < K; ++b)
                    if (!used_a[a] && !used_b[b] && cost(a, b) < c) {
                        c  = cost(a, b);
                        ba = a;
                        bb = b;
                    }
            used_a[ba] = used_b[bb] = true;
            best += c;
        }
    }
    return std::sqrt(best / static_cast<double>(K));
}

double freq_error(const SpectralParams& truth, const PoleEstimates& est)
{
    return freq_error(truth.freqs, est.frequencies());
}

void write_poles_csv(std::ostream& os, const PoleEstimates& est)
{
    os << "k,dim,pole_re,pole_im,amp_re,amp_im,abs_minus_1\n";
    for (Index k = 0; k < est.order(); ++k)
        for (Index l = 0; l < static_cast<Index>(est.d); ++l) {
            const Complex z = est.poles(k, l);
            const Complex s = est.amps.size() > k ? est.amps[k] : Complex{};
            os << (k + 1) << ',' << (l + 1) << ',' << csv::format(z.real()) << ','
               << csv::format(z.imag()) << ',' << csv::format(s.real()) << ','
               << csv::format(s.imag()) << ',' << csv::format(std::abs(z) - 1.0) << '\n';
        }
}

} // namespace dhsc
