#include "dhsc/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svd.hpp"

namespace dhsc
{

std::string to_string(HankelModel m)
{
    return m == HankelModel::Single ? "single" : "double";
}

HankelModel parse_model(const std::string& s)
{
    if (s == "single" || s == "single-hankel")
        return HankelModel::Single;
    if (s == "double" || s == "double-hankel")
        return HankelModel::Double;
    throw ArgumentError("unknown Hankel model '" + s + "' (expected single or double)");
}

SolveOptions SolveOptions::iht_defaults(LevelShape shape, HankelModel model)
{
    SolveOptions o;
    o.model     = model;
    o.shape     = std::move(shape);
    o.max_iters = 3000;
    o.tol_rel   = 1e-5;
    return o;
}

SolveOptions SolveOptions::admm_defaults(LevelShape shape, HankelModel model)
{
    SolveOptions o;
    o.model     = model;
    o.shape     = std::move(shape);
    o.max_iters = 5000;
    o.tol_rel   = 1e-8;
    return o;
}

void SolveOptions::validate() const
{
    if (!(tol_rel > 0.0))
        throw ArgumentError("SolveOptions: tol_rel must be positive");
    if (max_iters < 1)
        throw ArgumentError("SolveOptions: max_iters must be >= 1");
    if (rho && !(*rho > 0.0))
        throw ArgumentError("SolveOptions: rho must be positive");
    if (shape.ndim() == 0)
        throw ArgumentError("SolveOptions: shape is not set");
}

// ---------------------------------------------------------------------------

namespace
{

using detail::thin_svd;

double safe_ratio(double num, double den)
{
    return den > 0.0 ? num / den : num;
}

} // namespace

ComplexMatrix hard_threshold(const ComplexMatrix& m, Index K)
{
    if (K < 0)
        throw ArgumentError("hard_threshold: K must be non-negative");
    if (K == 0 || m.size() == 0)
        return ComplexMatrix::Zero(m.rows(), m.cols());
    if (K >= std::min(m.rows(), m.cols()))
        return m;
    const auto svd = thin_svd(m);
    return svd.u.leftCols(K) * svd.s.head(K).cast<Complex>().asDiagonal() *
           svd.v.leftCols(K).adjoint();
}

ComplexMatrix singular_value_shrink(const ComplexMatrix& m, double tau, double* nuclear)
{
    const auto svd     = thin_svd(m);
    const RealVector s = (svd.s.array() - tau).cwiseMax(0.0).matrix();
    Index rank = 0;
    while (rank < s.size() && s[rank] > 0.0)
        ++rank;
    if (nuclear)
        *nuclear = s.sum();
    if (rank == 0)
        return ComplexMatrix::Zero(m.rows(), m.cols());
    return svd.u.leftCols(rank) * s.head(rank).cast<Complex>().asDiagonal() *
           svd.v.leftCols(rank).adjoint();
}

// ---------------------------------------------------------------------------

StructuredMap::StructuredMap(const LevelShape& shape, HankelModel model)
    : shape_(shape), model_(model), index_(shape)
{
    const RealVector& w = index_.weights();
    gram_ = model_ == HankelModel::Double ? RealVector(w + w.reverse()) : w;
}

Index StructuredMap::matrix_cols() const noexcept
{
    return model_ == HankelModel::Double ? 2 * index_.cols() : index_.cols();
}

ComplexMatrix StructuredMap::forward(const ComplexVector& y) const
{
    if (model_ == HankelModel::Single)
        return index_.forward(y);
    ComplexMatrix out(index_.rows(), 2 * index_.cols());
    out.leftCols(index_.cols())  = index_.forward(y);
    out.rightCols(index_.cols()) = index_.forward(y.reverse().conjugate());
    return out;
}

ComplexVector StructuredMap::adjoint(const ComplexMatrix& g) const
{
    if (model_ == HankelModel::Single)
        return index_.antidiag_sums(g);
    const ComplexVector s1 = index_.antidiag_sums(g.leftCols(index_.cols()));
    const ComplexVector s2 = index_.antidiag_sums(g.rightCols(index_.cols()));
    return s1 + s2.reverse().conjugate();
}

ComplexVector StructuredMap::pinv(const ComplexMatrix& g) const
{
    return adjoint(g).cwiseQuotient(gram_.cast<Complex>());
}

// ---------------------------------------------------------------------------

SolveReport iht(const SampleSet& samples, Index K, const SolveOptions& opts)
{
    opts.validate();
    samples.validate();
    opts.shape.check_dims(samples.dims, "iht");
    if (!samples.is_full())
        throw ArgumentError("iht: requires full sampling");
    if (K < 1)
        throw ArgumentError("iht: K must be >= 1");

    const StructuredMap map(opts.shape, opts.model);
    if (K >= std::min(map.matrix_rows(), map.matrix_cols()))
        throw ArgumentError("iht: K must be smaller than min(rows, cols) of the structured matrix");

    const ComplexVector y_obs = samples.zero_filled().values;
    ComplexVector y           = y_obs;

    SolveReport rep;
    for (int t = 1; t <= opts.max_iters; ++t) {
        const double alpha       = 1.0 / std::sqrt(static_cast<double>(t));
        const ComplexMatrix d    = map.forward(y + alpha * (y_obs - y));
        const ComplexVector next = map.pinv(hard_threshold(d, K));

        const double change = (next - y).norm();
        const double base   = y.norm();
        y                   = next;
        rep.iters           = t;
        rep.objective_trace.push_back(0.5 * (y - y_obs).squaredNorm());
        if (safe_ratio(change, base) < opts.tol_rel) {
            rep.converged = true;
            break;
        }
    }
    rep.y_hat = Signal(samples.dims, std::move(y));
    return rep;
}

// ---------------------------------------------------------------------------

double default_robust_lambda(Index m, Index n)
{
    if (m < 1 || n < 2)
        throw ArgumentError("default_robust_lambda: need M >= 1 and N >= 2");
    return 1.0 / std::sqrt(static_cast<double>(m) * std::log(static_cast<double>(n)));
}

namespace
{

// argmin sum_i c_i |x_i - p_i|^2  s.t.  sum_i |x_i - o_i|^2 <= eta^2
// Solution x_i = o_i + (p_i - o_i) c_i / (c_i + mu) with mu >= 0 chosen by
// bisection; the upper bracket is returned so the result is always feasible.
void project_weighted_ball(ComplexVector& x, const ComplexVector& p, const ComplexVector& o,
                           const RealVector& c, double eta)
{
    const ComplexVector d = p - o;
    if (d.norm() <= eta) {
        x = p;
        return;
    }
    if (eta <= 0.0) {
        x = o;
        return;
    }
    auto radius2 = [&](double mu) {
        double acc = 0.0;
        for (Index i = 0; i < d.size(); ++i) {
            const double f = c[i] / (c[i] + mu);
            acc += f * f * std::norm(d[i]);
        }
        return acc;
    };
    double lo = 0.0;
    double hi = c.maxCoeff() * d.norm() / eta;
    while (radius2(hi) > eta * eta)
        hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (radius2(mid) > eta * eta ? lo : hi) = mid;
    }
    x.resize(d.size());
    for (Index i = 0; i < d.size(); ++i)
        x[i] = o[i] + d[i] * (c[i] / (c[i] + hi));
}

Complex soft_threshold(Complex v, double kappa)
{
    const double a = std::abs(v);
    return a > kappa ? v * ((a - kappa) / a) : Complex(0.0, 0.0);
}

} // namespace

SolveReport demac(const SampleSet& samples, const DemacMode& mode, const SolveOptions& opts)
{
    opts.validate();
    samples.validate();
    opts.shape.check_dims(samples.dims, "demac");
    if (samples.size() == 0)
        throw ArgumentError("demac: empty sampling set");

    const StructuredMap map(opts.shape, opts.model);
    const Index n           = samples.grid_size();
    const Index m           = samples.size();
    const auto& omega       = samples.omega;
    const ComplexVector y_obs = samples.zero_filled().values;
    const RealVector& gram  = map.gram_diagonal();
    const RealVector& w     = map.hankel_weights();

    const bool exact   = std::holds_alternative<ExactMode>(mode);
    const bool bounded = std::holds_alternative<BoundedMode>(mode);
    const bool robust  = std::holds_alternative<RobustMode>(mode);

    double eta = 0.0;
    if (bounded) {
        eta = std::get<BoundedMode>(mode).eta;
        if (!(eta >= 0.0))
            throw ArgumentError("demac: eta must be non-negative");
    }
    double lambda = 0.0;
    if (robust) {
        const auto& rm = std::get<RobustMode>(mode);
        lambda         = rm.lambda ? *rm.lambda : default_robust_lambda(m, n);
        if (!(lambda > 0.0))
            throw ArgumentError("demac: lambda must be positive");
    }
    const double penalty_scale = opts.model == HankelModel::Double ? 2.0 : 1.0;

    SolveReport rep;

    // Full noiseless sampling pins y to the data.
    if (exact && samples.is_full()) {
        double nuc = 0.0;
        singular_value_shrink(map.forward(y_obs), 0.0, &nuc);
        rep.y_hat     = Signal(samples.dims, y_obs);
        rep.iters     = 1;
        rep.converged = true;
        rep.objective_trace.push_back(nuc);
        rep.primal_residuals.push_back(0.0);
        rep.dual_residuals.push_back(0.0);
        rep.final_rho = opts.rho.value_or(1.0 / std::sqrt(double(n)));
        return rep;
    }

    ComplexVector obs_vals(m);
    RealVector obs_c(m);
    for (Index i = 0; i < m; ++i) {
        obs_vals[i] = samples.values[i];
        obs_c[i]    = gram[omega[i]];
    }

    double rho = opts.rho.value_or(1.0 / std::sqrt(static_cast<double>(n)));
    ComplexVector y = y_obs;
    ComplexVector e = ComplexVector::Zero(n);
    ComplexMatrix mm  = map.forward(y);
    ComplexMatrix lam = ComplexMatrix::Zero(mm.rows(), mm.cols());

    ComplexVector block(m), proj(m);
    for (int t = 1; t <= opts.max_iters; ++t) {
        // y-update: argmin_y (rho/2) ||F y - (M - Lambda/rho)||^2 + data term
        const ComplexVector p = map.pinv(mm - lam / rho);
        y                     = p;
        if (exact) {
            for (Index i = 0; i < m; ++i)
                y[omega[i]] = obs_vals[i];
        } else if (bounded) {
            for (Index i = 0; i < m; ++i)
                block[i] = p[omega[i]];
            project_weighted_ball(proj, block, obs_vals, obs_c, eta);
            for (Index i = 0; i < m; ++i)
                y[omega[i]] = proj[i];
        } else {
            for (Index i = 0; i < m; ++i) {
                const Index j      = omega[i];
                const double kappa = penalty_scale * lambda * w[j] / (rho * gram[j]);
                const Complex u    = soft_threshold(obs_vals[i] - p[j], kappa);
                e[j]               = u;
                y[j]               = obs_vals[i] - u;
            }
        }

        // M-update: singular value shrinkage of F y + Lambda / rho
        const ComplexMatrix fy = map.forward(y);
        double nuc             = 0.0;
        ComplexMatrix m_next   = singular_value_shrink(fy + lam / rho, 1.0 / rho, &nuc);

        const ComplexMatrix gap = fy - m_next;
        lam += rho * gap;

        const double r_abs = gap.norm();
        const double s_abs = rho * map.adjoint(m_next - mm).norm();
        const double r_rel = safe_ratio(r_abs, std::max(fy.norm(), m_next.norm()));
        const double s_rel = safe_ratio(s_abs, map.adjoint(lam).norm());
        mm                 = std::move(m_next);

        double objective = nuc;
        if (robust) {
            double l1 = 0.0;
            for (Index j = 0; j < n; ++j)
                l1 += w[j] * std::abs(e[j]);
            objective += penalty_scale * lambda * l1;
        }
        rep.objective_trace.push_back(objective);
        rep.primal_residuals.push_back(r_rel);
        rep.dual_residuals.push_back(s_rel);
        rep.iters = t;

        if (std::max(r_rel, s_rel) < opts.tol_rel) {
            rep.converged = true;
            break;
        }
        if (opts.adaptive_rho && t % 10 == 0) {
            if (r_abs > 10.0 * s_abs)
                rho = std::min(rho * 2.0, 1e4);
            else if (s_abs > 10.0 * r_abs)
                rho = std::max(rho / 2.0, 1e-4);
        }
    }

    rep.final_rho = rho;
    rep.y_hat     = Signal(samples.dims, std::move(y));
    if (robust)
        rep.e_hat = Signal(samples.dims, std::move(e));
    return rep;
}

} // namespace dhsc
