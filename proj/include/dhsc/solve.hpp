#ifndef DHSC_SOLVE_HPP
#define DHSC_SOLVE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dhsc/hankel.hpp"
#include "dhsc/model.hpp"
#include "dhsc/types.hpp"

namespace dhsc
{

/// Which structured matrix a solver lifts the signal into.
enum class HankelModel
{
    Single, // H y (EMaC-style)
    Double, // [H y | J1 conj(H y) J2]
};

std::string to_string(HankelModel m);
HankelModel parse_model(const std::string& s);

struct SolveOptions
{
    HankelModel model = HankelModel::Double;
    LevelShape shape;
    int max_iters  = 3000;
    double tol_rel = 1e-5;
    /// ADMM penalty; nullopt selects 1 / sqrt(N).
    std::optional<double> rho;
    bool adaptive_rho  = true;
    std::uint64_t seed = 0;

    /// max_iters 3000, tol_rel 1e-5.
    static SolveOptions iht_defaults(LevelShape shape, HankelModel model = HankelModel::Double);
    /// max_iters 5000, tol_rel 1e-8.
    static SolveOptions admm_defaults(LevelShape shape, HankelModel model = HankelModel::Double);

    void validate() const;
};

struct SolveReport
{
    Signal y_hat;
    int iters      = 0;
    bool converged = false;
    std::vector<double> objective_trace;
    std::vector<double> primal_residuals; // relative, ADMM only
    std::vector<double> dual_residuals;   // relative, ADMM only
    std::optional<Signal> e_hat;          // robust mode only
    double final_rho = 0.0;
};

/// Best rank-K approximation by truncated SVD; K >= rank leaves M unchanged.
ComplexMatrix hard_threshold(const ComplexMatrix& m, Index K);

/// Singular value soft-thresholding at level `tau`; also reports the nuclear
/// norm of the result.
ComplexMatrix singular_value_shrink(const ComplexMatrix& m, double tau, double* nuclear = nullptr);

///
/// The structured lifting used by the solvers: forward map, its exact
/// least-squares inverse, and its adjoint (real inner product).
///
class StructuredMap
{
public:
    StructuredMap(const LevelShape& shape, HankelModel model);

    HankelModel model() const noexcept { return model_; }
    const LevelShape& shape() const noexcept { return shape_; }
    Index matrix_rows() const noexcept { return index_.rows(); }
    Index matrix_cols() const noexcept;

    ComplexMatrix forward(const ComplexVector& y) const;
    ComplexVector adjoint(const ComplexMatrix& g) const;
    ComplexVector pinv(const ComplexMatrix& g) const;
    /// Diagonal of adjoint(forward(.)): w_n (single) or w_n + w_rev(n) (double).
    const RealVector& gram_diagonal() const noexcept { return gram_; }
    /// Single-Hankel antidiagonal counts w_n.
    const RealVector& hankel_weights() const noexcept { return index_.weights(); }

private:
    LevelShape shape_;
    HankelModel model_;
    HankelIndex index_;
    RealVector gram_;
};

///
/// Iterative hard thresholding on the structured model, full sampling only.
///
/// y_0 = y~; for t = 1, 2, ...:
///   D_t = F(y_t + (y~ - y_t) / sqrt(t)),  G_t = Gamma_K(D_t),  y_{t+1} = F^+(G_t),
/// stopping when ||y_{t+1} - y_t|| / ||y_t|| < tol_rel or after max_iters.
/// The objective trace records 0.5 ||y_{t+1} - y~||^2.
///
SolveReport iht(const SampleSet& samples, Index K, const SolveOptions& opts);

struct ExactMode
{
};
struct BoundedMode
{
    double eta;
};
struct RobustMode
{
    std::optional<double> lambda; // nullopt = 1 / sqrt(M log N)
};
using DemacMode = std::variant<ExactMode, BoundedMode, RobustMode>;

/// 1 / sqrt(M log N).
double default_robust_lambda(Index m, Index n);

///
/// Nuclear-norm recovery by ADMM on the splitting M = F(y).
///
///  exact:   min ||F y||_*                   s.t. P_Omega(y) = P_Omega(y~)
///  bounded: min ||F y||_*                   s.t. ||P_Omega(y - y~)||_2 <= eta
///  robust:  min ||F y||_* + c lambda ||H e||_1  s.t. P_Omega(y + e) = P_Omega(y~)
///
/// with c = 2 for the double model and c = 1 for the single model. The
/// y-update is solved exactly: F*F is diagonal, so it reduces to an entrywise
/// problem (overwrite, weighted l2-ball projection, or complex soft threshold).
/// Non-convergence is reported through `converged`, never thrown.
///
SolveReport demac(const SampleSet& samples, const DemacMode& mode, const SolveOptions& opts);

} // namespace dhsc

#endif /* DHSC_SOLVE_HPP */
