#ifndef DHSC_BENCH_HPP
#define DHSC_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dhsc/model.hpp"
#include "dhsc/solve.hpp"
#include "dhsc/types.hpp"

namespace dhsc
{

/// ||a - b||^2 / ||b||^2; throws ArgumentError for a zero reference.
double nmse(const ComplexVector& a, const ComplexVector& b);
double nmse(const Signal& a, const Signal& b);

enum class ExperimentKind
{
    PhaseTransition,  // noiseless, subsampled
    ErrorCurve,       // bounded Gaussian noise, subsampled
    SparseNoisePhase, // sparse outliers
    NdCurve,          // d-dimensional bounded noise
    CircleHistogram,  // full sampling, Gaussian noise at a given SNR
};

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

enum class Method
{
    Iht,
    Demac,
    NoisyDemac,
    RobustDemac,
};

std::string to_string(Method m);
Method parse_method(const std::string& s);

struct MethodSpec
{
    Method method;
    HankelModel model;
};

///
/// One Monte-Carlo campaign. Every grid cell is the cartesian product of the
/// axis lists; axes a kind does not use hold a single neutral value.
///
/// The `eta` axis is the l2 noise budget for bounded-noise kinds and the SNR
/// in dB for `circle_histogram` (inf = noiseless). The `corruptions` axis is
/// the number of outliers per trial. `delta_f` is the minimum wrap-around
/// separation; with `exact_pair` two frequencies sit exactly delta_f apart.
///
struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::PhaseTransition;
    Dims dims{65};
    double split = 0.6;             // rows = floor(split * (n + 1)) per dimension
    std::vector<Index> split_rows;  // explicit rows per dimension, overrides split
    std::vector<Index> K{1};
    std::vector<double> delta_f{0.0};
    std::vector<Index> M;           // empty = full sampling
    std::vector<double> eta{0.0};
    std::vector<Index> corruptions{0};
    int trials              = 20;
    std::uint64_t base_seed = 1;
    std::vector<MethodSpec> methods{{Method::Demac, HankelModel::Double}};
    double success_nmse = 1e-6;
    double circle_tol   = 1e-4;
    bool exact_pair     = true;
    AmplitudeLaw amp_law = AmplitudeLaw::HalfPlusAbsNormal;
    int iht_max_iters   = 3000;
    double iht_tol      = 1e-5;
    int admm_max_iters  = 5000;
    double admm_tol     = 1e-8;
    std::optional<double> lambda; // robust weight; nullopt = 1 / sqrt(M log N)
    int threads        = 1;
    bool record_timing = false; // wall_ms is 0 unless set, keeping output deterministic

    LevelShape shape() const;
    void validate() const;

    /// Flat `key = value` text; `#` starts a comment. See README for keys.
    static ExperimentConfig parse(std::istream& is);
    /// Applies one `key = value` assignment (used for CLI overrides too).
    void set(const std::string& key, const std::string& value);
};

struct TrialRow
{
    ExperimentKind kind;
    Index K;
    double delta_f;
    Index M;
    double eta;
    double tau;
    Method method;
    HankelModel model;
    int trial;
    std::uint64_t seed;
    double nmse;
    double freq_rmse;   // nan if pole retrieval failed
    double circle_dist; // nan if pole retrieval failed
    int iters;
    bool converged;
    double wall_ms;

    // In-memory only
    std::size_t cell = 0;
    double hankel_err = 0.0;   // ||H y_hat - H y0||_F
    double noise_l2   = 0.0;   // realized ||P_Omega(e)||_2
    bool success      = false;
};

struct AggregateRow
{
    ExperimentKind kind;
    Index K;
    double delta_f;
    Index M;
    double eta;
    double tau;
    Method method;
    HankelModel model;
    int trials;
    double success_rate;
    double mean_nmse;
    double mean_freq_rmse;
    double mean_circle_dist;
    int skipped;
};

struct ExperimentResult
{
    std::vector<TrialRow> trials;
    std::vector<AggregateRow> aggregates;
};

/// Runs every (cell, trial, method). Deterministic in (config, base_seed)
/// regardless of `threads`.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Aggregates per (cell, method) from per-trial rows.
std::vector<AggregateRow> aggregate(const ExperimentConfig& config,
                                    const std::vector<TrialRow>& rows,
                                    const std::vector<int>& skipped_per_cell_method);

void write_trials_csv(std::ostream& os, const std::vector<TrialRow>& rows);
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows);

} // namespace dhsc

#endif /* DHSC_BENCH_HPP */
