#ifndef DHSC_MODEL_HPP
#define DHSC_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dhsc/types.hpp"

namespace dhsc
{

///
/// Ground-truth parameters of a spectrally sparse signal.
///
/// Component k contributes amps[k] * prod_l pole(k, l)^(j_l) at the zero-based
/// multi-index (j_1, ..., j_d), where pole(k, l) = damping(k, l) *
/// exp(i 2 pi freqs(k, l)).
///
struct SpectralParams
{
    std::size_t d = 1;
    RealMatrix freqs;   // K x d, each entry in [0, 1)
    ComplexVector amps; // K
    RealMatrix damping; // K x d, 1.0 = on the unit circle

    Index order() const noexcept { return amps.size(); }
    Complex pole(Index k, Index l) const;
    ComplexMatrix poles() const; // K x d

    /// Builds undamped params; throws ArgumentError on inconsistent sizes.
    static SpectralParams on_circle(RealMatrix freqs, ComplexVector amps);

    /// Checks every invariant (frequency range, distinctness, sizes, r > 0).
    void validate() const;
};

/// Wrap-around distance on the unit interval, min(|a-b|, 1-|a-b|).
double wrap_distance(double a, double b);

/// y(j_1..j_d) = sum_k s_k prod_l z_{k,l}^{j_l}.
Signal synthesize(const SpectralParams& params, const Dims& dims);

/// Amplitude law for random instances.
enum class AmplitudeLaw
{
    /// |s| = 0.5 + |w|, w ~ N(0,1) real, phase ~ U[0, 2 pi).
    HalfPlusAbsNormal,
    /// |s| = 1, phase ~ U[0, 2 pi).
    UnitModulus,
};

struct RandomParamsOptions
{
    double min_sep = 0.0;          // per-dimension wrap-around separation
    bool exact_pair = false;       // force two frequencies exactly min_sep apart
    AmplitudeLaw amp_law = AmplitudeLaw::HalfPlusAbsNormal;
    int max_restarts = 200;
};

/// Random on-circle instance. Throws GenerationError if the packing cannot be
/// satisfied after the configured number of restarts.
SpectralParams random_params(Index K, std::size_t d, const RandomParamsOptions& opts,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sampling and noise
// ---------------------------------------------------------------------------

struct NoNoise
{
};
/// Complex Gaussian noise rescaled to a target SNR over the observed entries.
struct GaussianSnr
{
    double snr_db;
};
/// Complex Gaussian noise rescaled so that ||P_Omega(e)||_2 == eta exactly.
struct GaussianEta
{
    double eta;
};
/// Exactly `count` outliers placed uniformly among the observed entries.
struct SparseCount
{
    Index count;
};
/// Each observed entry corrupted independently with probability tau.
struct SparseFraction
{
    double tau;
};

using NoiseSpec = std::variant<NoNoise, GaussianSnr, GaussianEta, SparseCount, SparseFraction>;

struct CorruptionSpec
{
    std::optional<Index> subsample; // M; nullopt keeps every entry
    NoiseSpec noise = NoNoise{};
};

struct NoiseMeta
{
    std::string kind = "none"; // none | gaussian-snr | gaussian-eta | sparse
    double level = 0.0;        // SNR dB, eta, or tau (requested)
    double realized_l2 = 0.0;  // ||P_Omega(e)||_2
    std::vector<Index> outliers; // linear indices of corrupted entries (sparse only)
};

///
/// Observed entries of a d-way signal. Indices are zero-based linear
/// row-major indices, strictly increasing; the CSV form is one-based.
///
struct SampleSet
{
    Dims dims;
    std::vector<Index> omega;
    ComplexVector values;
    std::optional<NoiseMeta> noise_meta;

    Index size() const noexcept { return static_cast<Index>(omega.size()); }
    Index grid_size() const { return dhsc::grid_size(dims); }
    bool is_full() const { return size() == grid_size(); }

    /// Zero-filled full-length array with the observations in place.
    Signal zero_filled() const;

    void validate() const;

    /// Every entry observed, values taken from `signal`.
    static SampleSet full(const Signal& signal);
};

/// Subsample then corrupt; deterministic in (signal, spec, seed).
SampleSet corrupt(const Signal& signal, const CorruptionSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// `index,re,im` with one-based row-major linear index.
void write_signal_csv(std::ostream& os, const Signal& signal);
void write_samples_csv(std::ostream& os, const SampleSet& samples);
/// Reads `index,re,im`; `dims` fixes the grid.
SampleSet read_samples_csv(std::istream& is, const Dims& dims);

/// `k,dim,freq,amp_re,amp_im,damping`, k and dim one-based.
void write_params_csv(std::ostream& os, const SpectralParams& params);
SpectralParams read_params_csv(std::istream& is);

/// Stable 64-bit mixing of a base seed with stream identifiers.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

} // namespace dhsc

#endif /* DHSC_MODEL_HPP */
