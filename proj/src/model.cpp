#include "dhsc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "dhsc/csv.hpp"

namespace dhsc
{

namespace
{

constexpr double two_pi = 2.0 * std::numbers::pi;

Complex unit_phasor(double turns)
{
    return std::polar(1.0, two_pi * turns);
}

// Complex normal with E|x|^2 = 1.
Complex complex_normal(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    double re = n(rng);
    double im = n(rng);
    return {re, im};
}

// First `m` entries of a seeded Fisher-Yates shuffle of 0..n-1, sorted.
std::vector<Index> choose_without_replacement(Index n, Index m, std::mt19937_64& rng)
{
    std::vector<Index> pool(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        pool[i] = i;
    for (Index i = 0; i < m; ++i) {
        std::uniform_int_distribution<Index> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(static_cast<std::size_t>(m));
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace

// ---------------------------------------------------------------------------

Complex SpectralParams::pole(Index k, Index l) const
{
    return damping(k, l) * unit_phasor(freqs(k, l));
}

ComplexMatrix SpectralParams::poles() const
{
    ComplexMatrix z(order(), static_cast<Index>(d));
    for (Index k = 0; k < z.rows(); ++k)
        for (Index l = 0; l < z.cols(); ++l)
            z(k, l) = pole(k, l);
    return z;
}

SpectralParams SpectralParams::on_circle(RealMatrix freqs, ComplexVector amps)
{
    SpectralParams p;
    p.d       = static_cast<std::size_t>(freqs.cols());
    p.damping = RealMatrix::Ones(freqs.rows(), freqs.cols());
    p.freqs   = std::move(freqs);
    p.amps    = std::move(amps);
    p.validate();
    return p;
}

void SpectralParams::validate() const
{
    const Index K = amps.size();
    if (d < 1)
        throw ArgumentError("SpectralParams: dimension must be >= 1");
    if (freqs.rows() != K || freqs.cols() != static_cast<Index>(d))
        throw ArgumentError("SpectralParams: freqs must be K x d");
    if (damping.rows() != K || damping.cols() != static_cast<Index>(d))
        throw ArgumentError("SpectralParams: damping must be K x d");
    for (Index k = 0; k < K; ++k) {
        for (Index l = 0; l < freqs.cols(); ++l) {
            if (!(freqs(k, l) >= 0.0 && freqs(k, l) < 1.0))
                throw ArgumentError("SpectralParams: frequencies must lie in [0, 1)");
            if (!(damping(k, l) > 0.0))
                throw ArgumentError("SpectralParams: damping must be positive");
        }
        for (Index k2 = 0; k2 < k; ++k2)
            if (freqs.row(k) == freqs.row(k2))
                throw ArgumentError("SpectralParams: frequency tuples must be distinct");
    }
}

double wrap_distance(double a, double b)
{
    double delta = std::fabs(a - b);
    delta -= std::floor(delta);
    return std::min(delta, 1.0 - delta);
}

Signal synthesize(const SpectralParams& params, const Dims& dims)
{
    if (params.d != dims.size())
        throw ArgumentError("synthesize: params dimension does not match grid");
    Signal y(dims);
    const auto strides = row_major_strides(dims);
    const Index n      = y.size();
    const std::size_t d = dims.size();

    for (Index k = 0; k < params.order(); ++k) {
        // Per-dimension power tables keep the product exact to rounding.
        std::vector<std::vector<Complex>> powers(d);
        for (std::size_t l = 0; l < d; ++l) {
            const double f = params.freqs(k, static_cast<Index>(l));
            const double r = params.damping(k, static_cast<Index>(l));
            powers[l].resize(static_cast<std::size_t>(dims[l]));
            for (Index j = 0; j < dims[l]; ++j) {
                const double turns = std::fmod(f * static_cast<double>(j), 1.0);
                powers[l][j] = std::pow(r, static_cast<double>(j)) * unit_phasor(turns);
            }
        }
        for (Index i = 0; i < n; ++i) {
            Complex term = params.amps[k];
            Index rem    = i;
            for (std::size_t l = 0; l < d; ++l) {
                term *= powers[l][rem / strides[l]];
                rem %= strides[l];
            }
            y[i] += term;
        }
    }
    return y;
}

SpectralParams random_params(Index K, std::size_t d, const RandomParamsOptions& opts,
                             std::uint64_t seed)
{
    if (K < 0 || d < 1)
        throw ArgumentError("random_params: need K >= 0 and d >= 1");
    if (opts.min_sep < 0.0 || opts.min_sep >= 1.0)
        throw ArgumentError("random_params: min_sep must lie in [0, 1)");
    // K arcs of length min_sep must fit on a circle of circumference 1.
    if (static_cast<double>(K) * opts.min_sep > 1.0 + 1e-12)
        throw GenerationError("random_params: K * min_sep exceeds the torus circumference");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Index dd = static_cast<Index>(d);

    auto separated = [&](const RealMatrix& f, Index upto, const Eigen::RowVectorXd& cand) {
        for (Index k = 0; k < upto; ++k) {
            if (opts.min_sep > 0.0) {
                for (Index l = 0; l < dd; ++l)
                    if (wrap_distance(f(k, l), cand(l)) < opts.min_sep)
                        return false;
            } else if (f.row(k) == cand) {
                return false;
            }
        }
        return true;
    };

    RealMatrix freqs(K, dd);
    bool ok = false;
    for (int restart = 0; restart < std::max(1, opts.max_restarts) && !ok; ++restart) {
        Index placed = 0;
        if (opts.exact_pair && K >= 2 && opts.min_sep > 0.0) {
            for (Index l = 0; l < dd; ++l) {
                freqs(0, l) = unif(rng);
                freqs(1, l) = std::fmod(freqs(0, l) + opts.min_sep, 1.0);
            }
            placed = 2;
        }
        ok = true;
        for (Index k = placed; k < K; ++k) {
            bool found = false;
            for (int attempt = 0; attempt < 1000; ++attempt) {
                Eigen::RowVectorXd cand(dd);
                for (Index l = 0; l < dd; ++l)
                    cand(l) = unif(rng);
                if (separated(freqs, k, cand)) {
                    freqs.row(k) = cand;
                    found        = true;
                    break;
                }
            }
            if (!found) {
                ok = false;
                break;
            }
        }
    }
    if (!ok)
        throw GenerationError("random_params: could not place frequencies with the requested "
                              "separation");

    ComplexVector amps(K);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index k = 0; k < K; ++k) {
        double mag = 1.0;
        if (opts.amp_law == AmplitudeLaw::HalfPlusAbsNormal)
            mag = 0.5 + std::fabs(normal(rng));
        amps[k] = mag * unit_phasor(unif(rng));
    }

    SpectralParams p;
    p.d       = d;
    p.freqs   = std::move(freqs);
    p.amps    = std::move(amps);
    p.damping = RealMatrix::Ones(K, dd);
    return p;
}

// ---------------------------------------------------------------------------

Signal SampleSet::zero_filled() const
{
    Signal y(dims);
    for (Index i = 0; i < size(); ++i)
        y[omega[i]] = values[i];
    return y;
}

void SampleSet::validate() const
{
    const Index n = grid_size();
    if (values.size() != size())
        throw ArgumentError("SampleSet: values and indices differ in length");
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (omega[i] < 0 || omega[i] >= n)
            throw ArgumentError("SampleSet: index out of range");
        if (i > 0 && omega[i] <= omega[i - 1])
            throw ArgumentError("SampleSet: indices must be strictly increasing");
    }
}

SampleSet SampleSet::full(const Signal& signal)
{
    SampleSet s;
    s.dims   = signal.dims;
    s.values = signal.values;
    s.omega.resize(static_cast<std::size_t>(signal.size()));
    for (Index i = 0; i < signal.size(); ++i)
        s.omega[i] = i;
    return s;
}

SampleSet corrupt(const Signal& signal, const CorruptionSpec& spec, std::uint64_t seed)
{
    const Index n = signal.size();
    std::mt19937_64 rng(seed);

    SampleSet out;
    out.dims = signal.dims;
    if (spec.subsample) {
        const Index m = *spec.subsample;
        if (m < 0 || m > n)
            throw ArgumentError("corrupt: subsample size must lie in [0, N]");
        out.omega = choose_without_replacement(n, m, rng);
    } else {
        out.omega.resize(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i)
            out.omega[i] = i;
    }
    const Index m = out.size();
    out.values.resize(m);
    for (Index i = 0; i < m; ++i)
        out.values[i] = signal[out.omega[i]];

    NoiseMeta meta;
    auto add_scaled_gaussian = [&](double target_l2) {
        ComplexVector e(m);
        for (Index i = 0; i < m; ++i)
            e[i] = complex_normal(rng);
        const double norm = e.norm();
        if (target_l2 > 0.0 && norm > 0.0) {
            e *= target_l2 / norm;
            out.values += e;
            meta.realized_l2 = e.norm();
        }
    };

    std::visit(
        [&](const auto& noise) {
            using T = std::decay_t<decltype(noise)>;
            if constexpr (std::is_same_v<T, NoNoise>) {
                meta.kind = "none";
            } else if constexpr (std::is_same_v<T, GaussianSnr>) {
                meta.kind  = "gaussian-snr";
                meta.level = noise.snr_db;
                if (std::isinf(noise.snr_db) && noise.snr_db > 0)
                    return;
                const double signal_l2 = out.values.norm();
                add_scaled_gaussian(signal_l2 / std::pow(10.0, noise.snr_db / 20.0));
            } else if constexpr (std::is_same_v<T, GaussianEta>) {
                if (!(noise.eta >= 0.0))
                    throw ArgumentError("corrupt: eta must be non-negative");
                meta.kind  = "gaussian-eta";
                meta.level = noise.eta;
                add_scaled_gaussian(noise.eta);
            } else {
                // Outliers: complex Gaussian with the clean signal's RMS scale.
                const double rms = n > 0 ? signal.values.norm() / std::sqrt(double(n)) : 0.0;
                std::vector<Index> picked;
                if constexpr (std::is_same_v<T, SparseCount>) {
                    if (noise.count < 0 || noise.count > m)
                        throw ArgumentError("corrupt: outlier count must lie in [0, M]");
                    meta.level = m > 0 ? double(noise.count) / double(m) : 0.0;
                    picked     = choose_without_replacement(m, noise.count, rng);
                } else {
                    if (!(noise.tau >= 0.0 && noise.tau <= 1.0))
                        throw ArgumentError("corrupt: tau must lie in [0, 1]");
                    meta.level = noise.tau;
                    std::bernoulli_distribution hit(noise.tau);
                    for (Index i = 0; i < m; ++i)
                        if (hit(rng))
                            picked.push_back(i);
                }
                meta.kind  = "sparse";
                double ss = 0.0;
                for (Index pos : picked) {
                    const Complex e = rms * complex_normal(rng);
                    out.values[pos] += e;
                    ss += std::norm(e);
                    meta.outliers.push_back(out.omega[pos]);
                }
                meta.realized_l2 = std::sqrt(ss);
            }
        },
        spec.noise);
    out.noise_meta = std::move(meta);
    return out;
}

// ---------------------------------------------------------------------------

void write_signal_csv(std::ostream& os, const Signal& signal)
{
    os << "index,re,im\n";
    for (Index i = 0; i < signal.size(); ++i)
        os << (i + 1) << ',' << csv::format(signal[i].real()) << ','
           << csv::format(signal[i].imag()) << '\n';
}

void write_samples_csv(std::ostream& os, const SampleSet& samples)
{
    os << "index,re,im\n";
    for (Index i = 0; i < samples.size(); ++i)
        os << (samples.omega[i] + 1) << ',' << csv::format(samples.values[i].real()) << ','
           << csv::format(samples.values[i].imag()) << '\n';
}

SampleSet read_samples_csv(std::istream& is, const Dims& dims)
{
    csv::expect_header(is, "index,re,im");
    SampleSet s;
    s.dims = dims;
    std::vector<Complex> vals;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r")
            continue;
        auto f = csv::split(line);
        if (f.size() != 3)
            throw ArgumentError("csv: expected 3 fields in '" + line + "'");
        s.omega.push_back(static_cast<Index>(csv::to_integer(f[0])) - 1);
        vals.emplace_back(csv::to_double(f[1]), csv::to_double(f[2]));
    }
    s.values = Eigen::Map<ComplexVector>(vals.data(), static_cast<Index>(vals.size()));
    s.validate();
    return s;
}

void write_params_csv(std::ostream& os, const SpectralParams& params)
{
    os << "k,dim,freq,amp_re,amp_im,damping\n";
    for (Index k = 0; k < params.order(); ++k)
        for (Index l = 0; l < static_cast<Index>(params.d); ++l)
            os << (k + 1) << ',' << (l + 1) << ',' << csv::format(params.freqs(k, l)) << ','
               << csv::format(params.amps[k].real()) << ',' << csv::format(params.amps[k].imag())
               << ',' << csv::format(params.damping(k, l)) << '\n';
}

SpectralParams read_params_csv(std::istream& is)
{
    csv::expect_header(is, "k,dim,freq,amp_re,amp_im,damping");
    struct Row
    {
        Index k, l;
        double f, re, im, r;
    };
    std::vector<Row> rows;
    Index K = 0, d = 0;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r")
            continue;
        auto f = csv::split(line);
        if (f.size() != 6)
            throw ArgumentError("csv: expected 6 fields in '" + line + "'");
        Row r{static_cast<Index>(csv::to_integer(f[0])) - 1,
              static_cast<Index>(csv::to_integer(f[1])) - 1,
              csv::to_double(f[2]),
              csv::to_double(f[3]),
              csv::to_double(f[4]),
              csv::to_double(f[5])};
        if (r.k < 0 || r.l < 0)
            throw ArgumentError("csv: k and dim are one-based");
        K = std::max(K, r.k + 1);
        d = std::max(d, r.l + 1);
        rows.push_back(r);
    }
    if (static_cast<Index>(rows.size()) != K * d)
        throw ArgumentError("csv: params table must list every (k, dim) pair exactly once");

    SpectralParams p;
    p.d       = static_cast<std::size_t>(std::max<Index>(d, 1));
    p.freqs   = RealMatrix::Constant(K, d, -1.0);
    p.damping = RealMatrix::Zero(K, d);
    p.amps    = ComplexVector::Zero(K);
    for (const auto& r : rows) {
        p.freqs(r.k, r.l)   = r.f;
        p.damping(r.k, r.l) = r.r;
        p.amps[r.k]         = {r.re, r.im};
    }
    p.validate();
    return p;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    // splitmix64 finalizer applied to each word in turn
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(base);
    h               = mix(h ^ a);
    h               = mix(h ^ b);
    h               = mix(h ^ c);
    return h;
}

} // namespace dhsc
