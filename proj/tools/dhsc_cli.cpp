// dhsc: command-line front end for the double-Hankel spectral CS library.
//
//   dhsc synth  --dims 65 --k 3 --m 30 --seed 7 --out data/
//   dhsc solve  --method demac --model double --n 65 --m 30 --k 3 --seed 7
//   dhsc bench  --config configs/fig2_phase.cfg --out results/ --threads 4
//   dhsc diag   --n 65 --k 3 --instances 10
//
// Exit codes: 0 success (non-converged solves included), 2 usage error,
// 3 I/O error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dhsc/bench.hpp"
#include "dhsc/csv.hpp"
#include "dhsc/diag.hpp"
#include "dhsc/hankel.hpp"
#include "dhsc/model.hpp"
#include "dhsc/retrieve.hpp"
#include "dhsc/solve.hpp"

namespace fs = std::filesystem;
using namespace dhsc;

namespace
{

constexpr int kUsageError = 2;
constexpr int kIoError    = 3;

struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& path)
{
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot write " + path.string());
    return os;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot read " + path);
    return is;
}

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir + ": " + ec.message());
}

Dims parse_dims(const std::string& s)
{
    Dims d;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, 'x'))
        d.push_back(csv::to_integer(part));
    grid_size(d);
    return d;
}

// Options shared by synth and solve for generating an instance in-process.
struct InstanceArgs
{
    std::string dims = "65";
    Index n          = 0; // shorthand for a 1-D grid
    Index k          = 0;
    double sep       = 0.0; // in units of 1/N_1
    bool exact_pair  = false;
    bool unit_amps   = false;
    Index m          = 0; // 0 = full
    std::optional<double> snr;
    std::optional<double> noise_eta;
    Index outliers     = 0;
    std::uint64_t seed = 1;

    void add_to(CLI::App* app, bool with_k)
    {
        app->add_option("--dims", dims, "grid, e.g. 65 or 11x11");
        app->add_option("--n", n, "1-D grid length (overrides --dims)");
        if (with_k)
            app->add_option("--k", k, "model order");
        app->add_option("--sep", sep, "minimum wrap-around separation in units of 1/N");
        app->add_flag("--exact-pair", exact_pair, "place two frequencies exactly --sep apart");
        app->add_flag("--unit-amps", unit_amps, "unit-modulus amplitudes");
        app->add_option("--m", m, "number of observed samples (default: all)");
        app->add_option("--snr", snr, "add Gaussian noise at this SNR in dB");
        app->add_option("--noise-eta", noise_eta, "add Gaussian noise with this exact l2 norm");
        app->add_option("--outliers", outliers, "number of sparse outliers");
        app->add_option("--seed", seed, "random seed");
    }

    Dims grid() const { return n > 0 ? Dims{n} : parse_dims(dims); }

    SpectralParams params() const
    {
        const Dims g = grid();
        RandomParamsOptions ro;
        ro.min_sep    = sep / static_cast<double>(g[0]);
        ro.exact_pair = exact_pair;
        ro.amp_law    = unit_amps ? AmplitudeLaw::UnitModulus : AmplitudeLaw::HalfPlusAbsNormal;
        return random_params(k, g.size(), ro, mix_seed(seed, 1));
    }

    CorruptionSpec corruption() const
    {
        const int kinds = (snr ? 1 : 0) + (noise_eta ? 1 : 0) + (outliers > 0 ? 1 : 0);
        if (kinds > 1)
            throw ArgumentError("--snr, --noise-eta and --outliers are mutually exclusive");
        CorruptionSpec spec;
        if (m > 0)
            spec.subsample = m;
        if (snr)
            spec.noise = GaussianSnr{*snr};
        else if (noise_eta)
            spec.noise = GaussianEta{*noise_eta};
        else if (outliers > 0)
            spec.noise = SparseCount{outliers};
        return spec;
    }
};

LevelShape make_shape(const Dims& dims, double split, const std::string& split_rows)
{
    if (split_rows.empty())
        return LevelShape::split(dims, split);
    std::vector<Index> rows;
    for (Index r : parse_dims(split_rows))
        rows.push_back(r);
    return LevelShape::with_rows(dims, rows);
}

// ---------------------------------------------------------------------------

struct SynthArgs
{
    InstanceArgs inst;
    std::string out = ".";
};

int run_synth(const SynthArgs& a)
{
    if (a.inst.k < 0)
        throw ArgumentError("--k must be >= 0");
    const Dims dims          = a.inst.grid();
    const SpectralParams p   = a.inst.params();
    const Signal y           = synthesize(p, dims);
    const SampleSet samples  = corrupt(y, a.inst.corruption(), mix_seed(a.inst.seed, 2));
    ensure_dir(a.out);
    auto os = open_out(fs::path(a.out) / "params.csv");
    write_params_csv(os, p);
    auto ys = open_out(fs::path(a.out) / "signal.csv");
    write_signal_csv(ys, y);
    auto ss = open_out(fs::path(a.out) / "samples.csv");
    write_samples_csv(ss, samples);
    std::cerr << "wrote params.csv, signal.csv, samples.csv (" << samples.size() << " of "
              << samples.grid_size() << " samples) to " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct SolveArgs
{
    InstanceArgs inst;
    std::string method = "demac";
    std::string model  = "double";
    std::string input;  // samples CSV; otherwise an instance is generated
    std::string truth;  // params CSV for the reference signal
    std::optional<double> eta;
    std::string lambda;
    double split = 0.6;
    std::string split_rows;
    std::optional<int> max_iters;
    std::optional<double> tol;
    std::optional<double> rho;
    std::string out;
};

int run_solve(const SolveArgs& a)
{
    const Method method     = parse_method(a.method);
    const HankelModel model = parse_model(a.model);
    if (method == Method::Iht && a.inst.k < 1)
        throw ArgumentError("--k is required for iht");
    if (a.eta && method != Method::NoisyDemac)
        throw ArgumentError("--eta is only valid with --method noisy-demac");
    if (!a.lambda.empty() && method != Method::RobustDemac)
        throw ArgumentError("--lambda is only valid with --method robust-demac");

    const Dims dims = a.inst.grid();
    std::optional<SpectralParams> params;
    std::optional<Signal> reference;
    SampleSet samples;
    if (!a.input.empty()) {
        auto is = open_in(a.input);
        samples = read_samples_csv(is, dims);
        if (!a.truth.empty()) {
            auto ps   = open_in(a.truth);
            params    = read_params_csv(ps);
            reference = synthesize(*params, dims);
        }
    } else {
        if (a.inst.k < 1)
            throw ArgumentError("--k is required to generate an instance (or pass --input)");
        params    = a.inst.params();
        reference = synthesize(*params, dims);
        samples   = corrupt(*reference, a.inst.corruption(), mix_seed(a.inst.seed, 2));
    }

    const LevelShape shape = make_shape(dims, a.split, a.split_rows);
    SolveOptions opts = method == Method::Iht ? SolveOptions::iht_defaults(shape, model)
                                              : SolveOptions::admm_defaults(shape, model);
    if (a.max_iters)
        opts.max_iters = *a.max_iters;
    if (a.tol)
        opts.tol_rel = *a.tol;
    opts.rho  = a.rho;
    opts.seed = a.inst.seed;

    double eta_used    = std::numeric_limits<double>::quiet_NaN();
    double lambda_used = std::numeric_limits<double>::quiet_NaN();
    SolveReport rep;
    if (method == Method::Iht) {
        rep = iht(samples, a.inst.k, opts);
    } else {
        DemacMode mode = ExactMode{};
        if (method == Method::NoisyDemac) {
            // Without --eta, a generated instance uses its realized noise norm.
            eta_used = a.eta ? *a.eta
                             : (samples.noise_meta ? samples.noise_meta->realized_l2 : 0.0);
            mode = BoundedMode{eta_used};
        } else if (method == Method::RobustDemac) {
            lambda_used = (a.lambda.empty() || a.lambda == "auto")
                              ? default_robust_lambda(samples.size(), samples.grid_size())
                              : csv::to_double(a.lambda);
            mode = RobustMode{lambda_used};
        }
        rep = demac(samples, mode, opts);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    double err = nan, f_err = nan, c_dist = nan;
    if (reference)
        err = nmse(rep.y_hat, *reference);
    std::optional<PoleEstimates> poles;
    if (a.inst.k >= 1) {
        try {
            poles  = estimate_poles(rep.y_hat, a.inst.k, shape, model, opts.seed);
            c_dist = distance_to_torus(poles->poles);
            if (params && params->order() == a.inst.k) {
                const PoleEstimates fb =
                    model == HankelModel::Double
                        ? *poles
                        : estimate_poles(rep.y_hat, a.inst.k, shape, HankelModel::Double, opts.seed);
                f_err = freq_error(*params, fb);
            }
        } catch (const DegeneracyError& e) {
            std::cerr << "warning: pole retrieval skipped: " << e.what() << "\n";
        }
    }

    std::ostringstream row;
    using csv::format;
    row << "method,model,N,M,K,eta,lambda,iters,converged,final_rho,nmse,freq_rmse,circle_dist\n"
        << to_string(method) << ',' << to_string(model) << ',' << samples.grid_size() << ','
        << samples.size() << ',' << a.inst.k << ',' << format(eta_used) << ','
        << format(lambda_used) << ',' << rep.iters << ',' << (rep.converged ? 1 : 0) << ','
        << format(rep.final_rho) << ',' << format(err) << ',' << format(f_err) << ','
        << format(c_dist) << '\n';
    std::cout << row.str();

    if (!a.out.empty()) {
        ensure_dir(a.out);
        auto rs = open_out(fs::path(a.out) / "solve.csv");
        rs << row.str();
        auto ys = open_out(fs::path(a.out) / "y_hat.csv");
        write_signal_csv(ys, rep.y_hat);
        if (rep.e_hat) {
            auto es = open_out(fs::path(a.out) / "e_hat.csv");
            write_signal_csv(es, *rep.e_hat);
        }
        if (poles) {
            auto ps = open_out(fs::path(a.out) / "poles.csv");
            write_poles_csv(ps, *poles);
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct BenchArgs
{
    std::string config;
    std::vector<std::string> overrides;
    std::string out = ".";
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    bool timing = false;
};

int run_bench(const BenchArgs& a)
{
    ExperimentConfig cfg;
    if (!a.config.empty()) {
        auto is = open_in(a.config);
        cfg     = ExperimentConfig::parse(is);
    }
    // dims first so that "/N" in other overrides sees the final grid
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& kv : a.overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ArgumentError("--set expects key=value, got '" + kv + "'");
            const bool is_dims = kv.substr(0, eq) == "dims";
            if (is_dims == (pass == 0))
                cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
    if (a.threads)
        cfg.threads = *a.threads;
    if (a.seed)
        cfg.base_seed = *a.seed;
    if (a.timing)
        cfg.record_timing = true;
    cfg.validate();

    const ExperimentResult res = run_experiment(cfg);
    ensure_dir(a.out);
    auto ts = open_out(fs::path(a.out) / "trials.csv");
    write_trials_csv(ts, res.trials);
    auto as = open_out(fs::path(a.out) / "aggregate.csv");
    write_aggregate_csv(as, res.aggregates);
    std::cerr << "wrote " << res.trials.size() << " trial rows and " << res.aggregates.size()
              << " aggregate rows to " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct DiagArgs
{
    InstanceArgs inst;
    double split = 0.6;
    std::string split_rows;
    int instances = 1;
    double c1     = 1.0;
    std::string out;
};

int run_diag(const DiagArgs& a)
{
    if (a.inst.k < 1)
        throw ArgumentError("--k must be >= 1");
    if (a.instances < 1)
        throw ArgumentError("--instances must be >= 1");
    const Dims dims        = a.inst.grid();
    const LevelShape shape = make_shape(dims, a.split, a.split_rows);

    std::ostringstream table;
    write_incoherence_csv_header(table);
    for (int i = 0; i < a.instances; ++i) {
        InstanceArgs inst = a.inst;
        inst.seed         = mix_seed(a.inst.seed, static_cast<std::uint64_t>(i));
        write_incoherence_csv_row(table, incoherence(inst.params(), shape), a.c1);
    }
    std::cout << table.str();
    if (!a.out.empty()) {
        ensure_dir(a.out);
        auto os = open_out(fs::path(a.out) / "incoherence.csv");
        os << table.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Double-Hankel spectral compressed sensing"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "generate an instance and its samples");
    synth.inst.add_to(c_synth, true);
    c_synth->add_option("--out", synth.out, "output directory");

    SolveArgs solve;
    auto* c_solve = app.add_subcommand("solve", "recover one signal and retrieve its poles");
    solve.inst.add_to(c_solve, true);
    c_solve->add_option("--method", solve.method, "iht | demac | noisy-demac | robust-demac");
    c_solve->add_option("--model", solve.model, "single | double");
    c_solve->add_option("--input", solve.input, "samples CSV (index,re,im) instead of generating");
    c_solve->add_option("--truth", solve.truth, "params CSV of the reference signal");
    c_solve->add_option("--eta", solve.eta, "noise budget for noisy-demac");
    c_solve->add_option("--lambda", solve.lambda, "robust weight, number or 'auto'");
    c_solve->add_option("--split", solve.split, "row fraction of N+1 per dimension");
    c_solve->add_option("--split-rows", solve.split_rows, "explicit rows per dimension, e.g. 6x6");
    c_solve->add_option("--max-iters", solve.max_iters, "iteration cap");
    c_solve->add_option("--tol", solve.tol, "relative stopping tolerance");
    c_solve->add_option("--rho", solve.rho, "initial ADMM penalty");
    c_solve->add_option("--out", solve.out, "also write solve.csv, y_hat.csv, poles.csv here");

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "run a Monte-Carlo campaign");
    c_bench->add_option("--config", bench.config, "key = value config file");
    c_bench->add_option("--set", bench.overrides, "override a config key (key=value)");
    c_bench->add_option("--out", bench.out, "output directory for trials.csv and aggregate.csv");
    c_bench->add_option("--threads", bench.threads, "worker threads");
    c_bench->add_option("--seed", bench.seed, "base seed");
    c_bench->add_flag("--timing", bench.timing, "record wall_ms (output no longer reproducible)");

    DiagArgs diag;
    auto* c_diag = app.add_subcommand("diag", "incoherence report for random instances");
    diag.inst.add_to(c_diag, true);
    c_diag->add_option("--split", diag.split, "row fraction of N+1 per dimension");
    c_diag->add_option("--split-rows", diag.split_rows, "explicit rows per dimension");
    c_diag->add_option("--instances", diag.instances, "number of random instances");
    c_diag->add_option("--c1", diag.c1, "constant in the sample bound estimate");
    c_diag->add_option("--out", diag.out, "also write incoherence.csv here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (c_synth->parsed())
            return run_synth(synth);
        if (c_solve->parsed())
            return run_solve(solve);
        if (c_bench->parsed())
            return run_bench(bench);
        return run_diag(diag);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    }
}
