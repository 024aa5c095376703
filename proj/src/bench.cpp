#include "dhsc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "dhsc/csv.hpp"
#include "dhsc/hankel.hpp"
#include "dhsc/retrieve.hpp"

namespace dhsc
{

double nmse(const ComplexVector& a, const ComplexVector& b)
{
    if (a.size() != b.size())
        throw ArgumentError("nmse: length mismatch");
    const double ref = b.squaredNorm();
    if (!(ref > 0.0))
        throw ArgumentError("nmse: zero reference signal");
    return (a - b).squaredNorm() / ref;
}

double nmse(const Signal& a, const Signal& b)
{
    if (a.dims != b.dims)
        throw ArgumentError("nmse: grid mismatch");
    return nmse(a.values, b.values);
}

// ---------------------------------------------------------------------------

std::string to_string(ExperimentKind k)
{
    switch (k) {
    case ExperimentKind::PhaseTransition: return "phase_transition";
    case ExperimentKind::ErrorCurve: return "error_curve";
    case ExperimentKind::SparseNoisePhase: return "sparse_noise_phase";
    case ExperimentKind::NdCurve: return "nd_curve";
    case ExperimentKind::CircleHistogram: return "circle_histogram";
    }
    return "?";
}

ExperimentKind parse_kind(const std::string& s)
{
    for (auto k : {ExperimentKind::PhaseTransition, ExperimentKind::ErrorCurve,
                   ExperimentKind::SparseNoisePhase, ExperimentKind::NdCurve,
                   ExperimentKind::CircleHistogram})
        if (to_string(k) == s)
            return k;
    throw ArgumentError("unknown experiment kind '" + s + "'");
}

std::string to_string(Method m)
{
    switch (m) {
    case Method::Iht: return "iht";
    case Method::Demac: return "demac";
    case Method::NoisyDemac: return "noisy-demac";
    case Method::RobustDemac: return "robust-demac";
    }
    return "?";
}

Method parse_method(const std::string& s)
{
    for (auto m : {Method::Iht, Method::Demac, Method::NoisyDemac, Method::RobustDemac})
        if (to_string(m) == s)
            return m;
    throw ArgumentError("unknown method '" + s + "'");
}

// ---------------------------------------------------------------------------
// Config parsing

namespace
{

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

bool parse_bool(const std::string& s)
{
    if (s == "1" || s == "true" || s == "yes" || s == "on")
        return true;
    if (s == "0" || s == "false" || s == "no" || s == "off")
        return false;
    throw ArgumentError("expected a boolean, got '" + s + "'");
}

// Items: "a", "a..b", "a:step:b" (integers), comma separated.
std::vector<Index> parse_index_list(const std::string& s)
{
    std::vector<Index> out;
    for (const auto& item : split_on(s, ',')) {
        const auto parts = split_on(item, ':');
        if (parts.size() == 3) {
            const Index a = csv::to_integer(parts[0]);
            const Index h = csv::to_integer(parts[1]);
            const Index b = csv::to_integer(parts[2]);
            if (h < 1 || b < a)
                throw ArgumentError("bad range '" + item + "'");
            for (Index v = a; v <= b; v += h)
                out.push_back(v);
            continue;
        }
        const auto dots = item.find("..");
        if (dots != std::string::npos) {
            const Index a = csv::to_integer(trim(item.substr(0, dots)));
            const Index b = csv::to_integer(trim(item.substr(dots + 2)));
            for (Index v = a; v <= b; ++v)
                out.push_back(v);
        } else {
            out.push_back(csv::to_integer(item));
        }
    }
    return out;
}

// Items: "x", "x/N", "a:step:b", "a:step:b/N"; "/N" scales by 1/n_unit.
std::vector<double> parse_real_list(const std::string& s, double n_unit)
{
    std::vector<double> out;
    for (auto item : split_on(s, ',')) {
        double scale = 1.0;
        if (item.size() > 2 && item.compare(item.size() - 2, 2, "/N") == 0) {
            scale = 1.0 / n_unit;
            item  = item.substr(0, item.size() - 2);
        }
        const auto parts = split_on(item, ':');
        if (parts.size() == 3) {
            const double a = csv::to_double(parts[0]);
            const double h = csv::to_double(parts[1]);
            const double b = csv::to_double(parts[2]);
            if (!(h > 0.0) || b < a)
                throw ArgumentError("bad range '" + item + "'");
            const auto count = static_cast<long>(std::floor((b - a) / h + 1e-9)) + 1;
            for (long i = 0; i < count; ++i)
                out.push_back((a + static_cast<double>(i) * h) * scale);
        } else if (parts.size() == 1) {
            out.push_back(csv::to_double(parts[0]) * scale);
        } else {
            throw ArgumentError("bad list item '" + item + "'");
        }
    }
    return out;
}

Dims parse_dims(const std::string& s)
{
    Dims d;
    for (const auto& p : split_on(s, 'x'))
        d.push_back(csv::to_integer(p));
    return d;
}

} // namespace

void ExperimentConfig::set(const std::string& key_in, const std::string& value_in)
{
    const std::string key   = trim(key_in);
    const std::string value = trim(value_in);
    const double n_unit     = dims.empty() ? 1.0 : static_cast<double>(dims[0]);

    if (key == "kind")
        kind = parse_kind(value);
    else if (key == "dims")
        dims = parse_dims(value);
    else if (key == "split")
        split = csv::to_double(value);
    else if (key == "split_rows")
        split_rows = parse_dims(value);
    else if (key == "K")
        K = parse_index_list(value);
    else if (key == "delta_f")
        delta_f = parse_real_list(value, n_unit);
    else if (key == "M")
        M = (value == "full" || value.empty()) ? std::vector<Index>{} : parse_index_list(value);
    else if (key == "eta" || key == "snr_db")
        eta = parse_real_list(value, n_unit);
    else if (key == "corruptions")
        corruptions = parse_index_list(value);
    else if (key == "trials")
        trials = static_cast<int>(csv::to_integer(value));
    else if (key == "seed")
        base_seed = static_cast<std::uint64_t>(csv::to_integer(value));
    else if (key == "methods") {
        methods.clear();
        for (const auto& item : split_on(value, ',')) {
            const auto parts = split_on(item, ':');
            if (parts.empty() || parts.size() > 2)
                throw ArgumentError("bad method '" + item + "' (expected method:model)");
            methods.push_back({parse_method(parts[0]),
                               parts.size() == 2 ? parse_model(parts[1]) : HankelModel::Double});
        }
    } else if (key == "success_nmse")
        success_nmse = csv::to_double(value);
    else if (key == "circle_tol")
        circle_tol = csv::to_double(value);
    else if (key == "exact_pair")
        exact_pair = parse_bool(value);
    else if (key == "amp_law") {
        if (value == "half_plus_abs_normal")
            amp_law = AmplitudeLaw::HalfPlusAbsNormal;
        else if (value == "unit")
            amp_law = AmplitudeLaw::UnitModulus;
        else
            throw ArgumentError("unknown amp_law '" + value + "'");
    } else if (key == "iht_max_iters")
        iht_max_iters = static_cast<int>(csv::to_integer(value));
    else if (key == "iht_tol")
        iht_tol = csv::to_double(value);
    else if (key == "admm_max_iters")
        admm_max_iters = static_cast<int>(csv::to_integer(value));
    else if (key == "admm_tol")
        admm_tol = csv::to_double(value);
    else if (key == "lambda")
        lambda = value == "auto" ? std::nullopt : std::optional<double>(csv::to_double(value));
    else if (key == "threads")
        threads = static_cast<int>(csv::to_integer(value));
    else if (key == "record_timing")
        record_timing = parse_bool(value);
    else
        throw ArgumentError("unknown config key '" + key + "'");
}

ExperimentConfig ExperimentConfig::parse(std::istream& is)
{
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("config line " + std::to_string(lineno) + ": expected key = value");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    ExperimentConfig cfg;
    // dims first: "/N" suffixes in other keys depend on it
    for (const auto& [k, v] : kv)
        if (k == "dims")
            cfg.set(k, v);
    for (const auto& [k, v] : kv)
        if (k != "dims")
            cfg.set(k, v);
    cfg.validate();
    return cfg;
}

LevelShape ExperimentConfig::shape() const
{
    if (!split_rows.empty())
        return LevelShape::with_rows(dims, split_rows);
    return LevelShape::split(dims, split);
}

void ExperimentConfig::validate() const
{
    grid_size(dims);
    shape();
    if (K.empty() || delta_f.empty() || eta.empty() || corruptions.empty() || methods.empty())
        throw ArgumentError("config: every grid axis and the method list must be non-empty");
    if (trials < 1)
        throw ArgumentError("config: trials must be >= 1");
    if (!(success_nmse > 0.0) || !(circle_tol > 0.0))
        throw ArgumentError("config: thresholds must be positive");
    if (threads < 1)
        throw ArgumentError("config: threads must be >= 1");
    for (Index k : K)
        if (k < 1)
            throw ArgumentError("config: K values must be >= 1");
}

// ---------------------------------------------------------------------------
// Runner

namespace
{

struct Cell
{
    Index K;
    double delta_f;
    Index M; // 0 = full
    double eta;
    Index corruptions;
};

std::vector<Cell> enumerate_cells(const ExperimentConfig& cfg)
{
    const std::vector<Index> ms = cfg.M.empty() ? std::vector<Index>{0} : cfg.M;
    std::vector<Cell> cells;
    for (Index k : cfg.K)
        for (double df : cfg.delta_f)
            for (Index m : ms)
                for (double e : cfg.eta)
                    for (Index c : cfg.corruptions)
                        cells.push_back({k, df, m, e, c});
    return cells;
}

struct TaskOutput
{
    std::vector<TrialRow> rows;
    std::vector<bool> skipped; // per method
};

double nan_value()
{
    return std::numeric_limits<double>::quiet_NaN();
}

TaskOutput run_task(const ExperimentConfig& cfg, const LevelShape& shape, const Cell& cell,
                    std::size_t cell_index, int trial)
{
    TaskOutput out;
    out.skipped.assign(cfg.methods.size(), false);
    const Index n            = grid_size(cfg.dims);
    const Index m_eff        = cell.M == 0 ? n : cell.M;
    const std::uint64_t seed = mix_seed(cfg.base_seed, cell_index, static_cast<std::uint64_t>(trial));

    auto skip_all = [&] {
        out.skipped.assign(cfg.methods.size(), true);
        return out;
    };
    if (m_eff > n || cell.corruptions > m_eff)
        return skip_all();

    SpectralParams params;
    try {
        RandomParamsOptions ro;
        ro.min_sep    = cell.delta_f;
        ro.exact_pair = cfg.exact_pair;
        ro.amp_law    = cfg.amp_law;
        params        = random_params(cell.K, cfg.dims.size(), ro, mix_seed(seed, 1));
    } catch (const GenerationError&) {
        return skip_all();
    }
    const Signal truth = synthesize(params, cfg.dims);

    CorruptionSpec spec;
    if (m_eff < n)
        spec.subsample = m_eff;
    double tau = 0.0;
    if (cfg.kind == ExperimentKind::CircleHistogram) {
        spec.noise = GaussianSnr{cell.eta};
    } else if (cfg.kind == ExperimentKind::SparseNoisePhase) {
        spec.noise = SparseCount{cell.corruptions};
        tau        = static_cast<double>(cell.corruptions) / static_cast<double>(m_eff);
    } else if (cell.eta > 0.0) {
        spec.noise = GaussianEta{cell.eta};
    }
    const SampleSet samples = corrupt(truth, spec, mix_seed(seed, 2));
    const double noise_l2   = samples.noise_meta ? samples.noise_meta->realized_l2 : 0.0;
    const HankelIndex hidx(shape);
    const ComplexMatrix h_truth = hidx.forward(truth.values);

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const MethodSpec& ms = cfg.methods[mi];
        if (ms.method == Method::Iht && !samples.is_full()) {
            out.skipped[mi] = true;
            continue;
        }

        SolveReport rep;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (ms.method == Method::Iht) {
                SolveOptions o = SolveOptions::iht_defaults(shape, ms.model);
                o.max_iters    = cfg.iht_max_iters;
                o.tol_rel      = cfg.iht_tol;
                rep            = iht(samples, cell.K, o);
            } else {
                SolveOptions o = SolveOptions::admm_defaults(shape, ms.model);
                o.max_iters    = cfg.admm_max_iters;
                o.tol_rel      = cfg.admm_tol;
                DemacMode mode = ExactMode{};
                if (ms.method == Method::NoisyDemac)
                    mode = BoundedMode{cfg.kind == ExperimentKind::CircleHistogram ? noise_l2
                                                                                    : cell.eta};
                else if (ms.method == Method::RobustDemac)
                    mode = RobustMode{cfg.lambda};
                rep = demac(samples, mode, o);
            }
        } catch (const ArgumentError&) {
            out.skipped[mi] = true;
            continue;
        }
        const auto t1 = std::chrono::steady_clock::now();

        TrialRow row{};
        row.kind      = cfg.kind;
        row.K         = cell.K;
        row.delta_f   = cell.delta_f;
        row.M         = m_eff;
        row.eta       = cell.eta;
        row.tau       = tau;
        row.method    = ms.method;
        row.model     = ms.model;
        row.trial     = trial;
        row.seed      = seed;
        row.nmse      = nmse(rep.y_hat, truth);
        row.iters     = rep.iters;
        row.converged = rep.converged;
        row.wall_ms   = cfg.record_timing
                            ? std::chrono::duration<double, std::milli>(t1 - t0).count()
                            : 0.0;
        row.cell       = cell_index;
        row.noise_l2   = noise_l2;
        row.hankel_err = (hidx.forward(rep.y_hat.values) - h_truth).norm();

        // Circle distance uses the solver's own model; frequency error uses
        // forward-backward ESPRIT for every method.
        row.circle_dist = nan_value();
        row.freq_rmse   = nan_value();
        try {
            const PoleEstimates own = estimate_poles(rep.y_hat, cell.K, shape, ms.model);
            row.circle_dist         = distance_to_torus(own.poles);
            const PoleEstimates fb  = ms.model == HankelModel::Double
                                          ? own
                                          : estimate_poles(rep.y_hat, cell.K, shape,
                                                           HankelModel::Double);
            row.freq_rmse = freq_error(params, fb);
        } catch (const std::runtime_error&) {
        } catch (const std::invalid_argument&) {
        }

        if (cfg.kind == ExperimentKind::CircleHistogram)
            row.success = row.circle_dist < cfg.circle_tol;
        else
            row.success = row.nmse <= cfg.success_nmse;
        out.rows.push_back(row);
    }
    return out;
}

double finite_mean(const std::vector<double>& v)
{
    double acc = 0.0;
    int cnt    = 0;
    for (double x : v)
        if (std::isfinite(x)) {
            acc += x;
            ++cnt;
        }
    return cnt > 0 ? acc / cnt : nan_value();
}

} // namespace

std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg, const std::vector<TrialRow>& rows,
                                    const std::vector<int>& skipped)
{
    const auto cells = enumerate_cells(cfg);
    const Index n    = grid_size(cfg.dims);
    std::vector<AggregateRow> out;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Cell& c = cells[ci];
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            const MethodSpec& ms = cfg.methods[mi];
            std::vector<double> e, f, cd;
            int succ = 0;
            for (const auto& r : rows)
                if (r.cell == ci && r.method == ms.method && r.model == ms.model) {
                    e.push_back(r.nmse);
                    f.push_back(r.freq_rmse);
                    cd.push_back(r.circle_dist);
                    succ += r.success ? 1 : 0;
                }
            AggregateRow a{};
            a.kind    = cfg.kind;
            a.K       = c.K;
            a.delta_f = c.delta_f;
            a.M       = c.M == 0 ? n : c.M;
            a.eta     = c.eta;
            a.tau     = cfg.kind == ExperimentKind::SparseNoisePhase && a.M > 0
                            ? static_cast<double>(c.corruptions) / static_cast<double>(a.M)
                            : 0.0;
            a.method  = ms.method;
            a.model   = ms.model;
            a.trials  = static_cast<int>(e.size());
            a.success_rate = a.trials > 0 ? static_cast<double>(succ) / a.trials : nan_value();
            a.mean_nmse        = finite_mean(e);
            a.mean_freq_rmse   = finite_mean(f);
            a.mean_circle_dist = finite_mean(cd);
            a.skipped          = skipped.at(ci * cfg.methods.size() + mi);
            out.push_back(a);
        }
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    const LevelShape shape = cfg.shape();
    const auto cells       = enumerate_cells(cfg);
    const std::size_t n_tasks = cells.size() * static_cast<std::size_t>(cfg.trials);

    std::vector<TaskOutput> outputs(n_tasks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < n_tasks; t = next++) {
            const std::size_t ci = t / static_cast<std::size_t>(cfg.trials);
            const int trial      = static_cast<int>(t % static_cast<std::size_t>(cfg.trials));
            outputs[t]           = run_task(cfg, shape, cells[ci], ci, trial);
        }
    };
    const int n_threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(n_tasks)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    // Task order is (cell, trial); rows within a task follow the method list.
    ExperimentResult res;
    std::vector<int> skipped(cells.size() * cfg.methods.size(), 0);
    for (std::size_t t = 0; t < n_tasks; ++t) {
        const std::size_t ci = t / static_cast<std::size_t>(cfg.trials);
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
            if (outputs[t].skipped[mi])
                ++skipped[ci * cfg.methods.size() + mi];
        for (auto& r : outputs[t].rows)
            res.trials.push_back(r);
    }
    res.aggregates = aggregate(cfg, res.trials, skipped);
    return res;
}

// ---------------------------------------------------------------------------

void write_trials_csv(std::ostream& os, const std::vector<TrialRow>& rows)
{
    using csv::format;
    os << "kind,K,delta_f,M,eta,tau,method,model,trial,seed,nmse,freq_rmse,circle_dist,iters,"
          "converged,wall_ms\n";
    for (const auto& r : rows)
        os << to_string(r.kind) << ',' << r.K << ',' << format(r.delta_f) << ',' << r.M << ','
           << format(r.eta) << ',' << format(r.tau) << ',' << to_string(r.method) << ','
           << to_string(r.model) << ',' << r.trial << ',' << r.seed << ',' << format(r.nmse)
           << ',' << format(r.freq_rmse) << ',' << format(r.circle_dist) << ',' << r.iters << ','
           << (r.converged ? 1 : 0) << ',' << format(r.wall_ms) << '\n';
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows)
{
    using csv::format;
    os << "kind,K,delta_f,M,eta,tau,method,model,trials,success_rate,mean_nmse,mean_freq_rmse,"
          "mean_circle_dist,skipped\n";
    for (const auto& r : rows)
        os << to_string(r.kind) << ',' << r.K << ',' << format(r.delta_f) << ',' << r.M << ','
           << format(r.eta) << ',' << format(r.tau) << ',' << to_string(r.method) << ','
           << to_string(r.model) << ',' << r.trials << ',' << format(r.success_rate) << ','
           << format(r.mean_nmse) << ',' << format(r.mean_freq_rmse) << ','
           << format(r.mean_circle_dist) << ',' << r.skipped << '\n';
}

} // namespace dhsc
