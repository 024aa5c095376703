#include <doctest.h>

#include <map>
#include <sstream>

#include "dhsc/bench.hpp"
#include "support.hpp"

using namespace dhsc;

namespace
{

ExperimentConfig small_config()
{
    std::istringstream is(R"(
# tiny mixed campaign
kind = phase_transition
dims = 21
M = 12, 21
K = 1..2
delta_f = 0, 1/N
trials = 3
seed = 42
methods = demac:double, demac:single, iht:double
admm_max_iters = 300
)");
    return ExperimentConfig::parse(is);
}

std::string csv_of(const ExperimentResult& r)
{
    std::ostringstream os;
    write_trials_csv(os, r.trials);
    write_aggregate_csv(os, r.aggregates);
    return os.str();
}

} // namespace

TEST_SUITE("bench")
{
    TEST_CASE("nmse")
    {
        std::mt19937_64 rng(1);
        const ComplexVector b = testing::random_complex(8, rng);
        CHECK(nmse(b, b) == 0.0);
        const ComplexVector unit = b / b.norm();
        CHECK(std::abs(nmse(ComplexVector::Zero(8), unit) - 1.0) < 1e-15);
        CHECK(std::abs(nmse(ComplexVector(2.0 * b), b) - 1.0) < 1e-15);
        CHECK_THROWS_AS(nmse(b, ComplexVector::Zero(8)), ArgumentError);
        CHECK_THROWS_AS(nmse(b, ComplexVector::Zero(7)), ArgumentError);
    }

    TEST_CASE("config: parsing, ranges and overrides")
    {
        const auto c = small_config();
        CHECK(c.dims == Dims{21});
        CHECK(c.M == std::vector<Index>{12, 21});
        CHECK(c.K == std::vector<Index>{1, 2});
        REQUIRE(c.delta_f.size() == 2);
        CHECK(std::abs(c.delta_f[1] - 1.0 / 21) < 1e-16);
        CHECK(c.methods.size() == 3);
        CHECK(c.methods[1].model == HankelModel::Single);

        ExperimentConfig d;
        d.set("dims", "65");
        d.set("delta_f", "0:0.1:2/N");
        CHECK(d.delta_f.size() == 21);
        CHECK(std::abs(d.delta_f.back() - 2.0 / 65) < 1e-15);
        d.set("M", "20:4:120");
        CHECK(d.M.size() == 26);
        d.set("eta", "inf, 0");
        CHECK(std::isinf(d.eta[0]));
        d.set("dims", "11x11");
        CHECK(d.dims == Dims{11, 11});
        CHECK_THROWS_AS(d.set("nonsense", "1"), ArgumentError);
        CHECK_THROWS_AS(d.set("methods", "admm"), ArgumentError);
        std::istringstream bad("kind = phase_transition\ntrials = 0\n");
        CHECK_THROWS_AS(ExperimentConfig::parse(bad), ArgumentError);
        std::istringstream noeq("kind phase_transition\n");
        CHECK_THROWS_AS(ExperimentConfig::parse(noeq), ArgumentError);
    }

    TEST_CASE("run: one IHT trial on a single pole")
    {
        ExperimentConfig c;
        c.kind    = ExperimentKind::PhaseTransition;
        c.K       = {1};
        c.trials  = 1;
        c.methods = {{Method::Iht, HankelModel::Double}};
        const auto r = run_experiment(c);
        REQUIRE(r.trials.size() == 1);
        CHECK(r.trials[0].success);
        CHECK(r.trials[0].nmse < 1e-10);
        REQUIRE(r.aggregates.size() == 1);
        CHECK(r.aggregates[0].success_rate == 1.0);
    }

    TEST_CASE("run: row counts, skips and aggregate recomputation")
    {
        const auto c = small_config();
        const auto r = run_experiment(c);
        // 2 K x 2 delta_f x 2 M cells; iht runs only where M = N
        CHECK(r.aggregates.size() == 8 * 3);
        CHECK(r.trials.size() == 8 * 3 * 2 + 4 * 3);
        std::map<std::pair<Index, std::string>, std::pair<int, int>> tally;
        for (const auto& a : r.aggregates) {
            if (a.method == Method::Iht && a.M == 12) {
                CHECK(a.skipped == 3);
                CHECK(a.trials == 0);
                CHECK(std::isnan(a.success_rate));
                continue;
            }
            CHECK(a.skipped == 0);
            int n = 0, ok = 0;
            double sum = 0.0;
            for (const auto& t : r.trials)
                if (t.K == a.K && t.delta_f == a.delta_f && t.M == a.M && t.method == a.method &&
                    t.model == a.model) {
                    ++n;
                    ok += t.success;
                    sum += t.nmse;
                }
            CHECK(n == a.trials);
            CHECK(a.success_rate == double(ok) / n);
            CHECK(std::abs(a.mean_nmse - sum / n) <= 1e-12 * std::abs(a.mean_nmse) + 1e-300);
        }
    }

    TEST_CASE("run: infeasible packing is skipped, not fatal")
    {
        ExperimentConfig c;
        c.dims    = {21};
        c.K       = {5};
        c.delta_f = {0.3};
        c.trials  = 2;
        const auto r = run_experiment(c);
        CHECK(r.trials.empty());
        REQUIRE(r.aggregates.size() == 1);
        CHECK(r.aggregates[0].skipped == 2);
    }

    TEST_CASE("run: deterministic across reruns and thread counts")
    {
        auto c            = small_config();
        const std::string a = csv_of(run_experiment(c));
        const std::string b = csv_of(run_experiment(c));
        c.threads           = 3;
        const std::string d = csv_of(run_experiment(c));
        CHECK(a == b);
        CHECK(a == d);
    }

    TEST_CASE("run: every kind produces well-formed rows")
    {
        for (auto kind : {ExperimentKind::ErrorCurve, ExperimentKind::SparseNoisePhase,
                          ExperimentKind::NdCurve, ExperimentKind::CircleHistogram}) {
            ExperimentConfig c;
            c.kind           = kind;
            c.trials         = 2;
            c.admm_max_iters = 200;
            c.iht_max_iters  = 200;
            c.K              = {2};
            if (kind == ExperimentKind::ErrorCurve) {
                c.dims    = {21};
                c.M       = {15};
                c.eta     = {0.5};
                c.methods = {{Method::NoisyDemac, HankelModel::Double}};
            } else if (kind == ExperimentKind::SparseNoisePhase) {
                c.dims        = {21};
                c.corruptions = {2};
                c.methods     = {{Method::RobustDemac, HankelModel::Double}};
            } else if (kind == ExperimentKind::NdCurve) {
                c.dims    = {5, 6};
                c.M       = {20};
                c.eta     = {0.5};
                c.methods = {{Method::NoisyDemac, HankelModel::Single}};
            } else {
                c.dims    = {33};
                c.eta     = {std::numeric_limits<double>::infinity()};
                c.methods = {{Method::Iht, HankelModel::Double}};
            }
            const auto r = run_experiment(c);
            REQUIRE(r.trials.size() == 2);
            for (const auto& t : r.trials) {
                CHECK(std::isfinite(t.nmse));
                if (kind == ExperimentKind::SparseNoisePhase)
                    CHECK(std::abs(t.tau - 2.0 / 21) < 1e-15);
                if (kind == ExperimentKind::ErrorCurve)
                    CHECK(std::abs(t.noise_l2 - 0.5) < 1e-12);
            }
            if (kind == ExperimentKind::CircleHistogram)
                CHECK(r.aggregates[0].success_rate == 1.0);
        }
    }

    TEST_CASE("CSV headers")
    {
        std::ostringstream t, a;
        write_trials_csv(t, {});
        write_aggregate_csv(a, {});
        CHECK(t.str() == "kind,K,delta_f,M,eta,tau,method,model,trial,seed,nmse,freq_rmse,circle_dist,"
                         "iters,converged,wall_ms\n");
        CHECK(a.str() == "kind,K,delta_f,M,eta,tau,method,model,trials,success_rate,mean_nmse,"
                         "mean_freq_rmse,mean_circle_dist,skipped\n");
    }
}
