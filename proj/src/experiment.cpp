#include "nambd/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>

#include "nambd/random.hpp"
#include "nambd/text.hpp"

namespace nambd {

void ExperimentSpec::validate() const {
    if (!(tolerance > 0.0 && tolerance < 1.0))
        throw NonPositiveInput("tolerance e must lie in (0, 1)");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw NonPositiveInput("confidence c must lie in (0, 1)");
    if (model_grid.empty() || engine_matrix.empty())
        throw EmptyExperiment("experiment needs a non-empty model grid and engine matrix");
    if (pilot_n < 2) throw NonPositiveInput("pilot_n must be at least 2");
    if (max_n < pilot_n) throw NonPositiveInput("max_n must be at least pilot_n");
    for (const auto& engine : engine_matrix) engine.validate();
}

bool evaluate(const BetaEstimate& estimate, double beta_ref, double e) {
    return std::abs(estimate.beta_hat - beta_ref) <= e;
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("NAMBD_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

namespace {

struct CellRunner {
    const NamGeometry& geometry;
    const SimulatorConfig& engine;
    std::uint64_t cell_seed;
    std::uint64_t step_cap;
    unsigned n_threads;
    std::size_t cell_index;
    const TraceHook* trace;

    std::vector<std::optional<TrajectoryResult>> runs;
    std::atomic<bool> limit_hit{false};

    // Runs replication indices [from, to); each index gets its own derived
    // stream, so completion order never affects the outcome.
    void extend(std::uint64_t from, std::uint64_t to) {
        runs.resize(to);
        std::atomic<std::uint64_t> next{from};
        const auto worker = [&] {
            EngineOptions options;
            options.step_cap = step_cap;
            for (std::uint64_t k = next.fetch_add(1); k < to; k = next.fetch_add(1)) {
                RandomStream stream =
                    derive_replication_stream(cell_seed, k, engine.rng_kind);
                if (trace && *trace) options.trace = (*trace)(cell_index, k);
                try {
                    runs[k] = run_trajectory(geometry, engine, stream, options);
                } catch (const StepLimitExceeded&) {
                    limit_hit.store(true);
                }
            }
        };
        const unsigned threads =
            static_cast<unsigned>(std::min<std::uint64_t>(n_threads, to - from));
        if (threads <= 1) {
            worker();
            return;
        }
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
};

}  // namespace

std::vector<ConfigurationVerdict> run_experiment(const ExperimentSpec& spec,
                                                 unsigned n_threads,
                                                 const TraceHook& trace) {
    spec.validate();
    if (n_threads == 0) n_threads = default_thread_count();
    if (trace) n_threads = 1;

    std::vector<ConfigurationVerdict> verdicts;
    std::size_t cell_index = 0;
    for (const auto& geometry : spec.model_grid) {
        const double beta_ref =
            spec.reference.analytic
                ? analytic_beta(geometry.a(), geometry.b(), geometry.q())
                : spec.reference.value;
        for (const auto& engine : spec.engine_matrix) {
            const auto t0 = std::chrono::steady_clock::now();

            CellRunner runner{geometry, engine,
                              spec.master_seed ^ mix64(cell_index + 1), spec.step_cap,
                              n_threads, cell_index, &trace};
            runner.extend(0, spec.pilot_n);

            // Sequential stopping: re-derive the required count from all
            // replications so far and extend until the sample satisfies it
            // (or max_n cuts it off). A single pilot-sized estimate would
            // undersize cells whose pilot happened to look quiet.
            std::uint64_t n_required = spec.pilot_n;
            std::uint64_t total_n = spec.pilot_n;
            bool capped = false;
            while (!runner.limit_hit.load()) {
                std::uint64_t hits = 0;
                for (std::uint64_t k = 0; k < total_n; ++k)
                    if (runner.runs[k]->end_state == EndState::Reacted) ++hits;
                // Size against a confidence bound of beta pushed toward 1/2
                // (where the binomial variance peaks): a sample that happens
                // to look quiet must not understate its own variance and stop
                // itself early. Agresti-Coull centering keeps the bound sane
                // for all-miss samples.
                const double ac = (static_cast<double>(hits) + 2.0) /
                                  (static_cast<double>(total_n) + 4.0);
                const double z = normal_quantile(0.5 * (1.0 + spec.confidence));
                const double se =
                    std::sqrt(ac * (1.0 - ac) / (static_cast<double>(total_n) + 4.0));
                const double sizing_beta =
                    ac < 0.5 ? std::min(0.5, ac + z * se) : std::max(0.5, ac - z * se);
                n_required =
                    required_replications(sizing_beta, spec.tolerance, spec.confidence);
                capped = n_required > spec.max_n;
                const std::uint64_t target =
                    std::min(std::max(n_required, spec.pilot_n), spec.max_n);
                if (target <= total_n) break;
                runner.extend(total_n, target);
                total_n = target;
            }

            // A step-limit hit truncates the cell at the first missing
            // replication so the estimate stays order-deterministic.
            const bool limit_hit = runner.limit_hit.load();
            std::vector<TrajectoryResult> runs;
            runs.reserve(total_n);
            for (std::uint64_t k = 0; k < total_n && runner.runs[k]; ++k)
                runs.push_back(*runner.runs[k]);

            ConfigurationVerdict verdict{
                cell_index, geometry, engine, beta_ref,
                BetaEstimate{0.0, 0.0, 0, {}},
                n_required, false, capped, limit_hit, 0.0, std::move(runs)};
            if (!verdict.runs.empty()) {
                std::vector<EndState> states;
                states.reserve(verdict.runs.size());
                for (const auto& r : verdict.runs) states.push_back(r.end_state);
                verdict.estimate = estimate_beta(states);
                verdict.valid = !limit_hit &&
                                evaluate(verdict.estimate, beta_ref, spec.tolerance);
            }
            verdict.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
            verdicts.push_back(std::move(verdict));
            ++cell_index;
        }
    }
    return verdicts;
}

std::string engine_label(const SimulatorConfig& config) {
    std::string label =
        config.rng_kind == RngKind::MersenneTwister ? "mt19937_64" : "lcg48";
    label += config.detector_kind == DetectorKind::TimeStepped ? "/time_stepped"
                                                               : "/event_triggered";
    if (const auto* fixed = std::get_if<FixedStep>(&config.stepsize)) {
        label += "/fixed(" + format_double(fixed->dt) + ")";
    } else {
        const auto& ad = std::get<AdaptiveStep>(config.stepsize);
        label += "/adaptive(" + format_double(ad.dt_max) + "," +
                 format_double(ad.dt_min) + "," + format_double(ad.safety_fraction) + ")";
    }
    return label;
}

ExperimentReport summarize(const std::vector<ConfigurationVerdict>& verdicts) {
    if (verdicts.empty()) throw EmptyExperiment("no verdicts to summarize");
    ExperimentReport report;
    report.rows.reserve(verdicts.size());
    for (const auto& v : verdicts) {
        report.rows.push_back(ReportRow{
            v.cell_index, v.geometry.a(), v.geometry.b(), v.geometry.q(),
            v.geometry.diffusion(), engine_label(v.engine), v.beta_ref,
            v.estimate.beta_hat, v.estimate.std_error, v.estimate.n, v.n_required,
            v.valid, v.capped, v.step_limit_hit});
    }
    return report;
}

}  // namespace nambd
