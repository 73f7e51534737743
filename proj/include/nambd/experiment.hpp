#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nambd/dynamics.hpp"
#include "nambd/geometry.hpp"
#include "nambd/rates.hpp"

namespace nambd {

// Reference rate for the validity decision: the analytic beta computed from
// each geometry, or a fixed user-supplied value (for models without an
// analytic reference).
struct Reference {
    bool analytic = true;
    double value = 0.0;
};

struct ExperimentSpec {
    Reference reference;
    double tolerance = 0.05;   // e
    double confidence = 0.99;  // c
    std::vector<NamGeometry> model_grid;
    std::vector<SimulatorConfig> engine_matrix;
    std::uint64_t master_seed = 0;
    std::uint64_t pilot_n = 50;
    std::uint64_t max_n = 1'000'000;
    std::uint64_t step_cap = 100'000'000;

    void validate() const;
};

struct ConfigurationVerdict {
    std::size_t cell_index;
    NamGeometry geometry;
    SimulatorConfig engine;
    double beta_ref;
    BetaEstimate estimate;
    std::uint64_t n_required;
    bool valid;
    bool capped;          // n_required exceeded max_n
    bool step_limit_hit;  // a replication hit the step cap; verdict flagged, not aborted
    double wall_time_s;
    std::vector<TrajectoryResult> runs;  // indexed by replication number
};

// |beta_hat - beta_ref| <= e, boundary inclusive.
bool evaluate(const BetaEstimate& estimate, double beta_ref, double e);

// Per-replication trace factory; returning an empty sink disables tracing for
// that replication. A non-null hook forces single-threaded execution so trace
// output stays ordered.
using TraceHook = std::function<TraceSink(std::size_t cell, std::uint64_t replication)>;

// Runs every (geometry x engine) cell: pilot_n replications seed the
// replication-count formula, then the cell is extended until the sample
// satisfies its own required n (sequential stopping, capped at max_n).
// Replication streams derive from
// (master_seed ^ mix64(cell_index + 1), replication_index), so results are a
// pure function of the spec regardless of thread count. n_threads = 0 means
// NAMBD_THREADS or hardware concurrency.
std::vector<ConfigurationVerdict> run_experiment(const ExperimentSpec& spec,
                                                 unsigned n_threads = 0,
                                                 const TraceHook& trace = {});

std::string engine_label(const SimulatorConfig& config);

struct ReportRow {
    std::size_t cell_index;
    double a, b, q, D;
    std::string engine;
    double beta_ref;
    double beta_hat;
    double std_error;
    std::uint64_t n;
    std::uint64_t n_required;
    bool valid;
    bool capped;
    bool step_limit_hit;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
};

ExperimentReport summarize(const std::vector<ConfigurationVerdict>& verdicts);

unsigned default_thread_count();

}  // namespace nambd
