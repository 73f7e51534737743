#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>

#include "nambd/geometry.hpp"
#include "nambd/random.hpp"
#include "nambd/rates.hpp"
#include "nambd/vec3.hpp"

namespace nambd {

// Relative coordinates: the fixed particle sits at the origin, position is
// the moving particle's offset from it.
struct ParticleState {
    Vec3 position;
    double model_time = 0.0;
};

struct StepProposal {
    Vec3 displacement;
    double dt;
};

struct Continue {
    ParticleState next;
};
struct Reaction {
    double hit_time;
};
struct Escape {
    double exit_time;
};
using DetectionOutcome = std::variant<Continue, Reaction, Escape>;

// One Ermak-McCammon displacement without forces: each Cartesian component
// ~ Normal(0, 2*D*dt), three normal draws consumed.
StepProposal brownian_step(const ParticleState& state, double dt, double D,
                           RandomStream& stream);

double fixed_stepsize(const FixedStep& policy, const ParticleState& state);

// dt such that the RMS step length sqrt(6*D*dt) stays below safety_fraction
// times the gap to the nearer boundary, clamped to [dt_min, dt_max].
double adaptive_stepsize(const AdaptiveStep& policy, const ParticleState& state,
                         const NamGeometry& geometry);

// Endpoint-only check: reports an event iff the post-step distance is <= a or
// >= q. Crossings strictly inside the step are missed; this is the biased
// detector under test.
DetectionOutcome detect_time_stepped(const ParticleState& state,
                                     const StepProposal& proposal,
                                     const NamGeometry& geometry);

// Treats the displacement as traversed linearly over dt and solves the
// ray-sphere quadratics for both boundaries, reporting the earliest crossing
// in (0, dt] with its fractional hit time.
DetectionOutcome detect_event_triggered(const ParticleState& state,
                                        const StepProposal& proposal,
                                        const NamGeometry& geometry);

// Deterministic radial drift (D * F * dt, F = -dE/dr in k_BT units) added to
// a proposed displacement. Disabled by default in the engine; with E == 0 the
// proposal is returned unchanged.
StepProposal apply_drift(const StepProposal& proposal, const ParticleState& state,
                         const PotentialOfMeanForce& pmf, double dt, double D);

// Optional per-step observer: (step index, model time, position, distance).
using TraceSink = std::function<void(std::uint64_t, double, const Vec3&, double)>;

struct EngineOptions {
    std::uint64_t step_cap = 100'000'000;
    const PotentialOfMeanForce* drift = nullptr;  // off by default
    TraceSink trace;                              // off by default
};

// Full trajectory from a uniformly sampled point on the b-sphere to Reaction
// or Escape. Throws StepLimitExceeded past options.step_cap.
TrajectoryResult run_trajectory(const NamGeometry& geometry, const SimulatorConfig& config,
                                RandomStream& stream, const EngineOptions& options = {});

// Test hook: identical engine, start position forced.
TrajectoryResult run_trajectory_from(const NamGeometry& geometry,
                                     const SimulatorConfig& config, RandomStream& stream,
                                     const Vec3& start, const EngineOptions& options = {});

}  // namespace nambd
