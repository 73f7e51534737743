#include "nambd/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace nambd {

StepProposal brownian_step(const ParticleState& state, double dt, double D,
                           RandomStream& stream) {
    (void)state;
    const double sigma = std::sqrt(2.0 * D * dt);
    return StepProposal{Vec3{sigma * stream.next_standard_normal(),
                             sigma * stream.next_standard_normal(),
                             sigma * stream.next_standard_normal()},
                        dt};
}

double fixed_stepsize(const FixedStep& policy, const ParticleState& state) {
    (void)state;
    return policy.dt;
}

double adaptive_stepsize(const AdaptiveStep& policy, const ParticleState& state,
                         const NamGeometry& geometry) {
    const double d = state.position.norm();
    const double gap = std::min(d - geometry.a(), geometry.q() - d);
    const double f = policy.safety_fraction;
    const double dt = f * f * gap * gap / (6.0 * geometry.diffusion());
    return std::clamp(dt, policy.dt_min, policy.dt_max);
}

DetectionOutcome detect_time_stepped(const ParticleState& state,
                                     const StepProposal& proposal,
                                     const NamGeometry& geometry) {
    const Vec3 end = state.position + proposal.displacement;
    const double d = end.norm();
    const double t_end = state.model_time + proposal.dt;
    if (d <= geometry.a()) return Reaction{t_end};
    if (d >= geometry.q()) return Escape{t_end};
    return Continue{ParticleState{end, t_end}};
}

namespace {

// Smallest s in (0, 1] with |p + s*v| = radius, or nullopt.
std::optional<double> first_sphere_crossing(const Vec3& p, const Vec3& v, double radius) {
    const double A = v.norm_sq();
    if (A == 0.0) return std::nullopt;
    const double B = p.dot(v);
    const double C = p.norm_sq() - radius * radius;
    const double disc = B * B - A * C;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // Roots in increasing order, numerically stable split.
    const double r1 = (B >= 0.0) ? (-B - sq) / A : C / (-B + sq);
    const double r2 = (B >= 0.0) ? C / (-B - sq) : (-B + sq) / A;
    for (double s : {std::min(r1, r2), std::max(r1, r2)})
        if (s > 0.0 && s <= 1.0) return s;
    return std::nullopt;
}

}  // namespace

DetectionOutcome detect_event_triggered(const ParticleState& state,
                                        const StepProposal& proposal,
                                        const NamGeometry& geometry) {
    const Vec3& p = state.position;
    const Vec3& v = proposal.displacement;
    if (v.norm_sq() == 0.0) {
        // Degenerate step: nothing moved, just advance time.
        return Continue{ParticleState{p, state.model_time + proposal.dt}};
    }
    const auto hit_a = first_sphere_crossing(p, v, geometry.a());
    const auto hit_q = first_sphere_crossing(p, v, geometry.q());
    if (hit_a && (!hit_q || *hit_a <= *hit_q))
        return Reaction{state.model_time + *hit_a * proposal.dt};
    if (hit_q) return Escape{state.model_time + *hit_q * proposal.dt};
    return Continue{ParticleState{p + v, state.model_time + proposal.dt}};
}

StepProposal apply_drift(const StepProposal& proposal, const ParticleState& state,
                         const PotentialOfMeanForce& pmf, double dt, double D) {
    if (!pmf.energy) return proposal;
    const double r = state.position.norm();
    const double e = pmf.energy(r);
    const double dedr = pmf.derivative_at(r);
    if (!std::isfinite(e) || !std::isfinite(dedr))
        throw SingularPotential("potential non-finite at evaluation radius");
    if (dedr == 0.0) return proposal;  // zero force leaves the proposal untouched
    const double force = -dedr;  // radial, in k_BT per length
    const Vec3 drift = state.position * (D * force * dt / r);
    return StepProposal{proposal.displacement + drift, proposal.dt};
}

namespace {

TrajectoryResult run_from(const NamGeometry& geometry, const SimulatorConfig& config,
                          RandomStream& stream, const Vec3& start,
                          const EngineOptions& options) {
    config.validate();
    ParticleState state{start, 0.0};
    const double d0 = start.norm();
    if (d0 <= geometry.a()) return TrajectoryResult{EndState::Reacted, 1, 0.0, d0};
    if (d0 >= geometry.q()) return TrajectoryResult{EndState::Escaped, 1, 0.0, d0};

    const bool event_triggered = config.detector_kind == DetectorKind::EventTriggered;
    const auto* adaptive = std::get_if<AdaptiveStep>(&config.stepsize);
    const double base_dt = base_stepsize(config.stepsize);

    std::uint64_t steps = 0;
    while (true) {
        if (++steps > options.step_cap)
            throw StepLimitExceeded("trajectory exceeded the configured step cap");

        const double dt = adaptive ? adaptive_stepsize(*adaptive, state, geometry)
                                   : base_dt;

        StepProposal proposal = brownian_step(state, dt, geometry.diffusion(), stream);
        if (options.drift)
            proposal = apply_drift(proposal, state, *options.drift, dt, geometry.diffusion());

        const DetectionOutcome outcome =
            event_triggered ? detect_event_triggered(state, proposal, geometry)
                            : detect_time_stepped(state, proposal, geometry);

        if (const auto* cont = std::get_if<Continue>(&outcome)) {
            state = cont->next;
            if (options.trace)
                options.trace(steps, state.model_time, state.position,
                              state.position.norm());
            continue;
        }
        if (const auto* reaction = std::get_if<Reaction>(&outcome)) {
            const double frac = event_triggered
                                    ? (reaction->hit_time - state.model_time) / dt
                                    : 1.0;
            const Vec3 end = state.position + proposal.displacement * frac;
            if (options.trace)
                options.trace(steps, reaction->hit_time, end, end.norm());
            return TrajectoryResult{EndState::Reacted, steps, reaction->hit_time,
                                    end.norm()};
        }
        const auto& escape = std::get<Escape>(outcome);
        const double frac =
            event_triggered ? (escape.exit_time - state.model_time) / dt : 1.0;
        const Vec3 end = state.position + proposal.displacement * frac;
        if (options.trace) options.trace(steps, escape.exit_time, end, end.norm());
        return TrajectoryResult{EndState::Escaped, steps, escape.exit_time, end.norm()};
    }
}

}  // namespace

TrajectoryResult run_trajectory(const NamGeometry& geometry, const SimulatorConfig& config,
                                RandomStream& stream, const EngineOptions& options) {
    const Vec3 start = stream.sample_uniform_on_sphere(geometry.b());
    return run_from(geometry, config, stream, start, options);
}

TrajectoryResult run_trajectory_from(const NamGeometry& geometry,
                                     const SimulatorConfig& config, RandomStream& stream,
                                     const Vec3& start, const EngineOptions& options) {
    return run_from(geometry, config, stream, start, options);
}

}  // namespace nambd
