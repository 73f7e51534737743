#pragma once

#include <cstdint>
#include <variant>

#include "nambd/errors.hpp"

namespace nambd {

// Spherical geometry of one model configuration: reaction radius a, start
// radius b, escape radius q (all center-to-center), mutual diffusion
// coefficient D. Lengths in model length units (Angstrom-equivalent), times
// in model time units (millisecond-equivalent).
class NamGeometry {
  public:
    NamGeometry(double a, double b, double q, double D, double particle_radius = 0.0)
        : a_(a), b_(b), q_(q), D_(D), particle_radius_(particle_radius) {
        if (!(a > 0.0 && a < b && b < q))
            throw OrderingViolation("geometry radii must satisfy 0 < a < b < q");
        if (!(D > 0.0))
            throw NonPositiveDiffusion("diffusion coefficient must be > 0");
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double q() const { return q_; }
    double diffusion() const { return D_; }
    // Metadata only; never enters the reaction or escape criterion.
    double particle_radius() const { return particle_radius_; }

  private:
    double a_, b_, q_, D_, particle_radius_;
};

inline NamGeometry make_geometry(double a, double b, double q, double D,
                                 double particle_radius = 0.0) {
    return NamGeometry(a, b, q, D, particle_radius);
}

enum class EndState { Reacted, Escaped };

struct TrajectoryResult {
    EndState end_state;
    std::uint64_t steps;
    double model_time;
    double final_distance;
};

enum class RngKind { MersenneTwister, BaselineLcg };
enum class DetectorKind { TimeStepped, EventTriggered };

struct FixedStep {
    double dt;
};

struct AdaptiveStep {
    double dt_max;
    double dt_min;
    double safety_fraction;
};

using StepsizePolicy = std::variant<FixedStep, AdaptiveStep>;

// Largest dt a policy can emit; used for reporting and trace sizing.
inline double base_stepsize(const StepsizePolicy& policy) {
    if (const auto* fixed = std::get_if<FixedStep>(&policy)) return fixed->dt;
    return std::get<AdaptiveStep>(policy).dt_max;
}

struct SimulatorConfig {
    RngKind rng_kind = RngKind::MersenneTwister;
    DetectorKind detector_kind = DetectorKind::EventTriggered;
    StepsizePolicy stepsize = FixedStep{0.1};
    std::uint64_t seed = 0;

    void validate() const {
        if (const auto* fixed = std::get_if<FixedStep>(&stepsize)) {
            if (!(fixed->dt > 0.0))
                throw NonPositiveInput("fixed stepsize must be > 0");
        } else {
            const auto& ad = std::get<AdaptiveStep>(stepsize);
            if (!(ad.dt_min > 0.0 && ad.dt_max > 0.0 && ad.dt_min <= ad.dt_max))
                throw NonPositiveInput("adaptive stepsize requires 0 < dt_min <= dt_max");
            if (!(ad.safety_fraction > 0.0 && ad.safety_fraction < 1.0))
                throw NonPositiveInput("safety fraction must lie in (0, 1)");
        }
    }
};

}  // namespace nambd
