#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nambd/errors.hpp"
#include "nambd/geometry.hpp"

namespace nambd {

// Centrosymmetric interaction energy E(r) in units of k_BT. E must decay to 0
// as r -> infinity for the flux-rate integral to converge. The radial
// derivative is optional; callers that need it fall back to a central
// difference.
struct PotentialOfMeanForce {
    std::function<double(double)> energy;
    std::function<double(double)> radial_derivative;  // dE/dr, may be empty

    double derivative_at(double r) const;
};

struct BetaEstimate {
    double beta_hat;
    double std_error;
    std::uint64_t n;
    std::vector<EndState> per_run_end_states;
};

// Diffusion-limited flux rate onto a sphere of radius b: 4*pi*D*b.
double smoluchowski_rate(double D, double b);

// Flux rate with an interaction potential:
//   k_D(b) = 4*pi * [ integral_b^inf exp(E(r)) / (r^2 D) dr ]^-1
// evaluated by adaptive Simpson quadrature after the substitution u = 1/r,
// which maps the semi-infinite domain onto [0, 1/b].
double rate_with_potential(double D, double b, const PotentialOfMeanForce& pmf,
                           double quad_tol = 1e-8);

// beta_inf = beta / (1 - (1 - beta) * Omega), Omega = k_b / k_q.
double beta_infinity(double beta, double k_b, double k_q);

// k = k_D(b) * beta_inf.
double association_rate(double k_b, double beta_inf);

// Probability that a trajectory started on the b-sphere reacts before
// escaping: (a/b) * (q-b) / (q-a).
double analytic_beta(double a, double b, double q);

// Same hitting probability for an arbitrary start radius r0 in [a, q].
double hitting_probability(double a, double r0, double q);

// Standard normal quantile at probability p in (0, 1).
double normal_quantile(double p);

// Replications needed so the estimate lands within +-e of the truth with
// confidence c: ceil((z * sigma / e)^2) with sigma the Bernoulli std dev at
// beta_pilot, floored at 2.
std::uint64_t required_replications(double beta_pilot, double e, double c);

BetaEstimate estimate_beta(const std::vector<EndState>& end_states);

}  // namespace nambd
