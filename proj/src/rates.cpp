#include "nambd/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nambd {

namespace {

double simpson(const std::function<double(double)>& f, double lo, double hi, double flo,
               double fmid, double fhi) {
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
}

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double flo, double fmid, double fhi, double whole, double tol,
                        int depth) {
    if (depth <= 0)
        throw QuadratureNonConvergence("adaptive quadrature exceeded recursion budget");
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid);
    const double rmid = 0.5 * (mid + hi);
    const double flmid = f(lmid);
    const double frmid = f(rmid);
    const double left = simpson(f, lo, mid, flo, flmid, fmid);
    const double right = simpson(f, mid, hi, fmid, frmid, fhi);
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, lo, mid, flo, flmid, fmid, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, mid, hi, fmid, frmid, fhi, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fmid = f(0.5 * (lo + hi));
    const double whole = simpson(f, lo, hi, flo, fmid, fhi);
    return adaptive_simpson(f, lo, hi, flo, fmid, fhi, whole, tol, 60);
}

}  // namespace

double PotentialOfMeanForce::derivative_at(double r) const {
    if (radial_derivative) return radial_derivative(r);
    const double h = 1e-6 * std::max(r, 1.0);
    return (energy(r + h) - energy(r - h)) / (2.0 * h);
}

double smoluchowski_rate(double D, double b) {
    if (!(D > 0.0) || !(b > 0.0))
        throw NonPositiveInput("smoluchowski_rate requires D > 0 and b > 0");
    return 4.0 * std::numbers::pi * D * b;
}

double rate_with_potential(double D, double b, const PotentialOfMeanForce& pmf,
                           double quad_tol) {
    if (!(D > 0.0) || !(b > 0.0))
        throw NonPositiveInput("rate_with_potential requires D > 0 and b > 0");

    // The integral diverges only if E(r) keeps growing at large r; a bounded
    // tail (including a constant shift) still converges.
    const double tail_near = pmf.energy(1e6 * b);
    const double tail_far = pmf.energy(1e8 * b);
    if (!std::isfinite(tail_near) || !std::isfinite(tail_far) ||
        (std::abs(tail_far) > std::abs(tail_near) + 1e-9 && std::abs(tail_far) > 1e-6))
        throw DivergentIntegral("E(r) does not stay bounded at large r");

    // u = 1/r maps [b, inf) to (0, 1/b]; dr = -du/u^2 cancels 1/r^2 exactly.
    const auto integrand = [&](double u) {
        const double e = (u > 0.0) ? pmf.energy(1.0 / u) : tail_far;
        if (!std::isfinite(e)) throw SingularPotential("E(r) non-finite inside quadrature");
        return std::exp(e) / D;
    };
    const double rough = 1.0 / (D * b);  // zero-potential value, scales the tolerance
    const double integral = integrate(integrand, 0.0, 1.0 / b, quad_tol * rough);
    return 4.0 * std::numbers::pi / integral;
}

double beta_infinity(double beta, double k_b, double k_q) {
    if (!(k_b > 0.0) || !(k_q > 0.0) || k_b > k_q)
        throw OmegaOutOfRange("beta_infinity requires 0 < k_b <= k_q");
    const double omega = k_b / k_q;
    return beta / (1.0 - (1.0 - beta) * omega);
}

double association_rate(double k_b, double beta_inf) { return k_b * beta_inf; }

double analytic_beta(double a, double b, double q) {
    if (!(a > 0.0 && a < b && b < q))
        throw OrderingViolation("analytic_beta requires 0 < a < b < q");
    return (a / b) * (q - b) / (q - a);
}

double hitting_probability(double a, double r0, double q) {
    if (!(a > 0.0 && a <= r0 && r0 <= q && a < q))
        throw OrderingViolation("hitting_probability requires 0 < a <= r0 <= q");
    return (a / r0) * (q - r0) / (q - a);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw NonPositiveInput("normal_quantile requires p in (0, 1)");
    const auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::uint64_t required_replications(double beta_pilot, double e, double c) {
    if (!(e > 0.0) || !(c > 0.0 && c < 1.0) || !(beta_pilot >= 0.0 && beta_pilot <= 1.0))
        throw NonPositiveInput("required_replications: invalid (beta_pilot, e, c)");
    const double sigma = std::sqrt(beta_pilot * (1.0 - beta_pilot));
    if (sigma == 0.0 || e >= 1.0) return 2;
    const double z = normal_quantile(0.5 * (1.0 + c));
    const double n = std::ceil((z * sigma / e) * (z * sigma / e));
    return std::max<std::uint64_t>(2, static_cast<std::uint64_t>(n));
}

BetaEstimate estimate_beta(const std::vector<EndState>& end_states) {
    if (end_states.empty()) throw EmptySample("estimate_beta requires at least one run");
    const auto reacted = static_cast<double>(
        std::count(end_states.begin(), end_states.end(), EndState::Reacted));
    const auto n = static_cast<double>(end_states.size());
    const double beta_hat = reacted / n;
    return BetaEstimate{beta_hat, std::sqrt(beta_hat * (1.0 - beta_hat) / n),
                        end_states.size(), end_states};
}

}  // namespace nambd
