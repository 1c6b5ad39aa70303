#pragma once

#include <optional>

namespace crashlens {

// Parameters of the log-periodic power law
//   log p(t) = A + B (t_c - t)^alpha { 1 + C cos(omega ln(t_c - t) + phi)
//                                      [+ D cos(2 omega ln(t_c - t) + psi)] }
// The second-harmonic pair (D, psi) is either fully present or absent.
struct LpplParams {
    double A = 0.0;
    double B = 0.0;      // negative for bubbles
    double C = 0.0;      // relative amplitude of the first oscillation
    double alpha = 0.5;  // power-law exponent, > 0
    double t_c = 0.0;    // critical time, trading-day index units
    double phi = 0.0;    // phase, radians
    double omega = 1.0;  // log-frequency, > 0
    std::optional<double> D;    // second-harmonic relative amplitude
    std::optional<double> psi;  // second-harmonic phase

    bool second_order() const { return D.has_value(); }
    std::size_t parameter_count() const { return second_order() ? 9 : 7; }
    void validate() const;
};

// Hazard-rate parameters of the crash jump process
//   h(t) = B0 (t_c - t)^(-beta) + B1 (t_c - t)^(-beta) cos(omega ln(t_c - t) + psi_prime)
// B0 > |B1| keeps h positive on t < t_c; kappa is the fractional drop at the crash.
struct CrashProcessParams {
    double B0 = 1.0;
    double B1 = 0.0;
    double beta = 0.5;  // in (0, 1) so the integrated hazard is finite at t_c
    double t_c = 0.0;
    double omega = 1.0;
    double psi_prime = 0.0;
    double kappa = 0.1;  // in (0, 1)

    void validate() const;
};

// Predicted log-price at t. Throws std::domain_error when t >= t_c.
double lppl_eval(const LpplParams& params, double t);

// Hazard rate at t. Throws std::domain_error when t >= t_c.
double hazard_eval(const CrashProcessParams& params, double t);

// kappa * integral of h over [t0, t] by composite midpoint quadrature on a
// uniform grid with `steps` cells. Requires t0 < t < t_c and steps >= 1.
double integrated_log_price(const CrashProcessParams& params, double t0, double t,
                            std::size_t steps);

// Maps hazard parameters to the LPPL curve A + kappa * integral(h). The
// power-law block is exact: alpha = 1 - beta, B = -kappa*B0/(1-beta), and A
// absorbs the power-law constant at t0. The oscillation is mapped through
// the stationary-amplitude rule
//   C = (B1/B0) (1-beta) / sqrt((1-beta)^2 + omega^2),
//   phi = psi_prime - atan2(omega, 1-beta),
// which drops the constant the oscillatory antiderivative contributes at t0;
// for B1 = 0 the mapping is exact.
LpplParams lppl_from_hazard(const CrashProcessParams& params, double A, double t0);

}  // namespace crashlens
