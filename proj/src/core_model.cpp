#include "crashlens/core_model.hpp"

#include <cmath>
#include <stdexcept>

namespace crashlens {

void LpplParams::validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("LpplParams: omega must be > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("LpplParams: alpha must be > 0");
    if (D.has_value() != psi.has_value())
        throw std::invalid_argument("LpplParams: D and psi must be both present or both absent");
}

void CrashProcessParams::validate() const {
    if (!(B0 > std::abs(B1)))
        throw std::invalid_argument("CrashProcessParams: require B0 > |B1| for a positive hazard");
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("CrashProcessParams: beta must lie in (0, 1)");
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("CrashProcessParams: kappa must lie in (0, 1)");
}

double lppl_eval(const LpplParams& params, double t) {
    const double u = params.t_c - t;
    if (!(u > 0.0)) throw std::domain_error("lppl_eval: t must be strictly less than t_c");
    const double log_u = std::log(u);
    double osc = 1.0 + params.C * std::cos(params.omega * log_u + params.phi);
    if (params.D)
        osc += *params.D * std::cos(2.0 * params.omega * log_u + *params.psi);
    return params.A + params.B * std::pow(u, params.alpha) * osc;
}

double hazard_eval(const CrashProcessParams& params, double t) {
    const double u = params.t_c - t;
    if (!(u > 0.0)) throw std::domain_error("hazard_eval: t must be strictly less than t_c");
    const double envelope = std::pow(u, -params.beta);
    return envelope * (params.B0 + params.B1 * std::cos(params.omega * std::log(u) + params.psi_prime));
}

double integrated_log_price(const CrashProcessParams& params, double t0, double t,
                            std::size_t steps) {
    if (steps < 1) throw std::domain_error("integrated_log_price: steps must be >= 1");
    if (!(t0 < t)) throw std::domain_error("integrated_log_price: require t0 < t");
    if (!(t < params.t_c)) throw std::domain_error("integrated_log_price: require t < t_c");
    const double h_step = (t - t0) / static_cast<double>(steps);
    double sum = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double mid = t0 + (static_cast<double>(k) + 0.5) * h_step;
        sum += hazard_eval(params, mid);
    }
    return params.kappa * sum * h_step;
}

LpplParams lppl_from_hazard(const CrashProcessParams& params, double A, double t0) {
    // Only the hazard-shape fields matter for the mapping; kappa = 0 (no
    // crash, flat curve) and kappa = 1 are legitimate here even though the
    // simulation configs require kappa strictly inside (0, 1).
    if (!(params.B0 > std::abs(params.B1)))
        throw std::invalid_argument("lppl_from_hazard: require B0 > |B1|");
    if (!(params.beta > 0.0 && params.beta < 1.0))
        throw std::invalid_argument("lppl_from_hazard: beta must lie in (0, 1)");
    if (!(t0 < params.t_c)) throw std::domain_error("lppl_from_hazard: require t0 < t_c");
    const double one_minus_beta = 1.0 - params.beta;
    const double u0 = params.t_c - t0;
    LpplParams out;
    out.alpha = one_minus_beta;
    out.t_c = params.t_c;
    out.omega = params.omega;
    out.B = -params.kappa * params.B0 / one_minus_beta;
    out.A = A + params.kappa * params.B0 / one_minus_beta * std::pow(u0, one_minus_beta);
    const double mix = std::sqrt(one_minus_beta * one_minus_beta + params.omega * params.omega);
    out.C = out.B == 0.0 ? 0.0 : (params.B1 / params.B0) * one_minus_beta / mix;
    out.phi = params.psi_prime - std::atan2(params.omega, one_minus_beta);
    return out;
}

}  // namespace crashlens
