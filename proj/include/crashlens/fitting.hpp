#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "crashlens/core_model.hpp"
#include "crashlens/price_series.hpp"
#include "crashlens/scaling.hpp"

namespace crashlens {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return x >= lo && x <= hi; }
    double width() const { return hi - lo; }
    double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

enum class HarmonicOrder { first, second };

// Thrown when no candidate critical time in the box can sit beyond the data.
struct InfeasibleBoxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Constraint box and optimizer settings for the constrained minimization.
// A, B, C (and D) are never searched: they are eliminated through the linear
// subproblem at every candidate point, so the search runs over
// (t_c, alpha, omega, phi) and additionally psi for the second harmonic.
struct FitSpec {
    Interval t_c;
    Interval omega{15.0, 20.0};
    Interval alpha{0.1, 1.0};
    Interval phi{0.0, 6.283185307179586};
    Interval psi{0.0, 6.283185307179586};
    bool negative_B = true;  // reject candidates whose eliminated B is >= 0
    HarmonicOrder harmonic_order = HarmonicOrder::first;
    std::size_t multistart = 16;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 500;  // per start
    double tolerance = 1e-12;          // objective-improvement stop threshold

    // Box with a data-derived critical-time interval
    // [t_max + 1, t_max + 1 + (t_max - t_min + 1)] and the default bounds above.
    static FitSpec for_window(double t_min, double t_max);

    std::size_t parameter_count() const {
        return harmonic_order == HarmonicOrder::second ? 9 : 7;
    }
    void validate() const;
};

struct FitResult {
    LpplParams params;
    double sse = 0.0;
    double mse = 0.0;  // sse / df
    std::size_t df = 0;
    double r_squared = 0.0;
    std::vector<double> residuals;  // y_t - yhat_t
    bool converged = false;
    std::size_t starts_tried = 0;
};

struct LinearReduction {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double sse = 0.0;
};

struct Goodness {
    double mse = 0.0;
    std::size_t df = 0;
    double r_squared = 0.0;
};

// Sum of squared residuals of the series against the model. Throws
// std::domain_error if any observation time reaches t_c.
double objective(const LpplParams& params, const PriceSeries& series);

// Solves the 3x3 normal equations for (A, B, B*C) on the regressors
// (1, f, g) with f = (t_c - t)^alpha and g = f * cos(omega ln(t_c - t) + phi),
// then recovers C = (B*C)/B, with C = 0 once |B| <= 1e-12. Throws
// std::runtime_error on a singular normal matrix.
LinearReduction reduce_linear(const PriceSeries& series, double t_c, double alpha,
                              double omega, double phi);

// Two-stage constrained fit. When init is given, stage 1 fixes (t_c, omega)
// from it and scans a coarse 32x32 (alpha, phi) grid through the linear
// reduction; the winner joins the multistart list. Stage 2 releases all
// parameters and runs bounded Nelder-Mead from each start, with the linear
// block eliminated at every evaluation. Deterministic given (series, spec,
// init, seed). Throws InfeasibleBoxError when no start is feasible.
FitResult fit(const PriceSeries& series, const FitSpec& spec,
              const std::optional<ScalingEstimate>& init = std::nullopt);

// mse = sse/df with df = n - 7 (or n - 9 with the second harmonic);
// r_squared = 1 - sse / total sum of squares. Throws when df would be <= 0.
Goodness goodness(const PriceSeries& series, const LpplParams& params);

// Asymptotic standard errors from a finite-difference Jacobian,
// sqrt(mse * diag((J^T J)^-1)), in the order A, B, C, alpha, t_c, phi, omega
// [, D, psi]. A heuristic diagnostic, not part of the fitting protocol.
std::vector<double> asymptotic_standard_errors(const PriceSeries& series,
                                               const LpplParams& params);

}  // namespace crashlens
