#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "crashlens/core_model.hpp"
#include "crashlens/price_series.hpp"

namespace crashlens {

// Jump-process path simulation window. Validation rejects any dt for which
// the per-step crash probability h(t)*dt could reach 1 inside the window
// (checked with the envelope bound (B0+|B1|)*(t_c-t_end)^(-beta)*dt).
struct PathConfig {
    CrashProcessParams process;
    double p0 = 1.0;
    double t0 = 0.0;
    double t_end = 0.0;
    double dt = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
    // number of dt-cells fitting in [t0, t_end]
    std::size_t step_count() const;
};

// Square agent lattice with 4-neighbor (periodic) connectivity.
struct LatticeConfig {
    std::size_t side = 32;
    double K = 0.0;      // imitation coupling, >= 0
    double sigma = 1.0;  // idiosyncratic noise scale, >= 0
    std::size_t sweeps = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SpinGrid {
    std::size_t side = 0;
    std::vector<int> spins;  // row-major, values in {-1, +1}

    std::size_t size() const { return spins.size(); }
    double magnetization() const;
    void validate() const;
};

struct PathResult {
    PriceSeries series;  // log-prices on the dt-grid
    std::optional<double> crash_time;
};

// LPPL curve sampled at integer t in [t0, t_end] plus iid Gaussian noise.
PriceSeries gen_lppl_series(const LpplParams& params, double t0, double t_end,
                            double noise_sd, std::uint64_t seed);

// Discretized jump process: per step, p grows by the martingale drift
// 1 + kappa*h*dt and crashes with probability h*dt, dropping by the factor
// 1 - kappa; after a crash the price holds flat (the hazard no longer
// applies). with_jumps=false suppresses the jump draw and yields the
// deterministic drift-only path, used to cross-check the no-crash integral.
PathResult simulate_path(const PathConfig& config, bool with_jumps = true);

// Deterministic no-crash log-price log p0 + kappa * integral(h), accumulated
// by per-cell midpoint quadrature on the dt-grid.
PriceSeries nocrash_log_price(const PathConfig& config);

SpinGrid random_spin_grid(std::size_t side, std::uint64_t seed);
SpinGrid uniform_spin_grid(std::size_t side, int spin);

// One full raster-order sweep: every site is updated in sequence through
// s_i = sign(K * sum of 4 neighbors + sigma * eps_i), eps_i ~ N(0,1), with
// sign(0) := +1. Earlier sites in the raster already carry their new value
// when later sites read them. Deterministic given (config.seed, sweep_index).
SpinGrid lattice_sweep(const SpinGrid& state, const LatticeConfig& config,
                       std::uint64_t sweep_index = 0);

// Mean |magnetization| per coupling value, each measured over config.sweeps
// sweeps following a burn-in (default 10 * side sweeps) from a seeded random
// grid. Every K entry runs an independent derived seed.
std::vector<std::pair<double, double>> magnetization_curve(
    const LatticeConfig& config, const std::vector<double>& K_grid,
    std::optional<std::size_t> burn_in = std::nullopt);

}  // namespace crashlens
