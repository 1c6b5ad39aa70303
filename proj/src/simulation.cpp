#include "crashlens/simulation.hpp"

#include <cmath>
#include <stdexcept>

#include "crashlens/random.hpp"

namespace crashlens {

void PathConfig::validate() const {
    process.validate();
    if (!(p0 > 0.0)) throw std::invalid_argument("PathConfig: p0 must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("PathConfig: dt must be positive");
    if (!(t0 < t_end)) throw std::invalid_argument("PathConfig: require t0 < t_end");
    if (!(t_end < process.t_c)) throw std::invalid_argument("PathConfig: require t_end < t_c");
    const double h_max = (process.B0 + std::abs(process.B1)) *
                         std::pow(process.t_c - t_end, -process.beta);
    if (!(h_max * dt < 1.0))
        throw std::invalid_argument(
            "PathConfig: dt too large, per-step crash probability h(t)*dt can reach 1");
}

std::size_t PathConfig::step_count() const {
    return static_cast<std::size_t>(std::floor((t_end - t0) / dt + 1e-9));
}

void LatticeConfig::validate() const {
    if (side < 2) throw std::invalid_argument("LatticeConfig: side must be >= 2");
    if (K < 0.0 || sigma < 0.0)
        throw std::invalid_argument("LatticeConfig: K and sigma must be non-negative");
    if (K == 0.0 && sigma == 0.0)
        throw std::invalid_argument("LatticeConfig: K and sigma cannot both be zero");
}

double SpinGrid::magnetization() const {
    if (spins.empty()) return 0.0;
    long sum = 0;
    for (int s : spins) sum += s;
    return static_cast<double>(sum) / static_cast<double>(spins.size());
}

void SpinGrid::validate() const {
    if (spins.size() != side * side)
        throw std::invalid_argument("SpinGrid: spin count does not match side*side");
    for (int s : spins)
        if (s != 1 && s != -1) throw std::invalid_argument("SpinGrid: spins must be +1 or -1");
}

PriceSeries gen_lppl_series(const LpplParams& params, double t0, double t_end,
                            double noise_sd, std::uint64_t seed) {
    params.validate();
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("gen_lppl_series: noise_sd must be >= 0");
    if (!(t_end < params.t_c))
        throw std::domain_error("gen_lppl_series: window must end before t_c");
    const double first = std::ceil(t0);
    const double last = std::floor(t_end);
    if (first > last) throw std::invalid_argument("gen_lppl_series: no integer t in [t0, t_end]");
    Rng rng(seed);
    PriceSeries series;
    for (double t = first; t <= last; t += 1.0) {
        series.times.push_back(t);
        double y = lppl_eval(params, t);
        if (noise_sd > 0.0) y += noise_sd * rng.normal();
        series.log_prices.push_back(y);
    }
    return series;
}

PathResult simulate_path(const PathConfig& config, bool with_jumps) {
    config.validate();
    const std::size_t steps = config.step_count();
    Rng rng(config.seed);

    PathResult result;
    result.series.times.reserve(steps + 1);
    result.series.log_prices.reserve(steps + 1);

    double p = config.p0;
    bool crashed = false;
    result.series.times.push_back(config.t0);
    result.series.log_prices.push_back(std::log(p));
    for (std::size_t k = 0; k < steps; ++k) {
        const double t_k = config.t0 + static_cast<double>(k) * config.dt;
        if (!crashed) {
            const double h = hazard_eval(config.process, t_k);
            p *= 1.0 + config.process.kappa * h * config.dt;
            if (with_jumps && rng.uniform() < h * config.dt) {
                p *= 1.0 - config.process.kappa;
                crashed = true;
                result.crash_time = t_k + config.dt;
            }
        }
        result.series.times.push_back(config.t0 + static_cast<double>(k + 1) * config.dt);
        result.series.log_prices.push_back(std::log(p));
    }
    return result;
}

PriceSeries nocrash_log_price(const PathConfig& config) {
    config.validate();
    const std::size_t steps = config.step_count();
    PriceSeries series;
    series.times.reserve(steps + 1);
    series.log_prices.reserve(steps + 1);
    double log_p = std::log(config.p0);
    series.times.push_back(config.t0);
    series.log_prices.push_back(log_p);
    for (std::size_t k = 0; k < steps; ++k) {
        const double mid = config.t0 + (static_cast<double>(k) + 0.5) * config.dt;
        log_p += config.process.kappa * hazard_eval(config.process, mid) * config.dt;
        series.times.push_back(config.t0 + static_cast<double>(k + 1) * config.dt);
        series.log_prices.push_back(log_p);
    }
    return series;
}

SpinGrid random_spin_grid(std::size_t side, std::uint64_t seed) {
    Rng rng(seed);
    SpinGrid grid;
    grid.side = side;
    grid.spins.resize(side * side);
    for (auto& s : grid.spins) s = rng.uniform() < 0.5 ? -1 : 1;
    return grid;
}

SpinGrid uniform_spin_grid(std::size_t side, int spin) {
    if (spin != 1 && spin != -1)
        throw std::invalid_argument("uniform_spin_grid: spin must be +1 or -1");
    SpinGrid grid;
    grid.side = side;
    grid.spins.assign(side * side, spin);
    return grid;
}

SpinGrid lattice_sweep(const SpinGrid& state, const LatticeConfig& config,
                       std::uint64_t sweep_index) {
    config.validate();
    state.validate();
    if (state.side != config.side)
        throw std::invalid_argument("lattice_sweep: grid side does not match config");

    const std::size_t side = state.side;
    SpinGrid grid = state;
    Rng rng = Rng::derive(config.seed, sweep_index);
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
            const int up = grid.spins[((r + side - 1) % side) * side + c];
            const int down = grid.spins[((r + 1) % side) * side + c];
            const int left = grid.spins[r * side + (c + side - 1) % side];
            const int right = grid.spins[r * side + (c + 1) % side];
            const double field =
                config.K * static_cast<double>(up + down + left + right) +
                config.sigma * rng.normal();
            grid.spins[r * side + c] = field >= 0.0 ? 1 : -1;  // sign(0) := +1
        }
    }
    return grid;
}

std::vector<std::pair<double, double>> magnetization_curve(
    const LatticeConfig& config, const std::vector<double>& K_grid,
    std::optional<std::size_t> burn_in) {
    config.validate();
    if (K_grid.empty()) throw std::invalid_argument("magnetization_curve: empty K grid");
    const std::size_t burn = burn_in.value_or(10 * config.side);

    std::vector<std::pair<double, double>> curve;
    curve.reserve(K_grid.size());
    for (std::size_t ki = 0; ki < K_grid.size(); ++ki) {
        LatticeConfig local = config;
        local.K = K_grid[ki];
        local.seed = Rng::mix(config.seed, 0x6d61676eULL + ki);
        SpinGrid grid = random_spin_grid(local.side, Rng::mix(local.seed, 0x1717ULL));
        std::uint64_t sweep_index = 0;
        for (std::size_t s = 0; s < burn; ++s) grid = lattice_sweep(grid, local, sweep_index++);
        double acc = 0.0;
        for (std::size_t s = 0; s < local.sweeps; ++s) {
            grid = lattice_sweep(grid, local, sweep_index++);
            acc += std::abs(grid.magnetization());
        }
        curve.emplace_back(K_grid[ki], acc / static_cast<double>(local.sweeps));
    }
    return curve;
}

}  // namespace crashlens
