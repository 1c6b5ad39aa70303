#include "crashlens/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "crashlens/random.hpp"

namespace crashlens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAmplitudeFloor = 1e-12;  // |B| below this makes C (and D) unidentifiable
constexpr std::size_t kStage1Grid = 32;    // coarse (alpha, phi) scan per side

// Gaussian elimination with partial pivoting on an m x m system, m <= 9.
// Returns false when a pivot falls under the singularity threshold.
bool solve_dense(std::vector<double>& M, std::vector<double>& b, std::size_t m) {
    double max_abs = 0.0;
    for (double v : M) max_abs = std::max(max_abs, std::abs(v));
    const double tol = 1e-13 * std::max(max_abs, 1.0);
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(M[r * m + col]) > std::abs(M[pivot * m + col])) pivot = r;
        if (std::abs(M[pivot * m + col]) <= tol) return false;
        if (pivot != col) {
            for (std::size_t c = 0; c < m; ++c) std::swap(M[col * m + c], M[pivot * m + c]);
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < m; ++r) {
            const double factor = M[r * m + col] / M[col * m + col];
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < m; ++c) M[r * m + c] -= factor * M[col * m + c];
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t r = m; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < m; ++c) acc -= M[r * m + c] * b[c];
        b[r] = acc / M[r * m + r];
    }
    return true;
}

struct Elimination {
    bool ok = false;
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
    double sse = kInf;
};

// Linear subproblem at fixed nonlinear parameters: regressors (1, f, g[, h])
// with f = u^alpha, g = f cos(omega ln u + phi), h = f cos(2 omega ln u + psi).
// Infeasible candidates (t_c inside the data, singular normal matrix, or a
// non-negative B when the sign constraint is on) come back with ok = false.
class Eliminator {
public:
    explicit Eliminator(const PriceSeries& series) : series_(series) {
        const std::size_t n = series.size();
        f_.resize(n);
        g_.resize(n);
        h_.resize(n);
        log_u_.resize(n);
    }

    Elimination eval(double t_c, double alpha, double omega, double phi,
                     const std::optional<double>& psi, bool enforce_negative_B) {
        const auto& t = series_.times;
        const auto& y = series_.log_prices;
        const std::size_t n = t.size();
        Elimination out;
        if (!(t.back() < t_c)) return out;

        for (std::size_t i = 0; i < n; ++i) {
            const double u = t_c - t[i];
            log_u_[i] = std::log(u);
            f_[i] = std::exp(alpha * log_u_[i]);
            g_[i] = f_[i] * std::cos(omega * log_u_[i] + phi);
            if (psi) h_[i] = f_[i] * std::cos(2.0 * omega * log_u_[i] + *psi);
        }

        const std::size_t m = psi ? 4 : 3;
        std::vector<double> M(m * m, 0.0), rhs(m, 0.0);
        auto column = [&](std::size_t j, std::size_t i) -> double {
            switch (j) {
                case 0: return 1.0;
                case 1: return f_[i];
                case 2: return g_[i];
                default: return h_[i];
            }
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t r = 0; r < m; ++r) {
                const double cr = column(r, i);
                rhs[r] += cr * y[i];
                for (std::size_t c = r; c < m; ++c) M[r * m + c] += cr * column(c, i);
            }
        }
        for (std::size_t r = 1; r < m; ++r)
            for (std::size_t c = 0; c < r; ++c) M[r * m + c] = M[c * m + r];

        if (!solve_dense(M, rhs, m)) return out;
        const double A = rhs[0], B = rhs[1], BC = rhs[2];
        const double BD = psi ? rhs[3] : 0.0;
        if (enforce_negative_B && !(B < 0.0)) return out;

        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = y[i] - A - B * f_[i] - BC * g_[i];
            if (psi) r -= BD * h_[i];
            sse += r * r;
        }
        out.ok = true;
        out.A = A;
        out.B = B;
        out.C = std::abs(B) <= kAmplitudeFloor ? 0.0 : BC / B;
        out.D = std::abs(B) <= kAmplitudeFloor ? 0.0 : BD / B;
        out.sse = sse;
        return out;
    }

private:
    const PriceSeries& series_;
    std::vector<double> f_, g_, h_, log_u_;
};

struct NmOutcome {
    std::vector<double> x;
    double f = kInf;
    bool converged = false;
};

// Nelder-Mead with box constraints handled by coordinate clamping of every
// proposed point. Stops when the simplex objective spread drops under
// tol * (|f_best| + tol) or the iteration budget runs out.
NmOutcome nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                      std::vector<double> x0, const std::vector<Interval>& box,
                      std::size_t max_iter, double tol) {
    const std::size_t d = x0.size();
    for (std::size_t j = 0; j < d; ++j) x0[j] = box[j].clamp(x0[j]);

    std::vector<std::vector<double>> xs(d + 1, x0);
    for (std::size_t j = 0; j < d; ++j) {
        double step = 0.08 * box[j].width();
        if (step == 0.0) step = 1e-8;
        if (x0[j] + step > box[j].hi) step = -step;
        xs[j + 1][j] = box[j].clamp(x0[j] + step);
    }
    std::vector<double> fs(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fs[i] = fn(xs[i]);

    NmOutcome out;
    auto record_best = [&]() {
        std::size_t b = 0;
        for (std::size_t i = 1; i <= d; ++i)
            if (fs[i] < fs[b]) b = i;
        out.x = xs[b];
        out.f = fs[b];
    };
    record_best();
    if (out.f == kInf) return out;  // whole simplex infeasible, nothing to polish

    std::vector<std::size_t> order(d + 1);
    std::vector<double> centroid(d), cand(d);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i <= d; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = order[0], worst = order[d], second_worst = order[d - 1];

        if (fs[worst] - fs[best] <= tol * (std::abs(fs[best]) + tol)) {
            out.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < d; ++j) centroid[j] += xs[i][j];
        }
        for (std::size_t j = 0; j < d; ++j) centroid[j] /= static_cast<double>(d);

        auto propose = [&](double coef) {
            for (std::size_t j = 0; j < d; ++j)
                cand[j] = box[j].clamp(centroid[j] + coef * (centroid[j] - xs[worst][j]));
            return fn(cand);
        };

        const double f_reflect = propose(1.0);
        if (f_reflect < fs[best]) {
            const std::vector<double> reflect = cand;
            const double f_expand = propose(2.0);
            if (f_expand < f_reflect) {
                xs[worst] = cand;
                fs[worst] = f_expand;
            } else {
                xs[worst] = reflect;
                fs[worst] = f_reflect;
            }
        } else if (f_reflect < fs[second_worst]) {
            xs[worst] = cand;
            fs[worst] = f_reflect;
        } else {
            const double f_contract =
                f_reflect < fs[worst] ? propose(0.5) : propose(-0.5);
            if (f_contract < std::min(f_reflect, fs[worst])) {
                xs[worst] = cand;
                fs[worst] = f_contract;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < d; ++j)
                        xs[i][j] = xs[best][j] + 0.5 * (xs[i][j] - xs[best][j]);
                    fs[i] = fn(xs[i]);
                }
            }
        }
    }
    record_best();
    return out;
}

double wrap_phase(double value, const Interval& box) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (box.width() < two_pi - 1e-12) return value;  // tight box, already inside
    double w = std::fmod(value - box.lo, two_pi);
    if (w < 0.0) w += two_pi;
    return box.lo + w;
}

}  // namespace

FitSpec FitSpec::for_window(double t_min, double t_max) {
    FitSpec spec;
    const double span = t_max - t_min + 1.0;
    spec.t_c = {t_max + 1.0, t_max + 1.0 + span};
    return spec;
}

void FitSpec::validate() const {
    auto check = [](const Interval& iv, const char* name) {
        if (!(iv.lo <= iv.hi))
            throw std::invalid_argument(std::string("FitSpec: empty interval for ") + name);
    };
    check(t_c, "t_c");
    check(omega, "omega");
    check(alpha, "alpha");
    check(phi, "phi");
    check(psi, "psi");
    if (!(alpha.lo > 0.0 && alpha.hi <= 1.0))
        throw std::invalid_argument("FitSpec: alpha bounds must lie within (0, 1]");
    if (!(omega.lo > 0.0))
        throw std::invalid_argument("FitSpec: omega bounds must be positive");
    if (multistart < 1) throw std::invalid_argument("FitSpec: multistart must be >= 1");
    if (max_iterations < 1) throw std::invalid_argument("FitSpec: max_iterations must be >= 1");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("FitSpec: tolerance must be >= 0");
}

double objective(const LpplParams& params, const PriceSeries& series) {
    series.validate();
    double sse = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double r = series.log_prices[i] - lppl_eval(params, series.times[i]);
        sse += r * r;
    }
    return sse;
}

LinearReduction reduce_linear(const PriceSeries& series, double t_c, double alpha,
                              double omega, double phi) {
    series.validate();
    if (series.empty()) throw std::invalid_argument("reduce_linear: empty series");
    if (!(series.times.back() < t_c))
        throw std::domain_error("reduce_linear: all observation times must precede t_c");
    Eliminator elim(series);
    const Elimination e = elim.eval(t_c, alpha, omega, phi, std::nullopt, false);
    if (!e.ok)
        throw std::runtime_error("reduce_linear: degenerate design (singular normal equations)");
    return {e.A, e.B, e.C, e.sse};
}

FitResult fit(const PriceSeries& series, const FitSpec& spec,
              const std::optional<ScalingEstimate>& init) {
    series.validate();
    spec.validate();
    const std::size_t n = series.size();
    const std::size_t p = spec.parameter_count();
    if (n <= p)
        throw std::invalid_argument("fit: series length must exceed the parameter count");
    const double t_max = series.times.back();
    if (!(spec.t_c.hi > t_max))
        throw InfeasibleBoxError("fit: critical-time box ends inside the data window");

    const bool second = spec.harmonic_order == HarmonicOrder::second;
    const std::size_t dim = second ? 5 : 4;
    const std::vector<Interval> box = second
        ? std::vector<Interval>{spec.t_c, spec.alpha, spec.omega, spec.phi, spec.psi}
        : std::vector<Interval>{spec.t_c, spec.alpha, spec.omega, spec.phi};
    const double psi_mid = 0.5 * (spec.psi.lo + spec.psi.hi);

    Eliminator elim(series);
    auto objective_nl = [&](const std::vector<double>& x) {
        const std::optional<double> psi = second ? std::optional<double>(x[4]) : std::nullopt;
        return elim.eval(x[0], x[1], x[2], x[3], psi, spec.negative_B).sse;
    };

    std::vector<std::vector<double>> starts;

    // Stage 1: with an (e)/(ee) initialization, freeze (t_c, omega) and scan a
    // coarse (alpha, phi) grid through the linear reduction.
    if (init) {
        const double tc0 = spec.t_c.clamp(init->t_c);
        const double om0 = spec.omega.clamp(init->omega);
        double best_sse = kInf;
        double best_alpha = 0.0, best_phi = 0.0;
        for (std::size_t ia = 0; ia < kStage1Grid; ++ia) {
            const double a = spec.alpha.lo + (static_cast<double>(ia) + 0.5) / kStage1Grid *
                                                 spec.alpha.width();
            for (std::size_t ip = 0; ip < kStage1Grid; ++ip) {
                const double ph = spec.phi.lo + (static_cast<double>(ip) + 0.5) / kStage1Grid *
                                                    spec.phi.width();
                const std::optional<double> psi =
                    second ? std::optional<double>(psi_mid) : std::nullopt;
                const Elimination e = elim.eval(tc0, a, om0, ph, psi, spec.negative_B);
                if (e.ok && e.sse < best_sse) {
                    best_sse = e.sse;
                    best_alpha = a;
                    best_phi = ph;
                }
            }
        }
        if (best_sse < kInf) {
            std::vector<double> s{tc0, best_alpha, om0, best_phi};
            if (second) s.push_back(psi_mid);
            starts.push_back(std::move(s));
        }
    }

    // A second-harmonic run also starts from the first-order optimum, which
    // guarantees the nested-model inequality on the same data and box.
    if (second) {
        FitSpec first_spec = spec;
        first_spec.harmonic_order = HarmonicOrder::first;
        const FitResult base = fit(series, first_spec, init);
        starts.push_back({base.params.t_c, spec.alpha.clamp(base.params.alpha),
                          spec.omega.clamp(base.params.omega), spec.phi.clamp(base.params.phi),
                          psi_mid});
    }

    Rng rng(spec.seed);
    for (std::size_t s = 0; s < spec.multistart; ++s) {
        std::vector<double> x(dim);
        for (std::size_t j = 0; j < dim; ++j) x[j] = rng.uniform(box[j].lo, box[j].hi);
        starts.push_back(std::move(x));
    }

    NmOutcome best;
    std::size_t tried = 0;
    for (const auto& start : starts) {
        ++tried;
        NmOutcome run = nelder_mead(objective_nl, start, box, spec.max_iterations, spec.tolerance);
        if (run.f < best.f) best = run;
    }
    if (!(best.f < kInf))
        throw InfeasibleBoxError("fit: no feasible start (every candidate left t >= t_c)");

    const std::optional<double> best_psi =
        second ? std::optional<double>(best.x[4]) : std::nullopt;
    const Elimination e = elim.eval(best.x[0], best.x[1], best.x[2], best.x[3], best_psi,
                                    spec.negative_B);

    FitResult result;
    result.params.A = e.A;
    result.params.B = e.B;
    result.params.C = e.C;
    result.params.t_c = best.x[0];
    result.params.alpha = best.x[1];
    result.params.omega = best.x[2];
    result.params.phi = wrap_phase(best.x[3], spec.phi);
    if (second) {
        result.params.D = e.D;
        result.params.psi = wrap_phase(*best_psi, spec.psi);
    }
    result.residuals.resize(n);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        result.residuals[i] = series.log_prices[i] - lppl_eval(result.params, series.times[i]);
        sse += result.residuals[i] * result.residuals[i];
    }
    result.sse = sse;
    result.df = n - p;
    result.mse = sse / static_cast<double>(result.df);
    double mean = 0.0;
    for (double y : series.log_prices) mean += y;
    mean /= static_cast<double>(n);
    double tss = 0.0;
    for (double y : series.log_prices) tss += (y - mean) * (y - mean);
    result.r_squared = tss == 0.0 ? (sse == 0.0 ? 1.0 : 0.0) : 1.0 - sse / tss;
    result.converged = best.converged;
    result.starts_tried = tried;
    return result;
}

Goodness goodness(const PriceSeries& series, const LpplParams& params) {
    series.validate();
    const std::size_t n = series.size();
    const std::size_t p = params.parameter_count();
    if (n <= p) throw std::invalid_argument("goodness: df would be <= 0");
    const double sse = objective(params, series);
    double mean = 0.0;
    for (double y : series.log_prices) mean += y;
    mean /= static_cast<double>(n);
    double tss = 0.0;
    for (double y : series.log_prices) tss += (y - mean) * (y - mean);
    Goodness g;
    g.df = n - p;
    g.mse = sse / static_cast<double>(g.df);
    g.r_squared = tss == 0.0 ? (sse == 0.0 ? 1.0 : 0.0) : 1.0 - sse / tss;
    return g;
}

std::vector<double> asymptotic_standard_errors(const PriceSeries& series,
                                               const LpplParams& params) {
    series.validate();
    const std::size_t n = series.size();
    const std::size_t p = params.parameter_count();
    if (n <= p) throw std::invalid_argument("asymptotic_standard_errors: df would be <= 0");

    auto with = [&](std::size_t j, double delta) {
        LpplParams q = params;
        switch (j) {
            case 0: q.A += delta; break;
            case 1: q.B += delta; break;
            case 2: q.C += delta; break;
            case 3: q.alpha += delta; break;
            case 4: q.t_c += delta; break;
            case 5: q.phi += delta; break;
            case 6: q.omega += delta; break;
            case 7: q.D = *q.D + delta; break;
            default: q.psi = *q.psi + delta; break;
        }
        return q;
    };

    std::vector<double> jac(n * p);
    std::vector<double> theta{params.A, params.B, params.C, params.alpha,
                              params.t_c, params.phi, params.omega};
    if (params.second_order()) {
        theta.push_back(*params.D);
        theta.push_back(*params.psi);
    }
    for (std::size_t j = 0; j < p; ++j) {
        const double step = 1e-5 * std::max(1.0, std::abs(theta[j]));
        const LpplParams hi = with(j, step), lo = with(j, -step);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = series.times[i];
            jac[i * p + j] = (lppl_eval(hi, t) - lppl_eval(lo, t)) / (2.0 * step);
        }
    }

    std::vector<double> jtj(p * p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 0; r < p; ++r)
            for (std::size_t c = r; c < p; ++c) jtj[r * p + c] += jac[i * p + r] * jac[i * p + c];
    for (std::size_t r = 1; r < p; ++r)
        for (std::size_t c = 0; c < r; ++c) jtj[r * p + c] = jtj[c * p + r];

    const double mse = goodness(series, params).mse;
    std::vector<double> se(p);
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> M = jtj;
        std::vector<double> b(p, 0.0);
        b[j] = 1.0;
        if (!solve_dense(M, b, p))
            throw std::runtime_error("asymptotic_standard_errors: singular J^T J");
        se[j] = std::sqrt(std::max(0.0, mse * b[j]));
    }
    return se;
}

}  // namespace crashlens
