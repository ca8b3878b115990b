#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lipevo {

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Adaptive Simpson with relative tolerance; converged=false when the depth
/// cap is exhausted (typically near a non-integrable singularity).
struct QuadResult {
    double value = 0.0;
    bool converged = true;
};

inline void adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                             double fa, double fm, double fb, double whole, double tol,
                             int depth, QuadResult& out) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0) {
        out.value += left + right;
        out.converged = false;
        return;
    }
    if (std::abs(delta) <= 15.0 * tol * (std::abs(left + right) + 1e-300)) {
        out.value += left + right + delta / 15.0;
        return;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, tol, depth - 1, out);
    adaptive_simpson(f, m, b, fm, frm, fb, right, tol, depth - 1, out);
}

inline QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                            double tol = 1e-10) {
    if (a == b) return {0.0, true};
    auto g = [&f](double x) {
        double v = f(x);
        return std::isfinite(v) ? v : 1e30;
    };
    QuadResult out;
    double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_simpson(g, a, b, fa, fm, fb, whole, tol, 40, out);
    return out;
}

}  // namespace detail

struct WeightIntegral {
    double value = 0.0;
    bool divergent = false;
};

/// A one-dimensional weight w(t) on the time axis.
struct WeightSpec {
    enum class Kind { constant, power, piecewise, custom };
    Kind kind = Kind::constant;
    double constant_value = 1.0;
    double alpha = 0.0;  // w(t) = |t|^alpha, alpha > -1
    std::vector<double> breakpoints;
    std::vector<double> piece_values;
    std::function<double(double)> formula;
    std::string formula_tag;
    double p_class = 0.0;  // claimed p with w in A_p; 0 = unclaimed

    static WeightSpec constant(double c) {
        if (!(c >= 0.0)) throw std::invalid_argument("WeightSpec: weight must be nonnegative");
        WeightSpec w;
        w.kind = Kind::constant;
        w.constant_value = c;
        return w;
    }
    static WeightSpec power(double alpha) {
        if (!(alpha > -1.0))
            throw std::invalid_argument("WeightSpec: power weight needs alpha > -1");
        WeightSpec w;
        w.kind = Kind::power;
        w.alpha = alpha;
        return w;
    }
    static WeightSpec piecewise(std::vector<double> bps, std::vector<double> vals) {
        if (bps.size() != vals.size() || bps.empty())
            throw std::invalid_argument("WeightSpec: breakpoints/values mismatch");
        for (std::size_t i = 1; i < bps.size(); ++i)
            if (!(bps[i] > bps[i - 1]))
                throw std::invalid_argument("WeightSpec: breakpoints must increase");
        for (double v : vals)
            if (!(v >= 0.0)) throw std::invalid_argument("WeightSpec: weight must be nonnegative");
        WeightSpec w;
        w.kind = Kind::piecewise;
        w.breakpoints = std::move(bps);
        w.piece_values = std::move(vals);
        return w;
    }
    static WeightSpec custom(std::function<double(double)> f, std::string tag) {
        WeightSpec w;
        w.kind = Kind::custom;
        w.formula = std::move(f);
        w.formula_tag = std::move(tag);
        return w;
    }

    double eval(double t) const {
        switch (kind) {
            case Kind::constant: return constant_value;
            case Kind::power: return std::pow(std::abs(t), alpha);
            case Kind::piecewise: {
                std::size_t i = 0;
                while (i + 1 < breakpoints.size() && t >= breakpoints[i + 1]) ++i;
                return piece_values[i];
            }
            case Kind::custom: return formula(t);
        }
        return 0.0;
    }

    /// \int_a^b w(t) dt, signed in the usual way (a may exceed b).
    double integral(double a, double b) const {
        if (a > b) return -integral(b, a);
        switch (kind) {
            case Kind::constant:
                return constant_value * (b - a);
            case Kind::power: {
                auto F = [this](double x) {
                    return (x >= 0 ? 1.0 : -1.0) * std::pow(std::abs(x), alpha + 1.0) / (alpha + 1.0);
                };
                return F(b) - F(a);
            }
            case Kind::piecewise: {
                // first value extends to -inf, last to +inf
                double acc = 0.0;
                for (std::size_t i = 0; i < breakpoints.size(); ++i) {
                    double lo = (i == 0) ? -detail::kInf : breakpoints[i];
                    double hi = (i + 1 < breakpoints.size()) ? breakpoints[i + 1] : detail::kInf;
                    double x0 = std::max(a, lo), x1 = std::min(b, hi);
                    if (x1 > x0) acc += piece_values[i] * (x1 - x0);
                }
                return acc;
            }
            case Kind::custom:
                return detail::integrate(formula, a, b).value;
        }
        return 0.0;
    }

    /// Cumulative integral W(t) = \int_0^t w(s) ds.
    double W(double t) const { return integral(0.0, t); }

    /// \int_a^b w(t)^{-1/(p-1)} dt with divergence detection (a <= b).
    WeightIntegral dual_integral(double a, double b, double p) const {
        if (!(p > 1.0)) throw std::invalid_argument("dual_integral: p must exceed 1");
        double q = 1.0 / (p - 1.0);
        switch (kind) {
            case Kind::constant:
                if (constant_value == 0.0) return {detail::kInf, true};
                return {std::pow(constant_value, -q) * (b - a), false};
            case Kind::power: {
                double beta = -alpha * q;
                if (a < 0.0 && b > 0.0) {
                    auto l = dual_integral(a, 0.0, p);
                    auto r = dual_integral(0.0, b, p);
                    return {l.value + r.value, l.divergent || r.divergent};
                }
                if (beta <= -1.0 && (a == 0.0 || b == 0.0) && a != b)
                    return {detail::kInf, true};
                auto F = [beta](double x) {
                    return (x >= 0 ? 1.0 : -1.0) * std::pow(std::abs(x), beta + 1.0) / (beta + 1.0);
                };
                return {F(b) - F(a), false};
            }
            case Kind::piecewise: {
                WeightSpec dual;
                dual.kind = Kind::piecewise;
                dual.breakpoints = breakpoints;
                for (double v : piece_values) {
                    if (v == 0.0) return {detail::kInf, true};
                    dual.piece_values.push_back(std::pow(v, -q));
                }
                return {dual.integral(a, b), false};
            }
            case Kind::custom: {
                auto f = formula;
                auto res = detail::integrate([f, q](double t) { return std::pow(f(t), -q); }, a, b);
                return {res.value, !res.converged};
            }
        }
        return {0.0, false};
    }
};

/// Interval A_p quantity (avg_Q w)(avg_Q w^{-1/(p-1)})^{p-1} on Q = [a, b].
inline WeightIntegral ap_interval_ratio(const WeightSpec& w, double p, double a, double b) {
    double len = b - a;
    double avg_w = w.integral(a, b) / len;
    auto dual = w.dual_integral(a, b, p);
    if (dual.divergent) return {detail::kInf, true};
    return {avg_w * std::pow(dual.value / len, p - 1.0), false};
}

struct ApSweepPlan {
    std::vector<double> centers{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    double r_min = 1e-3, r_max = 1e3;
    int n_radii = 61;
};

struct ApEstimate {
    double value = 0.0;  // +inf when a divergent dual average was met
    bool divergent = false;
    double argmax_center = 0.0, argmax_radius = 0.0;
};

/// Lower bound for [w]_{A_p} from a finite interval sweep. A_p failure shows
/// up as a divergent dual average (reported as +inf with the interval) or as
/// unbounded growth across the sweep.
inline ApEstimate ap_constant(const WeightSpec& w, double p, const ApSweepPlan& plan = {}) {
    if (!(p > 1.0)) throw std::invalid_argument("ap_constant: p must lie in (1, inf)");
    ApEstimate best;
    for (double c : plan.centers) {
        for (int i = 0; i < plan.n_radii; ++i) {
            double r = plan.r_min *
                       std::pow(plan.r_max / plan.r_min, double(i) / (plan.n_radii - 1));
            auto q = ap_interval_ratio(w, p, c - r, c + r);
            if (q.divergent) return {detail::kInf, true, c, r};
            if (q.value > best.value) best = {q.value, false, c, r};
        }
    }
    return best;
}

/// Discrete Hardy-Littlewood maximal function on a uniform time grid.
///
/// Samples are read as cell values on [t_i, t_i + dt); the maximum runs over
/// all radii aligned to half-grid multiples, evaluated from prefix sums, with
/// |g_i| included as the r -> 0 candidate. Mass outside the grid is zero.
inline std::vector<double> maximal_function(const std::vector<double>& g, double dt) {
    if (g.empty()) throw std::invalid_argument("maximal_function: empty grid");
    const std::size_t n = g.size();
    std::vector<double> prefix(n + 1, 0.0);  // integral of |g| over the first i cells
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + std::abs(g[i]) * dt;
    // integral of |g| from cell start to position t0 + u (u in units of half-cells)
    auto integral_to = [&](double half_cells) {
        double x = half_cells * 0.5;  // in cell units
        if (x <= 0.0) return 0.0;
        if (x >= double(n)) return prefix[n];
        std::size_t cell = static_cast<std::size_t>(x);
        double frac = x - double(cell);
        return prefix[cell] + frac * std::abs(g[cell]) * dt;
    };
    std::vector<double> out(n, 0.0);
    const int max_m = 2 * static_cast<int>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::abs(g[i]);
        for (int m = 1; m <= max_m; ++m) {
            double r = m * dt * 0.5;
            double mass = integral_to(2.0 * double(i) + m) - integral_to(2.0 * double(i) - m);
            best = std::max(best, mass / (2.0 * r));
        }
        out[i] = best;
    }
    return out;
}

/// Laplace transform L[w](lambda) = \int_0^inf e^{-lambda t} w(t) dt.
inline double laplace_transform(const WeightSpec& w, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("laplace_transform: lambda must be positive");
    switch (w.kind) {
        case WeightSpec::Kind::constant:
            return w.constant_value / lambda;
        case WeightSpec::Kind::power:
            return std::tgamma(w.alpha + 1.0) / std::pow(lambda, w.alpha + 1.0);
        case WeightSpec::Kind::piecewise: {
            double acc = 0.0;
            for (std::size_t i = 0; i < w.breakpoints.size(); ++i) {
                double lo = (i == 0) ? 0.0 : std::max(0.0, w.breakpoints[i]);
                double hi = (i + 1 < w.breakpoints.size()) ? w.breakpoints[i + 1] : detail::kInf;
                if (hi <= lo) continue;
                double ehi = std::isinf(hi) ? 0.0 : std::exp(-lambda * hi);
                acc += w.piece_values[i] * (std::exp(-lambda * lo) - ehi) / lambda;
            }
            return acc;
        }
        case WeightSpec::Kind::custom: {
            auto f = w.formula;
            double cutoff = 40.0 / lambda;
            auto res = detail::integrate(
                [f, lambda](double t) { return std::exp(-lambda * t) * f(t); }, 0.0, cutoff, 1e-10);
            if (!res.converged)
                throw std::invalid_argument("laplace_transform: integral did not converge");
            return res.value;
        }
    }
    return 0.0;
}

/// The continuity-modulus quantity W-tilde(t,s)^{1-1/p}. For p = inf this is
/// (t - s), the pointwise limit; flagged as a convention in the docs.
inline double w_tilde(const WeightSpec& w, double p, double s, double t) {
    if (t < s) throw std::invalid_argument("w_tilde: t < s");
    if (t == s) return 0.0;
    if (std::isinf(p)) return t - s;
    if (!(p > 1.0)) throw std::invalid_argument("w_tilde: p must lie in (1, inf]");
    auto d = w.dual_integral(s, t, p);
    if (d.divergent) return detail::kInf;
    return std::pow(d.value, 1.0 - 1.0 / p);
}

/// Pointwise A_1 ratio max of (M w) / w over a sampled grid.
inline double a1_ratio(const WeightSpec& w, double t0, double t1, int n) {
    double dt = (t1 - t0) / n;
    std::vector<double> samples(n);
    for (int i = 0; i < n; ++i) samples[i] = w.eval(t0 + (i + 0.5) * dt);
    auto m = maximal_function(samples, dt);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        if (samples[i] > 0.0) worst = std::max(worst, m[i] / samples[i]);
    return worst;
}

}  // namespace lipevo
