#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lipevo/grid.hpp"

namespace lipevo {

/// Bounded time coefficient a(t): constant, piecewise constant, or closed form.
/// Piecewise breakpoints are strictly increasing; value[i] applies on
/// [breakpoints[i], breakpoints[i+1]), the last value extends to +inf and the
/// first value extends to -inf.
struct TimeCoefficient {
    enum class Kind { constant, piecewise_constant, closed_form };
    Kind kind = Kind::constant;
    double constant_value = 1.0;
    std::vector<double> breakpoints;
    std::vector<double> piece_values;
    std::function<double(double)> formula;
    std::string formula_tag;

    static TimeCoefficient constant(double c) {
        TimeCoefficient a;
        a.kind = Kind::constant;
        a.constant_value = c;
        return a;
    }
    static TimeCoefficient piecewise(std::vector<double> bps, std::vector<double> vals) {
        if (bps.size() != vals.size() || bps.empty())
            throw std::invalid_argument("TimeCoefficient: breakpoints and values must match, nonempty");
        for (std::size_t i = 1; i < bps.size(); ++i)
            if (!(bps[i] > bps[i - 1]))
                throw std::invalid_argument("TimeCoefficient: breakpoints must be strictly increasing");
        TimeCoefficient a;
        a.kind = Kind::piecewise_constant;
        a.breakpoints = std::move(bps);
        a.piece_values = std::move(vals);
        return a;
    }
    static TimeCoefficient closed_form(std::function<double(double)> f, std::string tag) {
        TimeCoefficient a;
        a.kind = Kind::closed_form;
        a.formula = std::move(f);
        a.formula_tag = std::move(tag);
        return a;
    }

    double eval(double t) const {
        switch (kind) {
            case Kind::constant:
                return constant_value;
            case Kind::piecewise_constant: {
                std::size_t i = 0;
                while (i + 1 < breakpoints.size() && t >= breakpoints[i + 1]) ++i;
                return piece_values[i];
            }
            case Kind::closed_form:
                return formula(t);
        }
        return constant_value;
    }

    /// Lower bound over [0, horizon]; exact for constant/piecewise, sampled otherwise.
    double inf_on(double horizon = 100.0) const {
        if (kind == Kind::constant) return constant_value;
        if (kind == Kind::piecewise_constant) {
            double m = piece_values[0];
            for (double v : piece_values) m = std::min(m, v);
            return m;
        }
        double m = formula(0.0);
        for (int i = 1; i <= 4096; ++i) m = std::min(m, formula(horizon * i / 4096.0));
        return m;
    }
    double sup_on(double horizon = 100.0) const {
        if (kind == Kind::constant) return constant_value;
        if (kind == Kind::piecewise_constant) {
            double m = piece_values[0];
            for (double v : piece_values) m = std::max(m, v);
            return m;
        }
        double m = formula(0.0);
        for (int i = 1; i <= 4096; ++i) m = std::max(m, formula(horizon * i / 4096.0));
        return m;
    }
};

/// A time-measurable symbol psi(t, xi) with its class parameters.
///
/// evaluate takes (t, xi) with xi a d-vector (second component ignored when
/// d = 1). time_breakpoints lists discontinuities in t; between consecutive
/// entries the symbol is constant in t (piecewise family) or smooth
/// (closed-form family).
struct SymbolSpec {
    enum class Family { fractional, elliptic_matrix, custom };
    Family family = Family::custom;
    int d = 1;
    double gamma = 2.0;
    double kappa = 1.0;
    double M = 1.0;
    bool piecewise_in_time = true;
    std::vector<double> time_breakpoints;
    std::function<cplx(double, std::array<double, 2>)> evaluate;
    cplx psi_at_zero{0.0, 0.0};  // psi(t, 0), declared; built-ins set 0

    cplx operator()(double t, double xi) const { return evaluate(t, {xi, 0.0}); }
    cplx operator()(double t, double xi1, double xi2) const { return evaluate(t, {xi1, xi2}); }

    /// Exact-in-pieces time integral \int_s^t psi(r, xi) dr.
    /// Piecewise-constant symbols are summed segment by segment; closed-form
    /// time dependence uses composite Simpson with >= 64 panels.
    cplx time_integral(double s, double t, std::array<double, 2> xi) const {
        if (t < s) throw std::invalid_argument("SymbolSpec::time_integral: t < s");
        if (t == s) return {0.0, 0.0};
        std::vector<double> cuts;
        cuts.push_back(s);
        for (double b : time_breakpoints)
            if (b > s && b < t) cuts.push_back(b);
        cuts.push_back(t);
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            double a = cuts[i], b = cuts[i + 1];
            if (piecewise_in_time) {
                acc += (b - a) * evaluate(0.5 * (a + b), xi);
            } else {
                const int panels = 64;
                cplx simp = evaluate(a, xi) + evaluate(b, xi);
                for (int k = 1; k < panels; ++k)
                    simp += (k % 2 ? 4.0 : 2.0) * evaluate(a + (b - a) * k / panels, xi);
                acc += (b - a) / (3.0 * panels) * simp;
            }
        }
        return acc;
    }
};

inline double frac_derivative_factor(double gamma, int order) {
    // Bounds |d^k/dr^k r^gamma| <= c_k r^{gamma-k}; coarse but valid for the
    // multi-index range used here (|alpha| <= 2).
    if (order == 0) return 1.0;
    if (order == 1) return gamma;
    return gamma * (std::abs(gamma - 1.0) + 1.0);
}

/// psi(t, xi) = -a(t) |xi|^gamma.
inline SymbolSpec make_fractional(double gamma, TimeCoefficient a, int d = 1) {
    if (!(gamma > 0.0)) throw std::invalid_argument("make_fractional: gamma must be positive");
    double lo = a.inf_on(), hi = a.sup_on();
    if (!(lo > 0.0)) throw std::invalid_argument("make_fractional: coefficient must be positive");
    SymbolSpec psi;
    psi.family = SymbolSpec::Family::fractional;
    psi.d = d;
    psi.gamma = gamma;
    psi.kappa = lo;
    int d2 = d / 2 + 1;
    double c = 1.0;
    for (int k = 0; k <= d2; ++k) c = std::max(c, frac_derivative_factor(gamma, k));
    psi.M = hi * c;
    psi.piecewise_in_time = a.kind != TimeCoefficient::Kind::closed_form;
    psi.time_breakpoints = a.breakpoints;
    psi.evaluate = [a = std::move(a), gamma](double t, std::array<double, 2> xi) {
        double r = std::hypot(xi[0], xi[1]);
        return cplx{-a.eval(t) * std::pow(r, gamma), 0.0};
    };
    return psi;
}

/// psi(t, xi) = -sum a^{ij}(t) xi^i xi^j, gamma = 2. Entries are validated for
/// uniform ellipticity at sampled t (and all breakpoints).
inline SymbolSpec make_elliptic_matrix(int d, std::vector<TimeCoefficient> entries,
                                       double t_horizon = 10.0) {
    if (d == 1 && entries.size() != 1)
        throw std::invalid_argument("make_elliptic_matrix: d=1 needs 1 entry");
    if (d == 2 && entries.size() != 3)
        throw std::invalid_argument("make_elliptic_matrix: d=2 needs entries a11, a12, a22");
    std::vector<double> sample_ts;
    for (int i = 0; i <= 256; ++i) sample_ts.push_back(t_horizon * i / 256.0);
    for (const auto& e : entries)
        for (double b : e.breakpoints) {
            sample_ts.push_back(b + 1e-9);
            if (b > 0) sample_ts.push_back(b - 1e-9);
        }
    double kappa = std::numeric_limits<double>::infinity(), lam_max = 0.0;
    for (double t : sample_ts) {
        double lmin, lmax;
        if (d == 1) {
            lmin = lmax = entries[0].eval(t);
        } else {
            double a = entries[0].eval(t), b = entries[1].eval(t), c = entries[2].eval(t);
            double tr = a + c, disc = std::sqrt((a - c) * (a - c) + 4 * b * b);
            lmin = 0.5 * (tr - disc);
            lmax = 0.5 * (tr + disc);
        }
        if (!(lmin > 0.0)) {
            std::ostringstream os;
            os << "make_elliptic_matrix: ellipticity fails at t = " << t
               << " (min eigenvalue " << lmin << ")";
            throw std::invalid_argument(os.str());
        }
        kappa = std::min(kappa, lmin);
        lam_max = std::max(lam_max, lmax);
    }
    SymbolSpec psi;
    psi.family = SymbolSpec::Family::elliptic_matrix;
    psi.d = d;
    psi.gamma = 2.0;
    psi.kappa = kappa;
    psi.M = 2.0 * lam_max;
    bool pw = true;
    for (const auto& e : entries) pw = pw && e.kind != TimeCoefficient::Kind::closed_form;
    psi.piecewise_in_time = pw;
    for (const auto& e : entries)
        psi.time_breakpoints.insert(psi.time_breakpoints.end(), e.breakpoints.begin(),
                                    e.breakpoints.end());
    std::sort(psi.time_breakpoints.begin(), psi.time_breakpoints.end());
    psi.evaluate = [entries = std::move(entries), d](double t, std::array<double, 2> xi) {
        if (d == 1) return cplx{-entries[0].eval(t) * xi[0] * xi[0], 0.0};
        double q = entries[0].eval(t) * xi[0] * xi[0] + 2.0 * entries[1].eval(t) * xi[0] * xi[1] +
                   entries[2].eval(t) * xi[1] * xi[1];
        return cplx{-q, 0.0};
    };
    return psi;
}

struct SymbolSamplingPlan {
    double t_max = 2.0;
    int n_t = 16;
    int j_min = -4;
    int j_max = 12;
    int samples_per_shell = 16;
    double fd_step_rel = 1e-4;  // central-difference step, proportional to |xi|
    double tol = 1e-6;
};

struct SymbolClassReport {
    bool pass = false;
    double ellipticity_min_ratio = 0.0;  // min Re[-psi] / (kappa |xi|^gamma)
    double derivative_max_ratio = 0.0;   // max |D^a psi| / (M |xi|^{gamma-|a|})
    double fitted_M = 0.0;               // minimal admissible M over the samples
    double argmin_t = 0.0, argmin_xi = 0.0;
    double argmax_t = 0.0, argmax_xi = 0.0;
};

/// Samples the class conditions over dyadic shells: ellipticity ratio must be
/// >= 1 - tol and finite-difference derivative ratios <= 1 + tol for
/// |alpha| <= floor(d/2)+1.
inline SymbolClassReport check_symbol_class(const SymbolSpec& psi,
                                            const SymbolSamplingPlan& plan = {}) {
    SymbolClassReport rep;
    rep.ellipticity_min_ratio = std::numeric_limits<double>::infinity();
    const int d2 = psi.d / 2 + 1;
    for (int it = 0; it <= plan.n_t; ++it) {
        double t = plan.t_max * it / plan.n_t;
        for (int j = plan.j_min; j <= plan.j_max; ++j) {
            double r = std::pow(2.0, j);
            for (int k = 0; k < plan.samples_per_shell; ++k) {
                // shell radius sweep in [2^j, 2^{j+1}); directions for d=2
                double rr = r * std::pow(2.0, double(k) / plan.samples_per_shell);
                std::array<double, 2> xi{rr, 0.0};
                if (psi.d == 2) {
                    double th = 2.0 * std::numbers::pi * k / plan.samples_per_shell;
                    xi = {rr * std::cos(th), rr * std::sin(th)};
                }
                double e_ratio = -psi.evaluate(t, xi).real() / (psi.kappa * std::pow(rr, psi.gamma));
                if (e_ratio < rep.ellipticity_min_ratio) {
                    rep.ellipticity_min_ratio = e_ratio;
                    rep.argmin_t = t;
                    rep.argmin_xi = rr;
                }
                double h = plan.fd_step_rel * rr;
                auto deriv_abs = [&](int ax, int ay) {
                    auto at = [&](double dx, double dy) {
                        return psi.evaluate(t, {xi[0] + dx, xi[1] + dy});
                    };
                    int order = ax + ay;
                    if (order == 0) return std::abs(at(0, 0));
                    if (order == 1) {
                        cplx v = ax ? (at(h, 0) - at(-h, 0)) : (at(0, h) - at(0, -h));
                        return std::abs(v) / (2.0 * h);
                    }
                    // order 2
                    if (ax == 2) return std::abs(at(h, 0) - 2.0 * at(0, 0) + at(-h, 0)) / (h * h);
                    if (ay == 2) return std::abs(at(0, h) - 2.0 * at(0, 0) + at(0, -h)) / (h * h);
                    return std::abs(at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
                };
                for (int ax = 0; ax <= d2; ++ax)
                    for (int ay = 0; ay <= (psi.d == 2 ? d2 - ax : 0); ++ay) {
                        int order = ax + ay;
                        if (order > d2) continue;
                        if (psi.d == 1 && ay > 0) continue;
                        double bound = psi.M * std::pow(rr, psi.gamma - order);
                        double ratio = deriv_abs(ax, ay) / bound;
                        if (ratio > rep.derivative_max_ratio) {
                            rep.derivative_max_ratio = ratio;
                            rep.argmax_t = t;
                            rep.argmax_xi = rr;
                        }
                    }
            }
        }
    }
    rep.fitted_M = rep.derivative_max_ratio * psi.M;
    rep.pass = rep.ellipticity_min_ratio >= 1.0 - plan.tol &&
               rep.derivative_max_ratio <= 1.0 + plan.tol;
    return rep;
}

}  // namespace lipevo
