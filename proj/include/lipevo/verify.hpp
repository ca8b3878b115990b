#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "lipevo/function_spaces.hpp"
#include "lipevo/kernels.hpp"
#include "lipevo/solver.hpp"
#include "lipevo/weights.hpp"

namespace lipevo {

/// One verified inequality: fitted N = sup of measured/bound ratios over a
/// sweep. The stability flag is filled by whoever reruns the sweep under
/// refinement (N may change by at most x1.5).
struct EstimateReport {
    std::string estimate;
    double fitted_N = 0.0;
    std::string argmax;
    bool inconsistent = false;  // right side zero with nonzero left side
    bool stable = true;
    double slope = 0.0;       // optional log-log slope, estimate-specific
    double secondary_N = 0.0; // optional second fitted constant
    struct Row {
        std::string param;
        double measured = 0.0, bound = 0.0, ratio = 0.0;
    };
    std::vector<Row> rows;

    void note(const std::string& param, double measured, double bound) {
        double ratio = (bound > 0.0) ? measured / bound : 0.0;
        if (bound <= 0.0 && measured > 1e-12) inconsistent = true;
        rows.push_back({param, measured, bound, ratio});
        if (ratio > fitted_N) {
            fitted_N = ratio;
            argmax = param;
        }
    }
};

/// Weighted time norm || v ||_{L_p((0,T), w dt)} from nodal values; each
/// panel integrates w exactly, so power-weight singularities at t = 0 are
/// handled by the first panel carrying the t = dt value.
inline double time_lp_norm(const std::vector<double>& v, const TimeGrid& tg, const WeightSpec& w,
                           double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v) m = std::max(m, x);
        return m;
    }
    double acc = 0.0;
    for (int k = 1; k <= tg.n_t; ++k)
        acc += std::pow(v[k], p) * w.integral(tg.node(k - 1), tg.node(k));
    return std::pow(acc, 1.0 / p);
}

/// Slicewise Lambda^phi sup-shell norms of a space-time function.
inline std::vector<double> slice_lambda_norms(const DyadicFrame& frame, const SpaceTimeFunction& u,
                                              const PhiFunction& phi,
                                              double p = std::numeric_limits<double>::infinity()) {
    std::vector<double> out;
    out.reserve(u.slices.size());
    for (const auto& s : u.slices) out.push_back(lipschitz_norm_dyadic(frame, s, phi, p));
    return out;
}

/// Pointwise maximal bound: || Gf(t) ||_{Lambda^{phi_gamma}} against
/// M(|| f ||_{Lambda^phi} 1_{(0,T)})(t).
inline EstimateReport check_maximal_bound(const KernelFamily& family, const DyadicFrame& frame,
                                          const PhiFunction& phi, const SpaceTimeFunction& f) {
    const TimeGrid& tg = f.time_grid;
    GridFunction zero(family.grid);
    SpaceTimeFunction u = mild_solve(family, tg, zero, f);
    auto [phi_g, phi_gpw] = derived_phi(phi, family.symbol.gamma,
                                        std::numeric_limits<double>::infinity(), WeightSpec::constant(1.0));
    auto lhs = slice_lambda_norms(frame, u, phi_g);
    auto fnorm = slice_lambda_norms(frame, f, phi);
    std::vector<double> cells(fnorm.begin(), fnorm.end() - 1);
    auto rhs = maximal_function(cells, tg.dt());
    EstimateReport rep;
    rep.estimate = "maximal_bound";
    for (int k = 1; k < tg.n_t; ++k)
        rep.note("t=" + std::to_string(tg.node(k)), lhs[k], rhs[k]);
    return rep;
}

/// A priori estimate: solution norm in L_p(w dt; Lambda^{phi_gamma}) against
/// the data norms. Rejects weights that fail the A_p sweep.
inline EstimateReport check_apriori(const KernelFamily& family, const DyadicFrame& frame,
                                    const PhiFunction& phi, double p, const WeightSpec& w,
                                    const std::vector<std::pair<GridFunction, SpaceTimeFunction>>& corpus) {
    if (!std::isinf(p)) {
        auto ap = ap_constant(w, p);
        if (ap.divergent || !std::isfinite(ap.value))
            throw std::invalid_argument("check_apriori: weight fails the A_p sweep");
    }
    auto [phi_g, phi_gpw] = derived_phi(phi, family.symbol.gamma, p, w);
    EstimateReport rep;
    rep.estimate = "apriori";
    int idx = 0;
    for (const auto& [u0, f] : corpus) {
        const TimeGrid& tg = f.time_grid;
        SpaceTimeFunction u = mild_solve(family, tg, u0, f);
        double lhs = time_lp_norm(slice_lambda_norms(frame, u, phi_g), tg, w, p);
        double data = lipschitz_norm_dyadic(frame, u0, phi_gpw, p) +
                      time_lp_norm(slice_lambda_norms(frame, f, phi), tg, w, p);
        rep.note("pair=" + std::to_string(idx++), lhs, data);
    }
    return rep;
}

/// Weighted weak-L1 estimate for Gf against || f ||_{L_1(w dt; Lambda^phi)}.
inline EstimateReport check_weak_l1(const KernelFamily& family, const DyadicFrame& frame,
                                    const PhiFunction& phi, const WeightSpec& w,
                                    const SpaceTimeFunction& f) {
    const TimeGrid& tg = f.time_grid;
    GridFunction zero(family.grid);
    SpaceTimeFunction u = mild_solve(family, tg, zero, f);
    auto [phi_g, ignore] = derived_phi(phi, family.symbol.gamma,
                                       std::numeric_limits<double>::infinity(), w);
    auto v = slice_lambda_norms(frame, u, phi_g);
    // weighted weak-L1 quasinorm over node-value level sets, panels [t_k, t_{k+1})
    double weak = 0.0;
    for (int k = 0; k <= tg.n_t; ++k) {
        double lambda = v[k];
        if (lambda <= 0.0) continue;
        double measure = 0.0;
        for (int j = 0; j < tg.n_t; ++j)
            if (v[j] >= lambda) measure += w.integral(tg.node(j), tg.node(j + 1));
        weak = std::max(weak, lambda * measure);
    }
    double rhs = time_lp_norm(slice_lambda_norms(frame, f, phi), tg, w, 1.0);
    EstimateReport rep;
    rep.estimate = "weak_l1";
    rep.note("whole_run", weak, rhs);
    return rep;
}

/// Trace embedding: sup_t of the shell-ell^p norm with weight phi_{gamma,p,w}
/// against the solution-space norm; also verifies the inner ell^inf <= ell^p
/// inequality nodewise with constant exactly 1.
inline EstimateReport check_trace_embedding(const DyadicFrame& frame, const SpaceTimeFunction& u,
                                            const GridFunction& u0, const SpaceTimeFunction& f,
                                            const PhiFunction& phi, double gamma, double p,
                                            const WeightSpec& w) {
    auto [phi_g, phi_gpw] = derived_phi(phi, gamma, p, w);
    const TimeGrid& tg = u.time_grid;
    EstimateReport rep;
    rep.estimate = "trace_embedding";
    double lhs = 0.0;
    double inner_worst = 0.0;
    for (int k = 0; k <= tg.n_t; ++k) {
        double nlp = lipschitz_norm_dyadic(frame, u.slices[k], phi_gpw, p);
        double ninf = lipschitz_norm_dyadic(
            frame, u.slices[k], phi_gpw, std::numeric_limits<double>::infinity());
        lhs = std::max(lhs, nlp);
        if (nlp > 0.0) inner_worst = std::max(inner_worst, ninf / nlp);
    }
    double rhs = time_lp_norm(slice_lambda_norms(frame, u, phi_g), tg, w, p) +
                 lipschitz_norm_dyadic(frame, u0, phi_gpw, p) +
                 time_lp_norm(slice_lambda_norms(frame, f, phi), tg, w, p);
    rep.note("sup_t", lhs, rhs);
    rep.secondary_N = inner_worst;  // must be <= 1 (+ rounding)
    return rep;
}

/// Continuity of solutions: the mixed space-time difference quotient against
/// W-tilde(s+h1,s)^{1-1/p} + phi_{gamma,p,w}(|h2|^{-1})^{-1}, plus the
/// time-only modulus against the equation data.
inline EstimateReport check_continuity(const SymbolSpec& psi, const DyadicFrame& frame,
                                       const SpaceTimeFunction& u, const GridFunction& u0,
                                       const SpaceTimeFunction& f, const PhiFunction& phi,
                                       double gamma, double p, const WeightSpec& w, int L0) {
    const TimeGrid& tg = u.time_grid;
    auto [phi_g, phi_gpw] = derived_phi(phi, gamma, p, w);
    const SpectralGrid& g = frame.grid;
    const int n = g.n_per_axis;
    EstimateReport rep;
    rep.estimate = "continuity";

    double hnorm = time_lp_norm(slice_lambda_norms(frame, u, phi_g), tg, w, p) +
                   lipschitz_norm_dyadic(frame, u0, phi_gpw, p) +
                   time_lp_norm(slice_lambda_norms(frame, f, phi), tg, w, p);

    std::vector<int> m2s{0, 1, 2, 4, 8, 16, n / 8};
    std::vector<long> binom(L0 + 1, 1);
    for (int i = 1; i <= L0; ++i)
        for (int j = i; j > 0; --j) binom[j] += binom[j - 1];
    for (int s_idx = 0; s_idx <= tg.n_t; s_idx += std::max(1, tg.n_t / 8)) {
        for (int m1 = 1; s_idx + L0 * m1 <= tg.n_t; m1 *= 2) {
            double h1 = L0 * m1 * tg.dt();
            double wt = w_tilde(w, p, tg.node(s_idx), tg.node(s_idx) + h1);
            for (int m2 : m2s) {
                double h2 = m2 * g.dx;
                double denom = wt + (m2 > 0 ? 1.0 / phi_gpw(1.0 / h2) : 0.0);
                if (!(denom > 0.0)) continue;
                // sup_x | D^{L0}_{(h1/L0, h2)} u(s, x) |
                double sup = 0.0;
                for (std::size_t x = 0; x < g.size(); ++x) {
                    cplx d{0.0, 0.0};
                    for (int i = 0; i <= L0; ++i) {
                        double sign = ((L0 - i) % 2) ? -1.0 : 1.0;
                        std::size_t xi;
                        if (g.d == 1) {
                            xi = (x + std::size_t(i) * m2) % n;
                        } else {
                            std::size_t r = x / n, c = x % n;
                            xi = ((r + std::size_t(i) * m2) % n) * n + (c + std::size_t(i) * m2) % n;
                        }
                        d += sign * double(binom[i]) * u.slices[s_idx + i * m1].values[xi];
                    }
                    sup = std::max(sup, std::abs(d));
                }
                rep.note("s=" + std::to_string(tg.node(s_idx)) + ",h1=" + std::to_string(h1) +
                             ",h2=" + std::to_string(h2),
                         sup, denom * hnorm);
            }
        }
    }

    // time-only ingredient: ||u(t)-u(s)||_{Lambda^phi} <= W-tilde^{1-1/p} ||psi u + f||
    std::vector<double> data_norm(tg.n_t + 1);
    for (int k = 0; k <= tg.n_t; ++k) {
        GridFunction du = apply_operator(psi, frame, tg.node(k), u.slices[k]) + f.slices[k];
        data_norm[k] = lipschitz_norm_dyadic(frame, du, phi,
                                             std::numeric_limits<double>::infinity());
    }
    double rhs_data = time_lp_norm(data_norm, tg, w, p);
    double second = 0.0;
    std::vector<double> log_h, log_mod;
    for (int m1 = 1; m1 <= tg.n_t / 4; m1 *= 2) {  // small lags only: the modulus saturates near T
        double h1 = m1 * tg.dt();
        double mod = 0.0;
        for (int k = 0; k + m1 <= tg.n_t; k += std::max(1, tg.n_t / 16))
            mod = std::max(mod, lipschitz_norm_dyadic(frame, u.slices[k + m1] - u.slices[k], phi,
                                                      std::numeric_limits<double>::infinity()));
        double wt = w_tilde(w, p, 0.0, h1);
        if (wt > 0.0 && rhs_data > 0.0) second = std::max(second, mod / (wt * rhs_data));
        if (mod > 0.0) {
            log_h.push_back(std::log(h1));
            log_mod.push_back(std::log(mod));
        }
    }
    rep.secondary_N = second;
    // slope of the time modulus in log h1 (compare against 1 - 1/p for w = 1)
    if (log_h.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < log_h.size(); ++i) {
            sx += log_h[i];
            sy += log_mod[i];
            sxx += log_h[i] * log_h[i];
            sxy += log_h[i] * log_mod[i];
        }
        double nn = double(log_h.size());
        rep.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    }
    return rep;
}

/// A nonnegative scalar sequence on a finite index window [n_min, n_min+len).
struct SequenceSpaceElement {
    int n_min = 0;
    std::vector<double> entries;

    int n_max() const { return n_min + static_cast<int>(entries.size()) - 1; }
};

enum class KMode { closed_form, brute_force };

/// K-functional between ell^{phi_gamma}_inf and ell^phi_inf.
/// closed_form: sup_n min(phi(2^n) 2^{n gamma}, t phi(2^n)) a_n.
/// brute_force: exact infimum over splittings a = b + c, via the 1-D convex
/// reduction F(A) = A + t max_n phi(2^n) max(0, a_n - A / phi_gamma(2^n))
/// minimized over its piecewise-linear breakpoints.
inline double k_functional(const SequenceSpaceElement& a, double t, const PhiFunction& phi,
                           double gamma, KMode mode) {
    if (!(t > 0.0)) throw std::invalid_argument("k_functional: t must be positive");
    std::size_t n = a.entries.size();
    auto phi_at = [&](int idx) { return phi(std::pow(2.0, a.n_min + idx)); };
    auto phig_at = [&](int idx) {
        return phi_at(idx) * std::pow(2.0, gamma * (a.n_min + idx));
    };
    if (mode == KMode::closed_form) {
        double sup = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            sup = std::max(sup, std::min(phig_at(i), t * phi_at(i)) * a.entries[i]);
        return sup;
    }
    if (n > 16) throw std::invalid_argument("k_functional: brute_force window limited to 16");
    // candidates: zeros of each linear piece and pairwise intersections
    std::vector<double> cand{0.0};
    for (std::size_t i = 0; i < n; ++i) cand.push_back(phig_at(i) * a.entries[i]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double si = -t * phi_at(i) / phig_at(i), sj = -t * phi_at(j) / phig_at(j);
            if (si == sj) continue;
            double bi = t * phi_at(i) * a.entries[i], bj = t * phi_at(j) * a.entries[j];
            double A = (bj - bi) / (si - sj);
            if (A > 0.0) cand.push_back(A);
        }
    double best = std::numeric_limits<double>::infinity();
    for (double A : cand) {
        double second = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            second = std::max(second, t * phi_at(i) * std::max(0.0, a.entries[i] - A / phig_at(i)));
        best = std::min(best, A + second);
    }
    return best;
}

struct InterpolationResult {
    double c_lower = 0.0, c_upper = 0.0;  // fitted two-sided constants
    std::vector<double> ratios;           // interp norm / ell norm per corpus entry
};

/// Sequence-space interpolation identity: the W^{1/p},p interpolation norm
/// (dyadic t-blocks, closed-form K) against the ell_p^{phi_{gamma,p,w}} norm.
inline InterpolationResult check_interpolation(const PhiFunction& phi, double gamma, double p,
                                               const WeightSpec& w,
                                               const std::vector<SequenceSpaceElement>& corpus) {
    if (!(p > 1.0) || std::isinf(p))
        throw std::invalid_argument("check_interpolation: p must lie in (1, inf)");
    InterpolationResult res;
    res.c_lower = std::numeric_limits<double>::infinity();
    // 4-point Gauss-Legendre on [0, 1]
    const double gx[4] = {0.0694318442029737, 0.3300094782075719, 0.6699905217924281,
                          0.9305681557970263};
    const double gw[4] = {0.1739274225687269, 0.3260725774312731, 0.3260725774312731,
                          0.1739274225687269};
    for (const auto& a : corpus) {
        double ell_p = 0.0;
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            int j = a.n_min + static_cast<int>(i);
            ell_p += w.W(std::pow(2.0, -j * gamma)) * std::pow(phi(std::pow(2.0, j)), p) *
                     std::pow(2.0, j * p * gamma) * std::pow(a.entries[i], p);
        }
        double ell = std::pow(ell_p, 1.0 / p);

        double interp_p = 0.0;
        for (int j = a.n_min - 40; j <= a.n_max() + 40; ++j) {
            double lo = j * gamma * std::numbers::ln2, hi = (j + 1) * gamma * std::numbers::ln2;
            double block = 0.0;
            for (int q = 0; q < 4; ++q) {
                double lt = lo + (hi - lo) * gx[q];
                double t = std::exp(lt);
                double K = k_functional(a, t, phi, gamma, KMode::closed_form);
                block += gw[q] * (hi - lo) * w.W(1.0 / t) * std::pow(K, p);
            }
            interp_p += block;
        }
        double interp = std::pow(interp_p, 1.0 / p);
        double r = (ell > 0.0) ? interp / ell : 0.0;
        res.ratios.push_back(r);
        if (r > 0.0) {
            res.c_lower = std::min(res.c_lower, r);
            res.c_upper = std::max(res.c_upper, r);
        }
    }
    return res;
}

}  // namespace lipevo
