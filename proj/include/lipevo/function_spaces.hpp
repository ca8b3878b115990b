#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lipevo/grid.hpp"
#include "lipevo/weights.hpp"

namespace lipevo {

/// Variable-order function phi with its declared upper index L and the
/// difference order L0 (smallest integer >= L).
struct PhiFunction {
    enum class Kind { power, power_log, custom };
    Kind kind = Kind::power;
    double alpha = 0.5;
    double beta = 0.0;
    std::function<double(double)> formula;
    std::string tag;
    double L = 1.0;
    int L0 = 1;

    static PhiFunction power(double alpha) {
        if (!(alpha > 0.0)) throw std::invalid_argument("PhiFunction: alpha must be positive");
        PhiFunction p;
        p.kind = Kind::power;
        p.alpha = alpha;
        p.L = std::floor(alpha) + 1.0;
        p.L0 = static_cast<int>(p.L);
        return p;
    }
    static PhiFunction power_log(double alpha, double beta) {
        PhiFunction p = power(alpha);
        p.kind = Kind::power_log;
        p.beta = beta;
        return p;
    }
    static PhiFunction custom(std::function<double(double)> f, double L, std::string tag) {
        PhiFunction p;
        p.kind = Kind::custom;
        p.formula = std::move(f);
        p.tag = std::move(tag);
        p.L = L;
        p.L0 = static_cast<int>(std::ceil(L));
        return p;
    }

    double operator()(double lam) const {
        switch (kind) {
            case Kind::power:
                return std::pow(lam, alpha);
            case Kind::power_log:
                return std::pow(lam, alpha) *
                       std::pow(1.0 + std::max(0.0, std::log(lam)), beta);
            case Kind::custom:
                return formula(lam);
        }
        return 0.0;
    }

    /// Sampled s_phi(lambda) = sup_t phi(lambda t) / phi(t).
    double s_phi(double lam, int n_t = 200) const {
        double best = 0.0;
        for (int i = 0; i <= n_t; ++i) {
            double t = std::pow(10.0, -6.0 + 12.0 * i / n_t);
            best = std::max(best, (*this)(lam * t) / (*this)(t));
        }
        return best;
    }

    /// Sampled membership check for I_o(0, L): s_phi(lam) lam^{-eps} bounded
    /// as lam -> 0 and s_phi(lam) lam^{-(L-eps)} bounded as lam -> inf.
    bool index_check(double eps = 1e-2, double bound = 1e3) const {
        for (int k = 1; k <= 6; ++k) {
            double lam_small = std::pow(10.0, -k);
            double lam_big = std::pow(10.0, k);
            if (s_phi(lam_small) * std::pow(lam_small, -eps) > bound) return false;
            if (s_phi(lam_big) * std::pow(lam_big, -(L - eps)) > bound) return false;
        }
        return true;
    }
};

/// phi_gamma(lambda) = phi(lambda) lambda^gamma and
/// phi_{gamma,p,w}(lambda) = phi(lambda) lambda^gamma W(lambda^{-gamma})^{1/p}.
/// For p = inf the weight factor is 1.
inline std::pair<PhiFunction, PhiFunction> derived_phi(const PhiFunction& phi, double gamma,
                                                       double p, const WeightSpec& w) {
    if (!(gamma > 0.0)) throw std::invalid_argument("derived_phi: gamma must be positive");
    PhiFunction base = phi;
    PhiFunction phi_g = PhiFunction::custom(
        [base, gamma](double lam) { return base(lam) * std::pow(lam, gamma); }, phi.L + gamma,
        "phi_gamma");
    if (std::isinf(p)) return {phi_g, phi_g};
    if (!(p >= 1.0)) throw std::invalid_argument("derived_phi: p must lie in [1, inf]");
    PhiFunction phi_gpw = PhiFunction::custom(
        [base, gamma, p, w](double lam) {
            return base(lam) * std::pow(lam, gamma) *
                   std::pow(w.W(std::pow(lam, -gamma)), 1.0 / p);
        },
        phi.L + gamma, "phi_gamma_p_w");
    return {phi_g, phi_gpw};
}

/// Littlewood-Paley frame on a grid: radial profile F[Psi] supported in the
/// annulus [1/2, 2], normalized by its own dyadic periodization so that
/// sum_j F[Psi](2^{-j} xi) = 1 for xi != 0, plus F[Phi] = sum_{j<=0} of the
/// dilates. Band multipliers are precomputed per frequency bin.
struct DyadicFrame {
    SpectralGrid grid;
    int j_min = 1;
    int j_max = 0;
    std::vector<double> s0_mult;                 // F[Phi] at each bin
    std::vector<std::vector<double>> band_mult;  // band_mult[j - 1] = F[Psi](2^{-j} xi)

    static constexpr int S0 = 0;

    static double bump(double u) {
        if (std::abs(u) >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - u * u));
    }

    /// F[Psi] profile as a function of |xi|.
    static double psi_profile(double r) {
        if (!(r > 0.0)) return 0.0;
        double u = std::log2(r);
        double num = bump(u);
        if (num == 0.0) return 0.0;
        double den = 0.0;
        long j0 = static_cast<long>(std::floor(u));
        for (long j = j0 - 1; j <= j0 + 2; ++j) den += bump(u - double(j));
        return num / den;
    }

    /// F[Phi] profile: 1 on |xi| <= 1/2, 0 on |xi| >= 2.
    static double phi_profile(double r) {
        if (!(r > 0.0)) return 1.0;
        double acc = 0.0;
        long j0 = static_cast<long>(std::floor(std::log2(r)));
        for (long j = j0 - 1; j <= j0 + 2; ++j)
            if (j <= 0) acc += psi_profile(r * std::pow(2.0, -double(j)));
        return acc;
    }
};

inline DyadicFrame build_frame(const SpectralGrid& grid) {
    DyadicFrame fr;
    fr.grid = grid;
    fr.j_max = static_cast<int>(std::floor(std::log2(grid.nyquist()))) - 1;
    if (fr.j_max < fr.j_min + 2)
        throw std::invalid_argument("build_frame: grid too coarse for a dyadic frame");
    const std::size_t sz = grid.size();
    fr.s0_mult.resize(sz);
    fr.band_mult.assign(fr.j_max, std::vector<double>(sz));
    for (std::size_t i = 0; i < sz; ++i) {
        double r = grid.freq_abs(i);
        for (int j = 1; j <= fr.j_max; ++j)
            fr.band_mult[j - 1][i] = DyadicFrame::psi_profile(r / std::pow(2.0, j));
        fr.s0_mult[i] = DyadicFrame::phi_profile(r);
    }
    return fr;
}

/// Littlewood-Paley projection: Delta_j for j in [1, j_max], S_0 for j = 0.
inline GridFunction lp_project(const DyadicFrame& fr, const GridFunction& f, int j) {
    if (j != DyadicFrame::S0 && (j < fr.j_min || j > fr.j_max))
        throw std::invalid_argument("lp_project: band index out of representable range");
    GridFunction fh = (f.domain == Domain::frequency) ? f : forward_transform(f);
    const auto& mult = (j == DyadicFrame::S0) ? fr.s0_mult : fr.band_mult[j - 1];
    for (std::size_t i = 0; i < fh.values.size(); ++i) fh.values[i] *= mult[i];
    return inverse_transform(fh);
}

/// sup norms of S0 f (entry 0) and Delta_j f (entry j), one forward FFT.
inline std::vector<double> band_sup_norms(const DyadicFrame& fr, const GridFunction& f) {
    GridFunction fh = (f.domain == Domain::frequency) ? f : forward_transform(f);
    std::vector<double> out(fr.j_max + 1, 0.0);
    GridFunction tmp(fr.grid, Domain::frequency);
    for (int j = 0; j <= fr.j_max; ++j) {
        const auto& mult = (j == 0) ? fr.s0_mult : fr.band_mult[j - 1];
        for (std::size_t i = 0; i < fh.values.size(); ++i) tmp.values[i] = fh.values[i] * mult[i];
        out[j] = linf_norm(inverse_transform(tmp));
    }
    return out;
}

/// ell^p aggregation of shell values phi(2^j) b_j, j >= 1 (sup when p = inf).
inline double shell_aggregate(const std::vector<double>& weighted, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : weighted) m = std::max(m, v);
        return m;
    }
    double s = 0.0;
    for (double v : weighted) s += std::pow(v, p);
    return std::pow(s, 1.0 / p);
}

/// Dyadic characterization of the Lambda^phi_p norm:
/// ||S0 f||_inf + ell^p_j of phi(2^j) ||Delta_j f||_inf.
inline double lipschitz_norm_dyadic(const DyadicFrame& fr, const GridFunction& f,
                                    const PhiFunction& phi, double p) {
    if (!(p >= 1.0) && !std::isinf(p))
        throw std::invalid_argument("lipschitz_norm_dyadic: p must lie in [1, inf]");
    auto bands = band_sup_norms(fr, f);
    std::vector<double> weighted;
    for (int j = 1; j <= fr.j_max; ++j)
        weighted.push_back(phi(std::pow(2.0, j)) * bands[j]);
    return bands[0] + shell_aggregate(weighted, p);
}

namespace detail {

inline std::vector<int> log_spaced_steps(int m_max, int count) {
    std::vector<int> out;
    for (int k = 0; k < count; ++k) {
        double v = std::exp(std::log(1.0) + (std::log(double(m_max)) - 0.0) * k / (count - 1));
        int m = std::max(1, static_cast<int>(std::lround(v)));
        if (out.empty() || out.back() != m) out.push_back(m);
    }
    return out;
}

/// sup |D_h^{order} f| for the grid shift h = (mi, mj) cells (periodic).
inline double iterated_difference_sup(const GridFunction& f, int mi, int mj, int order) {
    const int n = f.grid.n_per_axis;
    const bool two_d = f.grid.d == 2;
    std::vector<cplx> cur = f.values, next(f.values.size());
    for (int it = 0; it < order; ++it) {
        if (!two_d) {
            for (int i = 0; i < n; ++i) next[i] = cur[(i + mi) % n] - cur[i];
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    next[std::size_t(i) * n + j] =
                        cur[std::size_t((i + mi) % n) * n + (j + mj + n) % n] -
                        cur[std::size_t(i) * n + j];
        }
        cur.swap(next);
    }
    double s = 0.0;
    for (const auto& v : cur) s = std::max(s, std::abs(v));
    return s;
}

}  // namespace detail

/// Finite-difference definition of the Lambda^phi_p norm, discretized over
/// log-spaced |h| shells in [dx, L] and grid directions.
inline double lipschitz_norm_direct(const GridFunction& f, const PhiFunction& phi, double p,
                                    int n_shells = 48) {
    if (!(p >= 1.0) && !std::isinf(p))
        throw std::invalid_argument("lipschitz_norm_direct: p must lie in [1, inf]");
    const auto& g = f.grid;
    const int L0 = phi.L0;
    // keep L0 steps of size h on the torus: h <= L / L0
    const int m_max = std::max(1, g.n_per_axis / (2 * std::max(1, L0)));
    auto steps = detail::log_spaced_steps(m_max, n_shells);

    struct Dir {
        int mi, mj;
        double len;  // |direction| in cells
    };
    std::vector<Dir> dirs;
    double ang_weight;
    if (g.d == 1) {
        dirs = {{1, 0, 1.0}};
        ang_weight = 2.0;  // both signs; sup norms of +h and -h differences agree
    } else {
        dirs = {{1, 0, 1.0}, {0, 1, 1.0}, {1, 1, std::numbers::sqrt2}, {1, -1, std::numbers::sqrt2}};
        ang_weight = 2.0 * (2.0 * std::numbers::pi / 8.0);
    }

    double base = linf_norm(f);
    if (std::isinf(p)) {
        double sup = 0.0;
        for (const auto& dir : dirs)
            for (int m : steps) {
                double h = m * g.dx * dir.len;
                double v = detail::iterated_difference_sup(f, m * dir.mi, m * dir.mj, L0);
                sup = std::max(sup, phi(1.0 / h) * v);
            }
        return base + sup;
    }
    double acc = 0.0;
    for (const auto& dir : dirs) {
        for (std::size_t k = 0; k < steps.size(); ++k) {
            int m = steps[k];
            double h = m * g.dx * dir.len;
            double v = detail::iterated_difference_sup(f, m * dir.mi, m * dir.mj, L0);
            // trapezoid weight in ln|h|
            double lo = (k == 0) ? std::log(double(steps[k])) : std::log(double(steps[k - 1]));
            double hi = (k + 1 == steps.size()) ? std::log(double(steps[k]))
                                                : std::log(double(steps[k + 1]));
            double wlog = 0.5 * (hi - lo);
            if (wlog <= 0.0) wlog = 1e-12;
            acc += ang_weight * std::pow(phi(1.0 / h) * v, p) * wlog;
        }
    }
    return base + std::pow(acc, 1.0 / p);
}

}  // namespace lipevo
