#pragma once

#include <cmath>
#include <vector>

#include "lipevo/function_spaces.hpp"
#include "lipevo/grid.hpp"
#include "lipevo/kernels.hpp"
#include "lipevo/symbols.hpp"

namespace lipevo {

struct TimeGrid {
    double T = 1.0;
    int n_t = 8;

    TimeGrid() = default;
    TimeGrid(double horizon, int steps) : T(horizon), n_t(steps) {
        if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
        if (n_t < 8) throw std::invalid_argument("TimeGrid: need at least 8 steps");
    }
    double dt() const { return T / n_t; }
    double node(int k) const { return T * k / n_t; }
};

/// One GridFunction per time node; all slices share one SpectralGrid.
struct SpaceTimeFunction {
    TimeGrid time_grid;
    std::vector<GridFunction> slices;  // size n_t + 1

    SpaceTimeFunction() = default;
    SpaceTimeFunction(TimeGrid tg, const SpectralGrid& g)
        : time_grid(tg), slices(tg.n_t + 1, GridFunction(g)) {}

    template <class F>
    static SpaceTimeFunction sample(TimeGrid tg, const SpectralGrid& g, F&& f) {
        SpaceTimeFunction out(tg, g);
        for (int k = 0; k <= tg.n_t; ++k) {
            double t = tg.node(k);
            if (g.d == 1)
                out.slices[k] = GridFunction::sample(g, [&](double x) { return f(t, x); });
            else
                out.slices[k] =
                    GridFunction::sample(g, [&](double x, double y) { return f(t, x, y); });
        }
        return out;
    }
};

namespace detail {

inline cplx exprel(cplx z) {
    // (e^z - 1)/z, stable near zero
    if (std::abs(z) < 1e-5) return 1.0 + z * (0.5 + z / 6.0);
    return (std::exp(z) - 1.0) / z;
}

}  // namespace detail

/// The LP-blockwise operator: the S0 piece through the (Phi + Psi_1) filter
/// and each Delta_j piece through the (Psi_{j-1} + Psi_j + Psi_{j+1}) filter.
/// On band-limited input this telescopes to the plain Fourier multiplier.
inline GridFunction apply_operator(const SymbolSpec& psi, const DyadicFrame& frame, double t,
                                   const GridFunction& f) {
    if (psi.d != frame.grid.d)
        throw std::invalid_argument("apply_operator: dimension mismatch");
    GridFunction fh = (f.domain == Domain::frequency) ? f : forward_transform(f);
    const auto& g = frame.grid;
    const std::size_t sz = g.size();
    std::vector<cplx> sym(sz);
    for (std::size_t i = 0; i < sz; ++i) {
        std::array<double, 2> xi{g.frequencies[g.d == 1 ? i : i / g.n_per_axis],
                                 g.d == 1 ? 0.0 : g.frequencies[i % g.n_per_axis]};
        sym[i] = psi.evaluate(t, xi);
    }
    auto band_at = [&](int j, std::size_t i) {
        if (j >= 1 && j <= frame.j_max) return frame.band_mult[j - 1][i];
        return DyadicFrame::psi_profile(g.freq_abs(i) / std::pow(2.0, j));
    };
    GridFunction acc(g, Domain::frequency);
    for (std::size_t i = 0; i < sz; ++i) {
        double filt0 = frame.s0_mult[i] + band_at(1, i);
        cplx total = sym[i] * filt0 * (frame.s0_mult[i] * fh.values[i]);
        for (int j = 1; j <= frame.j_max; ++j) {
            double filt = band_at(j - 1, i) + band_at(j, i) + band_at(j + 1, i);
            total += sym[i] * filt * (frame.band_mult[j - 1][i] * fh.values[i]);
        }
        acc.values[i] = total;
    }
    return inverse_transform(acc);
}

namespace detail {

/// Per-frequency step propagator S = exp(int_a^b psi) and Duhamel panel
/// integral I = int_a^b exp(int_s^b psi dr) ds, both exact on the symbol's
/// piecewise-constant segments (closed-form time dependence is subdivided).
inline void duhamel_panel(const KernelFamily& family, double a, double b, std::vector<cplx>& S,
                          std::vector<cplx>& I) {
    const auto& psi = family.symbol;
    std::vector<double> cuts{a};
    for (double bp : psi.time_breakpoints)
        if (bp > a && bp < b) cuts.push_back(bp);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    if (!psi.piecewise_in_time) {
        std::vector<double> fine;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            for (int k = 0; k < 16; ++k) fine.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * k / 16.0);
        fine.push_back(b);
        cuts = std::move(fine);
    }
    const std::size_t sz = family.grid.size();
    S.assign(sz, cplx{});
    I.assign(sz, cplx{});
    for (std::size_t i = 0; i < sz; ++i) {
        auto xi = family.freq_at(i);
        cplx E{0.0, 0.0}, acc{0.0, 0.0};
        for (std::size_t seg = cuts.size() - 1; seg-- > 0;) {
            double x0 = cuts[seg], x1 = cuts[seg + 1], len = x1 - x0;
            cplx c = psi.evaluate(0.5 * (x0 + x1), xi);
            cplx eE = (E.real() < -700.0) ? cplx{0.0, 0.0} : std::exp(E);
            acc += eE * len * exprel(c * len);
            E += c * len;
        }
        S[i] = (E.real() < -700.0) ? cplx{0.0, 0.0} : std::exp(E);
        I[i] = acc;
    }
}

}  // namespace detail

/// Mild solution u(t) = p(t,0,.) * u0 + int_0^t p(t,s,.) * f(s) ds, computed
/// slicewise in the frequency domain. Per panel, f is frozen at the midpoint
/// and the kernel's s-integral is evaluated in closed form, which avoids the
/// s -> t endpoint singularity of the kernel derivative.
inline SpaceTimeFunction mild_solve(const KernelFamily& family, const TimeGrid& tg,
                                    const GridFunction& u0, const SpaceTimeFunction& f) {
    if (!(u0.grid == family.grid))
        throw std::invalid_argument("mild_solve: u0 grid mismatch");
    if (static_cast<int>(f.slices.size()) != tg.n_t + 1)
        throw std::invalid_argument("mild_solve: forcing slices do not match time grid");
    SpaceTimeFunction u(tg, family.grid);
    u.slices[0] = u0;
    GridFunction state = forward_transform(u0);
    std::vector<GridFunction> fh(tg.n_t + 1);
    for (int k = 0; k <= tg.n_t; ++k) fh[k] = forward_transform(f.slices[k]);
    std::vector<cplx> S, I;
    for (int k = 1; k <= tg.n_t; ++k) {
        detail::duhamel_panel(family, tg.node(k - 1), tg.node(k), S, I);
        for (std::size_t i = 0; i < state.values.size(); ++i) {
            cplx fmid = 0.5 * (fh[k - 1].values[i] + fh[k].values[i]);
            state.values[i] = S[i] * state.values[i] + I[i] * fmid;
        }
        u.slices[k] = inverse_transform(state);
    }
    return u;
}

/// Max over time nodes of the sup-norm defect in the integrated equation
/// u(t) = u0 + int_0^t (psi(s,-i grad) u(s) + f(s)) ds (trapezoid in s).
inline double strong_residual(const SymbolSpec& psi, const DyadicFrame& frame,
                              const SpaceTimeFunction& u, const GridFunction& u0,
                              const SpaceTimeFunction& f) {
    const auto& tg = u.time_grid;
    double dt = tg.dt();
    GridFunction integral(frame.grid);
    GridFunction prev = apply_operator(psi, frame, tg.node(0), u.slices[0]) + f.slices[0];
    double worst = linf_norm(u.slices[0] - u0);
    for (int k = 1; k <= tg.n_t; ++k) {
        GridFunction cur = apply_operator(psi, frame, tg.node(k), u.slices[k]) + f.slices[k];
        GridFunction step = prev + cur;
        step *= cplx{0.5 * dt, 0.0};
        integral += step;
        worst = std::max(worst, linf_norm(u.slices[k] - u0 - integral));
        prev = cur;
    }
    return worst;
}

struct UniquenessReport {
    double sup_norm = 0.0;                 // sup over nodes of ||u(t)||_inf, zero data
    std::vector<double> shell_sup;         // max over t of ||Delta_j u(t)||_inf, j = 1..j_max
};

/// Zero-data probe: mild_solve with u0 = 0, f = 0 must stay at zero; reports
/// the blockwise quantities the uniqueness argument controls.
inline UniquenessReport uniqueness_probe(const KernelFamily& family, const DyadicFrame& frame,
                                         double T, int n_t = 32) {
    TimeGrid tg(T, n_t);
    GridFunction zero(family.grid);
    SpaceTimeFunction fzero(tg, family.grid);
    SpaceTimeFunction u = mild_solve(family, tg, zero, fzero);
    UniquenessReport rep;
    rep.shell_sup.assign(frame.j_max, 0.0);
    for (const auto& slice : u.slices) {
        rep.sup_norm = std::max(rep.sup_norm, linf_norm(slice));
        auto bands = band_sup_norms(frame, slice);
        for (int j = 1; j <= frame.j_max; ++j)
            rep.shell_sup[j - 1] = std::max(rep.shell_sup[j - 1], bands[j]);
    }
    return rep;
}

}  // namespace lipevo
