#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lipevo/function_spaces.hpp"
#include "lipevo/grid.hpp"
#include "lipevo/symbols.hpp"

namespace lipevo {

/// The fundamental solution p(t,s,.) of d/dt u = psi(t,-i grad) u on the grid.
/// Frequency-domain values are exp(int_s^t psi(r,xi) dr); the time quadrature
/// is exact for piecewise-constant coefficients.
struct KernelFamily {
    SymbolSpec symbol;
    SpectralGrid grid;

    KernelFamily(SymbolSpec psi, SpectralGrid g) : symbol(std::move(psi)), grid(std::move(g)) {
        if (symbol.d != grid.d)
            throw std::invalid_argument("KernelFamily: symbol and grid dimension mismatch");
    }

    std::array<double, 2> freq_at(std::size_t flat) const {
        if (grid.d == 1) return {grid.frequencies[flat], 0.0};
        std::size_t n = static_cast<std::size_t>(grid.n_per_axis);
        return {grid.frequencies[flat / n], grid.frequencies[flat % n]};
    }

    /// exp(int_s^t psi(r,xi) dr) at every grid frequency.
    std::vector<cplx> propagator(double s, double t) const {
        std::vector<cplx> out(grid.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            cplx e = symbol.time_integral(s, t, freq_at(i));
            if (e.real() > 700.0)
                throw std::range_error("KernelFamily: propagator exponent overflow");
            out[i] = (e.real() < -700.0) ? cplx{0.0, 0.0} : std::exp(e);
        }
        return out;
    }

    /// p(t,s,.) for m = 0, or its time derivative for m = 1
    /// (multiplication by psi(t,xi) before inversion).
    GridFunction operator()(double t, double s, int m = 0) const {
        if (!(t > s) || s < 0.0)
            throw std::invalid_argument("KernelFamily: requires t > s >= 0");
        if (m != 0 && m != 1)
            throw std::invalid_argument("KernelFamily: derivative order must be 0 or 1");
        auto prop = propagator(s, t);
        GridFunction fh(grid, Domain::frequency);
        const double c = std::pow(2.0 * std::numbers::pi, -grid.d / 2.0);
        for (std::size_t i = 0; i < prop.size(); ++i) {
            cplx v = c * prop[i];
            if (m == 1) v *= symbol.evaluate(t, freq_at(i));
            fh.values[i] = v;
        }
        return inverse_transform(fh);
    }
};

struct FsSweep {
    std::vector<double> dts{1e-3, 1e-2, 1e-1, 1.0};
    std::vector<double> deltas{0.25, 0.5, 0.75};
    int j_lo = 1, j_hi = 0;  // j_hi = 0 means frame j_max
};

struct FsRow {
    std::string estimate;  // shell_l1 | s0_l1 | full_l1 | moment_l2
    int j = 0;             // shell index (shell_l1 only)
    int m = 0;
    double delta = 0.0;    // shell_l1 only
    double dt = 0.0;
    double measured = 0.0;
    double bound_rhs = 0.0;  // right-hand side without N
    double ratio = 0.0;
};

struct FsReport {
    std::vector<FsRow> rows;
    // fitted N = max ratio per estimate family
    double n_shell = 0.0, n_s0 = 0.0, n_full = 0.0, n_moment = 0.0;
    double full_l1_slope_m1 = 0.0;  // log-log slope of ||d_t p||_L1 vs dt
};

/// Moment norm || |x|^{d2} f ||_L2 with torus-periodic distance.
inline double moment_l2(const GridFunction& f, int d2) {
    double cell = std::pow(f.grid.dx, f.grid.d), s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double x = f.grid.torus_abs(i);
        s += std::pow(x, 2.0 * d2) * std::norm(f.values[i]);
    }
    return std::sqrt(s * cell);
}

/// Measures the four kernel estimates over a (dt, j, m, delta) sweep and fits
/// each family's constant as the max measured/bound ratio.
inline FsReport verify_fs_estimates(const KernelFamily& family, const DyadicFrame& frame,
                                    const FsSweep& sweep = {}) {
    FsReport rep;
    const auto& psi = family.symbol;
    const int d2 = family.grid.d / 2 + 1;
    const int j_hi = (sweep.j_hi > 0) ? std::min(sweep.j_hi, frame.j_max) : frame.j_max;
    std::vector<double> log_dt, log_dtm1;
    for (double dt : sweep.dts) {
        for (int m = 0; m <= 1; ++m) {
            GridFunction p = family(dt, 0.0, m);
            double l1 = lp_norm(p, 1.0);
            double bound_full = std::pow(dt, -double(m));
            rep.rows.push_back({"full_l1", 0, m, 0.0, dt, l1, bound_full, l1 / bound_full});
            rep.n_full = std::max(rep.n_full, l1 / bound_full);
            if (m == 1) {
                log_dt.push_back(std::log(dt));
                log_dtm1.push_back(std::log(l1));
            }

            double mom = moment_l2(p, d2);
            double bound_mom = std::pow(dt, -double(m) + (d2 - family.grid.d / 2.0) / psi.gamma);
            rep.rows.push_back({"moment_l2", 0, m, 0.0, dt, mom, bound_mom, mom / bound_mom});
            rep.n_moment = std::max(rep.n_moment, mom / bound_mom);

            double s0l1 = lp_norm(lp_project(frame, p, DyadicFrame::S0), 1.0);
            rep.rows.push_back({"s0_l1", 0, m, 0.0, dt, s0l1, 1.0, s0l1});
            rep.n_s0 = std::max(rep.n_s0, s0l1);

            for (int j = sweep.j_lo; j <= j_hi; ++j) {
                double shell = lp_norm(lp_project(frame, p, j), 1.0);
                for (double delta : sweep.deltas) {
                    double rate = psi.kappa * dt * std::pow(2.0, j * psi.gamma) * (1.0 - delta) /
                                  std::pow(2.0, psi.gamma);
                    double bound = std::exp(-rate) * std::pow(2.0, j * m * psi.gamma);
                    double ratio = (bound > 0.0) ? shell / bound : 0.0;
                    rep.rows.push_back({"shell_l1", j, m, delta, dt, shell, bound, ratio});
                    // values below the FFT rounding floor carry no signal
                    if (shell > 1e-12 && bound > 1e-12)
                        rep.n_shell = std::max(rep.n_shell, ratio);
                }
            }
        }
    }
    // least-squares slope of log ||d_t p||_L1 against log dt
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = log_dt.size();
    for (std::size_t i = 0; i < n; ++i) {
        sx += log_dt[i];
        sy += log_dtm1[i];
        sxx += log_dt[i] * log_dt[i];
        sxy += log_dt[i] * log_dtm1[i];
    }
    rep.full_l1_slope_m1 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

struct MassRow {
    double t = 0.0;
    double mass = 0.0;       // grid quadrature of p(t,s,.)
    double predicted = 0.0;  // exp(int_s^t psi(r,0) dr)
    double tail = 0.0;       // int_{|y| >= delta0} |p| dy
};

/// Checks int p(t,s,y) dy = exp(int_s^t psi(r,0) dr) and the t -> s mass
/// limit, plus the far-field tail at radius delta0.
inline std::vector<MassRow> mass_limit(const KernelFamily& family, double s,
                                       const std::vector<double>& t_sequence,
                                       double delta0 = 1.0) {
    std::vector<MassRow> rows;
    for (double t : t_sequence) {
        GridFunction p = family(t, s, 0);
        double cell = std::pow(family.grid.dx, family.grid.d);
        cplx mass{0.0, 0.0};
        double tail = 0.0;
        for (std::size_t i = 0; i < p.values.size(); ++i) {
            mass += p.values[i];
            if (family.grid.torus_abs(i) >= delta0) tail += std::abs(p.values[i]);
        }
        cplx pred = std::exp(family.symbol.time_integral(s, t, {0.0, 0.0}));
        rows.push_back({t, (mass * cell).real(), pred.real(), tail * cell});
    }
    return rows;
}

}  // namespace lipevo
