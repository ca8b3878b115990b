#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lipevo/corpus.hpp"
#include "lipevo/kernels.hpp"
#include "lipevo/spec_parse.hpp"
#include "lipevo/verify.hpp"

namespace lipevo {

namespace detail {

inline bool within_factor(double a, double b, double f = 1.5) {
    if (a == 0.0 && b == 0.0) return true;
    if (!(a > 0.0) || !(b > 0.0)) return false;
    double r = a / b;
    return r <= f && r >= 1.0 / f;
}

inline std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: byte-identical across platforms
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    return out;
}

inline void verify_row(std::ostream& os, const std::string& check, const std::string& param_json,
                       double measured, double bound, double fitted_N, bool stable) {
    double ratio = (bound > 0.0) ? measured / bound : 0.0;
    os << check << ',' << csv_field(param_json) << ',' << fmt(measured) << ',' << fmt(bound) << ','
       << fmt(ratio) << ',' << fmt(fitted_N) << ',' << (stable ? "true" : "false") << '\n';
}

}  // namespace detail

/// Shared state for one suite invocation; everything derives from the config
/// and the seed, so outputs are deterministic.
struct SuiteContext {
    RunConfig cfg;
    std::filesystem::path out_dir;
    SpectralGrid grid;
    DyadicFrame frame;
    SymbolSpec psi;
    PhiFunction phi;
    WeightSpec w;
    double p;
    std::vector<EstimateReport::Row> summary;  // param = check name, measured = fitted N

    explicit SuiteContext(const RunConfig& c)
        : cfg(c),
          out_dir(c.out),
          grid(c.make_grid()),
          frame(build_frame(grid)),
          psi(c.make_symbol()),
          phi(c.make_phi()),
          w(c.make_weight()),
          p(c.p_value()) {}

    double sigma() const { return phi.alpha + psi.gamma + 1.0; }

    void record(const std::string& check, double fitted_N, bool stable) {
        summary.push_back({check, fitted_N, stable ? 1.0 : 0.0, 0.0});
    }
};

inline void run_kernel_suite(SuiteContext& ctx) {
    KernelFamily family(ctx.psi, ctx.grid);
    FsReport base = verify_fs_estimates(family, ctx.frame);
    SpectralGrid fine_grid = SpectralGrid::make(ctx.grid.d, ctx.grid.n_per_axis * 2, ctx.grid.half_width);
    DyadicFrame fine_frame = build_frame(fine_grid);
    KernelFamily fine(ctx.psi, fine_grid);
    FsSweep fine_sweep;
    fine_sweep.j_hi = ctx.frame.j_max;  // compare fitted N over the same shells
    FsReport refined = verify_fs_estimates(fine, fine_frame, fine_sweep);

    auto out = detail::open_csv(ctx.out_dir / "kernel_estimates.csv");
    out << "estimate,family,j,m,dt,measured,bound_rhs,ratio\n";
    for (const auto& r : base.rows)
        out << r.estimate << ',' << csv_field(ctx.cfg.symbol) << ',' << r.j << ',' << r.m << ','
            << fmt(r.dt) << ',' << fmt(r.measured) << ',' << fmt(r.bound_rhs) << ',' << fmt(r.ratio)
            << '\n';
    for (const auto& m : mass_limit(family, 0.0, {0.01, 0.1, 1.0}))
        out << "mass_l1," << csv_field(ctx.cfg.symbol) << ",0,0," << fmt(m.t) << ','
            << fmt(m.mass) << ',' << fmt(m.predicted) << ',' << fmt(m.mass / m.predicted) << '\n';

    ctx.record("kernel_shell_l1", base.n_shell, detail::within_factor(base.n_shell, refined.n_shell));
    ctx.record("kernel_s0_l1", base.n_s0, detail::within_factor(base.n_s0, refined.n_s0));
    ctx.record("kernel_full_l1", base.n_full, detail::within_factor(base.n_full, refined.n_full));
    ctx.record("kernel_moment_l2", base.n_moment,
               detail::within_factor(base.n_moment, refined.n_moment));
    bool slope_ok = std::abs(base.full_l1_slope_m1 + 1.0) <= 0.05;
    ctx.record("kernel_dt_slope", -base.full_l1_slope_m1, ctx.psi.gamma != 2.0 || slope_ok);
}

inline void run_operator_suite(SuiteContext& ctx) {
    auto out = detail::open_csv(ctx.out_dir / "operator.csv");
    out << "check,param_json,measured,bound,ratio,fitted_N,stable\n";

    auto [phi_g, ignore] = derived_phi(ctx.phi, ctx.psi.gamma, ctx.p, ctx.w);
    auto bound_fit = [&](const SpectralGrid& g, const DyadicFrame& fr) {
        SplitMix64 rng(ctx.cfg.seed + 101);
        double fitted = 0.0;
        for (int i = 0; i < ctx.cfg.corpus_size; ++i) {
            GridFunction f = random_band_limited(g, 1, fr.j_max - 2, ctx.sigma(), rng);
            GridFunction af = apply_operator(ctx.psi, fr, 0.0, f);
            double measured = lipschitz_norm_dyadic(fr, af, ctx.phi, ctx.p);
            double bound = lipschitz_norm_dyadic(fr, f, phi_g, ctx.p);
            if (&fr == &ctx.frame)
                detail::verify_row(out, "operator_bound", "{\"pair\":" + std::to_string(i) + "}",
                                   measured, bound, 0.0, true);
            if (bound > 0.0) fitted = std::max(fitted, measured / bound);
        }
        return fitted;
    };
    double n_base = bound_fit(ctx.grid, ctx.frame);
    SpectralGrid fine_grid = SpectralGrid::make(ctx.grid.d, ctx.grid.n_per_axis * 2, ctx.grid.half_width);
    DyadicFrame fine_frame = build_frame(fine_grid);
    double n_fine = bound_fit(fine_grid, fine_frame);
    ctx.record("operator_bound", n_base, detail::within_factor(n_base, n_fine));

    // dilation scaling: a pure mode at c xi0 must respond like c^gamma
    const double base_freq = std::numbers::pi / ctx.grid.half_width;
    int m0 = std::max(1, static_cast<int>(std::lround(4.0 / base_freq)));
    double ref = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int c = 1; c <= 16; ++c) {
        GridFunction mode = GridFunction::sample(ctx.grid, [&](double x, auto...) {
            double ph = base_freq * m0 * c * x;
            return cplx{std::cos(ph), std::sin(ph)};
        });
        double measured = linf_norm(apply_operator(ctx.psi, ctx.frame, 0.0, mode));
        if (c == 1) ref = measured;
        double scale = std::pow(double(c), ctx.psi.gamma) * ref;
        double ratio = measured / scale;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        detail::verify_row(out, "operator_scaling", "{\"c\":" + std::to_string(c) + "}", measured,
                           scale, ratio, true);
    }
    ctx.record("operator_scaling", hi, hi / lo <= 1.2);
}

inline void run_apriori_suite(SuiteContext& ctx) {
    auto out = detail::open_csv(ctx.out_dir / "apriori.csv");
    out << "check,param_json,measured,bound,ratio,fitted_N,stable\n";
    KernelFamily family(ctx.psi, ctx.grid);
    TimeGrid tg(ctx.cfg.time_T, ctx.cfg.time_n_t);
    TimeGrid tg_fine(ctx.cfg.time_T, ctx.cfg.time_n_t * 2);

    SplitMix64 rng(ctx.cfg.seed + 202);
    std::vector<GridFunction> u0s;
    std::vector<RandomForcing> forcings;
    for (int i = 0; i < ctx.cfg.corpus_size; ++i) {
        u0s.push_back(random_band_limited(ctx.grid, 1, ctx.frame.j_max - 2, ctx.sigma(), rng));
        forcings.push_back(RandomForcing::make(ctx.grid, 1, ctx.frame.j_max - 2, ctx.sigma(), rng));
    }
    auto corpus_at = [&](const TimeGrid& t) {
        std::vector<std::pair<GridFunction, SpaceTimeFunction>> corpus;
        for (int i = 0; i < ctx.cfg.corpus_size; ++i)
            corpus.emplace_back(u0s[i], forcings[i].at(t));
        return corpus;
    };
    EstimateReport base = check_apriori(family, ctx.frame, ctx.phi, ctx.p, ctx.w, corpus_at(tg));
    EstimateReport fine = check_apriori(family, ctx.frame, ctx.phi, ctx.p, ctx.w, corpus_at(tg_fine));
    for (const auto& r : base.rows)
        detail::verify_row(out, "apriori", "{\"" + r.param + "\"}", r.measured, r.bound,
                           base.fitted_N, true);
    ctx.record("apriori", base.fitted_N, detail::within_factor(base.fitted_N, fine.fitted_N));

    // the gate must reject a weight outside A_p
    bool gate_ok = false;
    try {
        check_apriori(family, ctx.frame, ctx.phi, 2.0, WeightSpec::power(1.2), {});
    } catch (const std::invalid_argument&) {
        gate_ok = true;
    }
    detail::verify_row(out, "apriori_gate", "{\"w\":\"pow:1.2\"}", gate_ok ? 1.0 : 0.0, 1.0, 0.0,
                       gate_ok);
    ctx.record("apriori_gate", gate_ok ? 1.0 : 0.0, gate_ok);

    EstimateReport mx = check_maximal_bound(family, ctx.frame, ctx.phi, forcings[0].at(tg));
    EstimateReport mx_fine = check_maximal_bound(family, ctx.frame, ctx.phi, forcings[0].at(tg_fine));
    detail::verify_row(out, "maximal_bound", "{\"argmax\":\"" + mx.argmax + "\"}",
                       mx.fitted_N, 1.0, mx.fitted_N, true);
    ctx.record("maximal_bound", mx.fitted_N,
               !mx.inconsistent && detail::within_factor(mx.fitted_N, mx_fine.fitted_N));

    EstimateReport wk = check_weak_l1(family, ctx.frame, ctx.phi, ctx.w, forcings[0].at(tg));
    EstimateReport wk_fine = check_weak_l1(family, ctx.frame, ctx.phi, ctx.w, forcings[0].at(tg_fine));
    detail::verify_row(out, "weak_l1", "{}", wk.rows[0].measured, wk.rows[0].bound, wk.fitted_N,
                       true);
    ctx.record("weak_l1", wk.fitted_N, detail::within_factor(wk.fitted_N, wk_fine.fitted_N));
}

inline void run_trace_suite(SuiteContext& ctx) {
    auto out = detail::open_csv(ctx.out_dir / "trace.csv");
    out << "check,param_json,measured,bound,ratio,fitted_N,stable\n";
    KernelFamily family(ctx.psi, ctx.grid);
    SplitMix64 rng(ctx.cfg.seed + 303);
    double n_base = 0.0, n_fine = 0.0, inner = 0.0;
    for (int i = 0; i < ctx.cfg.corpus_size; ++i) {
        GridFunction u0 = random_band_limited(ctx.grid, 1, ctx.frame.j_max - 2, ctx.sigma(), rng);
        RandomForcing forcing =
            RandomForcing::make(ctx.grid, 1, ctx.frame.j_max - 2, ctx.sigma(), rng);
        for (int pass = 0; pass < 2; ++pass) {
            TimeGrid tg(ctx.cfg.time_T, ctx.cfg.time_n_t * (pass + 1));
            SpaceTimeFunction f = forcing.at(tg);
            SpaceTimeFunction u = mild_solve(family, tg, u0, f);
            EstimateReport rep = check_trace_embedding(ctx.frame, u, u0, f, ctx.phi,
                                                       ctx.psi.gamma, ctx.p, ctx.w);
            (pass == 0 ? n_base : n_fine) = std::max(pass == 0 ? n_base : n_fine, rep.fitted_N);
            if (pass == 0) {
                inner = std::max(inner, rep.secondary_N);
                detail::verify_row(out, "trace_embedding", "{\"pair\":" + std::to_string(i) + "}",
                                   rep.rows[0].measured, rep.rows[0].bound, rep.fitted_N, true);
            }
        }
    }
    detail::verify_row(out, "trace_inner", "{}", inner, 1.0 + 1e-12, 0.0, inner <= 1.0 + 1e-12);
    ctx.record("trace_embedding", n_base, detail::within_factor(n_base, n_fine));
    ctx.record("trace_inner", inner, inner <= 1.0 + 1e-12);
}

inline void run_continuity_suite(SuiteContext& ctx) {
    auto out = detail::open_csv(ctx.out_dir / "continuity.csv");
    out << "check,param_json,measured,bound,ratio,fitted_N,stable\n";
    KernelFamily family(ctx.psi, ctx.grid);
    SplitMix64 rng(ctx.cfg.seed + 404);
    GridFunction u0 = random_band_limited(ctx.grid, 1, ctx.frame.j_max - 2, ctx.sigma(), rng);
    RandomForcing forcing = RandomForcing::make(ctx.grid, 1, ctx.frame.j_max - 2, ctx.sigma(), rng);
    int L0 = static_cast<int>(std::floor(ctx.phi.L + ctx.psi.gamma)) + 1;
    double n_base = 0.0, n_fine = 0.0, slope = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        TimeGrid tg(ctx.cfg.time_T, ctx.cfg.time_n_t * (pass + 1));
        SpaceTimeFunction f = forcing.at(tg);
        SpaceTimeFunction u = mild_solve(family, tg, u0, f);
        EstimateReport rep = check_continuity(ctx.psi, ctx.frame, u, u0, f, ctx.phi, ctx.psi.gamma,
                                              ctx.p, ctx.w, L0);
        if (pass == 0) {
            n_base = rep.fitted_N;
            slope = rep.slope;
            for (const auto& r : rep.rows)
                detail::verify_row(out, "continuity", "{\"" + r.param + "\"}", r.measured, r.bound,
                                   rep.fitted_N, true);
        } else {
            n_fine = rep.fitted_N;
        }
    }
    detail::verify_row(out, "continuity_slope", "{}", slope, 1.0 - 1.0 / ctx.p, 0.0, true);
    ctx.record("continuity", n_base, detail::within_factor(n_base, n_fine));
}

inline void run_interpolation_suite(SuiteContext& ctx) {
    auto out = detail::open_csv(ctx.out_dir / "interpolation.csv");
    out << "check,param_json,measured,bound,ratio,fitted_N,stable\n";
    double p = std::isinf(ctx.p) ? 2.0 : ctx.p;  // the identity needs finite p
    SplitMix64 rng(ctx.cfg.seed + 505);
    auto corpus_for = [&](int window) {
        std::vector<SequenceSpaceElement> corpus;
        SequenceSpaceElement geo{-4, {}};
        for (int n = 0; n < window; ++n) geo.entries.push_back(std::pow(2.0, -(geo.n_min + n)));
        corpus.push_back(geo);
        SplitMix64 local(rng.state);  // same stream prefix for every window size
        for (int s = 0; s < 5; ++s) {
            SequenceSpaceElement e{-4, {}};
            for (int n = 0; n < window; ++n)
                e.entries.push_back(local.uniform(0.1, 1.0) *
                                    std::pow(2.0, -0.8 * (e.n_min + n)));
            corpus.push_back(e);
        }
        return corpus;
    };
    int window = ctx.cfg.sequence_window;
    InterpolationResult base =
        check_interpolation(ctx.phi, ctx.psi.gamma, p, ctx.w, corpus_for(window));
    InterpolationResult grown =
        check_interpolation(ctx.phi, ctx.psi.gamma, p, ctx.w, corpus_for(window + 4));
    for (std::size_t i = 0; i < base.ratios.size(); ++i)
        detail::verify_row(out, "interpolation", "{\"seq\":" + std::to_string(i) + "}",
                           base.ratios[i], 1.0, base.c_upper, true);
    bool stable = detail::within_factor(base.c_upper, grown.c_upper) &&
                  detail::within_factor(base.c_lower, grown.c_lower);
    detail::verify_row(out, "interpolation_band", "{}", base.c_upper, base.c_lower,
                       base.c_upper / base.c_lower, stable);
    ctx.record("interpolation", base.c_upper / base.c_lower, stable);
}

/// Runs one named suite (or `all`), writes per-check CSVs plus summary.csv.
/// Exit 0 iff every stability flag passes, 1 on instability, 2 on I/O failure.
inline int run_suite(const RunConfig& cfg_in, const std::string& suite) {
    try {
        SuiteContext ctx(cfg_in);
        std::filesystem::create_directories(ctx.out_dir);
        {
            auto echo = detail::open_csv(ctx.out_dir / "config_echo.toml");
            echo << ctx.cfg.echo();
        }
        bool all = suite == "all";
        if (all || suite == "kernel") run_kernel_suite(ctx);
        if (all || suite == "operator") run_operator_suite(ctx);
        if (all || suite == "apriori") run_apriori_suite(ctx);
        if (all || suite == "trace") run_trace_suite(ctx);
        if (all || suite == "continuity") run_continuity_suite(ctx);
        if (all || suite == "interpolation") run_interpolation_suite(ctx);
        if (ctx.summary.empty()) {
            std::cerr << "unknown suite '" << suite << "'\n";
            return 2;
        }
        auto out = detail::open_csv(ctx.out_dir / "summary.csv");
        out << "check,fitted_N,stable\n";
        bool ok = true;
        for (const auto& row : ctx.summary) {
            bool stable = row.bound == 1.0;
            ok = ok && stable;
            out << row.param << ',' << fmt(row.measured) << ',' << (stable ? "true" : "false")
                << '\n';
        }
        return ok ? 0 : 1;
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
}

}  // namespace lipevo
