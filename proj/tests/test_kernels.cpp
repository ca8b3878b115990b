#include <catch2/catch_amalgamated.hpp>

#include "lipevo/kernels.hpp"

using namespace lipevo;

namespace {

double rel_l1_error(const GridFunction& got, const std::function<double(double)>& exact) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.values.size(); ++i) {
        double x = got.grid.coord(static_cast<int>(i));
        double e = exact(x);
        num += std::abs(got.values[i] - e);
        den += std::abs(e);
    }
    return num / den;
}

}  // namespace

TEST_CASE("heat kernel matches the Gaussian", "[kernels]") {
    auto g = SpectralGrid::make(1, 4096, 20.0);
    KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
    for (double tau : {0.05, 0.25, 1.0}) {
        auto p = heat(tau, 0.0);
        double worst = 0.0;
        for (std::size_t i = 0; i < p.values.size(); ++i) {
            double x = g.coord(static_cast<int>(i));
            double exact = std::exp(-x * x / (4.0 * tau)) / std::sqrt(4.0 * std::numbers::pi * tau);
            worst = std::max(worst, std::abs(p.values[i] - exact));
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("order-one kernel matches the Cauchy density", "[kernels]") {
    auto g = SpectralGrid::make(1, 8192, 40.0);
    KernelFamily fam(make_fractional(1.0, TimeCoefficient::constant(1.0)), g);
    auto p = fam(0.5, 0.0);
    auto cauchy = [](double x) { return (0.5 / std::numbers::pi) / (0.25 + x * x); };
    CHECK(rel_l1_error(p, cauchy) < 1e-3);
}

TEST_CASE("time derivative agrees with a finite difference", "[kernels]") {
    auto g = SpectralGrid::make(1, 2048, 20.0);
    KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
    double t = 0.25, h = 1e-5;
    auto dp = heat(t, 0.0, 1);
    auto hi = heat(t + h, 0.0);
    auto lo = heat(t - h, 0.0);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < dp.values.size(); ++i) {
        cplx fd = (hi.values[i] - lo.values[i]) / (2.0 * h);
        worst = std::max(worst, std::abs(dp.values[i] - fd));
        scale = std::max(scale, std::abs(fd));
    }
    CHECK(worst < 1e-6 * scale);
}

TEST_CASE("propagator modulus obeys the ellipticity bound", "[kernels]") {
    auto g = SpectralGrid::make(1, 512, 10.0);
    auto psi = make_fractional(1.5, TimeCoefficient::piecewise({0.0, 0.3}, {1.0, 2.0}));
    KernelFamily fam(psi, g);
    for (double span : {0.1, 0.5, 1.0}) {
        auto prop = fam.propagator(0.0, span);
        for (std::size_t i = 0; i < prop.size(); ++i) {
            double xi = std::abs(g.frequencies[i]);
            double bound = std::exp(-psi.kappa * span * std::pow(xi, psi.gamma));
            CHECK(std::abs(prop[i]) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("two-parameter family satisfies Chapman-Kolmogorov", "[kernels]") {
    auto g = SpectralGrid::make(1, 1024, 16.0);
    auto psi = make_fractional(2.0, TimeCoefficient::piecewise({0.0, 0.4}, {1.0, 3.0}));
    KernelFamily fam(psi, g);
    auto direct = fam(0.7, 0.1);
    auto composed = convolve(fam(0.7, 0.4), fam(0.4, 0.1));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < direct.values.size(); ++i) {
        num += std::abs(composed.values[i] - direct.values[i]);
        den += std::abs(direct.values[i]);
    }
    CHECK(num / den < 1e-8);
}

TEST_CASE("real symbols give real kernels", "[kernels]") {
    auto g = SpectralGrid::make(1, 512, 10.0);
    KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
    auto p = heat(0.3, 0.0);
    for (const auto& v : p.values) CHECK(std::abs(v.imag()) <= 1e-12);
}

TEST_CASE("kernel mass tracks the zero-frequency symbol", "[kernels]") {
    auto g = SpectralGrid::make(1, 2048, 20.0);
    SECTION("conservative symbol has unit mass") {
        KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
        auto rows = mass_limit(heat, 0.0, {0.05, 0.2, 1.0});
        for (const auto& r : rows) {
            CHECK(r.predicted == 1.0);
            CHECK(r.mass == Catch::Approx(1.0).epsilon(1e-10));
        }
    }
    SECTION("zero-order damping decays the mass") {
        SymbolSpec psi;
        psi.d = 1;
        psi.gamma = 2.0;
        psi.kappa = 1.0;
        psi.M = 2.0;
        psi.psi_at_zero = cplx{-0.1, 0.0};
        psi.evaluate = [](double, std::array<double, 2> xi) {
            return cplx{-0.1 - (xi[0] * xi[0] + xi[1] * xi[1]), 0.0};
        };
        KernelFamily fam(psi, g);
        auto rows = mass_limit(fam, 0.0, {1.0});
        CHECK(rows[0].predicted == Catch::Approx(std::exp(-0.1)).epsilon(1e-14));
        CHECK(rows[0].mass == Catch::Approx(std::exp(-0.1)).epsilon(1e-10));
    }
    SECTION("tail vanishes in the short-time limit") {
        KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
        auto rows = mass_limit(heat, 0.0, {0.5, 0.2, 0.05, 0.01});
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::isfinite(rows[i].tail));
            CHECK(rows[i].tail <= rows[i - 1].tail + 1e-15);
        }
        CHECK(rows.back().tail < 1e-10);
    }
}

TEST_CASE("estimate sweep on the heat family", "[kernels]") {
    auto g = SpectralGrid::make(1, 2048, 20.0);
    auto frame = build_frame(g);
    KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
    auto rep = verify_fs_estimates(heat, frame);
    // m = 0 total mass is 1, m = 1 picks up the 1/dt factor
    CHECK(rep.n_full >= 0.9);
    CHECK(rep.n_full < 10.0);
    CHECK(rep.full_l1_slope_m1 == Catch::Approx(-1.0).margin(0.05));
    CHECK(rep.n_shell > 0.0);
    CHECK(std::isfinite(rep.n_shell));
    CHECK(std::isfinite(rep.n_s0));
    CHECK(std::isfinite(rep.n_moment));
    CHECK(rep.n_moment > 0.0);
    bool has_shell = false;
    for (const auto& r : rep.rows) has_shell = has_shell || r.estimate == "shell_l1";
    CHECK(has_shell);
}

TEST_CASE("kernel argument validation", "[kernels]") {
    auto g = SpectralGrid::make(1, 256, 10.0);
    KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
    CHECK_THROWS_AS(heat(0.1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(heat(0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(heat(0.5, 0.1, 2), std::invalid_argument);
    auto g2 = SpectralGrid::make(2, 32, 10.0);
    CHECK_THROWS_AS(KernelFamily(make_fractional(2.0, TimeCoefficient::constant(1.0), 1), g2),
                    std::invalid_argument);
}
