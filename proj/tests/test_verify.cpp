#include <catch2/catch_amalgamated.hpp>

#include "lipevo/corpus.hpp"
#include "lipevo/verify.hpp"

using namespace lipevo;

namespace {

constexpr double kInfP = std::numeric_limits<double>::infinity();

SpectralGrid dyadic_grid(int n = 256) { return SpectralGrid::make(1, n, 16.0 * std::numbers::pi); }

// Multi-round zooming coordinate-grid search over splittings a = b + c,
// minimizing max_i phig_i b_i + t max_i phi_i (a_i - b_i). Oracle for the
// brute-force K mode on tiny windows.
double k_oracle(const SequenceSpaceElement& a, double t, const PhiFunction& phi, double gamma) {
    std::size_t n = a.entries.size();
    std::vector<double> phis(n), phigs(n);
    for (std::size_t i = 0; i < n; ++i) {
        phis[i] = phi(std::pow(2.0, a.n_min + int(i)));
        phigs[i] = phis[i] * std::pow(2.0, gamma * (a.n_min + int(i)));
    }
    auto objective = [&](const std::vector<double>& b) {
        double first = 0.0, second = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            first = std::max(first, phigs[i] * b[i]);
            second = std::max(second, phis[i] * (a.entries[i] - b[i]));
        }
        return first + t * second;
    };
    std::vector<double> lo(n, 0.0), hi = a.entries, best_b = a.entries;
    double best = objective(best_b);
    const int pts = 13;
    for (int round = 0; round < 6; ++round) {
        std::vector<int> idx(n, 0);
        std::vector<double> b(n);
        bool done = false;
        while (!done) {
            for (std::size_t i = 0; i < n; ++i)
                b[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (pts - 1);
            double v = objective(b);
            if (v < best) {
                best = v;
                best_b = b;
            }
            std::size_t k = 0;
            while (k < n && ++idx[k] == pts) idx[k++] = 0;
            done = (k == n);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double span = (hi[i] - lo[i]) / (pts - 1);
            lo[i] = std::max(0.0, best_b[i] - 2.0 * span);
            hi[i] = std::min(a.entries[i], best_b[i] + 2.0 * span);
        }
    }
    return best;
}

}  // namespace

TEST_CASE("weighted time norm closed cases", "[verify]") {
    TimeGrid tg(1.0, 16);
    std::vector<double> v(tg.n_t + 1, 3.0);
    CHECK(time_lp_norm(v, tg, WeightSpec::constant(1.0), 2.0) == Catch::Approx(3.0).epsilon(1e-13));
    CHECK(time_lp_norm(v, tg, WeightSpec::constant(1.0), kInfP) == 3.0);
    // power weight integrates exactly panel by panel
    CHECK(time_lp_norm(v, tg, WeightSpec::power(0.5), 2.0) ==
          Catch::Approx(3.0 * std::sqrt(2.0 / 3.0)).epsilon(1e-13));
}

TEST_CASE("maximal bound with zero forcing is trivially consistent", "[verify]") {
    auto g = dyadic_grid();
    auto frame = build_frame(g);
    KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
    SpaceTimeFunction f(TimeGrid(1.0, 16), g);
    auto rep = check_maximal_bound(heat, frame, PhiFunction::power(0.5), f);
    CHECK(rep.fitted_N == 0.0);
    CHECK_FALSE(rep.inconsistent);
}

TEST_CASE("maximal bound on a random forcing is finite", "[verify]") {
    auto g = dyadic_grid();
    auto frame = build_frame(g);
    KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
    SplitMix64 rng(7);
    auto f = RandomForcing::make(g, 1, 4, 2.5, rng).at(TimeGrid(1.0, 32));
    auto rep = check_maximal_bound(heat, frame, PhiFunction::power(0.5), f);
    CHECK(rep.fitted_N > 0.0);
    CHECK(std::isfinite(rep.fitted_N));
    CHECK_FALSE(rep.inconsistent);
}

TEST_CASE("a priori check gates on the A_p condition", "[verify]") {
    auto g = dyadic_grid();
    auto frame = build_frame(g);
    KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
    std::vector<std::pair<GridFunction, SpaceTimeFunction>> corpus;
    CHECK_THROWS_AS(check_apriori(heat, frame, PhiFunction::power(0.5), 2.0,
                                  WeightSpec::power(1.2), corpus),
                    std::invalid_argument);
}

TEST_CASE("a priori fitted constant is scale invariant in the data", "[verify]") {
    auto g = dyadic_grid();
    auto frame = build_frame(g);
    KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
    SplitMix64 rng(11);
    TimeGrid tg(1.0, 32);
    auto u0 = random_band_limited(g, 1, 4, 2.5, rng);
    auto f = RandomForcing::make(g, 1, 4, 2.5, rng).at(tg);
    std::vector<std::pair<GridFunction, SpaceTimeFunction>> corpus{{u0, f}};

    GridFunction u0c = u0;
    u0c *= cplx{5.0, 0.0};
    SpaceTimeFunction fc = f;
    for (auto& s : fc.slices) s *= cplx{5.0, 0.0};
    std::vector<std::pair<GridFunction, SpaceTimeFunction>> scaled{{u0c, fc}};

    auto a = check_apriori(heat, frame, PhiFunction::power(0.5), 2.0, WeightSpec::constant(1.0),
                           corpus);
    auto b = check_apriori(heat, frame, PhiFunction::power(0.5), 2.0, WeightSpec::constant(1.0),
                           scaled);
    CHECK(a.fitted_N > 0.0);
    CHECK(a.fitted_N == Catch::Approx(b.fitted_N).epsilon(1e-10));
}

TEST_CASE("weak type (1,1) check produces a finite constant", "[verify]") {
    auto g = dyadic_grid();
    auto frame = build_frame(g);
    KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
    SplitMix64 rng(13);
    auto f = RandomForcing::make(g, 1, 4, 2.5, rng).at(TimeGrid(1.0, 32));
    auto rep = check_weak_l1(heat, frame, PhiFunction::power(0.5), WeightSpec::power(0.5), f);
    CHECK(rep.fitted_N > 0.0);
    CHECK(std::isfinite(rep.fitted_N));
    CHECK_FALSE(rep.inconsistent);
}

TEST_CASE("trace embedding inner inequality holds with constant one", "[verify]") {
    auto g = dyadic_grid();
    auto frame = build_frame(g);
    KernelFamily heat(make_fractional(2.0, TimeCoefficient::constant(1.0)), g);
    SplitMix64 rng(17);
    TimeGrid tg(1.0, 32);
    auto u0 = random_band_limited(g, 1, 4, 2.5, rng);
    auto f = RandomForcing::make(g, 1, 4, 2.5, rng).at(tg);
    auto u = mild_solve(heat, tg, u0, f);
    auto rep = check_trace_embedding(frame, u, u0, f, PhiFunction::power(0.5), 2.0, 2.0,
                                     WeightSpec::constant(1.0));
    CHECK(rep.secondary_N <= 1.0 + 1e-12);
    CHECK(rep.fitted_N > 0.0);
    CHECK(std::isfinite(rep.fitted_N));

    // single dyadic mode: only one shell is active, so ell^inf = ell^p exactly
    auto one_mode = GridFunction::sample(g, [](double x) { return std::cos(4.0 * x); });
    SpaceTimeFunction us(tg, g);
    for (auto& s : us.slices) s = one_mode;
    SpaceTimeFunction fz(tg, g);
    auto rep2 = check_trace_embedding(frame, us, one_mode, fz, PhiFunction::power(0.5), 2.0, 2.0,
                                      WeightSpec::constant(1.0));
    CHECK(rep2.secondary_N == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("continuity check on time-constant data", "[verify]") {
    auto g = dyadic_grid();
    auto frame = build_frame(g);
    auto psi = make_fractional(2.0, TimeCoefficient::constant(1.0));
    SplitMix64 rng(19);
    TimeGrid tg(1.0, 32);
    auto u0 = random_band_limited(g, 1, 4, 2.5, rng);
    GridFunction neg_au0 = apply_operator(psi, frame, 0.0, u0);
    neg_au0 *= cplx{-1.0, 0.0};
    SpaceTimeFunction u(tg, g), f(tg, g);
    for (int k = 0; k <= tg.n_t; ++k) {
        u.slices[k] = u0;
        f.slices[k] = neg_au0;
    }
    auto phi = PhiFunction::power(0.5);
    int L0 = static_cast<int>(phi.L + 2.0) + 1;
    auto rep = check_continuity(psi, frame, u, u0, f, phi, 2.0, 2.0, WeightSpec::constant(1.0), L0);
    CHECK(std::isfinite(rep.fitted_N));
    CHECK_FALSE(rep.inconsistent);
    // no time variation: the time-only modulus and its slope vanish
    CHECK(rep.secondary_N == 0.0);
    CHECK(rep.slope == 0.0);
}

TEST_CASE("continuity check on an actual solution", "[verify]") {
    auto g = dyadic_grid();
    auto frame = build_frame(g);
    auto psi = make_fractional(2.0, TimeCoefficient::constant(1.0));
    KernelFamily fam(psi, g);
    SplitMix64 rng(23);
    TimeGrid tg(1.0, 64);
    auto u0 = random_band_limited(g, 1, 4, 2.5, rng);
    auto f = RandomForcing::make(g, 1, 4, 2.5, rng).at(tg);
    auto u = mild_solve(fam, tg, u0, f);
    auto phi = PhiFunction::power(0.5);
    auto rep = check_continuity(psi, frame, u, u0, f, phi, 2.0, 2.0, WeightSpec::constant(1.0), 4);
    CHECK(rep.fitted_N > 0.0);
    CHECK(std::isfinite(rep.fitted_N));
    CHECK(std::isfinite(rep.secondary_N));
    CHECK_FALSE(rep.inconsistent);
}

TEST_CASE("K-functional single-entry closed forms", "[verify]") {
    auto phi = PhiFunction::power(0.3);
    SequenceSpaceElement a{0, {2.0}};
    for (double t : {0.1, 1.0, 10.0}) {
        double expected = phi(1.0) * std::min(1.0, t) * 2.0;
        CHECK(k_functional(a, t, phi, 1.5, KMode::closed_form) == expected);
        CHECK(k_functional(a, t, phi, 1.5, KMode::brute_force) ==
              Catch::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("brute-force K matches a grid-search oracle on tiny windows", "[verify]") {
    auto phi = PhiFunction::power(0.3);
    double gamma = 1.0;
    SplitMix64 rng(29);
    for (int trial = 0; trial < 6; ++trial) {
        int len = 2 + int(rng.next() % 3);  // 2..4 entries
        SequenceSpaceElement a{-2 + int(rng.next() % 4), {}};
        for (int i = 0; i < len; ++i) a.entries.push_back(rng.uniform(0.1, 2.0));
        for (double t : {0.05, 0.7, 3.0, 40.0}) {
            double brute = k_functional(a, t, phi, gamma, KMode::brute_force);
            double oracle = k_oracle(a, t, phi, gamma);
            CHECK(brute == Catch::Approx(oracle).margin(1e-4 * (oracle + 1.0)));
            CHECK(brute <= oracle + 1e-12);  // oracle search can only overshoot the infimum
        }
    }
}

TEST_CASE("closed-form K is equivalent to the exact infimum", "[verify]") {
    auto phi = PhiFunction::power(0.3);
    SplitMix64 rng(31);
    SequenceSpaceElement a{-4, {}};
    for (int i = 0; i < 8; ++i) a.entries.push_back(rng.uniform(0.1, 1.5));
    for (double t : {0.01, 0.3, 1.0, 7.0, 100.0}) {
        double c = k_functional(a, t, phi, 1.0, KMode::closed_form);
        double b = k_functional(a, t, phi, 1.0, KMode::brute_force);
        double r = c / b;
        CHECK(r >= 0.4);
        CHECK(r <= 2.5);
    }
}

TEST_CASE("K-functional limits and argument validation", "[verify]") {
    auto phi = PhiFunction::power(0.3);
    SequenceSpaceElement a{0, {1.0, 0.5, 0.25}};
    // t -> inf: the infimum converges to the phi_gamma norm of a
    double sup = 0.0;
    for (int i = 0; i < 3; ++i)
        sup = std::max(sup, phi(std::pow(2.0, i)) * std::pow(2.0, 1.5 * i) * a.entries[i]);
    CHECK(k_functional(a, 1e9, phi, 1.5, KMode::brute_force) == Catch::Approx(sup).epsilon(1e-6));

    CHECK_THROWS_AS(k_functional(a, 0.0, phi, 1.5, KMode::brute_force), std::invalid_argument);
    SequenceSpaceElement big{0, std::vector<double>(20, 1.0)};
    CHECK_THROWS_AS(k_functional(big, 1.0, phi, 1.5, KMode::brute_force), std::invalid_argument);
    CHECK_NOTHROW(k_functional(big, 1.0, phi, 1.5, KMode::closed_form));
}

TEST_CASE("interpolation identity on geometric and random sequences", "[verify]") {
    auto phi = PhiFunction::power(0.5);
    std::vector<SequenceSpaceElement> corpus;
    SequenceSpaceElement geo{-4, {}};
    for (int i = 0; i < 12; ++i) geo.entries.push_back(std::pow(2.0, -(i - 4)));
    corpus.push_back(geo);
    SplitMix64 rng(37);
    for (int c = 0; c < 4; ++c) {
        SequenceSpaceElement r{-4, {}};
        for (int i = 0; i < 12; ++i)
            r.entries.push_back(rng.uniform(0.2, 1.0) * std::pow(2.0, -0.8 * (i - 4)));
        corpus.push_back(r);
    }
    auto res = check_interpolation(phi, 1.5, 2.0, WeightSpec::constant(1.0), corpus);
    REQUIRE(res.ratios.size() == corpus.size());
    for (double r : res.ratios) {
        CHECK(r > 0.0);
        CHECK(std::isfinite(r));
    }
    CHECK(res.c_lower > 0.0);
    CHECK(std::isfinite(res.c_upper));
    CHECK(res.c_upper / res.c_lower < 50.0);

    CHECK_THROWS_AS(check_interpolation(phi, 1.5, 1.0, WeightSpec::constant(1.0), corpus),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_interpolation(phi, 1.5, kInfP, WeightSpec::constant(1.0), corpus),
                    std::invalid_argument);
}

TEST_CASE("estimate report bookkeeping", "[verify]") {
    EstimateReport rep;
    rep.note("a", 1.0, 2.0);
    rep.note("b", 3.0, 2.0);
    rep.note("c", 1.0, 4.0);
    CHECK(rep.fitted_N == 1.5);
    CHECK(rep.argmax == "b");
    CHECK_FALSE(rep.inconsistent);
    rep.note("zero_bound", 1.0, 0.0);
    CHECK(rep.inconsistent);
}
