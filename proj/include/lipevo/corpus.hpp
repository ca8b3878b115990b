#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lipevo/function_spaces.hpp"
#include "lipevo/grid.hpp"
#include "lipevo/solver.hpp"

namespace lipevo {

/// Seeded generator with a fixed bit-level algorithm, so corpora are
/// byte-reproducible across platforms and standard library versions.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

namespace detail {

/// A grid frequency in the dyadic shell [2^{j-1}, 2^j), as per-axis integer
/// multiples of pi/L. Returns false if the shell holds no representable mode.
inline bool pick_shell_mode(const SpectralGrid& g, int j, SplitMix64& rng, int& m1, int& m2) {
    const double base = std::numbers::pi / g.half_width;
    const double lo = std::pow(2.0, j - 1), hi = std::pow(2.0, j);
    const int cap = g.n_per_axis / 2 - 1;
    if (g.d == 1) {
        int klo = static_cast<int>(std::ceil(lo / base));
        int khi = std::min(cap, static_cast<int>(std::floor(std::nextafter(hi, 0.0) / base)));
        if (klo > khi) return false;
        m1 = klo + static_cast<int>(rng.next() % std::uint64_t(khi - klo + 1));
        m2 = 0;
        return true;
    }
    int kmax = std::min(cap, static_cast<int>(std::floor(hi / base)));
    for (int attempt = 0; attempt < 64; ++attempt) {
        int a = static_cast<int>(rng.next() % std::uint64_t(kmax + 1));
        int b = static_cast<int>(rng.next() % std::uint64_t(kmax + 1));
        if (rng.next() & 1) b = -b;
        double r = base * std::hypot(double(a), double(b));
        if (r >= lo && r < hi) {
            m1 = a;
            m2 = b;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Real-valued band-limited function: per dyadic shell j in [j_lo, j_hi], a
/// few random cosine modes at exact grid frequencies with amplitude 2^{-j sigma}.
inline GridFunction random_band_limited(const SpectralGrid& g, int j_lo, int j_hi, double sigma,
                                        SplitMix64& rng, int modes_per_shell = 4) {
    GridFunction f(g);
    const double base = std::numbers::pi / g.half_width;
    for (int j = j_lo; j <= j_hi; ++j) {
        double amp = std::pow(2.0, -sigma * j);
        for (int mode = 0; mode < modes_per_shell; ++mode) {
            int m1 = 0, m2 = 0;
            if (!detail::pick_shell_mode(g, j, rng, m1, m2)) continue;
            double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
            double c = amp * rng.uniform(0.5, 1.0);
            if (g.d == 1) {
                for (int i = 0; i < g.n_per_axis; ++i)
                    f.values[i] += c * std::cos(base * m1 * g.coord(i) + theta);
            } else {
                std::size_t k = 0;
                for (int i = 0; i < g.n_per_axis; ++i)
                    for (int jj = 0; jj < g.n_per_axis; ++jj, ++k)
                        f.values[k] +=
                            c * std::cos(base * (m1 * g.coord(i) + m2 * g.coord(jj)) + theta);
            }
        }
    }
    return f;
}

/// Separable random forcing sum_m a_m(t) g_m(x) with smooth time profiles;
/// `at` samples the same continuous function on any time grid, so temporal
/// refinement is consistent.
struct RandomForcing {
    struct Component {
        GridFunction profile;
        double omega, theta;
    };
    std::vector<Component> components;

    static RandomForcing make(const SpectralGrid& g, int j_lo, int j_hi, double sigma,
                              SplitMix64& rng, int n_components = 3) {
        RandomForcing out;
        for (int m = 0; m < n_components; ++m) {
            Component c{random_band_limited(g, j_lo, j_hi, sigma, rng),
                        rng.uniform(0.0, 8.0), rng.uniform(0.0, 2.0 * std::numbers::pi)};
            out.components.push_back(std::move(c));
        }
        return out;
    }

    SpaceTimeFunction at(const TimeGrid& tg) const {
        SpaceTimeFunction f(tg, components.front().profile.grid);
        for (int k = 0; k <= tg.n_t; ++k) {
            double t = tg.node(k);
            for (const auto& c : components) {
                GridFunction term = c.profile;
                term *= cplx{std::cos(c.omega * t + c.theta), 0.0};
                f.slices[k] += term;
            }
        }
        return f;
    }
};

}  // namespace lipevo
