#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <tuple>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

namespace lipevo {

using cplx = std::complex<double>;

/// Periodic spatial grid on the torus [-L, L)^d with its frequency lattice.
///
/// Frequencies are stored in FFT bin order: bin j on an axis carries
/// xi = (pi/L) * k with k = j for j < n/2 and k = j - n otherwise, so the
/// array is symmetric about zero except for the single Nyquist mode.
struct SpectralGrid {
    int d = 1;
    int n_per_axis = 0;
    double half_width = 0.0;  // L
    double dx = 0.0;
    std::vector<double> frequencies;  // per-axis, bin order

    static SpectralGrid make(int d, int n, double L) {
        if (d != 1 && d != 2)
            throw std::invalid_argument("SpectralGrid: d must be 1 or 2");
        if (n < 8 || (n & (n - 1)) != 0)
            throw std::invalid_argument("SpectralGrid: n_per_axis must be a power of two, >= 8");
        if (!(L > 0.0))
            throw std::invalid_argument("SpectralGrid: half_width must be positive");
        SpectralGrid g;
        g.d = d;
        g.n_per_axis = n;
        g.half_width = L;
        g.dx = 2.0 * L / n;
        g.frequencies.resize(n);
        for (int j = 0; j < n; ++j) {
            int k = (j < n / 2) ? j : j - n;
            g.frequencies[j] = std::numbers::pi * k / L;
        }
        return g;
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n_per_axis);
        return s;
    }

    double coord(int idx) const { return -half_width + idx * dx; }
    double nyquist() const { return std::numbers::pi * (n_per_axis / 2) / half_width; }

    /// |xi| at a flat frequency-bin index (row-major over axes).
    double freq_abs(std::size_t flat) const {
        if (d == 1) return std::abs(frequencies[flat]);
        std::size_t n = static_cast<std::size_t>(n_per_axis);
        double a = frequencies[flat / n], b = frequencies[flat % n];
        return std::hypot(a, b);
    }

    /// Torus-periodic |x| at a flat physical index.
    double torus_abs(std::size_t flat) const {
        auto per = [this](int idx) {
            double x = std::abs(coord(idx));
            return std::min(x, 2.0 * half_width - x);
        };
        if (d == 1) return per(static_cast<int>(flat));
        std::size_t n = static_cast<std::size_t>(n_per_axis);
        double a = per(static_cast<int>(flat / n)), b = per(static_cast<int>(flat % n));
        return std::hypot(a, b);
    }

    bool operator==(const SpectralGrid& o) const {
        return d == o.d && n_per_axis == o.n_per_axis && half_width == o.half_width;
    }
};

enum class Domain { physical, frequency };

/// Complex samples over a SpectralGrid, row-major, in either space.
struct GridFunction {
    SpectralGrid grid;
    Domain domain = Domain::physical;
    std::vector<cplx> values;

    GridFunction() = default;
    GridFunction(SpectralGrid g, Domain dom = Domain::physical)
        : grid(std::move(g)), domain(dom), values(grid.size(), cplx{0.0, 0.0}) {}

    template <class F>
    static GridFunction sample(const SpectralGrid& g, F&& f) {
        GridFunction out(g);
        if (g.d == 1) {
            for (int i = 0; i < g.n_per_axis; ++i) out.values[i] = f(g.coord(i));
        } else {
            std::size_t k = 0;
            for (int i = 0; i < g.n_per_axis; ++i)
                for (int j = 0; j < g.n_per_axis; ++j) out.values[k++] = f(g.coord(i), g.coord(j));
        }
        return out;
    }

    GridFunction& operator+=(const GridFunction& o) {
        require_same(o);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
        return *this;
    }
    GridFunction& operator-=(const GridFunction& o) {
        require_same(o);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
        return *this;
    }
    GridFunction& operator*=(cplx c) {
        for (auto& v : values) v *= c;
        return *this;
    }
    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(cplx c, GridFunction a) { return a *= c; }

    void require_same(const GridFunction& o) const {
        if (!(grid == o.grid) || domain != o.domain)
            throw std::invalid_argument("GridFunction: grid or domain mismatch");
    }
};

namespace detail {

/// Cached FFTW plans per (d, n, sign). Plans use FFTW_ESTIMATE so results
/// are reproducible run to run.
inline void run_fft(int d, int n, int sign, std::vector<cplx>& data) {
    struct Key {
        int d, n, sign;
        bool operator<(const Key& o) const {
            return std::tie(d, n, sign) < std::tie(o.d, o.n, o.sign);
        }
    };
    static std::map<Key, fftw_plan> plans;
    static std::map<Key, std::vector<cplx>> buffers;
    Key key{d, n, sign};
    auto it = plans.find(key);
    if (it == plans.end()) {
        std::size_t total = (d == 1) ? n : static_cast<std::size_t>(n) * n;
        auto& buf = buffers[key];
        buf.resize(total);
        fftw_complex* ptr = reinterpret_cast<fftw_complex*>(buf.data());
        fftw_plan plan = (d == 1)
                             ? fftw_plan_dft_1d(n, ptr, ptr, sign, FFTW_ESTIMATE)
                             : fftw_plan_dft_2d(n, n, ptr, ptr, sign, FFTW_ESTIMATE);
        it = plans.emplace(key, plan).first;
    }
    auto& buf = buffers[key];
    std::copy(data.begin(), data.end(), buf.begin());
    fftw_execute(plans[key]);
    std::copy(buf.begin(), buf.end(), data.begin());
}

}  // namespace detail

/// Unitary-normalized forward transform: approximates
/// (2 pi)^{-d/2} \int f(x) e^{-i x.xi} dx on the grid's frequency lattice.
inline GridFunction forward_transform(const GridFunction& f) {
    if (f.domain != Domain::physical)
        throw std::invalid_argument("forward_transform: input must be physical-space");
    const auto& g = f.grid;
    GridFunction out = f;
    detail::run_fft(g.d, g.n_per_axis, FFTW_FORWARD, out.values);
    const double scale = std::pow(g.dx / std::sqrt(2.0 * std::numbers::pi), g.d);
    // Phase shift for the x-origin at -L: e^{-i x_m xi_k} = (-1)^k e^{-2 pi i mk/n}.
    const int n = g.n_per_axis;
    if (g.d == 1) {
        for (int j = 0; j < n; ++j) out.values[j] *= ((j & 1) ? -scale : scale);
    } else {
        std::size_t k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j, ++k) out.values[k] *= (((i + j) & 1) ? -scale : scale);
    }
    out.domain = Domain::frequency;
    return out;
}

/// Inverse of forward_transform.
inline GridFunction inverse_transform(const GridFunction& fh) {
    if (fh.domain != Domain::frequency)
        throw std::invalid_argument("inverse_transform: input must be frequency-space");
    const auto& g = fh.grid;
    GridFunction out = fh;
    const int n = g.n_per_axis;
    if (g.d == 1) {
        for (int j = 0; j < n; ++j)
            if (j & 1) out.values[j] = -out.values[j];
    } else {
        std::size_t k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j, ++k)
                if ((i + j) & 1) out.values[k] = -out.values[k];
    }
    detail::run_fft(g.d, g.n_per_axis, FFTW_BACKWARD, out.values);
    const double dxi = std::numbers::pi / g.half_width;
    const double scale = std::pow(dxi / std::sqrt(2.0 * std::numbers::pi), g.d);
    for (auto& v : out.values) v *= scale;
    out.domain = Domain::physical;
    return out;
}

/// Periodic convolution \int f(x-y) g(y) dy with trapezoid weights dx^d.
inline GridFunction convolve(const GridFunction& f, const GridFunction& g) {
    if (!(f.grid == g.grid))
        throw std::invalid_argument("convolve: grid mismatch");
    GridFunction fh = forward_transform(f);
    GridFunction gh = forward_transform(g);
    const double c = std::pow(2.0 * std::numbers::pi, f.grid.d / 2.0);
    for (std::size_t i = 0; i < fh.values.size(); ++i) fh.values[i] = c * fh.values[i] * gh.values[i];
    return inverse_transform(fh);
}

/// Quadrature L^p norm, p in {1, 2, inf} (inf encoded as infinity()).
inline double lp_norm(const GridFunction& f, double p) {
    const double cell = std::pow(f.grid.dx, f.grid.d);
    if (p == 1.0) {
        double s = 0.0;
        for (const auto& v : f.values) s += std::abs(v);
        return s * cell;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (const auto& v : f.values) s += std::norm(v);
        return std::sqrt(s * cell);
    }
    if (std::isinf(p)) {
        double s = 0.0;
        for (const auto& v : f.values) s = std::max(s, std::abs(v));
        return s;
    }
    throw std::invalid_argument("lp_norm: p must be 1, 2 or inf");
}

inline double linf_norm(const GridFunction& f) { return lp_norm(f, std::numeric_limits<double>::infinity()); }

}  // namespace lipevo
