#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lipevo/function_spaces.hpp"
#include "lipevo/grid.hpp"
#include "lipevo/symbols.hpp"
#include "lipevo/weights.hpp"

namespace lipevo {

/// Shortest round-trip decimal form of a double.
inline std::string fmt(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// CSV field quoting: wraps in double quotes when the field contains a
/// separator, quote or newline.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace detail {

inline double parse_number(const std::string& s, const std::string& what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("cannot parse number '" + s + "' in " + what);
    return v;
}

/// Splits on commas at paren depth zero.
inline std::vector<std::string> split_top(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::pair<std::string, std::string> split_kv(const std::string& s, const std::string& what) {
    auto eq = s.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("expected key=value in " + what + " at '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

}  // namespace detail

/// Time coefficient: `const:<v>` or `pw(<t0>:<v0>,<t1>:<v1>,...)`.
inline TimeCoefficient parse_coefficient(const std::string& s) {
    if (s.rfind("const:", 0) == 0)
        return TimeCoefficient::constant(detail::parse_number(s.substr(6), "coefficient"));
    if (s.rfind("pw(", 0) == 0 && s.back() == ')') {
        std::vector<double> bps, vals;
        for (const auto& part : detail::split_top(s.substr(3, s.size() - 4))) {
            auto colon = part.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("piecewise coefficient needs t:v pairs at '" + part + "'");
            bps.push_back(detail::parse_number(part.substr(0, colon), "coefficient breakpoint"));
            vals.push_back(detail::parse_number(part.substr(colon + 1), "coefficient value"));
        }
        return TimeCoefficient::piecewise(std::move(bps), std::move(vals));
    }
    throw std::invalid_argument("unknown coefficient spec '" + s + "'");
}

/// Symbol: `frac:gamma=<g>,a=<coef>` (any d) or `ell:a11=..,a12=..,a22=..`
/// (d = 2; entries are numbers or coefficient specs).
inline SymbolSpec parse_symbol(const std::string& s, int d = 1) {
    auto coef_or_number = [](const std::string& v) {
        if (v.rfind("const:", 0) == 0 || v.rfind("pw(", 0) == 0) return parse_coefficient(v);
        return TimeCoefficient::constant(detail::parse_number(v, "symbol entry"));
    };
    if (s.rfind("frac:", 0) == 0) {
        double gamma = 0.0;
        bool have_gamma = false;
        TimeCoefficient a = TimeCoefficient::constant(1.0);
        for (const auto& part : detail::split_top(s.substr(5))) {
            auto [k, v] = detail::split_kv(part, "symbol spec");
            if (k == "gamma") {
                gamma = detail::parse_number(v, "symbol gamma");
                have_gamma = true;
            } else if (k == "a") {
                a = coef_or_number(v);
            } else {
                throw std::invalid_argument("unknown symbol key '" + k + "'");
            }
        }
        if (!have_gamma) throw std::invalid_argument("symbol spec missing gamma");
        return make_fractional(gamma, std::move(a), d);
    }
    if (s.rfind("ell:", 0) == 0) {
        std::map<std::string, TimeCoefficient> entries;
        for (const auto& part : detail::split_top(s.substr(4))) {
            auto [k, v] = detail::split_kv(part, "symbol spec");
            if (k != "a11" && k != "a12" && k != "a22")
                throw std::invalid_argument("unknown symbol key '" + k + "'");
            entries.insert_or_assign(k, coef_or_number(v));
        }
        if (entries.size() == 1 && entries.count("a11"))
            return make_elliptic_matrix(1, {entries.at("a11")});
        if (entries.size() != 3)
            throw std::invalid_argument("elliptic symbol needs a11, a12, a22");
        return make_elliptic_matrix(2, {entries.at("a11"), entries.at("a12"), entries.at("a22")});
    }
    throw std::invalid_argument("unknown symbol spec '" + s + "'");
}

/// phi: `pow:<alpha>` or `powlog:<alpha>,<beta>`.
inline PhiFunction parse_phi(const std::string& s) {
    if (s.rfind("powlog:", 0) == 0) {
        auto parts = detail::split_top(s.substr(7));
        if (parts.size() != 2) throw std::invalid_argument("powlog needs alpha,beta");
        return PhiFunction::power_log(detail::parse_number(parts[0], "phi alpha"),
                                      detail::parse_number(parts[1], "phi beta"));
    }
    if (s.rfind("pow:", 0) == 0)
        return PhiFunction::power(detail::parse_number(s.substr(4), "phi alpha"));
    throw std::invalid_argument("unknown phi spec '" + s + "'");
}

/// Weight: `const:<c>`, `pow:<alpha>`, or `pw(<t0>:<v0>,...)`.
inline WeightSpec parse_weight(const std::string& s) {
    if (s.rfind("const:", 0) == 0)
        return WeightSpec::constant(detail::parse_number(s.substr(6), "weight"));
    if (s.rfind("pow:", 0) == 0)
        return WeightSpec::power(detail::parse_number(s.substr(4), "weight alpha"));
    if (s.rfind("pw(", 0) == 0 && s.back() == ')') {
        std::vector<double> bps, vals;
        for (const auto& part : detail::split_top(s.substr(3, s.size() - 4))) {
            auto colon = part.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("piecewise weight needs t:v pairs at '" + part + "'");
            bps.push_back(detail::parse_number(part.substr(0, colon), "weight breakpoint"));
            vals.push_back(detail::parse_number(part.substr(colon + 1), "weight value"));
        }
        return WeightSpec::piecewise(std::move(bps), std::move(vals));
    }
    throw std::invalid_argument("unknown weight spec '" + s + "'");
}

/// Grid: `d=1,n=4096,L=20`.
inline SpectralGrid parse_grid(const std::string& s) {
    int d = 1, n = 4096;
    double L = 20.0;
    for (const auto& part : detail::split_top(s)) {
        auto [k, v] = detail::split_kv(part, "grid spec");
        if (k == "d")
            d = static_cast<int>(detail::parse_number(v, "grid d"));
        else if (k == "n")
            n = static_cast<int>(detail::parse_number(v, "grid n"));
        else if (k == "L")
            L = detail::parse_number(v, "grid L");
        else
            throw std::invalid_argument("unknown grid key '" + k + "'");
    }
    return SpectralGrid::make(d, n, L);
}

/// `inf` token or a number in (1, inf).
inline double parse_p(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    double p = detail::parse_number(s, "p");
    if (!(p > 1.0)) throw std::invalid_argument("p must lie in (1, inf]");
    return p;
}

/// Run configuration with every field defaulted; parse_config fills from a
/// TOML-subset document and echo() prints the normalized form back.
struct RunConfig {
    std::string symbol = "frac:gamma=2,a=const:1";
    std::string phi = "pow:0.5";
    std::string weight = "const:1";
    std::string p = "2";
    int grid_d = 1;
    int grid_n = 4096;
    double grid_L = 20.0;
    double time_T = 1.0;
    int time_n_t = 256;
    int corpus_size = 10;
    int sequence_window = 12;
    std::string out = "out";
    std::uint64_t seed = 1;

    double p_value() const { return parse_p(p); }
    SpectralGrid make_grid() const { return SpectralGrid::make(grid_d, grid_n, grid_L); }
    SymbolSpec make_symbol() const { return parse_symbol(symbol, grid_d); }
    PhiFunction make_phi() const { return parse_phi(phi); }
    WeightSpec make_weight() const { return parse_weight(weight); }

    std::string echo() const {
        std::ostringstream os;
        os << "symbol = \"" << symbol << "\"\n"
           << "phi = \"" << phi << "\"\n"
           << "weight = \"" << weight << "\"\n"
           << "p = \"" << p << "\"\n"
           << "out = \"" << out << "\"\n"
           << "seed = " << seed << "\n"
           << "corpus_size = " << corpus_size << "\n"
           << "sequence_window = " << sequence_window << "\n"
           << "\n[grid]\nd = " << grid_d << "\nn = " << grid_n << "\nL = " << fmt(grid_L) << "\n"
           << "\n[time]\nT = " << fmt(time_T) << "\nn_t = " << time_n_t << "\n";
        return os.str();
    }
};

/// TOML-subset parser: `[table]` headers, `key = value` lines, string /
/// number values, `#` comments. Unknown keys are an error naming the key.
inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, table;
    int line_no = 0;
    auto trim = [](std::string s) {
        auto a = s.find_first_not_of(" \t\r");
        auto b = s.find_last_not_of(" \t\r");
        return (a == std::string::npos) ? std::string{} : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            table = trim(line.substr(1, line.size() - 2));
            if (table != "grid" && table != "time")
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": unknown table '" + table + "'");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
            val = val.substr(1, val.size() - 2);
        std::string full = table.empty() ? key : table + "." + key;
        auto num = [&] { return detail::parse_number(val, "config key " + full); };
        if (full == "symbol")
            cfg.symbol = val;
        else if (full == "phi")
            cfg.phi = val;
        else if (full == "weight")
            cfg.weight = val;
        else if (full == "p")
            cfg.p = val;
        else if (full == "out")
            cfg.out = val;
        else if (full == "seed")
            cfg.seed = static_cast<std::uint64_t>(num());
        else if (full == "corpus_size")
            cfg.corpus_size = static_cast<int>(num());
        else if (full == "sequence_window")
            cfg.sequence_window = static_cast<int>(num());
        else if (full == "grid.d")
            cfg.grid_d = static_cast<int>(num());
        else if (full == "grid.n")
            cfg.grid_n = static_cast<int>(num());
        else if (full == "grid.L")
            cfg.grid_L = num();
        else if (full == "time.T")
            cfg.time_T = num();
        else if (full == "time.n_t")
            cfg.time_n_t = static_cast<int>(num());
        else
            throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown key '" +
                                        full + "'");
    }
    // validate sub-specs eagerly so errors surface at parse time
    cfg.p_value();
    parse_phi(cfg.phi);
    parse_weight(cfg.weight);
    parse_symbol(cfg.symbol, cfg.grid_d);
    SpectralGrid::make(cfg.grid_d, cfg.grid_n, cfg.grid_L);
    return cfg;
}

}  // namespace lipevo
