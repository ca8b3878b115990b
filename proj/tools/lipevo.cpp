#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lipevo/lipevo.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& suite, const std::string& out,
            std::optional<std::uint64_t> seed) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "cannot read config file " << config_path << '\n';
        return 2;
    }
    std::ostringstream text;
    text << in.rdbuf();
    lipevo::RunConfig cfg;
    try {
        cfg = lipevo::parse_config(text.str());
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    if (!out.empty()) cfg.out = out;
    if (seed) cfg.seed = *seed;
    return lipevo::run_suite(cfg, suite);
}

int cmd_norm(const std::string& phi_spec, const std::string& p_str, const std::string& input) {
    std::ifstream in(input);
    if (!in) {
        std::cerr << "cannot read input file " << input << '\n';
        return 2;
    }
    std::vector<double> xs, re, im;
    std::string line;
    std::getline(in, line);  // header x,re,im
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b, c;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        std::getline(row, c, ',');
        xs.push_back(std::stod(a));
        re.push_back(std::stod(b));
        im.push_back(c.empty() ? 0.0 : std::stod(c));
    }
    try {
        if (xs.size() < 8) throw std::invalid_argument("need at least 8 samples");
        int n = static_cast<int>(xs.size());
        double L = -xs.front();
        lipevo::SpectralGrid g = lipevo::SpectralGrid::make(1, n, L);
        lipevo::GridFunction f(g);
        for (int i = 0; i < n; ++i) f.values[i] = lipevo::cplx{re[i], im[i]};
        lipevo::PhiFunction phi = lipevo::parse_phi(phi_spec);
        double p = lipevo::parse_p(p_str);
        lipevo::DyadicFrame frame = lipevo::build_frame(g);
        std::cout << "dyadic," << lipevo::fmt(lipevo::lipschitz_norm_dyadic(frame, f, phi, p))
                  << '\n'
                  << "direct," << lipevo::fmt(lipevo::lipschitz_norm_direct(f, phi, p)) << '\n';
    } catch (const std::exception& e) {
        std::cerr << "norm error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

int cmd_kernel(const std::string& symbol_spec, double t, double s, const std::string& grid_spec,
               const std::string& out_path) {
    try {
        lipevo::SpectralGrid g = lipevo::parse_grid(grid_spec);
        lipevo::SymbolSpec psi = lipevo::parse_symbol(symbol_spec, g.d);
        lipevo::KernelFamily family(psi, g);
        lipevo::GridFunction p = family(t, s, 0);
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot open output file " << out_path << '\n';
            return 2;
        }
        if (g.d == 1) {
            out << "t,x,re,im\n";
            for (int i = 0; i < g.n_per_axis; ++i)
                out << lipevo::fmt(t) << ',' << lipevo::fmt(g.coord(i)) << ','
                    << lipevo::fmt(p.values[i].real()) << ',' << lipevo::fmt(p.values[i].imag())
                    << '\n';
        } else {
            out << "t,x,y,re,im\n";
            std::size_t k = 0;
            for (int i = 0; i < g.n_per_axis; ++i)
                for (int j = 0; j < g.n_per_axis; ++j, ++k)
                    out << lipevo::fmt(t) << ',' << lipevo::fmt(g.coord(i)) << ','
                        << lipevo::fmt(g.coord(j)) << ',' << lipevo::fmt(p.values[k].real()) << ','
                        << lipevo::fmt(p.values[k].imag()) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "kernel error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral verification toolkit for time-measurable evolution equations"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a verification suite from a config file");
    std::string config_path, suite, out_dir;
    std::uint64_t seed_val = 0;
    bool seed_set = false;
    run->add_option("--config", config_path, "configuration file")->required();
    run->add_option("--suite", suite, "kernel|operator|apriori|trace|continuity|interpolation|all")
        ->required();
    run->add_option("--out", out_dir, "output directory override");
    run->add_option("--seed", seed_val, "corpus seed override")->each([&](const std::string&) {
        seed_set = true;
    });

    auto* norm = app.add_subcommand("norm", "evaluate Lipschitz-space norms of sampled data");
    std::string phi_spec, p_str = "inf", input_path;
    norm->add_option("--phi", phi_spec, "phi spec, e.g. pow:0.5")->required();
    norm->add_option("--p", p_str, "shell exponent or 'inf'");
    norm->add_option("--input", input_path, "CSV of samples: x,re,im")->required();

    auto* kernel = app.add_subcommand("kernel", "evaluate the fundamental solution on a grid");
    std::string symbol_spec, grid_spec = "d=1,n=4096,L=20", kernel_out = "kernel.csv";
    double t_val = 1.0, s_val = 0.0;
    kernel->add_option("--symbol", symbol_spec, "symbol spec, e.g. frac:gamma=2,a=const:1")
        ->required();
    kernel->add_option("--t", t_val, "evaluation time")->required();
    kernel->add_option("--s", s_val, "initial time");
    kernel->add_option("--grid", grid_spec, "grid spec d=..,n=..,L=..");
    kernel->add_option("--out", kernel_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return cmd_run(config_path, suite, out_dir,
                       seed_set ? std::optional<std::uint64_t>(seed_val) : std::nullopt);
    if (norm->parsed()) return cmd_norm(phi_spec, p_str, input_path);
    return cmd_kernel(symbol_spec, t_val, s_val, grid_spec, kernel_out);
}
