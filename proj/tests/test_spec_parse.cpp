#include <catch2/catch_amalgamated.hpp>

#include "lipevo/spec_parse.hpp"

using namespace lipevo;

TEST_CASE("fmt is a shortest round trip", "[parse]") {
    for (double v : {0.1, 1.0 / 3.0, 20.0, -1.5e-7, 4096.0}) {
        CHECK(std::stod(fmt(v)) == v);
    }
    CHECK(fmt(20.0) == "20");
    CHECK(fmt(0.5) == "0.5");
}

TEST_CASE("csv_field quotes only when needed", "[parse]") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("coefficient specs round trip", "[parse]") {
    auto c = parse_coefficient("const:2.5");
    CHECK(c.eval(0.3) == 2.5);
    auto pw = parse_coefficient("pw(0:1,1:4)");
    CHECK(pw.eval(0.5) == 1.0);
    CHECK(pw.eval(1.5) == 4.0);
    CHECK_THROWS_AS(parse_coefficient("lin:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_coefficient("pw(0;1)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_coefficient("const:abc"), std::invalid_argument);
}

TEST_CASE("symbol specs", "[parse]") {
    auto frac = parse_symbol("frac:gamma=1.5,a=pw(0:1,0.5:3)");
    CHECK(frac.gamma == 1.5);
    CHECK(frac.kappa == 1.0);
    CHECK(-frac(0.75, 2.0).real() == Catch::Approx(3.0 * std::pow(2.0, 1.5)));

    auto bare = parse_symbol("frac:gamma=2,a=3");
    CHECK(bare(0.0, 1.0) == cplx{-3.0, 0.0});

    auto ell1 = parse_symbol("ell:a11=2");
    CHECK(ell1.d == 1);
    CHECK(ell1(0.0, 3.0) == cplx{-18.0, 0.0});

    auto ell2 = parse_symbol("ell:a11=1,a12=0,a22=1", 2);
    CHECK(ell2.d == 2);
    CHECK(ell2(0.0, 1.0, 2.0) == cplx{-5.0, 0.0});

    CHECK_THROWS_AS(parse_symbol("frac:a=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_symbol("frac:gamma=2,b=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_symbol("ell:a11=1,a12=0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_symbol("wave:c=1"), std::invalid_argument);
    try {
        parse_symbol("frac:gamma=2,b=1");
        FAIL("expected error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    }
}

TEST_CASE("phi and weight specs", "[parse]") {
    auto ph = parse_phi("pow:0.5");
    CHECK(ph.alpha == 0.5);
    auto pl = parse_phi("powlog:0.5,1.0");
    CHECK(pl.beta == 1.0);
    CHECK_THROWS_AS(parse_phi("exp:1"), std::invalid_argument);

    CHECK(parse_weight("const:1").W(2.0) == 2.0);
    CHECK(parse_weight("pow:0.5").W(1.0) == Catch::Approx(2.0 / 3.0));
    CHECK(parse_weight("pw(0:1,1:4)").W(2.0) == Catch::Approx(5.0));
    CHECK_THROWS_AS(parse_weight("exp:1"), std::invalid_argument);
}

TEST_CASE("grid spec and p token", "[parse]") {
    auto g = parse_grid("d=1,n=512,L=10");
    CHECK(g.d == 1);
    CHECK(g.n_per_axis == 512);
    CHECK(g.half_width == 10.0);
    auto def = parse_grid("n=1024");
    CHECK(def.d == 1);
    CHECK(def.half_width == 20.0);
    CHECK_THROWS_AS(parse_grid("d=1,m=4"), std::invalid_argument);

    CHECK(std::isinf(parse_p("inf")));
    CHECK(parse_p("2") == 2.0);
    CHECK_THROWS_AS(parse_p("1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_p("zero"), std::invalid_argument);
}

TEST_CASE("config parsing with defaults, tables and comments", "[parse]") {
    std::string doc =
        "# run setup\n"
        "symbol = \"frac:gamma=1.5,a=const:1\"\n"
        "p = \"inf\"  # sup norm\n"
        "seed = 42\n"
        "\n"
        "[grid]\n"
        "n = 1024\n"
        "\n"
        "[time]\n"
        "n_t = 64\n";
    auto cfg = parse_config(doc);
    CHECK(cfg.symbol == "frac:gamma=1.5,a=const:1");
    CHECK(cfg.p == "inf");
    CHECK(std::isinf(cfg.p_value()));
    CHECK(cfg.seed == 42);
    CHECK(cfg.grid_n == 1024);
    CHECK(cfg.grid_d == 1);       // untouched defaults survive
    CHECK(cfg.grid_L == 20.0);
    CHECK(cfg.time_n_t == 64);
    CHECK(cfg.time_T == 1.0);
    CHECK(cfg.phi == "pow:0.5");

    // echo re-parses to the same configuration
    auto cfg2 = parse_config(cfg.echo());
    CHECK(cfg2.symbol == cfg.symbol);
    CHECK(cfg2.p == cfg.p);
    CHECK(cfg2.grid_n == cfg.grid_n);
    CHECK(cfg2.time_n_t == cfg.time_n_t);
    CHECK(cfg2.seed == cfg.seed);
    CHECK(cfg2.echo() == cfg.echo());
}

TEST_CASE("config errors name the offending line and key", "[parse]") {
    try {
        parse_config("symbol = \"frac:gamma=2,a=const:1\"\nfull = 1\n");
        FAIL("expected error");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("unknown key 'full'") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("[solver]\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("p = \"0.5\"\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("symbol = \"bogus\"\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("no equals sign\n"), std::invalid_argument);
}
