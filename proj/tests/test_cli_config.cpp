#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>

#include "smlab/io.hpp"
#include "smlab/pathfunc.hpp"
#include "smlab/verify.hpp"

using namespace smlab;

TEST_CASE("scenario presets build valid initial states") {
    const GridSpec g{12.0, 256, Boundary::ClampDrift};
    for (const auto& name :
         {"free_packet", "harmonic_ground", "harmonic_coherent", "ou_feynman_kac"}) {
        const auto sc = make_scenario(name, g);
        CHECK(sc.initial.size() == 256);
        CHECK(scenario_known(name));
    }
    CHECK_THROWS_AS(make_scenario("nope", g), std::invalid_argument);
    CHECK_FALSE(scenario_known("nope"));
}

TEST_CASE("full-precision formatting round-trips") {
    for (double v : {0.1, -3.14159265358979, 1e-300, 6.02214076e23}) {
        const double back = std::stod(fmt17(v));
        CHECK(back == v);
    }
}

TEST_CASE("record CSV layout") {
    const GridSpec g{12.0, 16, Boundary::ClampDrift};
    PhysConfig cfg;
    cfg.dt = 0.1;
    const auto rec = make_record(
        [](double x, double t) { return cplx{x, t}; }, g, cfg, RecordKind::Schrodinger,
        0.0, 0.2);
    std::ostringstream os;
    record_to_csv(rec, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,re,im");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3 * 16);
}

TEST_CASE("identical seeds reproduce identical artifacts") {
    const GridSpec g{12.0, 64, Boundary::ClampDrift};
    PhysConfig cfg;
    cfg.dt = 0.01;
    const auto rec = make_record(
        [](double x, double) { return cplx{std::exp(-x * x / 2.0), 0.0}; }, g, cfg,
        RecordKind::Heat, 0.0, 0.1);
    DriftTable drifts(rec);
    std::ostringstream a, b;
    const auto pa = simulate_forward(drifts, 100, 0.01, 7);
    const auto pb = simulate_forward(drifts, 100, 0.01, 7);
    ensemble_summary_csv(pa, a, {0.05}, 8, -4.0, 4.0);
    ensemble_summary_csv(pb, b, {0.05}, 8, -4.0, 4.0);
    CHECK(a.str() == b.str());
    CHECK(!a.str().empty());
}

TEST_CASE("binary dump layout") {
    const GridSpec g{12.0, 64, Boundary::ClampDrift};
    PhysConfig cfg;
    cfg.dt = 0.01;
    const auto rec = make_record(
        [](double x, double) { return cplx{std::exp(-x * x / 2.0), 0.0}; }, g, cfg,
        RecordKind::Heat, 0.0, 0.05);
    DriftTable drifts(rec);
    const auto pe = simulate_forward(drifts, 10, 0.01, 3);
    std::ostringstream os(std::ios::binary);
    write_paths_binary(pe, os);
    const std::string blob = os.str();
    CHECK(blob.size() == 24 + 10 * 6 * 8);
    std::uint64_t np = 0;
    std::memcpy(&np, blob.data(), 8);
    CHECK(np == 10);
    double dt = 0.0;
    std::memcpy(&dt, blob.data() + 16, 8);
    CHECK(dt == 0.01);
}

TEST_CASE("residual reports serialize to JSON") {
    ResidualReport rep{"demo", 1.5e-4, 1e-3, true, 1024, 12.0, 1e-3};
    const std::string j = rep.to_json();
    CHECK(j.find("\"check\":\"demo\"") != std::string::npos);
    CHECK(j.find("\"pass\":true") != std::string::npos);
    CHECK(j.find("\"n_points\":1024") != std::string::npos);
}
