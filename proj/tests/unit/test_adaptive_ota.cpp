#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "aota/adaptive_ota.hpp"
#include "aota/engine.hpp"
#include "aota/netlist.hpp"
#include "oracles/oracle_values.hpp"

using namespace aota;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

AdaptiveBiasParams params(double a, double b = 1.0) {
    AdaptiveBiasParams p;
    p.a = a;
    p.b = b;
    return p;
}

double ratio(double vin, const AdaptiveBiasParams& p) { return output_current(vin, p) / p.ibias; }

struct Solved {
    FlatCircuit fc;
    OperatingPoint op;
    double id(const char* name) const { return std::abs(op.device(name)->id); }
};

Solved solve(const std::string& netlist) {
    Solved s{elaborate(parse(netlist)), {}};
    s.op = dc_operating_point(s.fc);
    return s;
}

} // namespace

TEST_CASE("parameter validation", "[ota]") {
    CHECK_NOTHROW(params(0.5).validate());
    CHECK_THROWS_AS(params(-0.1).validate(), std::domain_error);
    CHECK_THROWS_AS(params(0.5, 0.0).validate(), std::domain_error);
    AdaptiveBiasParams p;
    p.ibias = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p = {};
    p.n = 0.9;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    CHECK_THAT(AdaptiveBiasParams{}.slope_voltage(), WithinRel(1.6 * oracle::kVt300, 1e-15));
}

TEST_CASE("tail current series converges to the closed form", "[ota]") {
    CHECK(tail_current_series(0.5, 1e-6, 1) == 1e-6);
    CHECK_THAT(tail_current_series(0.5, 1e-6, 3), WithinRel(1.75e-6, 1e-15));
    CHECK_THAT(tail_current_series(0.5, 1e-6, 60), WithinRel(total_tail_current(0.5, 1e-6), 1e-15));
    CHECK_THAT(total_tail_current(0.75, 1e-6), WithinRel(4e-6, 1e-15));
    CHECK_THROWS_AS(total_tail_current(1.0, 1e-6), std::domain_error);
    CHECK_THROWS_AS(tail_current_series(0.5, 1e-6, 0), std::domain_error);
}

TEST_CASE("pair currents match the fixed-point reference", "[ota]") {
    AdaptiveBiasParams p = params(0.5);
    const PairCurrents pc = pair_currents(2.0 * p.slope_voltage(), p);
    CHECK_THAT(pc.i1, WithinRel(oracle::kPairI1_x2_a05, 1e-12));
    CHECK_THAT(pc.i2, WithinRel(oracle::kPairI2_x2_a05, 1e-12));
    const PairCurrents neg = pair_currents(-2.0 * p.slope_voltage(), p);
    CHECK(neg.i1 == pc.i2);
    CHECK(neg.i2 == pc.i1);
}

TEST_CASE("pair currents satisfy the bias identity and the exponential law", "[ota]") {
    for (double a : {0.0, 0.3, 0.5, 0.9}) {
        const AdaptiveBiasParams p = params(a);
        for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5}) {
            const PairCurrents pc = pair_currents(x * p.slope_voltage(), p);
            CHECK_THAT(pc.i1 + pc.i2, WithinRel(p.ibias + a * std::abs(pc.i1 - pc.i2), 1e-12));
            CHECK_THAT(pc.i1 / pc.i2, WithinRel(std::exp(x), 1e-12));
        }
    }
}

TEST_CASE("A = 0 gives the tanh law", "[ota]") {
    const AdaptiveBiasParams p = params(0.0);
    for (int k = 0; k < 20; ++k) {
        const double x = -5.0 + 10.0 * k / 19.0;
        CHECK_THAT(ratio(x * p.slope_voltage(), p), WithinAbs(std::tanh(x / 2.0), 1e-9));
    }
}

TEST_CASE("transfer matches the fixed-point reference", "[ota]") {
    const double* refs[] = {oracle::kTransfer_a0, oracle::kTransfer_a05, oracle::kTransfer_a09};
    const double as[] = {0.0, 0.5, 0.9};
    for (int j = 0; j < 3; ++j) {
        const AdaptiveBiasParams p = params(as[j]);
        for (std::size_t i = 0; i < std::size(oracle::kTransferX); ++i)
            CHECK_THAT(ratio(oracle::kTransferX[i] * p.slope_voltage(), p), WithinRel(refs[j][i], 1e-12));
    }
}

TEST_CASE("A = 1 is the unbounded limit", "[ota]") {
    const AdaptiveBiasParams p = params(1.0);
    CHECK_THAT(ratio(std::log(3.0) * p.slope_voltage(), p), WithinRel(1.0, 1e-12));
    CHECK_THAT(ratio(10.0 * p.slope_voltage(), p), WithinRel(0.5 * std::expm1(10.0), 1e-12));
    CHECK_THROWS_AS(output_current(0.01, params(1.5)), std::domain_error);
}

TEST_CASE("small-signal slope is independent of A", "[ota]") {
    for (double a : {0.0, 0.5, 0.9}) {
        const AdaptiveBiasParams p = params(a, 2.0);
        const double h = 1e-6 * p.slope_voltage();
        const double slope = (output_current(h, p) - output_current(-h, p)) / (2.0 * h);
        CHECK_THAT(slope, WithinRel(p.b * p.ibias / (2.0 * p.slope_voltage()), 1e-6));
    }
}

TEST_CASE("transfer is odd and monotonic", "[ota]") {
    for (double a : {0.0, 0.6, 1.0}) {
        const AdaptiveBiasParams p = params(a);
        double prev = -INFINITY;
        for (int k = -40; k <= 40; ++k) {
            const double vin = 0.1 * k * p.slope_voltage();
            const double i = output_current(vin, p);
            CHECK(i == -output_current(-vin, p));
            CHECK(i > prev);
            prev = i;
        }
        CHECK(output_current(0.0, p) == 0.0);
    }
    CHECK_THROWS_AS(output_current(NAN, params(0.2)), std::domain_error);
}

TEST_CASE("normalized curves", "[ota]") {
    const auto rows = fig10_curves(0.5, {}, 8.0, 201);
    REQUIRE(rows.size() == 201);
    CHECK(rows.front().x == -8.0);
    CHECK(rows[100].x == 0.0);
    CHECK(rows.back().x == 8.0);
    CHECK(rows[100].iout_over_ibias == 0.0);
    CHECK_THAT(rows[100].supply_over_ibias, WithinRel(1.0, 1e-12));
    CHECK_THAT(rows.back().supply_over_ibias, WithinRel(2.0, 1e-3));
    const std::string csv = fig10_csv(rows);
    CHECK(csv.rfind("x,iout_over_ibias,supply_over_ibias\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 202);
    CHECK_THROWS_AS(fig10_curves(1.2, {}, 8.0, 11), std::domain_error);
    CHECK_THROWS_AS(fig10_curves(0.5, {}, 8.0, 1), std::invalid_argument);
}

TEST_CASE("mirror ratios", "[ota]") {
    const MirrorRatio two = realize_ratio(2.0);
    CHECK(two.num == 2);
    CHECK(two.den == 1);
    const MirrorRatio third = realize_ratio(1.0 / 3.0);
    CHECK(third.num == 1);
    CHECK(third.den == 3);
    const MirrorRatio a = realize_ratio(0.75);
    CHECK(a.num == 3);
    CHECK(a.den == 4);
    CHECK(realize_ratio(0.0).num == 0);
    CHECK_THROWS_AS(realize_ratio(std::sqrt(2.0)), std::invalid_argument);
    CHECK_THROWS_AS(realize_ratio(100.0), std::invalid_argument);
}

TEST_CASE("generated netlists parse and name their devices", "[ota]") {
    OtaTemplateParams t;
    const std::string basic = build_basic_ota(t);
    const Circuit cb = parse(basic);
    for (const char* n : {"m0", "mb", "m1", "m2", "m3", "m4", "m5", "m6", "m7", "m8", "ibias", "vdd", "cl"})
        CHECK(cb.find(n) != nullptr);
    CHECK(cb.find("m18") == nullptr);

    t.bias.a = 0.5;
    const Circuit ca = parse(build_adaptive_ota(t));
    for (const char* n : {"m9", "m10", "m11", "m12", "m13", "m14", "m15", "m16", "m17", "m18", "m19", "m20"})
        CHECK(ca.find(n) != nullptr);
    CHECK_THAT(build_adaptive_ota(t), ContainsSubstring("adaptive-bias OTA"));

    t.bias.a = 0.0;
    CHECK(parse(build_adaptive_ota(t)).find("m18") == nullptr);
    t.bias.a = 1.0;
    CHECK_THROWS_AS(build_adaptive_ota(t), std::domain_error);

    OtaTemplateParams bad;
    bad.pair_w = -1.0;
    CHECK_THROWS_AS(build_basic_ota(bad), std::domain_error);
    bad = {};
    bad.pair_card = default_nmos();
    CHECK_THROWS_AS(build_basic_ota(bad), std::domain_error);
    bad = {};
    bad.bias.b = std::sqrt(2.0);
    CHECK_THROWS_AS(build_basic_ota(bad), std::invalid_argument);

    OtaTemplateParams bare;
    bare.include_testbench = false;
    const Circuit cc = parse(build_basic_ota(bare));
    CHECK(cc.find("vdd") == nullptr);
    CHECK(cc.directives.empty());
}

TEST_CASE("basic OTA splits the tail current evenly", "[ota]") {
    const OtaTemplateParams t;
    const Solved s = solve(build_basic_ota(t));
    const double ib = t.bias.ibias;
    CHECK_THAT(s.id("m1"), WithinRel(ib / 2, 0.05));
    CHECK_THAT(s.id("m2"), WithinRel(ib / 2, 0.05));
    CHECK_THAT(s.id("m0"), WithinRel(ib, 0.05));
    CHECK(check_kcl(s.fc, s.op).ok());
}

TEST_CASE("adaptive OTA at rest keeps the subtractors idle", "[ota]") {
    for (double a : {0.0, 0.5, 0.75}) {
        OtaTemplateParams t;
        t.bias.a = a;
        const Solved s = solve(build_adaptive_ota(t));
        const double ib = t.bias.ibias;
        INFO("a = " << a);
        CHECK_THAT(s.id("m0"), WithinRel(ib, 0.05));
        CHECK(s.id("m16") < 0.02 * ib);
        CHECK(s.id("m19") < 0.02 * ib);
    }
}

TEST_CASE("adaptive OTA overdrive raises the tail current to ibias / (1 - A)", "[ota]") {
    for (double a : {0.5, 0.75}) {
        OtaTemplateParams t;
        t.bias.a = a;
        Circuit c = parse(build_adaptive_ota(t));
        c.find(ota_names::kInpSource)->source().dc = t.common_mode() + 0.2;
        const FlatCircuit fc = elaborate(c);
        const OperatingPoint op = dc_operating_point(fc);
        const double tail = std::abs(op.device("m0")->id) + std::abs(op.device("m18")->id) +
                            std::abs(op.device("m20")->id);
        INFO("a = " << a);
        CHECK_THAT(tail, WithinRel(total_tail_current(a, t.bias.ibias), 0.10));
        CHECK(check_kcl(fc, op).ok());
    }
}
