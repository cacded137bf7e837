#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <json.hpp>

#include "aota/adaptive_ota.hpp"
#include "aota/characterize.hpp"
#include "oracles/oracle_values.hpp"

using namespace aota;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;

// Macros that do not touch the supply get a token quiescent load so the vdd port exists.
Characterizer make(const std::string& body, CharacterizeOptions opts = {}) {
    const std::string load = body.find("vdd") == std::string::npos ? "Rq vdd 0 1g\n" : "";
    return Characterizer(parse("macro\n" + load + body), DutPorts{}, opts);
}

// Ideal gain stage referenced to a fixed mid-supply node.
const std::string kIdeal = "Vmid mid 0 1\nE1 out mid inp inn 1000\nIq vdd 0 8.4u\n";

// Transconductor into an RC pole, buffered to out: A0 = 1000, pole at 1 kHz.
std::string single_pole() {
    return fmt::format("Vmid mid 0 1\nIq vdd 0 8.4u\nG1 0 n1 inp inn 1m\nR1 n1 mid 1meg\nC1 n1 mid {}\nE2 out 0 n1 0 1\n",
                       1.0 / (2 * kPi * 1e6 * 1e3));
}

std::string two_pole(double fp2) {
    return single_pole().substr(0, single_pole().rfind("E2")) +
           fmt::format("E2 b 0 n1 0 1\nR2 b n2 1k\nC2 n2 0 {}\nE3 out 0 n2 0 1\n", 1.0 / (2 * kPi * 1e3 * fp2));
}

} // namespace

TEST_CASE("option and port validation", "[characterize]") {
    CharacterizeOptions o;
    CHECK_NOTHROW(o.validate());
    o.offset_points = 2;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    DutPorts p;
    p.supply = 0.0;
    CHECK_THROWS(p.validate());
    DutPorts missing;
    missing.out = "nope";
    CHECK_THROWS_AS(Characterizer(parse("m\n" + kIdeal), missing), PortError);
}

TEST_CASE("DUT stimulus is stripped and benches are built", "[characterize]") {
    const Characterizer ch = make(kIdeal + "Vsup vdd 0 5\nVa inp 0 1\nVb inn 0 1\nCl out 0 1p\n.op\n");
    CHECK(ch.dut().find("vsup") == nullptr);
    CHECK(ch.dut().find("va") == nullptr);
    CHECK(ch.dut().find("cl") == nullptr);
    CHECK(ch.dut().find("vmid") != nullptr);
    CHECK(ch.dut().directives.empty());
    const Circuit b = ch.open_loop_bench(0.0);
    for (const char* n : {bench_names::kVdd, bench_names::kVss, bench_names::kVd, bench_names::kVcm, bench_names::kLoad})
        CHECK(b.find(n) != nullptr);
    const Circuit f = ch.follower_bench(SourceSpec{});
    CHECK(f.find(bench_names::kVin) != nullptr);
    CHECK(f.find(bench_names::kFeedback) != nullptr);
}

TEST_CASE("offset of an ideal macro", "[characterize]") {
    const TransferResult t = make(kIdeal).dc_transfer_offset();
    CHECK_THAT(t.offset, WithinAbs(0.0, 1e-6));
    CHECK_THAT(t.gain, WithinRel(1000.0, 1e-6));
}

TEST_CASE("a series input source shows up as the offset", "[characterize]") {
    const TransferResult t = make("VOS inp x 1m\nVmid mid 0 1\nE1 out mid x inn 1000\n").dc_transfer_offset();
    CHECK_THAT(t.offset, WithinRel(1e-3, 0.01));
}

TEST_CASE("missing mid-supply crossings are reported", "[characterize]") {
    CharacterizeOptions narrow;
    narrow.offset_window = 1e-3;
    CHECK_THROWS_WITH(make("E1 out 0 inp inn 10\nRq vdd 0 1meg\n", narrow).dc_transfer_offset(),
                      ContainsSubstring("does not cross"));
    CHECK_THROWS_WITH(make("Rin inp inn 1meg\nR1 vdd out 1k\nR2 out 0 2k\n").dc_transfer_offset(),
                      ContainsSubstring("does not cross"));
}

TEST_CASE("single-pole macro UGB and phase margin", "[characterize]") {
    const AcMetrics m = make(single_pole()).ac_metrics(0.0);
    CHECK_THAT(m.dc_gain_db, WithinAbs(60.0, 0.01));
    CHECK_THAT(m.ugb_hz, WithinRel(oracle::kSinglePoleUgb, 0.01));
    CHECK_THAT(m.phase_margin_deg, WithinAbs(oracle::kSinglePolePm, 0.5));
}

TEST_CASE("two-pole macro phase margin", "[characterize]") {
    const AcMetrics m = make(two_pole(oracle::kTwoPoleFp2)).ac_metrics(0.0);
    CHECK_THAT(m.ugb_hz, WithinRel(oracle::kTwoPoleUgb, 0.01));
    CHECK_THAT(m.phase_margin_deg, WithinAbs(oracle::kTwoPolePm, 2.0));
}

TEST_CASE("no unity-gain crossing is reported", "[characterize]") {
    CharacterizeOptions o;
    o.ac_fstop = 1e4;
    CHECK_THROWS_WITH(make(single_pole(), o).ac_metrics(0.0), ContainsSubstring("no 0 dB crossing"));
}

TEST_CASE("input common-mode range", "[characterize]") {
    const double step = 2.0 / 200;
    const RangeMetrics ideal = make(kIdeal).range_metrics(0.0, 1000.0);
    CHECK(ideal.icmr == Interval{0.0, 2.0});

    const RangeMetrics clamped = make("Vmid mid 0 1\nEx x 0 inp 0 1 VMIN=0.2\nE1 out mid x inn 1000\n").range_metrics(0.0, 1000.0);
    CHECK_THAT(clamped.icmr.lo, WithinAbs(0.2, step));
    CHECK(clamped.icmr.hi == 2.0);
}

TEST_CASE("output swing of a clamped macro", "[characterize]") {
    const RangeMetrics m = make("Vmid mid 0 1\nE1 out mid inp inn 1000 VMIN=-0.9 VMAX=0.9\n").range_metrics(0.0, 1000.0);
    CHECK_THAT(m.output_swing.lo, WithinAbs(0.1, 0.02));
    CHECK_THAT(m.output_swing.hi, WithinAbs(1.9, 0.02));
}

TEST_CASE("slew rate of a current-limited integrator", "[characterize]") {
    const StepMetrics m =
        make("Vmid mid 0 1\nG1 0 n inp inn 1m ILIMIT=1u\nC1 n mid 1p\nR1 n mid 1g\nE2 out 0 n 0 1\n").step_metrics();
    CHECK_THAT(m.slew_rise, WithinRel(1e6, 0.02));
    CHECK_THAT(m.slew_fall, WithinRel(1e6, 0.02));
}

TEST_CASE("follower settling of a single-pole macro", "[characterize]") {
    const StepMetrics m = make(single_pole()).step_metrics();
    CHECK_THAT(m.settling_rise, WithinRel(oracle::kFollowerSettling, 0.05));
    CHECK_THAT(m.settling_fall, WithinRel(oracle::kFollowerSettling, 0.05));
}

TEST_CASE("rejection ratios and power", "[characterize]") {
    const RejectionMetrics sym = make(kIdeal).rejection_and_power(0.0);
    CHECK(std::isinf(sym.cmrr_db));
    CHECK(sym.cmrr_db > 0);
    CHECK(std::isinf(sym.psrr_pos_db));
    CHECK_THAT(sym.psrr_neg_db, WithinAbs(60.0, 0.01));
    CHECK_THAT(sym.power_w, WithinRel(16.8e-6, 1e-6));

    const RejectionMetrics cm =
        make("Vmid mid 0 1\nVz z 0 1\nRa inp cm 1meg\nRb cm inn 1meg\nE2 y mid cm z 1\nE1 out y inp inn 1000\n")
            .rejection_and_power(0.0);
    CHECK_THAT(cm.cmrr_db, WithinAbs(60.0, 0.01));
}

TEST_CASE("full report on a macro is complete and deterministic", "[characterize]") {
    const Characterizer ch = make(single_pole());
    const CharacterizationReport a = ch.full_report();
    CHECK(a.complete());
    CHECK(a.errors.empty());
    CharacterizeOptions serial;
    serial.parallel = false;
    const CharacterizationReport b = make(single_pole(), serial).full_report();
    CHECK(to_json(a) == to_json(b));
    CHECK(to_json(a) == to_json(ch.full_report()));

    const auto j = nlohmann::json::parse(to_json(a));
    for (const auto& name : report_field_names()) CHECK(j.contains(name));
    CHECK(j["icmr"].is_array());
    CHECK(j["infinite"] == nlohmann::json{"cmrr_db", "psrr_pos_db"});
    CHECK_THAT(to_table(a), ContainsSubstring("Parameter"));
}

TEST_CASE("failed stages leave NaN fields with errors", "[characterize]") {
    const CharacterizationReport r = make("Rin inp inn 1meg\nR1 vdd out 1k\nR2 out 0 2k\n").full_report();
    CHECK_FALSE(r.complete());
    CHECK(r.errors.count("input_offset_v") == 1);
    CHECK(std::isnan(r.input_offset_v));
    const auto j = nlohmann::json::parse(to_json(r));
    CHECK(j["input_offset_v"].is_null());
}

TEST_CASE("transistor OTA: offset nulls the output and adaptive bias boosts slew", "[characterize]") {
    OtaTemplateParams t;
    t.include_testbench = false;
    const Characterizer basic(parse(build_basic_ota(t)), DutPorts{});
    const TransferResult tr = basic.dc_transfer_offset();
    const FlatCircuit fc = elaborate(basic.open_loop_bench(tr.offset));
    const OperatingPoint op = dc_operating_point(fc);
    CHECK_THAT(node_voltage(fc, op, "out"), WithinAbs(1.0, 0.01));

    t.bias.a = 0.75;
    const Characterizer adaptive(parse(build_adaptive_ota(t)), DutPorts{});
    t.bias.a = 0.0;
    const Characterizer plain(parse(build_adaptive_ota(t)), DutPorts{});
    const StepMetrics s0 = plain.step_metrics(), s1 = adaptive.step_metrics();
    CHECK(s1.slew_rise / s0.slew_rise > 3.0);
    CHECK(s1.slew_fall / s0.slew_fall > 3.0);
    const double p0 = plain.rejection_and_power(0.0).power_w, p1 = adaptive.rejection_and_power(0.0).power_w;
    CHECK_THAT(p1, WithinRel(p0, 0.05));
}
