#include <catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "aota/device_models.hpp"
#include "oracles/oracle_values.hpp"

using namespace aota;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ThermalEnv kRoom{};

MosParams ideal_nmos(double w = 10e-6, double l = 1e-6) {
    MosParams p = default_nmos(w, l);
    p.lambda = 0.0;
    return p;
}

// vg that places vp - vs at `u` thermal voltages with vs = 0.
double gate_for(const MosParams& p, double u) {
    return p.vt0 + p.n * u * thermal_voltage(kRoom);
}

} // namespace

TEST_CASE("thermal voltage from the CODATA constants", "[device]") {
    CHECK_THAT(thermal_voltage(kRoom), WithinRel(oracle::kVt300, 1e-14));
    CHECK_THAT(thermal_voltage(kRoom) * 1e3, WithinAbs(25.852, 5e-4));
    CHECK_THAT(thermal_voltage(ThermalEnv{600.0}), WithinRel(2.0 * thermal_voltage(kRoom), 1e-15));
    CHECK_THAT(thermal_voltage(ThermalEnv{600.0}), WithinRel(oracle::kVt600, 1e-14));
    CHECK_THROWS_AS(thermal_voltage(ThermalEnv{0.0}), std::domain_error);
    CHECK_THROWS_AS(thermal_voltage(ThermalEnv{-4.0}), std::domain_error);
    CHECK_THROWS_AS(thermal_voltage(ThermalEnv{NAN}), std::domain_error);
}

TEST_CASE("parameter validation", "[device]") {
    CHECK_NOTHROW(default_nmos().validate());
    CHECK_NOTHROW(default_pmos().validate());
    MosParams p = default_nmos();
    p.w = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p = default_nmos();
    p.n = 0.9;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p = default_nmos();
    p.lambda = -0.1;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p = default_nmos();
    p.kp = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    CHECK(default_nmos().specific_current(kRoom) > 0.0);
}

TEST_CASE("drain current matches the high-precision reference", "[device]") {
    for (const auto& pt : oracle::kDrainCurrentPoints) {
        const MosParams p = pt.nmos ? default_nmos(pt.w, pt.l) : default_pmos(pt.w, pt.l);
        INFO("vg=" << pt.vg << " vs=" << pt.vs << " vd=" << pt.vd);
        CHECK_THAT(drain_current(p, pt.vg, pt.vs, pt.vd, kRoom).id, WithinRel(pt.id, 1e-12));
    }
}

TEST_CASE("zero current at vds = 0", "[device]") {
    for (double vg : {-1.0, 0.0, 0.3, 0.7, 1.5, 3.0}) {
        CHECK(drain_current(default_nmos(), vg, 0.4, 0.4, kRoom).id == 0.0);
        CHECK(drain_current(default_pmos(), vg, 1.1, 1.1, kRoom).id == 0.0);
    }
}

TEST_CASE("non-finite terminal voltages are rejected", "[device]") {
    CHECK_THROWS_AS(drain_current(default_nmos(), NAN, 0, 1, kRoom), std::domain_error);
    CHECK_THROWS_AS(drain_current(default_nmos(), 1, INFINITY, 1, kRoom), std::domain_error);
}

TEST_CASE("polarity mirroring", "[device]") {
    MosParams n = default_nmos();
    MosParams p = n;
    p.polarity = Polarity::Pmos;
    p.vt0 = -n.vt0;
    for (double vg : {0.2, 0.8, 1.6})
        for (double vd : {0.05, 0.5, 1.8}) {
            const DeviceEval en = drain_current(n, vg, 0.1, vd, kRoom);
            const DeviceEval ep = drain_current(p, -vg, -0.1, -vd, kRoom);
            CHECK_THAT(en.id, WithinRel(-ep.id, 1e-14));
            CHECK_THAT(en.gm, WithinRel(ep.gm, 1e-14));
            CHECK_THAT(en.gds, WithinRel(ep.gds, 1e-14));
        }
}

TEST_CASE("analytic derivatives match central differences", "[device]") {
    const double h = 1e-6;
    auto check = [&](const MosParams& p, double vg, double vs, double vd) {
        const DeviceEval e = drain_current(p, vg, vs, vd, kRoom);
        const double fd_g =
            (drain_current(p, vg + h, vs, vd, kRoom).id - drain_current(p, vg - h, vs, vd, kRoom).id) / (2 * h);
        const double fd_s =
            (drain_current(p, vg, vs + h, vd, kRoom).id - drain_current(p, vg, vs - h, vd, kRoom).id) / (2 * h);
        const double fd_d =
            (drain_current(p, vg, vs, vd + h, kRoom).id - drain_current(p, vg, vs, vd - h, kRoom).id) / (2 * h);
        INFO("vg=" << vg << " vs=" << vs << " vd=" << vd);
        CHECK_THAT(e.gm, WithinRel(fd_g, 1e-4));
        CHECK_THAT(e.gms, WithinRel(-fd_s, 1e-4));
        CHECK_THAT(e.gds, WithinRel(fd_d, 1e-4));
    };
    // Weak (vg ~ 0.3), moderate (~0.7) and strong (>= 1.2) inversion, both polarities.
    for (double vg : {0.3, 0.5, 0.7, 0.9, 1.2, 2.0})
        for (double vd : {0.05, 0.3, 1.0, 2.0}) {
            check(default_nmos(), vg, 0.0, vd);
            check(default_nmos(), vg, 0.1, vd + 0.1);
            check(default_pmos(), 2.0 - vg - 0.2, 2.0, 2.0 - vd);
        }
}

TEST_CASE("current and gm are monotone and smooth in vg", "[device]") {
    const MosParams p = default_nmos();
    double prev_id = -1.0, prev_gm = -1.0;
    for (double vg = -0.5; vg <= 3.0; vg += 1e-3) {
        const DeviceEval e = drain_current(p, vg, 0.0, 1.5, kRoom);
        CHECK(e.id > prev_id);
        CHECK(e.gm > prev_gm);
        CHECK(e.gm >= 0.0);
        CHECK(e.gds >= 0.0);
        prev_id = e.id;
        prev_gm = e.gm;
    }
}

TEST_CASE("weak inversion: one decade per n VT ln10", "[device]") {
    const MosParams p = ideal_nmos();
    const double vt = thermal_voltage(kRoom);
    const double vd = 8.0 * vt;
    for (double u : {-20.0, -25.0, -30.0}) {
        const double vg = gate_for(p, u);
        const double i0 = drain_current(p, vg, 0.0, vd, kRoom).id;
        const double i1 = drain_current(p, vg + p.n * vt * std::log(10.0), 0.0, vd, kRoom).id;
        CHECK_THAT(i1 / i0, WithinRel(10.0, 0.01));
    }
}

TEST_CASE("gm/id plateau and monotone decrease", "[device]") {
    const MosParams p = ideal_nmos();
    const double vt = thermal_voltage(kRoom);
    const double vd = 3.0;
    const DeviceEval deep = drain_current(p, gate_for(p, -20.0), 0.0, vd, kRoom);
    CHECK_THAT(deep.gm / deep.id, WithinRel(1.0 / (p.n * vt), 0.02));

    double prev = INFINITY;
    for (double u = -20.0; u <= 40.0; u += 0.25) {
        const DeviceEval e = drain_current(p, gate_for(p, u), 0.0, vd, kRoom);
        const double ratio = e.gm / e.id;
        CHECK(ratio <= prev * (1.0 + 1e-12));
        prev = ratio;
    }
}

TEST_CASE("strong-inversion square-law asymptote", "[device]") {
    const MosParams p = ideal_nmos();
    const double vt = thermal_voltage(kRoom);
    const double ispec = p.specific_current(kRoom);
    for (double u : {15.0, 20.0, 30.0}) {
        const double vg = gate_for(p, u);
        const double id = drain_current(p, vg, 0.0, 3.0, kRoom).id;
        CHECK_THAT(id, WithinRel(ispec * std::pow(u * vt / (2.0 * vt), 2.0), 0.02));
    }
}

TEST_CASE("matched weak-inversion pair follows the exponential ratio law", "[device]") {
    const MosParams p = ideal_nmos(100e-6, 1e-6);
    const double vt = thermal_voltage(kRoom);
    const double vs = 0.3;
    const double vg_mid = vs + p.vt0 - 20.0 * p.n * vt;
    for (double vin : {-0.1, -0.04, 0.01, 0.05, 0.1}) {
        const double i1 = drain_current(p, vg_mid + vin / 2, vs, 1.5, kRoom).id;
        const double i2 = drain_current(p, vg_mid - vin / 2, vs, 1.5, kRoom).id;
        CHECK_THAT(i1 / i2, WithinRel(std::exp(vin / (p.n * vt)), 0.01));
    }
}

TEST_CASE("channel-length modulation scales the current", "[device]") {
    MosParams p = default_nmos();
    const double base = drain_current(ideal_nmos(), 1.2, 0.0, 1.5, kRoom).id;
    CHECK_THAT(drain_current(p, 1.2, 0.0, 1.5, kRoom).id, WithinRel(base * (1.0 + 0.02 * 1.5), 1e-13));
}

TEST_CASE("pulse waveform shape", "[device]") {
    PulseWaveform w{0.0, 1.0, 1e-6, 1e-7, 2e-7, 1e-6, std::nullopt};
    CHECK(w.value_at(0.0) == 0.0);
    CHECK(w.value_at(1e-6) == 0.0);
    CHECK_THAT(w.value_at(1.05e-6), WithinAbs(0.5, 1e-12));
    CHECK(w.value_at(1.5e-6) == 1.0);
    CHECK_THAT(w.value_at(1.1e-6 + 1e-6 + 1e-7), WithinAbs(0.5, 1e-12));
    CHECK(w.value_at(5e-6) == 0.0);

    w.period = 3e-6;
    CHECK_THAT(w.value_at(4.5e-6), WithinAbs(1.0, 1e-12));
    CHECK(SourceSpec{0.7, 0.0, 0.0, w}.initial_value() == 0.0);
    CHECK(SourceSpec{0.7}.value_at(3.0) == 0.7);
}

TEST_CASE("capacitor companion models", "[device]") {
    const auto be = capacitor_companion(1e-9, 1e-6, 0.5, 2e-3, Integrator::BackwardEuler);
    CHECK_THAT(be.geq, WithinRel(1e-3, 1e-15));
    CHECK_THAT(be.ieq, WithinRel(0.5e-3, 1e-15));
    const auto tr = capacitor_companion(1e-9, 1e-6, 0.5, 2e-3, Integrator::Trapezoidal);
    CHECK_THAT(tr.geq, WithinRel(2e-3, 1e-15));
    CHECK_THAT(tr.ieq, WithinRel(2e-3 * 0.5 + 2e-3, 1e-15));
}
