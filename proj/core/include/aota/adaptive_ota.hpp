#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aota/device_models.hpp"

namespace aota {

/// Symbol set of the adaptive-bias OTA: tail = ibias + a |i1 - i2|,
/// iout = b (i1 - i2), pair law i1 / i2 = exp(vin / (n V_T)).
struct AdaptiveBiasParams {
    double a = 0.0;
    double b = 1.0;
    double ibias = 1e-6;
    double n = 1.6;
    ThermalEnv env{};

    /// Throws std::domain_error on a < 0, b <= 0, ibias <= 0, n < 1 or a bad temperature.
    void validate() const;
    /// n * V_T, the voltage that normalizes vin.
    double slope_voltage() const;
};

struct PairCurrents {
    double i1 = 0.0;
    double i2 = 0.0;
};

/// ibias * sum_{k < terms} a^k.
double tail_current_series(double a, double ibias, int terms);

/// ibias / (1 - a); domain error unless 0 <= a < 1.
double total_tail_current(double a, double ibias);

/// Weak-inversion pair currents under adaptive biasing. Valid for 0 <= a <= 1;
/// vin < 0 swaps the roles of i1 and i2.
PairCurrents pair_currents(double vin, const AdaptiveBiasParams& p);

/// b (i1 - i2), odd in vin. a = 1 gives the unbounded limit (b ibias / 2)(e^x - 1).
double output_current(double vin, const AdaptiveBiasParams& p);

struct Fig10Row {
    double x = 0.0;              // vin / (n V_T)
    double iout_over_ibias = 0.0;
    double supply_over_ibias = 0.0; // (i1 + i2) / ibias
};

/// Normalized transfer and supply curves on `points` evenly spaced x in [-x_range, x_range].
/// The `a` argument overrides p.a.
std::vector<Fig10Row> fig10_curves(double a, const AdaptiveBiasParams& p, double x_range, int points);

std::string fig10_csv(const std::vector<Fig10Row>& rows);

/// num / den with both in [0, max_units] (den >= 1), exactly equal to value
/// within 1e-9 relative. Throws std::invalid_argument otherwise.
struct MirrorRatio {
    int num = 1;
    int den = 1;
};
MirrorRatio realize_ratio(double value, int max_units = 64);

/// Low-threshold PMOS card (vt0 = -0.5 V, otherwise default_pmos()) used for
/// the input pair so a 2 V supply leaves headroom for the tail device.
MosParams default_pair_pmos();

/// Transistor-level template for the basic and adaptive OTAs. Unit device
/// sizes are multiplied by the integer mirror ratios realizing a and b.
struct OtaTemplateParams {
    AdaptiveBiasParams bias{};
    double supply = 2.0;
    double load_cap = 5e-12;
    std::optional<double> input_cm; // defaults to supply / 2

    double pair_w = 400e-6, pair_l = 0.8e-6;
    double nmirror_w = 80e-6, nmirror_l = 0.8e-6;
    double pmirror_w = 16e-6, pmirror_l = 0.8e-6;
    double tail_w = 64e-6, tail_l = 0.8e-6; // m0 and its reference mb

    MosParams nmos_card = default_nmos();
    MosParams pmos_card = default_pmos();
    MosParams pair_card = default_pair_pmos();
    std::string nmos_model = "nch";
    std::string pmos_model = "pch";
    std::string pair_model = "pchin";

    /// Emit supply, input and load elements plus `.op` so the netlist runs standalone.
    bool include_testbench = true;

    void validate() const;
    double common_mode() const { return input_cm.value_or(supply / 2.0); }
};

/// Node and element names used by the generators.
namespace ota_names {
inline constexpr const char* kInp = "inp";
inline constexpr const char* kInn = "inn";
inline constexpr const char* kOut = "out";
inline constexpr const char* kVdd = "vdd";
inline constexpr const char* kGnd = "0";
inline constexpr const char* kTail = "tail";
inline constexpr const char* kBias = "pbias";
inline constexpr const char* kSupplySource = "vdd";
inline constexpr const char* kInpSource = "vinp";
inline constexpr const char* kInnSource = "vinn";
inline constexpr const char* kLoad = "cl";
inline constexpr const char* kTailSource = "ibias";
inline constexpr const char* kBiasDiode = "mb";
inline constexpr const char* kTailDevice = "m0";
inline constexpr const char* kPairI1 = "m1";
inline constexpr const char* kPairI2 = "m2";
inline constexpr const char* kInjectorA = "m18";
inline constexpr const char* kInjectorB = "m20";
inline constexpr const char* kSubtractorDiodeA = "m16";
inline constexpr const char* kSubtractorDiodeB = "m19";
} // namespace ota_names

/// Symmetric OTA: PMOS pair m1/m2 on a mirrored PMOS tail source m0, NMOS
/// diode loads, output mirrors scaled by b. The reference diode mb is fed by
/// an ideal current sink of ibias.
std::string build_basic_ota(const OtaTemplateParams& t);

/// build_basic_ota plus two current subtractors whose outputs, scaled by a,
/// are injected into the tail node. Requires 0 <= a < 1.
std::string build_adaptive_ota(const OtaTemplateParams& t);

} // namespace aota
