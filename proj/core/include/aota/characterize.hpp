#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "aota/engine.hpp"
#include "aota/netlist.hpp"

namespace aota {

/// Port convention of a device under test. Node names are matched
/// case-insensitively against the netlist.
struct DutPorts {
    std::string inp = "inp";
    std::string inn = "inn";
    std::string out = "out";
    std::string vdd = "vdd";
    std::string gnd = "0";
    double supply = 2.0;    // V
    double load_cap = 5e-12; // F

    void validate() const;
};

class CharacterizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A port names a node missing from the netlist. Raised before any simulation.
class PortError : public CharacterizationError {
public:
    using CharacterizationError::CharacterizationError;
};

struct CharacterizeOptions {
    SolverOptions solver{};
    double offset_window = 0.1; // V, half-width of the differential sweep
    int offset_points = 201;
    int offset_refinements = 2;
    double ac_fstart = 1.0;
    double ac_fstop = 1e9;
    int ac_points_per_decade = 20;
    double rejection_frequency = 10.0;
    double icmr_tolerance = 10e-3; // V, follower error
    int icmr_points = 201;
    int swing_points = 401;
    double step_fraction = 0.6;     // of supply, centered at mid-supply
    double step_width = 1e-6;       // initial plateau width, s
    int step_samples = 1000;        // time steps per plateau
    int step_widenings = 6;         // x4 each
    bool parallel = true;

    void validate() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct TransferResult {
    SweepResult curve; // v(out) etc. against the differential input
    double offset = 0.0;
    double gain = 0.0; // dvout/dvin at the crossing
};

struct AcMetrics {
    double dc_gain_db = 0.0;
    double ugb_hz = 0.0;
    double phase_margin_deg = 0.0;
    AcResult response;
};

struct RangeMetrics {
    Interval icmr;
    Interval output_swing;
    SweepResult follower_curve;
    SweepResult swing_curve;
    std::vector<std::string> warnings;
};

struct StepMetrics {
    double slew_rise = 0.0;     // V/s
    double slew_fall = 0.0;     // V/s
    double settling_rise = 0.0; // s
    double settling_fall = 0.0; // s
    TransientResult trace;
};

struct RejectionMetrics {
    double cmrr_db = 0.0; // +inf when the common-mode response vanishes
    double psrr_pos_db = 0.0;
    double psrr_neg_db = 0.0;
    double power_w = 0.0;
};

/// One field per metric. Fields that could not be measured are NaN and have
/// an entry in `errors`.
struct CharacterizationReport {
    double dc_gain_db;
    double ugb_hz;
    double phase_margin_deg;
    double input_offset_v;
    Interval icmr;
    Interval output_swing;
    double slew_rise_v_per_s;
    double slew_fall_v_per_s;
    double settling_rise_s;
    double settling_fall_s;
    double cmrr_db;
    double psrr_pos_db;
    double psrr_neg_db;
    double power_w;

    std::map<std::string, std::string> errors; // field name -> message
    std::vector<std::string> warnings;

    CharacterizationReport();
    /// Every field measured, finite (rejection ratios may be +inf) and ordered.
    bool complete() const;
};

/// The 14 serialized field names, in report order.
const std::vector<std::string>& report_field_names();

/// Builds test benches around a DUT netlist. Independent V sources tying
/// inp, inn or vdd to ground and load capacitors on out are removed from the
/// DUT; the benches supply their own. The ground port is driven through a 0 V
/// source so the negative rail can carry an AC perturbation.
class Characterizer {
public:
    Characterizer(const Circuit& dut, DutPorts ports, CharacterizeOptions opts = {});

    const Circuit& dut() const { return dut_; }
    const DutPorts& ports() const { return ports_; }

    /// Open-loop differential sweep at mid-supply common mode.
    TransferResult dc_transfer_offset() const;
    /// Open-loop AC with the differential input held at `offset`.
    AcMetrics ac_metrics(double offset) const;
    RangeMetrics range_metrics(double offset, double gain) const;
    /// Unity-gain follower driven by a pulse.
    StepMetrics step_metrics() const;
    RejectionMetrics rejection_and_power(double offset) const;

    CharacterizationReport full_report() const;

    // Bench builders, exposed for inspection and tests.
    enum class AcDrive { None, Differential, CommonMode, PositiveSupply, NegativeSupply };
    Circuit open_loop_bench(double vd, AcDrive drive = AcDrive::None) const;
    Circuit follower_bench(const SourceSpec& input) const;

private:
    Circuit dut_;
    DutPorts ports_;
    CharacterizeOptions opts_;
};

/// Element and node names used by the benches.
namespace bench_names {
inline constexpr const char* kVdd = "v__vdd";
inline constexpr const char* kVss = "v__vss";
inline constexpr const char* kVd = "v__vd";
inline constexpr const char* kVcm = "v__vcm";
inline constexpr const char* kVin = "v__vin";
inline constexpr const char* kFeedback = "v__fb";
inline constexpr const char* kLoad = "c__load";
inline constexpr const char* kVssNode = "__vss";
} // namespace bench_names

/// JSON object with the field names above; intervals are [lo, hi], NaN and
/// infinities are null, listed under "infinite" (for +inf) and "errors".
std::string to_json(const CharacterizationReport& r);

/// Two-column "Parameter / Simulated Value" table.
std::string to_table(const CharacterizationReport& r);

} // namespace aota
