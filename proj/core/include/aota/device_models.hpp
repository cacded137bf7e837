#pragma once

#include <optional>

namespace aota {

// CODATA values used throughout the toolkit.
inline constexpr double kBoltzmann = 1.380649e-23;        // J/K
inline constexpr double kElementaryCharge = 1.602177e-19; // C

struct ThermalEnv {
    double temperature = 300.0; // kelvin
};

/// kT/q in volts. Throws std::domain_error for a non-positive or non-finite temperature.
double thermal_voltage(const ThermalEnv& env);

enum class Polarity { Nmos, Pmos };

/// Compact-model card for one transistor. vt0 is signed (negative for PMOS);
/// w and l are in meters.
struct MosParams {
    Polarity polarity = Polarity::Nmos;
    double vt0 = 0.7;
    double n = 1.5;
    double kp = 100e-6;
    double w = 10e-6;
    double l = 1e-6;
    double lambda = 0.02;

    /// Throws std::domain_error when a field is outside its physical range.
    void validate() const;

    /// I_spec = 2 n (kp W/L) V_T^2.
    double specific_current(const ThermalEnv& env) const;

    friend bool operator==(const MosParams&, const MosParams&) = default;
};

/// Default 0.8 um-class process cards.
MosParams default_nmos(double w = 10e-6, double l = 1e-6);
MosParams default_pmos(double w = 10e-6, double l = 1e-6);

/// Linearization of the drain current. gms is reported as -d(id)/d(vs) so that it
/// is positive for a forward-biased device.
struct DeviceEval {
    double id = 0.0;
    double gm = 0.0;
    double gms = 0.0;
    double gds = 0.0;
};

/// EKV-style all-region drain current with analytic partial derivatives.
///
/// Terminal voltages are referenced to the bulk. For NMOS,
///   id = I_spec * (F(vp - vs) - F(vp - vd)) * (1 + lambda |vds|),
///   vp = (vg - vt0) / n,   F(u) = ln^2(1 + exp(u / (2 V_T))).
/// PMOS is the NMOS expression evaluated on negated terminals with -vt0, and
/// negated: id_p(vg, vs, vd) = -id_n(-vg, -vs, -vd).
DeviceEval drain_current(const MosParams& p, double vg, double vs, double vd, const ThermalEnv& env);

/// Normalized forward/reverse current F(u) and its derivative dF/du.
double normalized_current(double u, double vt);
double normalized_current_slope(double u, double vt);

/// Trapezoidal-edge pulse: v1 until delay, ramp to v2 over rise, hold for width,
/// ramp back over fall. A period, when present, repeats the shape.
struct PulseWaveform {
    double v1 = 0.0;
    double v2 = 0.0;
    double delay = 0.0;
    double rise = 0.0;
    double fall = 0.0;
    double width = 0.0;
    std::optional<double> period;

    double value_at(double t) const;

    friend bool operator==(const PulseWaveform&, const PulseWaveform&) = default;
};

/// Independent V or I source: DC value, optional small-signal excitation and
/// optional transient waveform (which overrides dc when present).
struct SourceSpec {
    double dc = 0.0;
    double ac_mag = 0.0;
    double ac_phase_deg = 0.0;
    std::optional<PulseWaveform> pulse;

    double value_at(double t) const { return pulse ? pulse->value_at(t) : dc; }
    double initial_value() const { return value_at(0.0); }

    friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

enum class Integrator { BackwardEuler, Trapezoidal };

/// Norton companion of a capacitor over one step: i = geq * v - ieq.
struct CapacitorCompanion {
    double geq = 0.0;
    double ieq = 0.0;
};

CapacitorCompanion capacitor_companion(double c, double h, double v_prev, double i_prev, Integrator method);

inline double resistor_current(double r, double v) { return v / r; }

} // namespace aota
