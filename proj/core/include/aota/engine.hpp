#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aota/device_models.hpp"
#include "aota/netlist.hpp"

namespace aota {

struct SolverOptions {
    double reltol = 1e-3;
    double abstol = 1e-12; // A
    double vntol = 1e-6;   // V
    int max_newton_iters = 100;
    double gmin = 1e-12; // S, node-to-ground shunt on every node
    int gmin_steps = 10; // decades stepped down from 1e-2 S
    int source_steps = 10;
    double max_voltage_step = 0.5; // Newton damping cap per node and iteration (nonlinear circuits)
    ThermalEnv env{};

    void validate() const;
};

enum class SolveStrategy { Newton, GminStepping, SourceStepping };

struct NamedEval {
    std::string name;
    DeviceEval eval;
};

struct OperatingPoint {
    std::vector<double> node_voltages;   // indexed by node, [0] is ground
    std::vector<double> branch_currents; // indexed by branch slot
    std::vector<NamedEval> device_evals; // one per MOS, element order
    double residual_norm = 0.0;          // max |KCL residual| over nodes, amperes
    int iterations = 0;                  // linear solves in the accepted Newton run
    SolveStrategy strategy = SolveStrategy::Newton;

    const DeviceEval* device(std::string_view name) const;
};

/// All strategies failed. best_residual is the smallest max-node KCL residual seen.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, double frequency)
        : std::runtime_error(what), frequency_(frequency) {}
    /// Hz; 0 for DC and transient solves.
    double frequency() const noexcept { return frequency_; }

private:
    double frequency_;
};

/// Trace names are "v(<node>)" for every non-ground node followed by
/// "i(<element>)" for every V/E branch, in unknown order.
std::vector<std::string> trace_names(const FlatCircuit& fc);

struct SweepResult {
    std::string sweep_name;
    std::vector<double> sweep_values;
    std::vector<std::string> trace_names;
    std::vector<std::vector<double>> traces; // [trace][point]; NaN where not converged
    std::vector<bool> converged;             // [point]

    const std::vector<double>& trace(std::string_view name) const;
    bool all_converged() const;
};

struct AcResult {
    std::vector<double> frequencies;
    std::vector<std::string> trace_names;
    std::vector<std::vector<std::complex<double>>> traces; // [trace][frequency]

    const std::vector<std::complex<double>>& trace(std::string_view name) const;
};

struct TransientResult {
    std::vector<double> times;
    std::vector<std::string> trace_names;
    std::vector<std::vector<double>> traces; // [trace][time]

    const std::vector<double>& trace(std::string_view name) const;
};

/// Newton failure inside transient(); carries the samples computed so far.
class TransientError : public std::runtime_error {
public:
    TransientError(const std::string& what, double time_reached, TransientResult partial)
        : std::runtime_error(what), time_reached_(time_reached), partial_(std::move(partial)) {}
    double time_reached() const noexcept { return time_reached_; }
    const TransientResult& partial() const noexcept { return partial_; }

private:
    double time_reached_;
    TransientResult partial_;
};

/// DC solution with every source at its t = 0 value. Plain Newton first, then
/// gmin stepping, then source stepping. `guess` seeds the plain Newton run.
OperatingPoint dc_operating_point(const FlatCircuit& fc, const SolverOptions& opts = {},
                                  const OperatingPoint* guess = nullptr);

/// Steps the DC value of an independent V or I source from start towards stop,
/// seeding each Newton solve with the previous solution.
SweepResult dc_sweep(const FlatCircuit& fc, std::string_view source, double start, double stop, double step,
                     const SolverOptions& opts = {});

/// Small-signal solve at the given frequencies around `op`.
AcResult ac_analysis(const FlatCircuit& fc, const OperatingPoint& op, const std::vector<double>& frequencies,
                     const SolverOptions& opts = {});

/// Log-spaced sweep, `points_per_decade` points per decade starting at fstart.
AcResult ac_analysis(const FlatCircuit& fc, const OperatingPoint& op, double fstart, double fstop,
                     int points_per_decade, const SolverOptions& opts = {});

std::vector<double> log_frequencies(double fstart, double fstop, int points_per_decade);

/// Fixed-step transient: backward Euler on the first step, trapezoidal after.
TransientResult transient(const FlatCircuit& fc, double tstep, double tstop, const SolverOptions& opts = {});

double node_voltage(const FlatCircuit& fc, const OperatingPoint& op, std::string_view node);
/// Branch current of a V or E element (positive from n+ through the source to n-).
double branch_current(const FlatCircuit& fc, const OperatingPoint& op, std::string_view element);

/// Per-node KCL check of a solution: |sum i| <= abstol + reltol * max|i| at
/// every node, with element currents recomputed from the device laws.
struct KclReport {
    double max_residual = 0.0; // A
    double worst_ratio = 0.0;  // residual / allowed bound, <= 1 when satisfied
    std::string worst_node;
    bool ok() const { return worst_ratio <= 1.0; }
};
KclReport check_kcl(const FlatCircuit& fc, const OperatingPoint& op, const SolverOptions& opts = {});

// Serialization. CSV: one header row of trace names, one row per point.
std::string to_csv(const OperatingPoint& op, const FlatCircuit& fc);
std::string to_csv(const SweepResult& r);
std::string to_csv(const AcResult& r);
std::string to_csv(const TransientResult& r);
std::string to_json(const OperatingPoint& op, const FlatCircuit& fc);
std::string to_json(const SweepResult& r);
std::string to_json(const AcResult& r);
std::string to_json(const TransientResult& r);

} // namespace aota
