#include "aota/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace aota {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

struct Mode {
    double source_scale = 1.0;
    double gmin = 1e-12;
    double time = 0.0;
    bool transient = false;
    Integrator method = Integrator::BackwardEuler;
    double h = 0.0;
    const std::vector<double>* cap_v = nullptr; // per capacitor, previous step
    const std::vector<double>* cap_i = nullptr;
};

bool is_nonlinear(const FlatElement& e) {
    switch (e.kind) {
    case ElementKind::Mosfet: return true;
    case ElementKind::Vcvs: {
        const auto& cv = std::get<ControlledValue>(e.value);
        return cv.lower.has_value() || cv.upper.has_value();
    }
    case ElementKind::Vccs: return std::get<ControlledValue>(e.value).limit.has_value();
    default: return false;
    }
}

/// Assembles F(x) (sum of currents leaving each node, plus branch equations)
/// and its Jacobian.
class Mna {
public:
    Mna(const FlatCircuit& fc, const SolverOptions& opts) : fc_(fc), opts_(opts) {
        nodes_ = fc.num_nodes() == 0 ? 0 : static_cast<int>(fc.num_nodes()) - 1;
        size_ = static_cast<int>(fc.unknowns());
        for (std::size_t i = 0; i < fc.elements.size(); ++i) {
            if (fc.elements[i].kind == ElementKind::Capacitor) caps_.push_back(static_cast<int>(i));
            if (is_nonlinear(fc.elements[i])) nonlinear_ = true;
        }
        J.resize(size_, size_);
        F.resize(size_);
        scale.resize(size_);
    }

    int size() const { return size_; }
    int node_unknowns() const { return nodes_; }
    bool nonlinear() const { return nonlinear_; }
    const std::vector<int>& capacitors() const { return caps_; }
    const FlatCircuit& circuit() const { return fc_; }

    double v(const VectorXd& x, int node) const { return node == 0 ? 0.0 : x[node - 1]; }
    int branch_row(int branch) const { return nodes_ + branch; }

    void assemble(const VectorXd& x, const Mode& m) {
        J.setZero();
        F.setZero();
        scale.setZero();
        evals.clear();

        for (int r = 0; r < nodes_; ++r) {
            add_f(r, m.gmin * x[r]);
            J(r, r) += m.gmin;
        }

        std::size_t cap_slot = 0;
        for (const FlatElement& e : fc_.elements) {
            switch (e.kind) {
            case ElementKind::Resistor: {
                const double g = 1.0 / std::get<PassiveValue>(e.value).value;
                const int a = e.nodes[0], b = e.nodes[1];
                const double i = g * (v(x, a) - v(x, b));
                current(a, b, i);
                conductance(a, b, a, b, g);
                break;
            }
            case ElementKind::Capacitor: {
                if (m.transient) {
                    const double c = std::get<PassiveValue>(e.value).value;
                    const auto comp = capacitor_companion(c, m.h, (*m.cap_v)[cap_slot], (*m.cap_i)[cap_slot], m.method);
                    const int a = e.nodes[0], b = e.nodes[1];
                    const double i = comp.geq * (v(x, a) - v(x, b)) - comp.ieq;
                    current(a, b, i);
                    conductance(a, b, a, b, comp.geq);
                }
                ++cap_slot;
                break;
            }
            case ElementKind::VSource: {
                const auto& s = std::get<SourceSpec>(e.value);
                const double value = m.source_scale * s.value_at(m.time);
                stamp_branch(x, e, value, 0.0, -1, -1);
                break;
            }
            case ElementKind::ISource: {
                const auto& s = std::get<SourceSpec>(e.value);
                current(e.nodes[0], e.nodes[1], m.source_scale * s.value_at(m.time));
                break;
            }
            case ElementKind::Mosfet: {
                const int d = e.nodes[0], g = e.nodes[1], s = e.nodes[2];
                const double vs = v(x, s);
                const DeviceEval ev = drain_current(e.mos, v(x, g) - vs, 0.0, v(x, d) - vs, opts_.env);
                current(d, s, ev.id);
                // d id / d(vd, vg, vs) = (gds, gm, -(gm + gds)) with the bulk tied to the source.
                conductance(d, s, d, s, ev.gds);
                conductance(d, s, g, s, ev.gm);
                evals.push_back({e.name, DeviceEval{ev.id, ev.gm, ev.gm + ev.gds, ev.gds}});
                break;
            }
            case ElementKind::Vcvs: {
                const auto& cv = std::get<ControlledValue>(e.value);
                const double vc = v(x, e.nodes[2]) - v(x, e.nodes[3]);
                double out = cv.gain * vc;
                double slope = cv.gain;
                if (cv.lower && out < *cv.lower) {
                    out = *cv.lower;
                    slope = 0.0;
                } else if (cv.upper && out > *cv.upper) {
                    out = *cv.upper;
                    slope = 0.0;
                }
                stamp_branch(x, e, out, slope, e.nodes[2], e.nodes[3]);
                break;
            }
            case ElementKind::Vccs: {
                const auto& cv = std::get<ControlledValue>(e.value);
                const double vc = v(x, e.nodes[2]) - v(x, e.nodes[3]);
                double i = cv.gain * vc;
                double di = cv.gain;
                if (cv.limit) {
                    const double t = std::tanh(cv.gain * vc / *cv.limit);
                    i = *cv.limit * t;
                    di = cv.gain * (1.0 - t * t);
                }
                current(e.nodes[0], e.nodes[1], i);
                conductance(e.nodes[0], e.nodes[1], e.nodes[2], e.nodes[3], di);
                break;
            }
            }
        }
    }

    /// Capacitance matrix for AC.
    MatrixXd capacitance() const {
        MatrixXd C = MatrixXd::Zero(size_, size_);
        for (int idx : caps_) {
            const FlatElement& e = fc_.elements[static_cast<std::size_t>(idx)];
            const double c = std::get<PassiveValue>(e.value).value;
            const int a = e.nodes[0] - 1, b = e.nodes[1] - 1;
            if (a >= 0) C(a, a) += c;
            if (b >= 0) C(b, b) += c;
            if (a >= 0 && b >= 0) {
                C(a, b) -= c;
                C(b, a) -= c;
            }
        }
        return C;
    }

    MatrixXd J;
    VectorXd F;
    VectorXd scale;
    std::vector<NamedEval> evals;

private:
    void add_f(int row, double value) {
        F[row] += value;
        scale[row] = std::max(scale[row], std::abs(value));
    }

    // Current i leaving node a and entering node b.
    void current(int a, int b, double i) {
        if (a > 0) add_f(a - 1, i);
        if (b > 0) add_f(b - 1, -i);
    }

    // d(current a->b)/d(v(c) - v(d)) = g.
    void conductance(int a, int b, int c, int d, double g) {
        auto put = [&](int r, int col, double val) {
            if (r > 0 && col > 0) J(r - 1, col - 1) += val;
        };
        put(a, c, g);
        put(a, d, -g);
        put(b, c, -g);
        put(b, d, g);
    }

    // v(n+) - v(n-) = value(x), with d value / d(v(c+) - v(c-)) = slope.
    void stamp_branch(const VectorXd& x, const FlatElement& e, double value, double slope, int cp, int cn) {
        const int row = branch_row(e.branch);
        const int p = e.nodes[0], n = e.nodes[1];
        const double j = x[row];
        current(p, n, j);
        if (p > 0) J(p - 1, row) += 1.0;
        if (n > 0) J(n - 1, row) -= 1.0;

        const double vp = v(x, p), vn = v(x, n);
        F[row] += vp - vn - value;
        scale[row] = std::max({scale[row], std::abs(vp), std::abs(vn), std::abs(value)});
        if (p > 0) J(row, p - 1) += 1.0;
        if (n > 0) J(row, n - 1) -= 1.0;
        if (slope != 0.0) {
            if (cp > 0) J(row, cp - 1) -= slope;
            if (cn > 0) J(row, cn - 1) += slope;
        }
    }

    const FlatCircuit& fc_;
    const SolverOptions& opts_;
    int nodes_ = 0;
    int size_ = 0;
    bool nonlinear_ = false;
    std::vector<int> caps_;
};

template <typename Matrix>
bool has_tiny_pivot(const Matrix& lu_matrix, double max_entry) {
    const double floor = std::max(max_entry * 1e-18, std::numeric_limits<double>::min());
    for (Eigen::Index i = 0; i < lu_matrix.rows(); ++i) {
        const double d = std::abs(lu_matrix(i, i));
        if (!(d > floor)) return true;
    }
    return false;
}

struct ResidualStatus {
    bool ok = true;
    double norm = 0.0;
};

ResidualStatus residual_status(const Mna& mna, const SolverOptions& opts) {
    ResidualStatus st;
    for (int r = 0; r < mna.size(); ++r) {
        const double f = std::abs(mna.F[r]);
        if (!std::isfinite(f)) {
            st.ok = false;
            st.norm = std::numeric_limits<double>::infinity();
            continue;
        }
        if (r < mna.node_unknowns()) {
            st.norm = std::max(st.norm, f);
            if (f > opts.abstol + opts.reltol * mna.scale[r]) st.ok = false;
        } else if (f > opts.vntol + opts.reltol * mna.scale[r]) {
            st.ok = false;
        }
    }
    return st;
}

struct NewtonRun {
    bool converged = false;
    bool singular = false;
    VectorXd x;
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<NamedEval> evals;
};

NewtonRun newton(Mna& mna, VectorXd x, const Mode& mode, const SolverOptions& opts) {
    NewtonRun run;
    const int n = mna.size();
    if (n == 0) {
        run.converged = true;
        run.x = x;
        run.residual = 0.0;
        return run;
    }

    auto assemble = [&](const VectorXd& at) -> bool {
        try {
            mna.assemble(at, mode);
        } catch (const std::domain_error&) {
            return false;
        }
        return true;
    };

    if (!assemble(x)) return run;
    for (int it = 1; it <= opts.max_newton_iters; ++it) {
        Eigen::PartialPivLU<MatrixXd> lu(mna.J);
        if (has_tiny_pivot(lu.matrixLU(), mna.J.cwiseAbs().maxCoeff())) {
            run.singular = true;
            run.x = x;
            return run;
        }
        VectorXd dx = lu.solve(-mna.F);
        if (!dx.allFinite()) return run;

        bool damped = false;
        if (mna.nonlinear()) {
            for (int r = 0; r < mna.node_unknowns(); ++r) {
                if (std::abs(dx[r]) > opts.max_voltage_step) {
                    dx[r] = std::copysign(opts.max_voltage_step, dx[r]);
                    damped = true;
                }
            }
        }
        const VectorXd x_old = x;
        x += dx;

        bool small_step = !damped;
        for (int r = 0; r < n && small_step; ++r) {
            const double mag = std::max(std::abs(x[r]), std::abs(x_old[r]));
            const double tol = (r < mna.node_unknowns()) ? opts.vntol + opts.reltol * mag
                                                          : opts.abstol + opts.reltol * mag;
            if (std::abs(dx[r]) > tol) small_step = false;
        }

        if (!assemble(x)) return run;
        const ResidualStatus st = residual_status(mna, opts);
        run.residual = st.norm;
        if (((!mna.nonlinear()) || small_step) && st.ok) {
            run.converged = true;
            run.x = x;
            run.iterations = it;
            run.evals = mna.evals;
            return run;
        }
    }
    run.x = x;
    return run;
}

VectorXd to_vector(const FlatCircuit& fc, const OperatingPoint& op) {
    const int nodes = fc.num_nodes() == 0 ? 0 : static_cast<int>(fc.num_nodes()) - 1;
    VectorXd x(static_cast<Eigen::Index>(fc.unknowns()));
    for (int i = 0; i < nodes; ++i) x[i] = op.node_voltages.at(static_cast<std::size_t>(i + 1));
    for (std::size_t b = 0; b < fc.num_branches(); ++b) x[nodes + static_cast<int>(b)] = op.branch_currents.at(b);
    return x;
}

OperatingPoint to_op(const FlatCircuit& fc, const NewtonRun& run, SolveStrategy strategy) {
    OperatingPoint op;
    const int nodes = fc.num_nodes() == 0 ? 0 : static_cast<int>(fc.num_nodes()) - 1;
    op.node_voltages.assign(fc.num_nodes(), 0.0);
    for (int i = 0; i < nodes; ++i) op.node_voltages[static_cast<std::size_t>(i + 1)] = run.x[i];
    op.branch_currents.resize(fc.num_branches());
    for (std::size_t b = 0; b < fc.num_branches(); ++b) op.branch_currents[b] = run.x[nodes + static_cast<int>(b)];
    op.device_evals = run.evals;
    op.residual_norm = run.residual;
    op.iterations = run.iterations;
    op.strategy = strategy;
    return op;
}

std::size_t trace_index(const std::vector<std::string>& names, std::string_view name) {
    const std::string key = to_lower(name);
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == key) return i;
    throw std::out_of_range("no trace named '" + std::string(name) + "'");
}

} // namespace

void SolverOptions::validate() const {
    if (!(reltol > 0.0) || !(abstol > 0.0) || !(vntol > 0.0) || max_newton_iters <= 0 || !(gmin > 0.0) ||
        gmin_steps <= 0 || source_steps <= 0 || !(max_voltage_step > 0.0))
        throw std::invalid_argument("solver options must all be strictly positive");
    (void)thermal_voltage(env);
}

const DeviceEval* OperatingPoint::device(std::string_view name) const {
    const std::string key = to_lower(name);
    for (const auto& d : device_evals)
        if (d.name == key) return &d.eval;
    return nullptr;
}

std::vector<std::string> trace_names(const FlatCircuit& fc) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i < fc.node_names.size(); ++i) names.push_back("v(" + fc.node_names[i] + ")");
    for (const auto& b : fc.branch_names) names.push_back("i(" + b + ")");
    return names;
}

const std::vector<double>& SweepResult::trace(std::string_view name) const {
    return traces.at(trace_index(trace_names, name));
}

bool SweepResult::all_converged() const {
    return std::all_of(converged.begin(), converged.end(), [](bool b) { return b; });
}

const std::vector<std::complex<double>>& AcResult::trace(std::string_view name) const {
    return traces.at(trace_index(trace_names, name));
}

const std::vector<double>& TransientResult::trace(std::string_view name) const {
    return traces.at(trace_index(trace_names, name));
}

OperatingPoint dc_operating_point(const FlatCircuit& fc, const SolverOptions& opts, const OperatingPoint* guess) {
    opts.validate();
    Mna mna(fc, opts);
    const VectorXd zero = VectorXd::Zero(mna.size());
    const VectorXd start = guess ? to_vector(fc, *guess) : zero;

    Mode mode;
    mode.gmin = opts.gmin;
    double best = std::numeric_limits<double>::infinity();
    bool singular = false;

    NewtonRun run = newton(mna, start, mode, opts);
    if (run.converged) return to_op(fc, run, SolveStrategy::Newton);
    best = std::min(best, run.residual);
    singular = singular || run.singular;

    // gmin stepping: geometric from 1e-2 S down to opts.gmin.
    {
        VectorXd x = start;
        bool ok = true;
        const double g0 = std::max(1e-2, opts.gmin);
        for (int k = 0; k <= opts.gmin_steps && ok; ++k) {
            Mode m = mode;
            m.gmin = g0 * std::pow(opts.gmin / g0, static_cast<double>(k) / opts.gmin_steps);
            if (k == opts.gmin_steps) m.gmin = opts.gmin;
            NewtonRun r = newton(mna, x, m, opts);
            if (!r.converged) {
                ok = false;
                best = std::min(best, r.residual);
                break;
            }
            x = r.x;
            if (k == opts.gmin_steps) return to_op(fc, r, SolveStrategy::GminStepping);
        }
    }

    // Source stepping from zero.
    {
        VectorXd x = zero;
        for (int k = 1; k <= opts.source_steps; ++k) {
            Mode m = mode;
            m.source_scale = static_cast<double>(k) / opts.source_steps;
            NewtonRun r = newton(mna, x, m, opts);
            if (!r.converged) {
                best = std::min(best, r.residual);
                break;
            }
            x = r.x;
            if (k == opts.source_steps) return to_op(fc, r, SolveStrategy::SourceStepping);
        }
    }

    if (singular && !std::isfinite(best))
        throw SingularMatrixError("singular MNA matrix in DC operating point", 0.0);
    throw ConvergenceError(fmt::format("DC operating point did not converge (best residual {:.3e} A)", best), best);
}

SweepResult dc_sweep(const FlatCircuit& fc, std::string_view source, double start, double stop, double step,
                     const SolverOptions& opts) {
    opts.validate();
    const int idx = fc.element_index(source);
    if (idx < 0) throw std::invalid_argument("unknown sweep source '" + std::string(source) + "'");
    const FlatElement& src = fc.elements[static_cast<std::size_t>(idx)];
    if (src.kind != ElementKind::VSource && src.kind != ElementKind::ISource)
        throw std::invalid_argument("sweep source '" + std::string(source) + "' is not an independent source");
    if (step == 0.0 || !std::isfinite(step)) throw std::invalid_argument("sweep step must be non-zero");
    const double span = (stop - start) / step;
    if (span < -1e-9) throw std::invalid_argument("sweep step points away from stop");
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;

    FlatCircuit work = fc;
    SourceSpec& spec = std::get<SourceSpec>(work.elements[static_cast<std::size_t>(idx)].value);
    spec.pulse.reset();

    SweepResult result;
    result.sweep_name = src.name;
    result.trace_names = trace_names(fc);
    result.traces.assign(result.trace_names.size(), {});

    Mna mna(work, opts);
    Mode mode;
    mode.gmin = opts.gmin;
    std::optional<OperatingPoint> prev;

    for (std::size_t k = 0; k < count; ++k) {
        const double value = start + static_cast<double>(k) * step;
        spec.dc = value;
        result.sweep_values.push_back(value);

        std::optional<OperatingPoint> op;
        if (prev) {
            NewtonRun r = newton(mna, to_vector(work, *prev), mode, opts);
            if (r.converged) op = to_op(work, r, SolveStrategy::Newton);
        }
        if (!op) {
            try {
                op = dc_operating_point(work, opts, prev ? &*prev : nullptr);
            } catch (const std::runtime_error&) {
            }
        }

        result.converged.push_back(op.has_value());
        if (op) {
            const VectorXd x = to_vector(work, *op);
            for (std::size_t t = 0; t < result.traces.size(); ++t) result.traces[t].push_back(x[static_cast<int>(t)]);
            prev = std::move(op);
        } else {
            for (auto& t : result.traces) t.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return result;
}

std::vector<double> log_frequencies(double fstart, double fstop, int points_per_decade) {
    if (!(fstart > 0.0) || !(fstop >= fstart) || points_per_decade < 1)
        throw std::invalid_argument("AC sweep needs 0 < fstart <= fstop and points_per_decade >= 1");
    std::vector<double> f;
    const double decades = std::log10(fstop / fstart);
    const auto n = static_cast<int>(std::floor(decades * points_per_decade + 1e-9));
    for (int k = 0; k <= n; ++k) f.push_back(fstart * std::pow(10.0, static_cast<double>(k) / points_per_decade));
    return f;
}

AcResult ac_analysis(const FlatCircuit& fc, const OperatingPoint& op, const std::vector<double>& frequencies,
                     const SolverOptions& opts) {
    opts.validate();
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        if (!(frequencies[i] > 0.0)) throw std::invalid_argument("AC frequencies must be > 0");
        if (i > 0 && !(frequencies[i] > frequencies[i - 1]))
            throw std::invalid_argument("AC frequencies must be strictly increasing");
    }
    Mna mna(fc, opts);
    Mode mode;
    mode.gmin = opts.gmin;
    mna.assemble(to_vector(fc, op), mode);
    const MatrixXd G = mna.J;
    const MatrixXd C = mna.capacitance();
    const int n = mna.size();

    VectorXc rhs = VectorXc::Zero(n);
    for (const FlatElement& e : fc.elements) {
        if (e.kind != ElementKind::VSource && e.kind != ElementKind::ISource) continue;
        const auto& s = std::get<SourceSpec>(e.value);
        if (s.ac_mag == 0.0) continue;
        const std::complex<double> u = std::polar(s.ac_mag, s.ac_phase_deg * std::numbers::pi / 180.0);
        if (e.kind == ElementKind::VSource) {
            rhs[mna.branch_row(e.branch)] += u;
        } else {
            if (e.nodes[0] > 0) rhs[e.nodes[0] - 1] -= u;
            if (e.nodes[1] > 0) rhs[e.nodes[1] - 1] += u;
        }
    }

    AcResult result;
    result.frequencies = frequencies;
    result.trace_names = trace_names(fc);
    result.traces.assign(result.trace_names.size(), {});
    for (double f : frequencies) {
        const double w = 2.0 * std::numbers::pi * f;
        const MatrixXc Y = G.cast<std::complex<double>>() + std::complex<double>(0.0, w) * C.cast<std::complex<double>>();
        VectorXc x = VectorXc::Zero(n);
        if (n > 0) {
            Eigen::PartialPivLU<MatrixXc> lu(Y);
            if (has_tiny_pivot(lu.matrixLU(), Y.cwiseAbs().maxCoeff()))
                throw SingularMatrixError(fmt::format("singular AC system at {} Hz", f), f);
            x = lu.solve(rhs);
            if (!x.allFinite()) throw SingularMatrixError(fmt::format("singular AC system at {} Hz", f), f);
        }
        for (int t = 0; t < n; ++t) result.traces[static_cast<std::size_t>(t)].push_back(x[t]);
    }
    return result;
}

AcResult ac_analysis(const FlatCircuit& fc, const OperatingPoint& op, double fstart, double fstop,
                     int points_per_decade, const SolverOptions& opts) {
    return ac_analysis(fc, op, log_frequencies(fstart, fstop, points_per_decade), opts);
}

TransientResult transient(const FlatCircuit& fc, double tstep, double tstop, const SolverOptions& opts) {
    if (!(tstep > 0.0) || !(tstop > tstep)) throw std::invalid_argument("transient needs 0 < tstep < tstop");
    opts.validate();

    const OperatingPoint op0 = dc_operating_point(fc, opts);
    Mna mna(fc, opts);
    VectorXd x = to_vector(fc, op0);

    std::vector<double> cap_v, cap_i;
    for (int idx : mna.capacitors()) {
        const FlatElement& e = fc.elements[static_cast<std::size_t>(idx)];
        cap_v.push_back(mna.v(x, e.nodes[0]) - mna.v(x, e.nodes[1]));
        cap_i.push_back(0.0);
    }

    TransientResult result;
    result.trace_names = trace_names(fc);
    result.traces.assign(result.trace_names.size(), {});
    auto record = [&](double t, const VectorXd& at) {
        result.times.push_back(t);
        for (std::size_t k = 0; k < result.traces.size(); ++k) result.traces[k].push_back(at[static_cast<int>(k)]);
    };
    record(0.0, x);

    const double ratio = tstop / tstep;
    const auto steps = static_cast<long>(std::ceil(ratio - 1e-9));
    for (long n = 0; n < steps; ++n) {
        Mode mode;
        mode.gmin = opts.gmin;
        mode.transient = true;
        mode.method = (n == 0) ? Integrator::BackwardEuler : Integrator::Trapezoidal;
        mode.h = tstep;
        mode.time = static_cast<double>(n + 1) * tstep;
        mode.cap_v = &cap_v;
        mode.cap_i = &cap_i;

        NewtonRun r = newton(mna, x, mode, opts);
        if (!r.converged) {
            const double reached = result.times.back();
            throw TransientError(fmt::format("transient Newton failure at t = {:.6g} s", mode.time), reached,
                                 std::move(result));
        }
        x = r.x;
        for (std::size_t k = 0; k < cap_v.size(); ++k) {
            const FlatElement& e = fc.elements[static_cast<std::size_t>(mna.capacitors()[k])];
            const double c = std::get<PassiveValue>(e.value).value;
            const auto comp = capacitor_companion(c, tstep, cap_v[k], cap_i[k], mode.method);
            const double v_new = mna.v(x, e.nodes[0]) - mna.v(x, e.nodes[1]);
            cap_i[k] = comp.geq * v_new - comp.ieq;
            cap_v[k] = v_new;
        }
        record(mode.time, x);
    }
    return result;
}

double node_voltage(const FlatCircuit& fc, const OperatingPoint& op, std::string_view node) {
    const int idx = fc.node_index(node);
    if (idx < 0) throw std::out_of_range("unknown node '" + std::string(node) + "'");
    return op.node_voltages.at(static_cast<std::size_t>(idx));
}

double branch_current(const FlatCircuit& fc, const OperatingPoint& op, std::string_view element) {
    const int b = fc.branch_of(element);
    if (b < 0) throw std::out_of_range("element '" + std::string(element) + "' has no branch current");
    return op.branch_currents.at(static_cast<std::size_t>(b));
}

KclReport check_kcl(const FlatCircuit& fc, const OperatingPoint& op, const SolverOptions& opts) {
    Mna mna(fc, opts);
    Mode mode;
    mode.gmin = opts.gmin;
    mna.assemble(to_vector(fc, op), mode);
    KclReport rep;
    for (int r = 0; r < mna.node_unknowns(); ++r) {
        const double f = std::abs(mna.F[r]);
        const double bound = opts.abstol + opts.reltol * mna.scale[r];
        rep.max_residual = std::max(rep.max_residual, f);
        const double ratio = f / bound;
        if (ratio >= rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst_node = fc.node_names[static_cast<std::size_t>(r + 1)];
        }
    }
    return rep;
}

} // namespace aota
