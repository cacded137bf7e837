#include "aota/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numbers>

#include <fmt/format.h>
#include <json.hpp>

namespace aota {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

Element make(ElementKind kind, std::string name, std::vector<std::string> nodes, ElementValue value) {
    Element e;
    e.kind = kind;
    e.name = std::move(name);
    e.nodes = std::move(nodes);
    e.value = std::move(value);
    return e;
}

Element vsource(std::string name, std::string p, std::string n, double dc, double ac = 0.0) {
    return make(ElementKind::VSource, std::move(name), {std::move(p), std::move(n)},
                SourceSpec{dc, ac, 0.0, std::nullopt});
}

double lerp(double x0, double y0, double x1, double y1, double x) {
    if (x1 == x0) return y0;
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

double db(double ratio) { return 20.0 * std::log10(ratio); }

// Index k with y[k], y[k+1] finite and bracketing target; the bracket whose
// midpoint is closest to `centre` wins. -1 if none.
int find_bracket(const std::vector<double>& x, const std::vector<double>& y, double target, double centre) {
    int best = -1;
    double best_dist = kInf;
    for (std::size_t k = 0; k + 1 < y.size(); ++k) {
        if (!std::isfinite(y[k]) || !std::isfinite(y[k + 1])) continue;
        const double a = y[k] - target, b = y[k + 1] - target;
        if (a * b > 0.0 || (a == 0.0 && b == 0.0)) continue;
        const double d = std::abs(0.5 * (x[k] + x[k + 1]) - centre);
        if (d < best_dist) {
            best_dist = d;
            best = static_cast<int>(k);
        }
    }
    return best;
}

SweepResult sweep_points(const Circuit& bench, const char* source, double start, double stop, int points,
                         const SolverOptions& opts) {
    const FlatCircuit fc = elaborate(bench);
    return dc_sweep(fc, source, start, stop, (stop - start) / (points - 1), opts);
}

std::string out_trace(const DutPorts& p) { return "v(" + to_lower(p.out) + ")"; }

// Rise/fall edge analysis over samples [i0, i1] of a transient trace.
struct EdgeResult {
    double slew = 0.0;
    double settling = 0.0;
    bool settled = false;
};

EdgeResult analyse_edge(const std::vector<double>& t, const std::vector<double>& v, std::size_t i0,
                        std::size_t i1, double height, bool rising) {
    EdgeResult r;
    const double t0 = t[i0];
    for (std::size_t i = std::max<std::size_t>(i0, 1); i < i1 && i + 1 < t.size(); ++i) {
        const double d = (v[i + 1] - v[i - 1]) / (t[i + 1] - t[i - 1]);
        r.slew = std::max(r.slew, rising ? d : -d);
    }
    const double final_value = v[i1];
    const double tol = 0.01 * height;
    std::size_t last = i0;
    bool exceeded = false;
    for (std::size_t i = i0; i <= i1; ++i)
        if (std::abs(v[i] - final_value) > tol) {
            last = i;
            exceeded = true;
        }
    double t_settle = t0;
    if (exceeded && last < i1) {
        const double e0 = std::abs(v[last] - final_value) - tol;
        const double e1 = std::abs(v[last + 1] - final_value) - tol;
        t_settle = lerp(e0, t[last], e1, t[last + 1], 0.0);
    } else if (exceeded) {
        t_settle = t[i1];
    }
    r.settling = t_settle - t0;
    r.settled = r.settling <= 0.5 * (t[i1] - t0);
    return r;
}

} // namespace

void DutPorts::validate() const {
    for (const auto* n : {&inp, &inn, &out, &vdd, &gnd})
        if (n->empty()) throw PortError("port node names must be non-empty");
    if (!(supply > 0.0) || !std::isfinite(supply)) throw PortError("supply must be > 0");
    if (!(load_cap > 0.0) || !std::isfinite(load_cap)) throw PortError("load capacitance must be > 0");
}

void CharacterizeOptions::validate() const {
    solver.validate();
    if (!(offset_window > 0.0)) throw std::invalid_argument("offset window must be > 0");
    if (offset_points < 3 || icmr_points < 3 || swing_points < 5 || step_samples < 10)
        throw std::invalid_argument("too few sweep points");
    if (!(ac_fstart > 0.0) || !(ac_fstop > ac_fstart) || ac_points_per_decade < 1)
        throw std::invalid_argument("bad AC sweep range");
    if (!(rejection_frequency > 0.0)) throw std::invalid_argument("rejection frequency must be > 0");
    if (!(step_fraction > 0.0 && step_fraction < 1.0)) throw std::invalid_argument("step fraction must be in (0, 1)");
    if (!(step_width > 0.0)) throw std::invalid_argument("step width must be > 0");
}

CharacterizationReport::CharacterizationReport()
    : dc_gain_db(kNaN), ugb_hz(kNaN), phase_margin_deg(kNaN), input_offset_v(kNaN), icmr{kNaN, kNaN},
      output_swing{kNaN, kNaN}, slew_rise_v_per_s(kNaN), slew_fall_v_per_s(kNaN), settling_rise_s(kNaN),
      settling_fall_s(kNaN), cmrr_db(kNaN), psrr_pos_db(kNaN), psrr_neg_db(kNaN), power_w(kNaN) {}

bool CharacterizationReport::complete() const {
    if (!errors.empty()) return false;
    for (double v : {dc_gain_db, ugb_hz, phase_margin_deg, input_offset_v, icmr.lo, icmr.hi, output_swing.lo,
                     output_swing.hi, slew_rise_v_per_s, slew_fall_v_per_s, settling_rise_s, settling_fall_s,
                     power_w})
        if (!std::isfinite(v)) return false;
    for (double v : {cmrr_db, psrr_pos_db, psrr_neg_db})
        if (std::isnan(v) || v == -kInf) return false;
    return icmr.lo < icmr.hi && output_swing.lo < output_swing.hi;
}

const std::vector<std::string>& report_field_names() {
    static const std::vector<std::string> names = {
        "dc_gain_db",        "ugb_hz",           "phase_margin_deg", "input_offset_v", "icmr",
        "output_swing",      "slew_rise_v_per_s", "slew_fall_v_per_s", "settling_rise_s", "settling_fall_s",
        "cmrr_db",           "psrr_pos_db",      "psrr_neg_db",      "power_w"};
    return names;
}

Characterizer::Characterizer(const Circuit& dut, DutPorts ports, CharacterizeOptions opts)
    : dut_(dut), ports_(std::move(ports)), opts_(std::move(opts)) {
    ports_.validate();
    opts_.validate();
    for (auto* n : {&ports_.inp, &ports_.inn, &ports_.out, &ports_.vdd, &ports_.gnd}) *n = to_lower(*n);

    const std::pair<const char*, const std::string*> named[] = {
        {"inp", &ports_.inp}, {"inn", &ports_.inn}, {"out", &ports_.out}, {"vdd", &ports_.vdd}, {"gnd", &ports_.gnd}};
    for (const auto& [role, node] : named)
        if (!dut_.node_names.count(*node))
            throw PortError(fmt::format("{} port node '{}' does not exist in the netlist", role, *node));

    const std::string& gnd = ports_.gnd;
    auto is_rail = [&](const std::string& n) { return n == gnd || n == "0"; };
    auto is_driven = [&](const std::string& n) { return n == ports_.inp || n == ports_.inn || n == ports_.vdd; };
    std::vector<Element> kept;
    for (auto& e : dut_.elements) {
        const bool strip_source = e.kind == ElementKind::VSource &&
                                  ((is_driven(e.nodes[0]) && is_rail(e.nodes[1])) ||
                                   (is_driven(e.nodes[1]) && is_rail(e.nodes[0])));
        const bool strip_load = e.kind == ElementKind::Capacitor &&
                                ((e.nodes[0] == ports_.out && is_rail(e.nodes[1])) ||
                                 (e.nodes[1] == ports_.out && is_rail(e.nodes[0])));
        if (!strip_source && !strip_load) kept.push_back(std::move(e));
    }
    dut_.elements = std::move(kept);
    dut_.directives.clear();
    dut_.rename_node(gnd, bench_names::kVssNode);
    for (auto* n : {&ports_.inp, &ports_.inn, &ports_.out, &ports_.vdd})
        if (*n == gnd) *n = bench_names::kVssNode;
}

Circuit Characterizer::open_loop_bench(double vd, AcDrive drive) const {
    using namespace bench_names;
    Circuit c = dut_;
    const double cm = ports_.supply / 2.0;
    c.add(vsource(kVdd, ports_.vdd, "0", ports_.supply, drive == AcDrive::PositiveSupply ? 1.0 : 0.0));
    c.add(vsource(kVss, kVssNode, "0", 0.0, drive == AcDrive::NegativeSupply ? 1.0 : 0.0));
    c.add(vsource(kVd, "__vd", "0", vd, drive == AcDrive::Differential ? 1.0 : 0.0));
    c.add(vsource(kVcm, "__cm", "0", cm, drive == AcDrive::CommonMode ? 1.0 : 0.0));
    c.add(make(ElementKind::Vcvs, "e__p", {ports_.inp, "__cm", "__vd", "0"}, ControlledValue{0.5, {}, {}, {}}));
    c.add(make(ElementKind::Vcvs, "e__n", {ports_.inn, "__cm", "__vd", "0"}, ControlledValue{-0.5, {}, {}, {}}));
    c.add(make(ElementKind::Capacitor, kLoad, {ports_.out, "0"}, PassiveValue{ports_.load_cap}));
    return c;
}

Circuit Characterizer::follower_bench(const SourceSpec& input) const {
    using namespace bench_names;
    Circuit c = dut_;
    c.add(vsource(kVdd, ports_.vdd, "0", ports_.supply));
    c.add(vsource(kVss, kVssNode, "0", 0.0));
    c.add(make(ElementKind::VSource, kVin, {ports_.inp, "0"}, input));
    c.add(vsource(kFeedback, ports_.inn, ports_.out, 0.0));
    c.add(make(ElementKind::Capacitor, kLoad, {ports_.out, "0"}, PassiveValue{ports_.load_cap}));
    return c;
}

TransferResult Characterizer::dc_transfer_offset() const {
    const double mid = ports_.supply / 2.0;
    const std::string out = out_trace(ports_);
    const Circuit bench = open_loop_bench(0.0);

    TransferResult r;
    r.curve = sweep_points(bench, bench_names::kVd, -opts_.offset_window, opts_.offset_window, opts_.offset_points,
                           opts_.solver);
    const SweepResult* cur = &r.curve;
    SweepResult fine;
    int k = find_bracket(cur->sweep_values, cur->trace(out), mid, 0.0);
    if (k < 0) throw CharacterizationError("transfer curve does not cross mid-supply");

    for (int pass = 0; pass < opts_.offset_refinements; ++pass) {
        const double lo = cur->sweep_values[k], hi = cur->sweep_values[k + 1];
        SweepResult next = sweep_points(bench, bench_names::kVd, lo, hi, opts_.offset_points, opts_.solver);
        const int kn = find_bracket(next.sweep_values, next.trace(out), mid, 0.5 * (lo + hi));
        if (kn < 0) break;
        fine = std::move(next);
        cur = &fine;
        k = kn;
    }
    const auto& x = cur->sweep_values;
    const auto& y = cur->trace(out);
    r.offset = lerp(y[k], x[k], y[k + 1], x[k + 1], mid);
    r.gain = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
    return r;
}

AcMetrics Characterizer::ac_metrics(double offset) const {
    const FlatCircuit fc = elaborate(open_loop_bench(offset, AcDrive::Differential));
    const OperatingPoint op = dc_operating_point(fc, opts_.solver);
    AcMetrics m;
    m.response = ac_analysis(fc, op, opts_.ac_fstart, opts_.ac_fstop, opts_.ac_points_per_decade, opts_.solver);
    const auto& h = m.response.trace(out_trace(ports_));
    const auto& f = m.response.frequencies;

    std::vector<double> mag(h.size()), phase(h.size());
    double shift = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        mag[i] = std::abs(h[i]);
        const double p = std::arg(h[i]) * 180.0 / std::numbers::pi;
        if (i > 0) {
            const double prev = phase[i - 1];
            while (p + shift - prev > 180.0) shift -= 360.0;
            while (p + shift - prev < -180.0) shift += 360.0;
        }
        phase[i] = p + shift;
    }
    m.dc_gain_db = db(mag.front());

    for (std::size_t i = 0; i + 1 < mag.size(); ++i) {
        if (mag[i] >= 1.0 && mag[i + 1] < 1.0) {
            const double l0 = std::log10(f[i]), l1 = std::log10(f[i + 1]);
            const double lf = lerp(db(mag[i]), l0, db(mag[i + 1]), l1, 0.0);
            m.ugb_hz = std::pow(10.0, lf);
            m.phase_margin_deg = 180.0 + lerp(l0, phase[i], l1, phase[i + 1], lf);
            return m;
        }
    }
    throw CharacterizationError(
        fmt::format("open-loop gain has no 0 dB crossing between {} Hz and {} Hz", opts_.ac_fstart, opts_.ac_fstop));
}

RangeMetrics Characterizer::range_metrics(double offset, double gain) const {
    RangeMetrics m;
    const std::string out = out_trace(ports_);

    // ICMR: longest run of follower points with |vout - vin| within tolerance.
    m.follower_curve = sweep_points(follower_bench(SourceSpec{}), bench_names::kVin, 0.0, ports_.supply,
                                    opts_.icmr_points, opts_.solver);
    const auto& vin = m.follower_curve.sweep_values;
    const auto& vout = m.follower_curve.trace(out);
    const auto failed = std::count(m.follower_curve.converged.begin(), m.follower_curve.converged.end(), false);
    if (failed > 0)
        m.warnings.push_back(fmt::format("{} follower sweep points did not converge", failed));
    int best_lo = -1, best_len = 0, run_lo = -1;
    for (std::size_t i = 0; i <= vin.size(); ++i) {
        const bool pass = i < vin.size() && m.follower_curve.converged[i] &&
                          std::abs(vout[i] - vin[i]) <= opts_.icmr_tolerance;
        if (pass && run_lo < 0) run_lo = static_cast<int>(i);
        if (!pass && run_lo >= 0) {
            const int len = static_cast<int>(i) - run_lo;
            if (len > best_len) {
                best_len = len;
                best_lo = run_lo;
            }
            run_lo = -1;
        }
    }
    if (best_len < 2) throw CharacterizationError("follower never tracks its input within the ICMR tolerance");
    m.icmr = {vin[best_lo], vin[best_lo + best_len - 1]};

    // Swing: open-loop sweep wide enough to rail the output.
    if (!(std::abs(gain) > 0.0) || !std::isfinite(gain))
        throw CharacterizationError("output swing needs a finite non-zero transfer gain");
    const double w = 2.0 * ports_.supply / std::abs(gain);
    m.swing_curve = sweep_points(open_loop_bench(offset), bench_names::kVd, offset - w, offset + w,
                                 opts_.swing_points, opts_.solver);
    const auto& x = m.swing_curve.sweep_values;
    const auto& y = m.swing_curve.trace(out);
    const std::size_t n = x.size();
    std::vector<double> g(n, kNaN);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? i : i + 1;
        g[i] = std::abs((y[b] - y[a]) / (x[b] - x[a]));
    }
    std::size_t mid = 0;
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(y[i]) && std::abs(y[i] - ports_.supply / 2.0) < best) {
            best = std::abs(y[i] - ports_.supply / 2.0);
            mid = i;
        }
    if (!std::isfinite(g[mid]) || g[mid] <= 0.0) throw CharacterizationError("no gain at mid-swing");
    const double thr = g[mid] / std::numbers::sqrt2;
    auto edge = [&](int dir) {
        std::size_t i = mid;
        while (true) {
            const long j = static_cast<long>(i) + dir;
            if (j < 0 || j >= static_cast<long>(n)) {
                m.warnings.push_back("output swing reaches the edge of the sweep window");
                return y[i];
            }
            if (!(g[j] >= thr)) {
                if (!std::isfinite(g[j]) || !std::isfinite(y[j])) return y[i];
                const double xe = lerp(g[i], x[i], g[j], x[j], thr);
                return lerp(x[i], y[i], x[j], y[j], xe);
            }
            i = static_cast<std::size_t>(j);
        }
    };
    const double e1 = edge(-1), e2 = edge(+1);
    m.output_swing = {std::min(e1, e2), std::max(e1, e2)};
    if (!(m.output_swing.lo < m.output_swing.hi)) throw CharacterizationError("empty output swing");
    return m;
}

StepMetrics Characterizer::step_metrics() const {
    const double mid = ports_.supply / 2.0;
    const double half = 0.5 * opts_.step_fraction * ports_.supply;
    const std::string out = out_trace(ports_);
    double width = opts_.step_width;
    for (int attempt = 0; attempt <= opts_.step_widenings; ++attempt, width *= 4.0) {
        const double h = width / opts_.step_samples;
        PulseWaveform p;
        p.v1 = mid - half;
        p.v2 = mid + half;
        p.delay = width / 20.0;
        p.rise = p.fall = 2.0 * h;
        p.width = width;
        const double t_fall = p.delay + p.rise + p.width;
        const double tstop = t_fall + p.fall + width;
        SourceSpec in{p.v1, 0.0, 0.0, p};

        StepMetrics m;
        m.trace = transient(elaborate(follower_bench(in)), h, tstop, opts_.solver);
        const auto& t = m.trace.times;
        const auto& v = m.trace.trace(out);
        auto index_at = [&](double time) {
            return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), time - 1e-6 * h) - t.begin());
        };
        const std::size_t i_rise = index_at(p.delay), i_fall = index_at(t_fall), i_end = t.size() - 1;
        const EdgeResult rise = analyse_edge(t, v, i_rise, i_fall, 2.0 * half, true);
        const EdgeResult fall = analyse_edge(t, v, i_fall, i_end, 2.0 * half, false);
        if (!rise.settled || !fall.settled) continue;
        m.slew_rise = rise.slew;
        m.slew_fall = fall.slew;
        m.settling_rise = rise.settling;
        m.settling_fall = fall.settling;
        return m;
    }
    throw CharacterizationError(fmt::format("follower output did not settle within a {} s plateau", width / 4.0));
}

RejectionMetrics Characterizer::rejection_and_power(double offset) const {
    const FlatCircuit base = elaborate(open_loop_bench(offset));
    const OperatingPoint op = dc_operating_point(base, opts_.solver);
    const std::string out = out_trace(ports_);
    const std::vector<double> f{opts_.rejection_frequency};
    auto gain = [&](AcDrive d) {
        const FlatCircuit fc = elaborate(open_loop_bench(offset, d));
        return std::abs(ac_analysis(fc, op, f, opts_.solver).trace(out).front());
    };
    auto ratio_db = [](double num, double den) { return den <= 1e-12 * num ? kInf : db(num / den); };

    RejectionMetrics m;
    const double adm = gain(AcDrive::Differential);
    m.cmrr_db = ratio_db(adm, gain(AcDrive::CommonMode));
    m.psrr_pos_db = ratio_db(adm, gain(AcDrive::PositiveSupply));
    m.psrr_neg_db = ratio_db(adm, gain(AcDrive::NegativeSupply));
    m.power_w = -ports_.supply * branch_current(base, op, bench_names::kVdd);
    return m;
}

CharacterizationReport Characterizer::full_report() const {
    try {
        (void)dc_operating_point(elaborate(open_loop_bench(0.0)), opts_.solver);
    } catch (const std::exception& e) {
        throw CharacterizationError(std::string("DUT operating point failed: ") + e.what());
    }

    CharacterizationReport r;
    auto fail = [&](std::initializer_list<const char*> fields, const std::string& msg) {
        for (const char* f : fields) r.errors[f] = msg;
    };

    double offset = 0.0, gain = kNaN;
    try {
        const TransferResult t = dc_transfer_offset();
        offset = t.offset;
        gain = t.gain;
        r.input_offset_v = offset;
    } catch (const std::exception& e) {
        fail({"input_offset_v"}, e.what());
        r.warnings.push_back("offset unavailable; remaining metrics measured at zero differential input");
    }

    const auto policy = opts_.parallel ? std::launch::async : std::launch::deferred;
    auto ac = std::async(policy, [&] { return ac_metrics(offset); });
    auto range = std::async(policy, [&] { return range_metrics(offset, gain); });
    auto step = std::async(policy, [&] { return step_metrics(); });
    auto rej = std::async(policy, [&] { return rejection_and_power(offset); });

    try {
        const AcMetrics m = ac.get();
        r.dc_gain_db = m.dc_gain_db;
        r.ugb_hz = m.ugb_hz;
        r.phase_margin_deg = m.phase_margin_deg;
    } catch (const std::exception& e) {
        fail({"dc_gain_db", "ugb_hz", "phase_margin_deg"}, e.what());
    }
    try {
        const RangeMetrics m = range.get();
        r.icmr = m.icmr;
        r.output_swing = m.output_swing;
        r.warnings.insert(r.warnings.end(), m.warnings.begin(), m.warnings.end());
    } catch (const std::exception& e) {
        fail({"icmr", "output_swing"}, e.what());
    }
    try {
        const StepMetrics m = step.get();
        r.slew_rise_v_per_s = m.slew_rise;
        r.slew_fall_v_per_s = m.slew_fall;
        r.settling_rise_s = m.settling_rise;
        r.settling_fall_s = m.settling_fall;
    } catch (const std::exception& e) {
        fail({"slew_rise_v_per_s", "slew_fall_v_per_s", "settling_rise_s", "settling_fall_s"}, e.what());
    }
    try {
        const RejectionMetrics m = rej.get();
        r.cmrr_db = m.cmrr_db;
        r.psrr_pos_db = m.psrr_pos_db;
        r.psrr_neg_db = m.psrr_neg_db;
        r.power_w = m.power_w;
    } catch (const std::exception& e) {
        fail({"cmrr_db", "psrr_pos_db", "psrr_neg_db", "power_w"}, e.what());
    }
    return r;
}

namespace {

std::vector<std::pair<std::string, double>> scalar_fields(const CharacterizationReport& r) {
    return {{"dc_gain_db", r.dc_gain_db},
            {"ugb_hz", r.ugb_hz},
            {"phase_margin_deg", r.phase_margin_deg},
            {"input_offset_v", r.input_offset_v},
            {"slew_rise_v_per_s", r.slew_rise_v_per_s},
            {"slew_fall_v_per_s", r.slew_fall_v_per_s},
            {"settling_rise_s", r.settling_rise_s},
            {"settling_fall_s", r.settling_fall_s},
            {"cmrr_db", r.cmrr_db},
            {"psrr_pos_db", r.psrr_pos_db},
            {"psrr_neg_db", r.psrr_neg_db},
            {"power_w", r.power_w}};
}

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string eng(double v, const char* unit) {
    if (std::isnan(v)) return "n/a";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    static const std::pair<double, const char*> prefixes[] = {
        {1e9, "G"}, {1e6, "M"}, {1e3, "k"}, {1.0, ""}, {1e-3, "m"}, {1e-6, "u"}, {1e-9, "n"}, {1e-12, "p"}};
    const double a = std::abs(v);
    for (const auto& [scale, prefix] : prefixes)
        if (a >= scale) return fmt::format("{:.4g} {}{}", v / scale, prefix, unit);
    if (a == 0.0) return fmt::format("0 {}", unit);
    return fmt::format("{:.4g} f{}", v / 1e-15, unit);
}

std::string decibels(double v) {
    if (std::isinf(v)) return v > 0 ? "inf dB" : "-inf dB";
    return std::isnan(v) ? "n/a" : fmt::format("{:.2f} dB", v);
}

} // namespace

std::string to_json(const CharacterizationReport& r) {
    nlohmann::ordered_json j;
    nlohmann::json infinite = nlohmann::json::array();
    const auto scalars = scalar_fields(r);
    for (const auto& name : report_field_names()) {
        if (name == "icmr") {
            j[name] = {number(r.icmr.lo), number(r.icmr.hi)};
            continue;
        }
        if (name == "output_swing") {
            j[name] = {number(r.output_swing.lo), number(r.output_swing.hi)};
            continue;
        }
        const double v = std::find_if(scalars.begin(), scalars.end(), [&](auto& p) { return p.first == name; })->second;
        j[name] = number(v);
        if (std::isinf(v) && v > 0) infinite.push_back(name);
    }
    j["infinite"] = infinite;
    j["errors"] = r.errors;
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

std::string to_table(const CharacterizationReport& r) {
    auto range = [](const Interval& i) {
        if (!std::isfinite(i.lo) || !std::isfinite(i.hi)) return std::string("n/a");
        return fmt::format("{:.3f} V - {:.3f} V", i.lo, i.hi);
    };
    auto per_us = [](double v) { return std::isfinite(v) ? fmt::format("{:.4g} V/us", v * 1e-6) : "n/a"; };
    const std::vector<std::pair<std::string, std::string>> rows = {
        {"DC gain", decibels(r.dc_gain_db)},
        {"Unity gain bandwidth", eng(r.ugb_hz, "Hz")},
        {"Phase margin", std::isfinite(r.phase_margin_deg) ? fmt::format("{:.2f} deg", r.phase_margin_deg) : "n/a"},
        {"Input offset voltage", eng(r.input_offset_v, "V")},
        {"ICMR", range(r.icmr)},
        {"Output voltage swing", range(r.output_swing)},
        {"Slew rate (rise/fall)", per_us(r.slew_rise_v_per_s) + ", " + per_us(r.slew_fall_v_per_s)},
        {"Settling time (rise/fall)(1%)", eng(r.settling_rise_s, "s") + ", " + eng(r.settling_fall_s, "s")},
        {"CMRR", decibels(r.cmrr_db)},
        {"PSRR+", decibels(r.psrr_pos_db)},
        {"PSRR-", decibels(r.psrr_neg_db)},
        {"Total power dissipation", eng(r.power_w, "W")},
    };
    std::size_t width = std::string("Parameter").size();
    for (const auto& row : rows) width = std::max(width, row.first.size());
    std::string s = fmt::format("{:<{}}  {}\n", "Parameter", width, "Simulated Value");
    for (const auto& [k, v] : rows) s += fmt::format("{:<{}}  {}\n", k, width, v);
    for (const auto& [field, msg] : r.errors) s += fmt::format("error[{}]: {}\n", field, msg);
    return s;
}

} // namespace aota
