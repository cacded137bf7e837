#include "aota/adaptive_ota.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "aota/netlist.hpp"

namespace aota {

namespace {

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::domain_error(std::string("non-finite ") + what);
}

void check_a_le_one(double a) {
    if (!(a >= 0.0)) throw std::domain_error("current feedback factor A must be >= 0");
    if (a > 1.0) throw std::domain_error("closed form requires A <= 1 (A > 1 never slews; output current unbounded)");
}

} // namespace

void AdaptiveBiasParams::validate() const {
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::domain_error("A must be a finite value >= 0");
    if (!(b > 0.0) || !std::isfinite(b)) throw std::domain_error("b must be > 0");
    if (!(ibias > 0.0) || !std::isfinite(ibias)) throw std::domain_error("I_BIAS must be > 0");
    if (!(n >= 1.0) || !std::isfinite(n)) throw std::domain_error("slope factor n must be >= 1");
    (void)thermal_voltage(env);
}

double AdaptiveBiasParams::slope_voltage() const { return n * thermal_voltage(env); }

double tail_current_series(double a, double ibias, int terms) {
    if (!(a >= 0.0)) throw std::domain_error("A must be >= 0");
    if (terms < 1) throw std::domain_error("series needs at least one term");
    double sum = 0.0;
    double term = 1.0;
    for (int k = 0; k < terms; ++k) {
        sum += term;
        term *= a;
    }
    return ibias * sum;
}

double total_tail_current(double a, double ibias) {
    if (!(a >= 0.0)) throw std::domain_error("A must be >= 0");
    if (!(a < 1.0)) throw std::domain_error("closed form requires A < 1");
    return ibias / (1.0 - a);
}

PairCurrents pair_currents(double vin, const AdaptiveBiasParams& p) {
    check_finite(vin, "input voltage");
    p.validate();
    check_a_le_one(p.a);
    const double x = std::abs(vin) / p.slope_voltage();
    const double em = std::exp(-x);
    // Large-current side: ibias e^x / ((a+1) - (a-1) e^x), divided through by e^x.
    const double big = p.ibias / ((1.0 + p.a) * em + (1.0 - p.a));
    const double small = big * em;
    return vin >= 0.0 ? PairCurrents{big, small} : PairCurrents{small, big};
}

double output_current(double vin, const AdaptiveBiasParams& p) {
    check_finite(vin, "input voltage");
    p.validate();
    check_a_le_one(p.a);
    const double x = std::abs(vin) / p.slope_voltage();
    double mag;
    if (p.a == 1.0) {
        mag = 0.5 * p.b * p.ibias * std::expm1(x);
    } else {
        const double em = std::exp(-x);
        mag = p.b * p.ibias * (-std::expm1(-x)) / ((1.0 + p.a) * em + (1.0 - p.a));
    }
    return vin >= 0.0 ? mag : -mag;
}

std::vector<Fig10Row> fig10_curves(double a, const AdaptiveBiasParams& p, double x_range, int points) {
    if (points < 2) throw std::invalid_argument("fig10 needs at least 2 points");
    if (!(x_range > 0.0) || !std::isfinite(x_range)) throw std::invalid_argument("x range must be > 0");
    AdaptiveBiasParams q = p;
    q.a = a;
    q.validate();
    check_a_le_one(a);
    const double nvt = q.slope_voltage();

    std::vector<Fig10Row> rows;
    rows.reserve(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        double x = -x_range + 2.0 * x_range * static_cast<double>(k) / (points - 1);
        if (2 * k == points - 1) x = 0.0;
        const double vin = x * nvt;
        const PairCurrents pc = pair_currents(vin, q);
        rows.push_back({x, output_current(vin, q) / q.ibias, (pc.i1 + pc.i2) / q.ibias});
    }
    return rows;
}

std::string fig10_csv(const std::vector<Fig10Row>& rows) {
    std::ostringstream out;
    out << "x,iout_over_ibias,supply_over_ibias\n";
    for (const auto& r : rows) out << fmt::format("{},{},{}\n", r.x, r.iout_over_ibias, r.supply_over_ibias);
    return out.str();
}

MirrorRatio realize_ratio(double value, int max_units) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("mirror ratio must be finite and >= 0");
    for (int den = 1; den <= max_units; ++den) {
        const double num = std::round(value * den);
        if (num > max_units) break;
        if (std::abs(num / den - value) <= 1e-9 * std::max(1.0, value))
            return {static_cast<int>(num), den};
    }
    throw std::invalid_argument(
        fmt::format("mirror ratio {} is not realizable with integer device multiplicity <= {}", value, max_units));
}

MosParams default_pair_pmos() {
    MosParams p = default_pmos();
    p.vt0 = -0.5;
    return p;
}

void OtaTemplateParams::validate() const {
    bias.validate();
    if (!(supply > 0.0)) throw std::domain_error("supply must be > 0");
    if (!(load_cap > 0.0)) throw std::domain_error("load capacitance must be > 0");
    for (double d : {pair_w, pair_l, nmirror_w, nmirror_l, pmirror_w, pmirror_l, tail_w, tail_l})
        if (!(d > 0.0)) throw std::domain_error("device W and L must be > 0");
    if (nmos_card.polarity != Polarity::Nmos || pmos_card.polarity != Polarity::Pmos ||
        pair_card.polarity != Polarity::Pmos)
        throw std::domain_error("template model cards have the wrong polarity");
    nmos_card.validate();
    pmos_card.validate();
    pair_card.validate();
    if (to_lower(pair_model) == to_lower(pmos_model) && !(pair_card == pmos_card))
        throw std::domain_error("pair and PMOS model names match but the cards differ");
}

namespace {

class OtaWriter {
public:
    explicit OtaWriter(const OtaTemplateParams& t) : t_(t) {
        c_.models.emplace(to_lower(t.nmos_model), t.nmos_card);
        c_.models.emplace(to_lower(t.pmos_model), t.pmos_card);
        c_.models.emplace(to_lower(t.pair_model), t.pair_card); // no-op when it shares the PMOS name
    }

    void nmos(const std::string& name, const std::string& d, const std::string& g, const std::string& s, int units) {
        mos(name, d, g, s, t_.nmos_model, t_.nmirror_w * units, t_.nmirror_l);
    }
    void pmos(const std::string& name, const std::string& d, const std::string& g, const std::string& s, int units) {
        mos(name, d, g, s, t_.pmos_model, t_.pmirror_w * units, t_.pmirror_l);
    }
    void tail(const std::string& name, const std::string& d, const std::string& g) {
        mos(name, d, g, ota_names::kVdd, t_.pmos_model, t_.tail_w, t_.tail_l);
    }
    void pair(const std::string& name, const std::string& d, const std::string& g) {
        mos(name, d, g, ota_names::kTail, t_.pair_model, t_.pair_w, t_.pair_l);
    }
    void source(ElementKind kind, const std::string& name, const std::string& p, const std::string& n, double dc) {
        Element e;
        e.kind = kind;
        e.name = name;
        e.nodes = {p, n};
        e.value = SourceSpec{dc, 0.0, 0.0, std::nullopt};
        c_.add(std::move(e));
    }
    void capacitor(const std::string& name, const std::string& p, const std::string& n, double value) {
        Element e;
        e.kind = ElementKind::Capacitor;
        e.name = name;
        e.nodes = {p, n};
        e.value = PassiveValue{value};
        c_.add(std::move(e));
    }

    std::string finish(const std::string& title, const std::string& comment) {
        c_.title = title;
        if (t_.include_testbench) c_.directives.push_back(OpDirective{});
        std::string text = to_netlist(c_);
        const auto nl = text.find('\n');
        return text.substr(0, nl + 1) + comment + text.substr(nl + 1);
    }

private:
    void mos(const std::string& name, const std::string& d, const std::string& g, const std::string& s,
             const std::string& model, double w, double l) {
        Element e;
        e.kind = ElementKind::Mosfet;
        e.name = name;
        e.nodes = {d, g, s};
        e.value = MosInstance{to_lower(model), w, l};
        c_.add(std::move(e));
    }

    const OtaTemplateParams& t_;
    Circuit c_;
};

// Common core. Returns the b ratio used.
MirrorRatio emit_core(OtaWriter& w, const OtaTemplateParams& t) {
    using namespace ota_names;
    const MirrorRatio rb = realize_ratio(t.bias.b);
    if (rb.num == 0) throw std::invalid_argument("b must be > 0");

    if (t.include_testbench) {
        w.source(ElementKind::VSource, kSupplySource, kVdd, kGnd, t.supply);
        w.source(ElementKind::VSource, kInpSource, kInp, kGnd, t.common_mode());
        w.source(ElementKind::VSource, kInnSource, kInn, kGnd, t.common_mode());
        w.capacitor(kLoad, kOut, kGnd, t.load_cap);
    }
    // Tail: PMOS m0 mirrors the reference diode mb, which sinks ibias.
    w.source(ElementKind::ISource, kTailSource, kBias, kGnd, t.bias.ibias);
    w.tail(kBiasDiode, kBias, kBias);
    w.tail(kTailDevice, kTail, kBias);

    // m1 carries I1 and conducts harder when v(inp) > v(inn).
    w.pair(kPairI1, "d1", kInn);
    w.pair(kPairI2, "d2", kInp);
    w.nmos("m3", "d1", "d1", kGnd, rb.den);
    w.nmos("m4", "d2", "d2", kGnd, rb.den);
    w.nmos("m5", "p1", "d1", kGnd, rb.num);
    w.nmos("m6", kOut, "d2", kGnd, rb.num);
    w.pmos("m7", "p1", "p1", kVdd, rb.num);
    w.pmos("m8", kOut, "p1", kVdd, rb.num);
    return rb;
}

std::string describe(const OtaTemplateParams& t, const char* kind) {
    return fmt::format("{} OTA (A={}, b={}, Ibias={}, supply={})", kind, format_value(t.bias.a),
                       format_value(t.bias.b), format_value(t.bias.ibias), format_value(t.supply));
}

} // namespace

std::string build_basic_ota(const OtaTemplateParams& t) {
    t.validate();
    OtaWriter w(t);
    emit_core(w, t);
    return w.finish(describe(t, "basic"), "* generated: tail source m0 (reference mb), PMOS pair m1/m2, diode loads m3/m4, output mirrors m5-m8\n");
}

std::string build_adaptive_ota(const OtaTemplateParams& t) {
    t.validate();
    if (!(t.bias.a < 1.0)) throw std::domain_error("adaptive OTA requires A < 1");
    using namespace ota_names;

    OtaWriter w(t);
    const MirrorRatio rb = emit_core(w, t);
    const MirrorRatio ra = realize_ratio(t.bias.a);

    // PMOS copies of I1 (q1) and I2 (q2).
    w.nmos("m9", "q1", "d1", kGnd, rb.den);
    w.pmos("m10", "q1", "q1", kVdd, 1);
    w.nmos("m12", "q2", "d2", kGnd, rb.den);
    w.pmos("m13", "q2", "q2", kVdd, 1);

    // Subtractor A: s1 sinks I1 and is fed I2; diode m16 supplies max(I1 - I2, 0).
    w.nmos("m11", "s1", "d1", kGnd, rb.den);
    w.pmos("m14", "s1", "q2", kVdd, 1);
    w.pmos(kSubtractorDiodeA, "s1", "s1", kVdd, ra.den);

    // Subtractor B: mirror image, diode m19 supplies max(I2 - I1, 0).
    w.nmos("m15", "s2", "d2", kGnd, rb.den);
    w.pmos("m17", "s2", "q1", kVdd, 1);
    w.pmos(kSubtractorDiodeB, "s2", "s2", kVdd, ra.den);

    // Injectors scale by a = num/den into the tail; omitted when a = 0.
    if (ra.num > 0) {
        w.pmos(kInjectorA, kTail, "s1", kVdd, ra.num);
        w.pmos(kInjectorB, kTail, "s2", kVdd, ra.num);
    }
    return w.finish(describe(t, "adaptive-bias"),
                    "* generated: basic OTA m0-m8 with reference mb, current copies m9/m10 m12/m13, subtractors m11/m14/m16 and "
                    "m15/m17/m19, tail injectors m18/m20\n");
}

} // namespace aota
