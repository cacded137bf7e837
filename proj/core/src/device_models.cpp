#include "aota/device_models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aota {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) {
    if (z > 30.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::domain_error(std::string("non-finite ") + what);
}

DeviceEval nmos_eval(const MosParams& p, double vg, double vs, double vd, double vt) {
    const double ispec = 2.0 * p.n * p.kp * (p.w / p.l) * vt * vt;
    const double vp = (vg - p.vt0) / p.n;
    const double uf = vp - vs;
    const double ur = vp - vd;

    const double ff = normalized_current(uf, vt);
    const double fr = normalized_current(ur, vt);
    const double dff = normalized_current_slope(uf, vt);
    const double dfr = normalized_current_slope(ur, vt);

    const double vds = vd - vs;
    const double clm = 1.0 + p.lambda * std::abs(vds);
    const double sgn = (vds > 0.0) ? 1.0 : (vds < 0.0 ? -1.0 : 0.0);
    const double core = ispec * (ff - fr);

    DeviceEval e;
    e.id = core * clm;
    e.gm = ispec * (dff - dfr) / p.n * clm;
    e.gds = ispec * dfr * clm + core * p.lambda * sgn;
    e.gms = ispec * dff * clm + core * p.lambda * sgn;
    return e;
}

} // namespace

double thermal_voltage(const ThermalEnv& env) {
    if (!(env.temperature > 0.0) || !std::isfinite(env.temperature))
        throw std::domain_error("temperature must be a positive number of kelvin");
    return kBoltzmann * env.temperature / kElementaryCharge;
}

void MosParams::validate() const {
    if (!(w > 0.0)) throw std::domain_error("MOS width must be > 0");
    if (!(l > 0.0)) throw std::domain_error("MOS length must be > 0");
    if (!(kp > 0.0)) throw std::domain_error("MOS kp must be > 0");
    if (!(n >= 1.0)) throw std::domain_error("MOS slope factor n must be >= 1");
    if (!(lambda >= 0.0)) throw std::domain_error("MOS lambda must be >= 0");
    if (!std::isfinite(vt0) || !std::isfinite(w) || !std::isfinite(l) || !std::isfinite(kp) ||
        !std::isfinite(n) || !std::isfinite(lambda))
        throw std::domain_error("MOS parameters must be finite");
}

double MosParams::specific_current(const ThermalEnv& env) const {
    const double vt = thermal_voltage(env);
    return 2.0 * n * kp * (w / l) * vt * vt;
}

MosParams default_nmos(double w, double l) {
    return MosParams{Polarity::Nmos, 0.7, 1.5, 100e-6, w, l, 0.02};
}

MosParams default_pmos(double w, double l) {
    return MosParams{Polarity::Pmos, -0.9, 1.6, 35e-6, w, l, 0.02};
}

double normalized_current(double u, double vt) {
    const double s = softplus(u / (2.0 * vt));
    return s * s;
}

double normalized_current_slope(double u, double vt) {
    const double z = u / (2.0 * vt);
    return softplus(z) * logistic(z) / vt;
}

DeviceEval drain_current(const MosParams& p, double vg, double vs, double vd, const ThermalEnv& env) {
    require_finite(vg, "gate voltage");
    require_finite(vs, "source voltage");
    require_finite(vd, "drain voltage");
    const double vt = thermal_voltage(env);

    if (p.polarity == Polarity::Nmos) return nmos_eval(p, vg, vs, vd, vt);

    MosParams mirrored = p;
    mirrored.polarity = Polarity::Nmos;
    mirrored.vt0 = -p.vt0;
    DeviceEval e = nmos_eval(mirrored, -vg, -vs, -vd, vt);
    // d(-f(-x))/dx = f'(-x): conductances keep their sign, the current flips.
    e.id = -e.id;
    return e;
}

double PulseWaveform::value_at(double t) const {
    if (t < delay) return v1;
    double tau = t - delay;
    if (period && *period > 0.0) tau = std::fmod(tau, *period);
    if (tau < rise) return v1 + (v2 - v1) * (tau / rise);
    tau -= rise;
    if (tau < width) return v2;
    tau -= width;
    if (tau < fall) return v2 + (v1 - v2) * (tau / fall);
    return v1;
}

CapacitorCompanion capacitor_companion(double c, double h, double v_prev, double i_prev, Integrator method) {
    if (method == Integrator::BackwardEuler) {
        const double g = c / h;
        return {g, g * v_prev};
    }
    const double g = 2.0 * c / h;
    return {g, g * v_prev + i_prev};
}

} // namespace aota
