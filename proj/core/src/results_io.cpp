#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "aota/engine.hpp"

namespace aota {

namespace {

using nlohmann::json;

std::string num(double v) { return fmt::format("{}", v); }

void header(std::ostringstream& out, const std::string& first, const std::vector<std::string>& names) {
    out << first;
    for (const auto& n : names) out << ',' << n;
    out << '\n';
}

json real_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
    return a;
}

} // namespace

std::string to_csv(const OperatingPoint& op, const FlatCircuit& fc) {
    std::ostringstream out;
    const auto names = trace_names(fc);
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
    bool first = true;
    for (std::size_t i = 1; i < op.node_voltages.size(); ++i) {
        out << (first ? "" : ",") << num(op.node_voltages[i]);
        first = false;
    }
    for (double b : op.branch_currents) {
        out << (first ? "" : ",") << num(b);
        first = false;
    }
    out << '\n';
    return out.str();
}

std::string to_csv(const SweepResult& r) {
    std::ostringstream out;
    std::vector<std::string> names = r.trace_names;
    names.push_back("converged");
    header(out, r.sweep_name, names);
    for (std::size_t k = 0; k < r.sweep_values.size(); ++k) {
        out << num(r.sweep_values[k]);
        for (const auto& t : r.traces) out << ',' << num(t[k]);
        out << ',' << (r.converged[k] ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string to_csv(const AcResult& r) {
    std::ostringstream out;
    out << "frequency";
    for (const auto& n : r.trace_names) out << ',' << n << "_re," << n << "_im";
    out << '\n';
    for (std::size_t k = 0; k < r.frequencies.size(); ++k) {
        out << num(r.frequencies[k]);
        for (const auto& t : r.traces) out << ',' << num(t[k].real()) << ',' << num(t[k].imag());
        out << '\n';
    }
    return out.str();
}

std::string to_csv(const TransientResult& r) {
    std::ostringstream out;
    header(out, "time", r.trace_names);
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        out << num(r.times[k]);
        for (const auto& t : r.traces) out << ',' << num(t[k]);
        out << '\n';
    }
    return out.str();
}

std::string to_json(const OperatingPoint& op, const FlatCircuit& fc) {
    json j;
    j["analysis"] = "op";
    json values = json::object();
    const auto names = trace_names(fc);
    std::size_t t = 0;
    for (std::size_t i = 1; i < op.node_voltages.size(); ++i) values[names[t++]] = op.node_voltages[i];
    for (double b : op.branch_currents) values[names[t++]] = b;
    j["values"] = values;
    json devices = json::object();
    for (const auto& d : op.device_evals)
        devices[d.name] = {{"id", d.eval.id}, {"gm", d.eval.gm}, {"gms", d.eval.gms}, {"gds", d.eval.gds}};
    j["devices"] = devices;
    j["residual_norm"] = op.residual_norm;
    j["iterations"] = op.iterations;
    return j.dump(2) + "\n";
}

std::string to_json(const SweepResult& r) {
    json j;
    j["analysis"] = "dc";
    j["sweep"] = {{"name", r.sweep_name}, {"values", r.sweep_values}};
    json traces = json::object();
    for (std::size_t i = 0; i < r.trace_names.size(); ++i) traces[r.trace_names[i]] = real_array(r.traces[i]);
    j["traces"] = traces;
    j["converged"] = r.converged;
    return j.dump(2) + "\n";
}

std::string to_json(const AcResult& r) {
    json j;
    j["analysis"] = "ac";
    j["frequencies"] = r.frequencies;
    json traces = json::object();
    for (std::size_t i = 0; i < r.trace_names.size(); ++i) {
        json re = json::array(), im = json::array();
        for (const auto& c : r.traces[i]) {
            re.push_back(c.real());
            im.push_back(c.imag());
        }
        traces[r.trace_names[i]] = {{"re", re}, {"im", im}};
    }
    j["traces"] = traces;
    return j.dump(2) + "\n";
}

std::string to_json(const TransientResult& r) {
    json j;
    j["analysis"] = "tran";
    j["times"] = r.times;
    json traces = json::object();
    for (std::size_t i = 0; i < r.trace_names.size(); ++i) traces[r.trace_names[i]] = real_array(r.traces[i]);
    j["traces"] = traces;
    return j.dump(2) + "\n";
}

} // namespace aota
