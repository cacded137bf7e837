#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "aota/adaptive_ota.hpp"
#include "aota/characterize.hpp"
#include "aota/engine.hpp"
#include "aota/netlist.hpp"

#ifndef AOTA_VERSION
#define AOTA_VERSION "unknown"
#endif

namespace aota::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// ParseError carrying the file it came from.
struct NetlistError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double quantity(const std::string& flag, const std::string& text) {
    try {
        return parse_value(text);
    } catch (const std::invalid_argument&) {
        throw UsageError(fmt::format("{}: '{}' is not a number", flag, text));
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path));
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Circuit load_netlist(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw NetlistError(fmt::format("{}:{}:{}: {}", path, e.line(), e.column(), e.detail()));
    }
}

void write_atomic(const fs::path& path, const std::string& data) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError(fmt::format("cannot write '{}'", tmp.string()));
        f << data;
        if (!f.flush()) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError(fmt::format("write to '{}' failed", tmp.string()));
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError(fmt::format("cannot rename onto '{}'", path.string()));
    }
}

// Data to `out` or to `path`, the latter with a metadata sidecar.
class Output {
public:
    Output(std::ostream& out, std::vector<std::string> args) : out_(out), args_(std::move(args)) {}

    void emit(const std::optional<std::string>& path, const std::string& data) const {
        if (!path) {
            out_ << data;
            return;
        }
        write_atomic(*path, data);
        json meta;
        meta["tool"] = "aota";
        meta["version"] = AOTA_VERSION;
        meta["args"] = args_;
        meta["created"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)));
        write_atomic(*path + ".meta.json", meta.dump(2) + "\n");
    }

private:
    std::ostream& out_;
    std::vector<std::string> args_;
};

struct RunArgs {
    std::string netlist;
    std::optional<std::string> out;
    std::string format = "csv";
};

std::string run_netlist(const RunArgs& a, std::ostream& err, bool verbose) {
    const Circuit c = load_netlist(a.netlist);
    const FlatCircuit fc = elaborate(c);
    std::vector<AnalysisDirective> directives = fc.directives;
    if (directives.empty()) directives.push_back(OpDirective{});

    const SolverOptions opts;
    std::optional<OperatingPoint> op;
    auto ensure_op = [&]() -> const OperatingPoint& {
        if (!op) op = dc_operating_point(fc, opts);
        return *op;
    };

    std::vector<std::string> csv;
    json blocks = json::array();
    for (const auto& d : directives) {
        std::string kind, c_text, j_text;
        if (std::holds_alternative<OpDirective>(d)) {
            kind = "op";
            c_text = to_csv(ensure_op(), fc);
            j_text = to_json(*op, fc);
        } else if (const auto* dc = std::get_if<DcDirective>(&d)) {
            kind = "dc";
            const SweepResult r = dc_sweep(fc, dc->source, dc->start, dc->stop, dc->step, opts);
            if (!r.all_converged()) err << fmt::format("warning: dc sweep of {} has non-converged points\n", dc->source);
            c_text = to_csv(r);
            j_text = to_json(r);
        } else if (const auto* ac = std::get_if<AcDirective>(&d)) {
            kind = "ac";
            const AcResult r = ac_analysis(fc, ensure_op(), ac->fstart, ac->fstop, ac->points_per_decade, opts);
            c_text = to_csv(r);
            j_text = to_json(r);
        } else {
            const auto& tr = std::get<TranDirective>(d);
            kind = "tran";
            const TransientResult r = transient(fc, tr.tstep, tr.tstop, opts);
            c_text = to_csv(r);
            j_text = to_json(r);
        }
        if (verbose) err << fmt::format("{}: {} done\n", a.netlist, kind);
        csv.push_back(std::move(c_text));
        blocks.push_back({{"analysis", kind}, {"result", json::parse(j_text)}});
    }

    if (a.format == "json") return json{{"title", fc.title}, {"analyses", blocks}}.dump(2) + "\n";
    std::string s;
    for (std::size_t i = 0; i < csv.size(); ++i) s += (i ? "\n" : "") + csv[i];
    return s;
}

struct TemplateArgs {
    std::string a = "0";
    std::string bias = "1u";
    std::string b = "1";
    std::string supply = "2";
    std::string cload = "5p";
};

OtaTemplateParams make_template(const TemplateArgs& t, double a) {
    OtaTemplateParams p;
    p.bias.a = a;
    p.bias.b = quantity("--b", t.b);
    p.bias.ibias = quantity("--bias", t.bias);
    p.supply = quantity("--supply", t.supply);
    p.load_cap = quantity("--cload", t.cload);
    try {
        p.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    return p;
}

std::vector<double> parse_a_list(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) out.push_back(quantity("A list", tok));
    }
    if (out.empty()) throw UsageError("sweep-a needs at least one A value");
    return out;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive-bias OTA simulation and characterization toolkit", "aota"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Progress messages on stderr");
    app.set_version_flag("--version", AOTA_VERSION);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Execute every analysis directive in a netlist");
    run->add_option("netlist", run_args.netlist, "Netlist file")->required();
    run->add_option("--out", run_args.out, "Output file (default stdout)");
    run->add_option("--format", run_args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    DutPorts ports;
    std::string ch_netlist, ch_supply = "2", ch_cload = "5p";
    std::optional<std::string> ch_report;
    bool ch_serial = false;
    auto* chz = app.add_subcommand("characterize", "Full metric report for an opamp netlist");
    chz->add_option("netlist", ch_netlist, "Netlist file")->required();
    chz->add_option("--inp", ports.inp, "Non-inverting input node")->capture_default_str();
    chz->add_option("--inn", ports.inn, "Inverting input node")->capture_default_str();
    chz->add_option("--out-node", ports.out, "Output node")->capture_default_str();
    chz->add_option("--vdd", ports.vdd, "Positive supply node")->capture_default_str();
    chz->add_option("--gnd", ports.gnd, "Ground node")->capture_default_str();
    chz->add_option("--supply", ch_supply, "Supply voltage")->capture_default_str();
    chz->add_option("--cload", ch_cload, "Load capacitance")->capture_default_str();
    chz->add_option("--report", ch_report, "Write the JSON report here");
    chz->add_flag("--serial", ch_serial, "Run metric groups one after another");

    std::string f_a, f_bias = "1u", f_b = "1", f_n = "1.6", f_temp = "300", f_range = "8";
    int f_points = 201;
    std::optional<std::string> f_out;
    auto* fig = app.add_subcommand("fig10", "Normalized output and supply current curves");
    fig->add_option("--A", f_a, "Current feedback factor, 0 <= A <= 1")->required();
    fig->add_option("--bias", f_bias, "Bias current")->capture_default_str();
    fig->add_option("--b", f_b, "Output mirror ratio")->capture_default_str();
    fig->add_option("--n", f_n, "Slope factor")->capture_default_str();
    fig->add_option("--temp", f_temp, "Temperature in kelvin")->capture_default_str();
    fig->add_option("--range", f_range, "Half-width in vin/(n VT)")->capture_default_str();
    fig->add_option("--points", f_points, "Number of points")->capture_default_str();
    fig->add_option("--out", f_out, "Output file (default stdout)");

    TemplateArgs g;
    bool g_basic = false;
    std::optional<std::string> g_out;
    auto* gen = app.add_subcommand("gen-ota", "Emit a generated OTA netlist");
    gen->add_option("--A", g.a, "Current feedback factor, 0 <= A < 1")->capture_default_str();
    gen->add_option("--bias", g.bias, "Bias current")->capture_default_str();
    gen->add_option("--b", g.b, "Output mirror ratio")->capture_default_str();
    gen->add_option("--supply", g.supply, "Supply voltage")->capture_default_str();
    gen->add_option("--cload", g.cload, "Load capacitance")->capture_default_str();
    gen->add_flag("--basic", g_basic, "Omit the adaptive bias loop");
    gen->add_option("--out", g_out, "Output file (default stdout)");

    TemplateArgs s;
    std::vector<std::string> s_list;
    std::optional<std::string> s_out;
    bool s_serial = false;
    auto* swp = app.add_subcommand("sweep-a", "Characterize the generated OTA over a list of A values");
    swp->add_option("values", s_list, "A values, space or comma separated")->required();
    swp->add_option("--bias", s.bias, "Bias current")->capture_default_str();
    swp->add_option("--b", s.b, "Output mirror ratio")->capture_default_str();
    swp->add_option("--supply", s.supply, "Supply voltage")->capture_default_str();
    swp->add_option("--cload", s.cload, "Load capacitance")->capture_default_str();
    swp->add_option("--out", s_out, "Output file (default stdout)");
    swp->add_flag("--serial", s_serial, "Run characterizations one after another");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    const Output output(out, args);
    try {
        if (*run) {
            output.emit(run_args.out, run_netlist(run_args, err, verbose));
        } else if (*chz) {
            ports.supply = quantity("--supply", ch_supply);
            ports.load_cap = quantity("--cload", ch_cload);
            const Circuit c = load_netlist(ch_netlist);
            CharacterizeOptions opts;
            opts.parallel = !ch_serial;
            std::optional<Characterizer> ch;
            try {
                ch.emplace(c, ports, opts);
            } catch (const PortError& e) {
                throw UsageError(e.what());
            }
            const CharacterizationReport r = ch->full_report();
            for (const auto& w : r.warnings) err << "warning: " << w << "\n";
            for (const auto& [field, msg] : r.errors) err << fmt::format("error: {}: {}\n", field, msg);
            out << to_table(r);
            if (ch_report) output.emit(ch_report, to_json(r));
        } else if (*fig) {
            AdaptiveBiasParams p;
            p.a = quantity("--A", f_a);
            p.ibias = quantity("--bias", f_bias);
            p.b = quantity("--b", f_b);
            p.n = quantity("--n", f_n);
            p.env.temperature = quantity("--temp", f_temp);
            const double range = quantity("--range", f_range);
            if (p.a > 1.0)
                throw UsageError(fmt::format("--A {} is out of range: the closed form requires A <= 1", f_a));
            std::vector<Fig10Row> rows;
            try {
                rows = fig10_curves(p.a, p, range, f_points);
            } catch (const std::logic_error& e) {
                throw UsageError(e.what());
            }
            output.emit(f_out, fig10_csv(rows));
        } else if (*gen) {
            const double a = quantity("--A", g.a);
            const OtaTemplateParams p = make_template(g, a);
            std::string text;
            try {
                text = g_basic ? build_basic_ota(p) : build_adaptive_ota(p);
            } catch (const std::logic_error& e) {
                throw UsageError(e.what());
            }
            output.emit(g_out, text);
        } else if (*swp) {
            const std::vector<double> as = parse_a_list(s_list);
            std::vector<OtaTemplateParams> templates;
            std::vector<Circuit> circuits;
            for (double a : as) {
                templates.push_back(make_template(s, a));
                try {
                    circuits.push_back(parse(build_adaptive_ota(templates.back())));
                } catch (const std::logic_error& e) {
                    throw UsageError(e.what());
                }
            }
            const auto policy = s_serial ? std::launch::deferred : std::launch::async;
            std::vector<std::future<CharacterizationReport>> jobs;
            for (std::size_t i = 0; i < as.size(); ++i) {
                jobs.push_back(std::async(policy, [&, i] {
                    DutPorts dp;
                    dp.supply = templates[i].supply;
                    dp.load_cap = templates[i].load_cap;
                    CharacterizeOptions opts;
                    opts.parallel = false;
                    return Characterizer(circuits[i], dp, opts).full_report();
                }));
            }
            std::string csv = "a,slew_rise_v_per_s,slew_fall_v_per_s,power_w\n";
            bool failed = false;
            for (std::size_t i = 0; i < as.size(); ++i) {
                const CharacterizationReport r = jobs[i].get();
                for (const auto& [field, msg] : r.errors) {
                    if (field.rfind("slew", 0) == 0 || field == "power_w") failed = true;
                    err << fmt::format("A={}: {}: {}\n", as[i], field, msg);
                }
                if (verbose) err << fmt::format("A={} done\n", as[i]);
                csv += fmt::format("{},{},{},{}\n", as[i], r.slew_rise_v_per_s, r.slew_fall_v_per_s, r.power_w);
            }
            if (failed) {
                err << "error: slew or power could not be measured for every A\n";
                return kSimulationFailure;
            }
            output.emit(s_out, csv);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NetlistError& e) {
        err << "parse error: " << e.what() << "\n";
        return kParseError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kSimulationFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kSimulationFailure;
    }
    return kOk;
}

} // namespace aota::cli
