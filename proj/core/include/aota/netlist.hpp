#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aota/device_models.hpp"

namespace aota {

/// Syntax or validation failure while reading a netlist. line and column are
/// 1-based; column 0 means the whole card.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string detail_;
};

/// elaborate() failure, e.g. a node without a DC path to ground.
class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ElementKind {
    Resistor,  // R
    Capacitor, // C
    VSource,   // V
    ISource,   // I
    Mosfet,    // M
    Vcvs,      // E
    Vccs,      // G
};

char element_letter(ElementKind kind);

struct PassiveValue {
    double value = 0.0;
    friend bool operator==(const PassiveValue&, const PassiveValue&) = default;
};

struct MosInstance {
    std::string model;
    double w = 0.0;
    double l = 0.0;
    friend bool operator==(const MosInstance&, const MosInstance&) = default;
};

/// E: v(n+,n-) = clamp(gain * v(c+,c-), lower, upper).
/// G: i(n+ -> n-) = gain * v(c+,c-), or limit * tanh(gain * v / limit) when limit is set.
struct ControlledValue {
    double gain = 0.0;
    std::optional<double> lower;
    std::optional<double> upper;
    std::optional<double> limit;
    friend bool operator==(const ControlledValue&, const ControlledValue&) = default;
};

using ElementValue = std::variant<PassiveValue, SourceSpec, MosInstance, ControlledValue>;

/// One netlist card. Node order: R/C/V/I (n+, n-); M (drain, gate, source);
/// E/G (n+, n-, c+, c-). Names are stored lower-case.
struct Element {
    ElementKind kind = ElementKind::Resistor;
    std::string name;
    std::vector<std::string> nodes;
    ElementValue value;

    double passive() const { return std::get<PassiveValue>(value).value; }
    const SourceSpec& source() const { return std::get<SourceSpec>(value); }
    SourceSpec& source() { return std::get<SourceSpec>(value); }
    const MosInstance& mos() const { return std::get<MosInstance>(value); }
    const ControlledValue& controlled() const { return std::get<ControlledValue>(value); }

    friend bool operator==(const Element&, const Element&) = default;
};

struct OpDirective {
    friend bool operator==(const OpDirective&, const OpDirective&) = default;
};
struct DcDirective {
    std::string source;
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
    friend bool operator==(const DcDirective&, const DcDirective&) = default;
};
struct AcDirective {
    int points_per_decade = 10;
    double fstart = 1.0;
    double fstop = 1e6;
    friend bool operator==(const AcDirective&, const AcDirective&) = default;
};
struct TranDirective {
    double tstep = 0.0;
    double tstop = 0.0;
    friend bool operator==(const TranDirective&, const TranDirective&) = default;
};

using AnalysisDirective = std::variant<OpDirective, DcDirective, AcDirective, TranDirective>;

struct Circuit {
    std::string title;
    std::vector<Element> elements;
    std::map<std::string, MosParams> models;
    std::vector<AnalysisDirective> directives;
    std::set<std::string> node_names;

    const Element* find(std::string_view name) const;
    Element* find(std::string_view name);
    /// Removes the named element; returns false when it does not exist.
    bool remove(std::string_view name);
    /// Appends an element after checking the name is unused and the node count
    /// matches the kind. Keeps node_names in sync.
    void add(Element e);
    /// Renames a node everywhere it is referenced.
    void rename_node(const std::string& from, const std::string& to);
    /// Recomputes node_names from the element list.
    void refresh_nodes();

    friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// Parses a numeric literal with an optional engineering suffix
/// (f p n u m k meg g, case-insensitive, `meg` taking precedence over `m`).
/// Throws std::invalid_argument on anything else.
double parse_value(std::string_view token);

/// Parses a SPICE-subset netlist. The first line is the title.
Circuit parse(std::string_view text);

/// Re-emits a circuit in the same grammar; parse(to_netlist(c)) == c.
std::string to_netlist(const Circuit& c);

/// Shortest round-tripping rendering of a value (used by to_netlist and generators).
std::string format_value(double v);

std::string to_lower(std::string_view s);

/// Index-resolved element. Node indices use 0 for ground.
struct FlatElement {
    ElementKind kind = ElementKind::Resistor;
    std::string name;
    std::vector<int> nodes;
    ElementValue value;
    MosParams mos;   // resolved card with instance W/L (Mosfet only)
    int branch = -1; // branch-current slot (VSource/Vcvs), else -1
};

/// Stamp-ready circuit. Unknown vector layout: node voltages for indices
/// 1..num_nodes-1 at positions 0..num_nodes-2, then one branch current per
/// V or E source.
struct FlatCircuit {
    std::vector<std::string> node_names; // index -> name, [0] == "0"
    std::vector<FlatElement> elements;
    std::vector<std::string> branch_names; // branch slot -> owning element name
    std::vector<AnalysisDirective> directives;
    std::string title;

    std::size_t num_nodes() const { return node_names.size(); }
    std::size_t num_branches() const { return branch_names.size(); }
    std::size_t unknowns() const {
        return node_names.empty() ? 0 : num_nodes() - 1 + num_branches();
    }

    /// -1 when absent.
    int node_index(std::string_view name) const;
    int element_index(std::string_view name) const;
    int branch_of(std::string_view element_name) const;
};

/// Resolves nodes and branches and checks that every node has a DC path to
/// ground. Throws TopologyError naming the floating node.
FlatCircuit elaborate(const Circuit& c);

} // namespace aota
