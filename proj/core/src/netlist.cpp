#include "aota/netlist.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

namespace aota {

namespace {

struct Token {
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;
};

struct Card {
    std::vector<Token> tokens;
    std::size_t line = 0;
};

bool is_separator(char ch) {
    return std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')' || ch == ',';
}

void tokenize_line(std::string_view line, std::size_t line_no, std::size_t start, std::vector<Token>& out) {
    std::size_t i = start;
    while (i < line.size()) {
        if (is_separator(line[i])) {
            ++i;
            continue;
        }
        if (line[i] == '=') {
            out.push_back({"=", line_no, i + 1});
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && !is_separator(line[j]) && line[j] != '=') ++j;
        out.push_back({std::string(line.substr(i, j - i)), line_no, i + 1});
        i = j;
    }
}

[[noreturn]] void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.column, msg); }
[[noreturn]] void fail(const Card& c, const std::string& msg) { throw ParseError(c.line, 0, msg); }

double value_of(const Token& t) {
    try {
        return parse_value(t.text);
    } catch (const std::invalid_argument& e) {
        fail(t, e.what());
    }
}

bool looks_numeric(const std::string& s) {
    try {
        (void)parse_value(s);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

// key=value pairs from tokens[first..]; returns lower-case keys with their value tokens.
std::vector<std::pair<Token, Token>> key_values(const Card& card, std::size_t first) {
    std::vector<std::pair<Token, Token>> kv;
    const auto& t = card.tokens;
    std::size_t i = first;
    while (i < t.size()) {
        if (t[i].text == "=") fail(t[i], "unexpected '='");
        if (i + 1 >= t.size() || t[i + 1].text != "=") fail(t[i], "expected key=value, got '" + t[i].text + "'");
        if (i + 2 >= t.size()) fail(t[i + 1], "missing value after '='");
        Token key = t[i];
        key.text = to_lower(key.text);
        kv.emplace_back(key, t[i + 2]);
        i += 3;
    }
    return kv;
}

std::size_t expected_nodes(ElementKind k) {
    switch (k) {
    case ElementKind::Mosfet: return 3;
    case ElementKind::Vcvs:
    case ElementKind::Vccs: return 4;
    default: return 2;
    }
}

std::optional<ElementKind> kind_from_letter(char ch) {
    switch (std::tolower(static_cast<unsigned char>(ch))) {
    case 'r': return ElementKind::Resistor;
    case 'c': return ElementKind::Capacitor;
    case 'v': return ElementKind::VSource;
    case 'i': return ElementKind::ISource;
    case 'm': return ElementKind::Mosfet;
    case 'e': return ElementKind::Vcvs;
    case 'g': return ElementKind::Vccs;
    default: return std::nullopt;
    }
}

SourceSpec parse_source(const Card& card, std::size_t first) {
    const auto& t = card.tokens;
    SourceSpec s;
    bool have_dc = false;
    std::size_t i = first;
    while (i < t.size()) {
        const std::string key = to_lower(t[i].text);
        if (key == "dc") {
            if (i + 1 >= t.size()) fail(t[i], "DC requires a value");
            s.dc = value_of(t[i + 1]);
            have_dc = true;
            i += 2;
        } else if (key == "ac") {
            if (i + 1 >= t.size()) fail(t[i], "AC requires a magnitude");
            s.ac_mag = value_of(t[i + 1]);
            i += 2;
            if (i < t.size() && looks_numeric(t[i].text)) {
                s.ac_phase_deg = value_of(t[i]);
                ++i;
            }
        } else if (key == "pulse") {
            const Token& head = t[i];
            std::vector<double> v;
            ++i;
            while (i < t.size() && v.size() < 7 && looks_numeric(t[i].text)) v.push_back(value_of(t[i++]));
            if (v.size() < 6) fail(head, "PULSE requires v1 v2 delay rise fall width [period]");
            PulseWaveform p{v[0], v[1], v[2], v[3], v[4], v[5], std::nullopt};
            if (v.size() == 7) p.period = v[6];
            if (!(p.rise > 0.0) || !(p.fall > 0.0)) fail(head, "PULSE rise and fall must be > 0");
            if (p.delay < 0.0 || p.width < 0.0) fail(head, "PULSE delay and width must be >= 0");
            if (p.period && !(*p.period > 0.0)) fail(head, "PULSE period must be > 0");
            s.pulse = p;
        } else if (looks_numeric(t[i].text) && !have_dc) {
            s.dc = value_of(t[i]);
            have_dc = true;
            ++i;
        } else {
            fail(t[i], "unexpected source field '" + t[i].text + "'");
        }
    }
    return s;
}

struct PendingModelRef {
    std::size_t element;
    Token token;
};

struct PendingDcRef {
    Token token;
};

Element parse_element(const Card& card, ElementKind kind, std::vector<PendingModelRef>& refs, std::size_t index) {
    const auto& t = card.tokens;
    Element e;
    e.kind = kind;
    e.name = to_lower(t[0].text);
    const std::size_t nn = expected_nodes(kind);
    if (t.size() < 1 + nn) fail(card, "element '" + t[0].text + "' needs " + std::to_string(nn) + " nodes");
    for (std::size_t k = 0; k < nn; ++k) {
        if (t[1 + k].text == "=") fail(t[1 + k], "unexpected '='");
        e.nodes.push_back(to_lower(t[1 + k].text));
    }
    const std::size_t rest = 1 + nn;

    switch (kind) {
    case ElementKind::Resistor:
    case ElementKind::Capacitor: {
        if (t.size() != rest + 1) {
            if (t.size() <= rest) fail(card, "missing value for '" + t[0].text + "'");
            fail(t[rest + 1], "unexpected token '" + t[rest + 1].text + "'");
        }
        const double v = value_of(t[rest]);
        if (!(v > 0.0)) fail(t[rest], kind == ElementKind::Resistor ? "resistance must be > 0" : "capacitance must be > 0");
        e.value = PassiveValue{v};
        break;
    }
    case ElementKind::VSource:
    case ElementKind::ISource:
        e.value = parse_source(card, rest);
        break;
    case ElementKind::Mosfet: {
        if (t.size() <= rest) fail(card, "missing model name for '" + t[0].text + "'");
        MosInstance m;
        m.model = to_lower(t[rest].text);
        refs.push_back({index, t[rest]});
        bool have_w = false, have_l = false;
        for (const auto& [key, val] : key_values(card, rest + 1)) {
            if (key.text == "w") {
                m.w = value_of(val);
                have_w = true;
                if (!(m.w > 0.0)) fail(val, "W must be > 0");
            } else if (key.text == "l") {
                m.l = value_of(val);
                have_l = true;
                if (!(m.l > 0.0)) fail(val, "L must be > 0");
            } else {
                fail(key, "unknown MOS instance parameter '" + key.text + "'");
            }
        }
        if (!have_w || !have_l) fail(card, "MOS '" + t[0].text + "' requires W= and L=");
        e.value = m;
        break;
    }
    case ElementKind::Vcvs:
    case ElementKind::Vccs: {
        if (t.size() <= rest) fail(card, "missing gain for '" + t[0].text + "'");
        ControlledValue cv;
        cv.gain = value_of(t[rest]);
        for (const auto& [key, val] : key_values(card, rest + 1)) {
            if (kind == ElementKind::Vcvs && key.text == "vmin") {
                cv.lower = value_of(val);
            } else if (kind == ElementKind::Vcvs && key.text == "vmax") {
                cv.upper = value_of(val);
            } else if (kind == ElementKind::Vccs && key.text == "ilimit") {
                cv.limit = value_of(val);
                if (!(*cv.limit > 0.0)) fail(val, "ILIMIT must be > 0");
            } else {
                fail(key, "unknown parameter '" + key.text + "'");
            }
        }
        if (cv.lower && cv.upper && !(*cv.lower < *cv.upper)) fail(card, "VMIN must be < VMAX");
        e.value = cv;
        break;
    }
    }
    return e;
}

void parse_model(const Card& card, Circuit& c, std::map<std::string, Token>& seen) {
    const auto& t = card.tokens;
    if (t.size() < 3) fail(card, ".model requires a name and a type");
    const std::string name = to_lower(t[1].text);
    const std::string type = to_lower(t[2].text);
    MosParams p;
    if (type == "nmos") {
        p = default_nmos();
    } else if (type == "pmos") {
        p = default_pmos();
    } else {
        fail(t[2], "unsupported model type '" + t[2].text + "' (expected NMOS or PMOS)");
    }
    for (const auto& [key, val] : key_values(card, 3)) {
        const double v = value_of(val);
        if (key.text == "vt0" || key.text == "vto") p.vt0 = v;
        else if (key.text == "n") p.n = v;
        else if (key.text == "kp") p.kp = v;
        else if (key.text == "lambda") p.lambda = v;
        else fail(key, "unknown model parameter '" + key.text + "'");
    }
    try {
        p.validate();
    } catch (const std::domain_error& e) {
        fail(card, std::string("invalid model '") + name + "': " + e.what());
    }
    if (seen.count(name)) fail(t[1], "duplicate model '" + name + "'");
    seen.emplace(name, t[1]);
    c.models.emplace(name, p);
}

AnalysisDirective parse_directive(const Card& card, const std::string& word, std::vector<PendingDcRef>& dc_refs) {
    const auto& t = card.tokens;
    auto need = [&](std::size_t n) {
        if (t.size() != n) fail(card, word + " expects " + std::to_string(n - 1) + " arguments");
    };
    if (word == ".op") {
        need(1);
        return OpDirective{};
    }
    if (word == ".dc") {
        need(5);
        DcDirective d{to_lower(t[1].text), value_of(t[2]), value_of(t[3]), value_of(t[4])};
        if (!(d.stop > d.start)) fail(t[3], ".dc stop must be greater than start");
        if (!(d.step > 0.0)) fail(t[4], ".dc step must be > 0");
        dc_refs.push_back({t[1]});
        return d;
    }
    if (word == ".ac") {
        need(5);
        if (to_lower(t[1].text) != "dec") fail(t[1], "only 'dec' AC sweeps are supported");
        const double ppd = value_of(t[2]);
        if (!(ppd >= 1.0) || ppd != std::floor(ppd)) fail(t[2], "points per decade must be a positive integer");
        AcDirective a{static_cast<int>(ppd), value_of(t[3]), value_of(t[4])};
        if (!(a.fstart > 0.0)) fail(t[3], ".ac fstart must be > 0");
        if (!(a.fstop > a.fstart)) fail(t[4], ".ac fstop must be greater than fstart");
        return a;
    }
    if (word == ".tran") {
        need(3);
        TranDirective d{value_of(t[1]), value_of(t[2])};
        if (!(d.tstep > 0.0)) fail(t[1], ".tran tstep must be > 0");
        if (!(d.tstop > 0.0)) fail(t[2], ".tran tstop must be > 0");
        return d;
    }
    fail(t[0], "unknown directive '" + t[0].text + "'");
}

} // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(fmt::format("line {}, column {}: {}", line, column, message)),
      line_(line), column_(column), detail_(message) {}

char element_letter(ElementKind kind) {
    switch (kind) {
    case ElementKind::Resistor: return 'R';
    case ElementKind::Capacitor: return 'C';
    case ElementKind::VSource: return 'V';
    case ElementKind::ISource: return 'I';
    case ElementKind::Mosfet: return 'M';
    case ElementKind::Vcvs: return 'E';
    case ElementKind::Vccs: return 'G';
    }
    return '?';
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

double parse_value(std::string_view token) {
    auto bad = [&]() -> std::invalid_argument {
        return std::invalid_argument("malformed number '" + std::string(token) + "'");
    };
    if (token.empty()) throw bad();

    std::string_view body = token;
    bool negative = false;
    if (body.front() == '+' || body.front() == '-') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    if (body.empty() || !(std::isdigit(static_cast<unsigned char>(body.front())) || body.front() == '.'))
        throw bad();

    double mantissa = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), mantissa);
    if (ec != std::errc() || ptr == body.data()) throw bad();

    const std::string suffix = to_lower(std::string_view(ptr, static_cast<std::size_t>(body.data() + body.size() - ptr)));
    int exponent = 0;
    if (suffix.empty()) exponent = 0;
    else if (suffix == "meg") exponent = 6;
    else if (suffix == "f") exponent = -15;
    else if (suffix == "p") exponent = -12;
    else if (suffix == "n") exponent = -9;
    else if (suffix == "u") exponent = -6;
    else if (suffix == "m") exponent = -3;
    else if (suffix == "k") exponent = 3;
    else if (suffix == "g") exponent = 9;
    else throw bad();

    // Reparse with the suffix folded into the exponent so 4.7n rounds like 4.7e-9.
    if (exponent != 0) {
        const std::string_view digits(body.data(), static_cast<std::size_t>(ptr - body.data()));
        std::string text(digits);
        const auto e = text.find_first_of("eE");
        int base = 0;
        if (e != std::string::npos) {
            std::from_chars(text.data() + e + 1 + (text[e + 1] == '+'), text.data() + text.size(), base);
            text.resize(e);
        }
        text += "e" + std::to_string(base + exponent);
        if (std::from_chars(text.data(), text.data() + text.size(), mantissa).ec != std::errc()) throw bad();
    }
    const double v = negative ? -mantissa : mantissa;
    if (!std::isfinite(v)) throw bad();
    return v;
}

Circuit parse(std::string_view text) {
    Circuit c;
    std::vector<Card> cards;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (first) {
            c.title = std::string(line);
            first = false;
            continue;
        }
        const auto lead = line.find_first_not_of(" \t");
        if (lead == std::string_view::npos) continue;
        if (line[lead] == '*') continue;
        if (line[lead] == '+') {
            if (cards.empty()) throw ParseError(line_no, lead + 1, "continuation line without a preceding card");
            tokenize_line(line, line_no, lead + 1, cards.back().tokens);
            continue;
        }
        Card card;
        card.line = line_no;
        tokenize_line(line, line_no, lead, card.tokens);
        cards.push_back(std::move(card));
    }

    std::vector<PendingModelRef> model_refs;
    std::vector<PendingDcRef> dc_refs;
    std::map<std::string, Token> seen_models;
    std::unordered_map<std::string, Token> seen_elements;
    std::optional<std::size_t> first_element_line;

    for (const Card& card : cards) {
        const Token& head = card.tokens.front();
        if (head.text == "=") fail(head, "unexpected '='");
        if (head.text.front() == '.') {
            const std::string word = to_lower(head.text);
            if (word == ".end") break;
            if (word == ".model") {
                parse_model(card, c, seen_models);
                continue;
            }
            c.directives.push_back(parse_directive(card, word, dc_refs));
            continue;
        }
        const auto kind = kind_from_letter(head.text.front());
        if (!kind) fail(head, "unknown element type '" + std::string(1, head.text.front()) + "'");
        Element e = parse_element(card, *kind, model_refs, c.elements.size());
        if (seen_elements.count(e.name)) fail(head, "duplicate element name '" + e.name + "'");
        seen_elements.emplace(e.name, head);
        if (!first_element_line) first_element_line = card.line;
        c.elements.push_back(std::move(e));
    }

    for (const auto& ref : model_refs) {
        const std::string name = to_lower(ref.token.text);
        if (!c.models.count(name)) fail(ref.token, "undeclared model '" + name + "'");
    }
    for (const auto& ref : dc_refs) {
        const Element* src = c.find(to_lower(ref.token.text));
        if (!src || (src->kind != ElementKind::VSource && src->kind != ElementKind::ISource))
            fail(ref.token, "unknown .dc source '" + ref.token.text + "'");
    }

    c.refresh_nodes();
    if (!c.elements.empty() && !c.node_names.count("0"))
        throw ParseError(*first_element_line, 0, "circuit has no ground node '0'");
    return c;
}

std::string format_value(double v) { return fmt::format("{}", v); }

std::string to_netlist(const Circuit& c) {
    std::ostringstream out;
    out << c.title << '\n';
    for (const auto& [name, p] : c.models) {
        out << ".model " << name << (p.polarity == Polarity::Nmos ? " NMOS" : " PMOS") << " (vt0=" << format_value(p.vt0)
            << " n=" << format_value(p.n) << " kp=" << format_value(p.kp) << " lambda=" << format_value(p.lambda)
            << ")\n";
    }
    for (const Element& e : c.elements) {
        out << e.name;
        for (const auto& n : e.nodes) out << ' ' << n;
        switch (e.kind) {
        case ElementKind::Resistor:
        case ElementKind::Capacitor: out << ' ' << format_value(e.passive()); break;
        case ElementKind::VSource:
        case ElementKind::ISource: {
            const SourceSpec& s = e.source();
            out << " DC " << format_value(s.dc);
            if (s.ac_mag != 0.0 || s.ac_phase_deg != 0.0)
                out << " AC " << format_value(s.ac_mag) << ' ' << format_value(s.ac_phase_deg);
            if (s.pulse) {
                const auto& p = *s.pulse;
                out << " PULSE(" << format_value(p.v1) << ' ' << format_value(p.v2) << ' ' << format_value(p.delay) << ' '
                    << format_value(p.rise) << ' ' << format_value(p.fall) << ' ' << format_value(p.width);
                if (p.period) out << ' ' << format_value(*p.period);
                out << ')';
            }
            break;
        }
        case ElementKind::Mosfet:
            out << ' ' << e.mos().model << " W=" << format_value(e.mos().w) << " L=" << format_value(e.mos().l);
            break;
        case ElementKind::Vcvs:
        case ElementKind::Vccs: {
            const auto& cv = e.controlled();
            out << ' ' << format_value(cv.gain);
            if (cv.lower) out << " VMIN=" << format_value(*cv.lower);
            if (cv.upper) out << " VMAX=" << format_value(*cv.upper);
            if (cv.limit) out << " ILIMIT=" << format_value(*cv.limit);
            break;
        }
        }
        out << '\n';
    }
    for (const auto& d : c.directives) {
        std::visit(
            [&](const auto& dir) {
                using T = std::decay_t<decltype(dir)>;
                if constexpr (std::is_same_v<T, OpDirective>) {
                    out << ".op\n";
                } else if constexpr (std::is_same_v<T, DcDirective>) {
                    out << ".dc " << dir.source << ' ' << format_value(dir.start) << ' ' << format_value(dir.stop) << ' '
                        << format_value(dir.step) << '\n';
                } else if constexpr (std::is_same_v<T, AcDirective>) {
                    out << ".ac dec " << dir.points_per_decade << ' ' << format_value(dir.fstart) << ' '
                        << format_value(dir.fstop) << '\n';
                } else {
                    out << ".tran " << format_value(dir.tstep) << ' ' << format_value(dir.tstop) << '\n';
                }
            },
            d);
    }
    out << ".end\n";
    return out.str();
}

const Element* Circuit::find(std::string_view name) const {
    const std::string key = to_lower(name);
    for (const auto& e : elements)
        if (e.name == key) return &e;
    return nullptr;
}

Element* Circuit::find(std::string_view name) {
    return const_cast<Element*>(std::as_const(*this).find(name));
}

bool Circuit::remove(std::string_view name) {
    const std::string key = to_lower(name);
    const auto it = std::find_if(elements.begin(), elements.end(), [&](const Element& e) { return e.name == key; });
    if (it == elements.end()) return false;
    elements.erase(it);
    refresh_nodes();
    return true;
}

void Circuit::add(Element e) {
    e.name = to_lower(e.name);
    for (auto& n : e.nodes) n = to_lower(n);
    if (e.name.empty() || kind_from_letter(e.name.front()) != e.kind)
        throw std::invalid_argument("element name '" + e.name + "' does not match its kind");
    if (find(e.name)) throw std::invalid_argument("duplicate element name '" + e.name + "'");
    if (e.nodes.size() != expected_nodes(e.kind))
        throw std::invalid_argument("wrong node count for element '" + e.name + "'");
    if (e.kind == ElementKind::Mosfet && !models.count(e.mos().model))
        throw std::invalid_argument("undeclared model '" + e.mos().model + "'");
    for (const auto& n : e.nodes) node_names.insert(n);
    elements.push_back(std::move(e));
}

void Circuit::rename_node(const std::string& from, const std::string& to) {
    const std::string f = to_lower(from), t = to_lower(to);
    for (auto& e : elements)
        for (auto& n : e.nodes)
            if (n == f) n = t;
    refresh_nodes();
}

void Circuit::refresh_nodes() {
    node_names.clear();
    for (const auto& e : elements)
        for (const auto& n : e.nodes) node_names.insert(n);
}

int FlatCircuit::node_index(std::string_view name) const {
    const std::string key = to_lower(name);
    for (std::size_t i = 0; i < node_names.size(); ++i)
        if (node_names[i] == key) return static_cast<int>(i);
    return -1;
}

int FlatCircuit::element_index(std::string_view name) const {
    const std::string key = to_lower(name);
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i].name == key) return static_cast<int>(i);
    return -1;
}

int FlatCircuit::branch_of(std::string_view element_name) const {
    const int idx = element_index(element_name);
    return idx < 0 ? -1 : elements[static_cast<std::size_t>(idx)].branch;
}

FlatCircuit elaborate(const Circuit& c) {
    FlatCircuit fc;
    fc.title = c.title;
    fc.directives = c.directives;
    if (c.elements.empty()) return fc;

    std::unordered_map<std::string, int> index;
    fc.node_names.push_back("0");
    index.emplace("0", 0);
    for (const auto& e : c.elements) {
        for (const auto& n : e.nodes) {
            if (!index.count(n)) {
                index.emplace(n, static_cast<int>(fc.node_names.size()));
                fc.node_names.push_back(n);
            }
        }
    }
    if (fc.node_names.size() > 1 && !std::any_of(c.elements.begin(), c.elements.end(), [](const Element& e) {
            return std::find(e.nodes.begin(), e.nodes.end(), "0") != e.nodes.end();
        }))
        throw TopologyError("circuit has no ground node '0'");

    std::vector<int> parent(fc.node_names.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    auto join = [&](int a, int b) { parent[static_cast<std::size_t>(root(a))] = root(b); };

    for (const auto& e : c.elements) {
        FlatElement fe;
        fe.kind = e.kind;
        fe.name = e.name;
        fe.value = e.value;
        for (const auto& n : e.nodes) fe.nodes.push_back(index.at(n));

        switch (e.kind) {
        case ElementKind::Resistor: join(fe.nodes[0], fe.nodes[1]); break;
        case ElementKind::VSource:
        case ElementKind::Vcvs:
            join(fe.nodes[0], fe.nodes[1]);
            fe.branch = static_cast<int>(fc.branch_names.size());
            fc.branch_names.push_back(e.name);
            break;
        case ElementKind::Mosfet: {
            join(fe.nodes[0], fe.nodes[2]);
            const auto it = c.models.find(e.mos().model);
            if (it == c.models.end()) throw TopologyError("undeclared model '" + e.mos().model + "'");
            fe.mos = it->second;
            fe.mos.w = e.mos().w;
            fe.mos.l = e.mos().l;
            fe.mos.validate();
            break;
        }
        default: break;
        }
        fc.elements.push_back(std::move(fe));
    }

    const int ground = root(0);
    for (std::size_t i = 1; i < fc.node_names.size(); ++i) {
        if (root(static_cast<int>(i)) != ground)
            throw TopologyError("floating node '" + fc.node_names[i] + "' has no DC path to ground");
    }
    return fc;
}

} // namespace aota
