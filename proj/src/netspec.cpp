#include "effkern/netspec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

namespace effkern {

int NetworkSpec::index_of(std::string_view name) const {
    for (int i = 0; i < size(); ++i)
        if (components[i] == name) return i;
    return -1;
}

Eigen::MatrixXd NetworkSpec::local_matrix() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size(), size());
    for (const auto& e : interactions) {
        if (e.ring_l) continue;
        a(index_of(e.target), index_of(e.source)) += e.gain;
    }
    return a;
}

Eigen::VectorXd NetworkSpec::diffusivities() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(size());
    for (int i = 0; i < size(); ++i)
        if (transport[i].kind == TransportTerm::Kind::diffusion) d(i) = transport[i].d;
    return d;
}

// ---------------------------------------------------------------------------
// Config parser
// ---------------------------------------------------------------------------

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;
};

struct Line {
    std::string content;
    int number = 0;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::string cur;
    int n = 1;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back({cur, n++});
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back({cur, n});
    return lines;
}

// Strip a trailing comment (a '#' outside of quotes).
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& s, double& out) {
    const char* c = s.c_str();
    char* end = nullptr;
    out = std::strtod(c, &end);
    return end != c && *end == '\0' && std::isfinite(out);
}

// "value" forms: number | "string" | { key = number }
struct Value {
    enum class Kind { number, string, table } kind;
    double num = 0.0;
    std::string str;       // string payload, or table key
    double table_val = 0.0;
};

Value parse_value(const std::string& raw, int line, int col) {
    std::string v = trim(raw);
    if (v.empty()) throw ParseError(line, col, "missing value");
    Value out{};
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw ParseError(line, col, "unterminated string");
        out.kind = Value::Kind::string;
        out.str = v.substr(1, v.size() - 2);
        return out;
    }
    if (v.front() == '{') {
        if (v.back() != '}')
            throw ParseError(line, col, "unterminated inline table");
        std::string inner = trim(v.substr(1, v.size() - 2));
        auto eq = inner.find('=');
        if (eq == std::string::npos)
            throw ParseError(line, col, "inline table needs key = value");
        out.kind = Value::Kind::table;
        out.str = trim(inner.substr(0, eq));
        std::string num = trim(inner.substr(eq + 1));
        if (!parse_number(num, out.table_val))
            throw ParseError(line, col, "expected a number, got '" + num + "'");
        return out;
    }
    out.kind = Value::Kind::number;
    if (!parse_number(v, out.num))
        throw ParseError(line, col, "expected a number, got '" + v + "'");
    return out;
}

} // namespace

NetworkSpec parse_network(std::string_view text) {
    NetworkSpec spec;
    enum class Section { top, component, interaction };
    Section section = Section::top;
    int current_component = -1;
    int current_interaction = -1;
    bool have_dimension = false;
    std::vector<int> interaction_lines;
    std::vector<bool> have_src, have_tgt, have_gain;

    for (const Line& ln : split_lines(text)) {
        std::string s = trim(strip_comment(ln.content));
        if (s.empty()) continue;
        int col = static_cast<int>(ln.content.find_first_not_of(" \t")) + 1;

        if (s == "[[interaction]]") {
            section = Section::interaction;
            spec.interactions.emplace_back();
            current_interaction = static_cast<int>(spec.interactions.size()) - 1;
            interaction_lines.push_back(ln.number);
            have_src.push_back(false);
            have_tgt.push_back(false);
            have_gain.push_back(false);
            continue;
        }
        if (s.starts_with("[[")) {
            throw ParseError(ln.number, col, "unknown array table '" + s + "'");
        }
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ParseError(ln.number, col, "unterminated section header");
            std::string name = s.substr(1, s.size() - 2);
            if (!name.starts_with("component."))
                throw ParseError(ln.number, col, "unknown section '" + name + "'");
            std::string comp = name.substr(10);
            if (comp.empty())
                throw ParseError(ln.number, col, "empty component name");
            if (spec.index_of(comp) >= 0)
                throw ParseError(ln.number, col, "duplicate component '" + comp + "'");
            spec.components.push_back(comp);
            spec.transport.push_back(TransportTerm::make_none());
            section = Section::component;
            current_component = spec.size() - 1;
            continue;
        }

        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ParseError(ln.number, col, "expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        Value val = parse_value(s.substr(eq + 1), ln.number, col);

        switch (section) {
        case Section::top:
            if (key == "dimension") {
                if (val.kind != Value::Kind::number || (val.num != 1.0 && val.num != 2.0))
                    throw ParseError(ln.number, col, "dimension must be 1 or 2");
                spec.dimension_default = static_cast<int>(val.num);
                have_dimension = true;
            } else if (key == "notes") {
                if (val.kind != Value::Kind::string)
                    throw ParseError(ln.number, col, "notes must be a string");
                spec.notes = val.str;
            } else {
                throw ParseError(ln.number, col, "unknown top-level key '" + key + "'");
            }
            break;
        case Section::component: {
            if (key != "transport")
                throw ParseError(ln.number, col, "unknown component key '" + key + "'");
            TransportTerm& t = spec.transport[current_component];
            if (val.kind == Value::Kind::string) {
                if (val.str != "none")
                    throw ParseError(ln.number, col,
                                     "transport must be \"none\" or {diffusion = <d>}");
                t = TransportTerm::make_none();
            } else if (val.kind == Value::Kind::table) {
                if (val.str != "diffusion")
                    throw ParseError(ln.number, col,
                                     "unknown transport kind '" + val.str + "'");
                if (val.table_val < 0.0)
                    throw ParseError(ln.number, col, "negative diffusivity");
                t = TransportTerm::make_diffusion(val.table_val);
            } else {
                throw ParseError(ln.number, col,
                                 "transport must be \"none\" or {diffusion = <d>}");
            }
            break;
        }
        case Section::interaction: {
            InteractionEntry& e = spec.interactions[current_interaction];
            if (key == "source") {
                if (val.kind != Value::Kind::string)
                    throw ParseError(ln.number, col, "source must be a quoted name");
                e.source = val.str;
                have_src[current_interaction] = true;
            } else if (key == "target") {
                if (val.kind != Value::Kind::string)
                    throw ParseError(ln.number, col, "target must be a quoted name");
                e.target = val.str;
                have_tgt[current_interaction] = true;
            } else if (key == "gain") {
                if (val.kind != Value::Kind::number)
                    throw ParseError(ln.number, col, "gain must be a number");
                e.gain = val.num;
                have_gain[current_interaction] = true;
            } else if (key == "range") {
                if (val.kind != Value::Kind::table || val.str != "ring")
                    throw ParseError(ln.number, col, "range must be {ring = <l>}");
                if (val.table_val <= 0.0)
                    throw ParseError(ln.number, col, "nonpositive ring distance");
                e.ring_l = val.table_val;
            } else {
                throw ParseError(ln.number, col, "unknown interaction key '" + key + "'");
            }
            break;
        }
        }
    }

    for (std::size_t i = 0; i < spec.interactions.size(); ++i) {
        const auto& e = spec.interactions[i];
        int lno = interaction_lines[i];
        if (!have_src[i] || !have_tgt[i] || !have_gain[i])
            throw ParseError(lno, 1, "interaction needs source, target and gain");
        if (spec.index_of(e.source) < 0)
            throw ParseError(lno, 1, "unknown component '" + e.source + "'");
        if (spec.index_of(e.target) < 0)
            throw ParseError(lno, 1, "unknown component '" + e.target + "'");
    }
    if (spec.components.empty())
        throw ParseError(1, 1, "no components declared");
    (void)have_dimension; // absent dimension defaults to 1
    return spec;
}

std::string serialize_network(const NetworkSpec& spec) {
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream os;
    os << "dimension = " << spec.dimension_default << "\n";
    if (!spec.notes.empty()) os << "notes = \"" << spec.notes << "\"\n";
    for (int i = 0; i < spec.size(); ++i) {
        os << "\n[component." << spec.components[i] << "]\n";
        const TransportTerm& t = spec.transport[i];
        if (t.kind == TransportTerm::Kind::diffusion)
            os << "transport = {diffusion = " << num(t.d) << "}\n";
        else
            os << "transport = \"none\"\n";
    }
    for (const auto& e : spec.interactions) {
        os << "\n[[interaction]]\n";
        os << "source = \"" << e.source << "\"\n";
        os << "target = \"" << e.target << "\"\n";
        os << "gain = " << num(e.gain) << "\n";
        if (e.ring_l) os << "range = {ring = " << num(*e.ring_l) << "}\n";
    }
    return os.str();
}

ValidationReport validate(const NetworkSpec& spec) {
    ValidationReport rep;
    auto err = [&](std::string loc, std::string msg) {
        rep.errors.push_back({std::move(loc), std::move(msg)});
    };
    if (spec.components.empty()) err("components", "no components declared");
    for (int i = 0; i < spec.size(); ++i) {
        for (int j = i + 1; j < spec.size(); ++j)
            if (spec.components[i] == spec.components[j])
                err("component." + spec.components[i], "duplicate component name");
    }
    if (spec.transport.size() != spec.components.size())
        err("transport", "one transport term per component required");
    if (spec.dimension_default != 1 && spec.dimension_default != 2)
        err("dimension", "dimension must be 1 or 2");

    for (std::size_t i = 0; i < spec.transport.size(); ++i) {
        const TransportTerm& t = spec.transport[i];
        std::string loc = "component." +
                          (i < spec.components.size() ? spec.components[i] : std::to_string(i));
        if (t.kind == TransportTerm::Kind::diffusion) {
            if (!(t.d >= 0.0)) err(loc, "negative diffusivity");
        } else if (t.kind == TransportTerm::Kind::custom_kernel) {
            if (t.samples.empty()) err(loc, "custom kernel without samples");
            double prev = -1.0;
            for (const auto& [s, v] : t.samples) {
                if (!std::isfinite(s) || !std::isfinite(v)) {
                    err(loc, "non-finite custom kernel sample");
                    break;
                }
                if (s < 0.0) err(loc, "custom kernel samples must have s >= 0");
                if (s <= prev) {
                    err(loc, "custom kernel samples must be strictly ascending");
                    break;
                }
                prev = s;
            }
        }
    }
    for (std::size_t i = 0; i < spec.interactions.size(); ++i) {
        const auto& e = spec.interactions[i];
        std::string loc = "interaction[" + std::to_string(i) + "]";
        if (spec.index_of(e.source) < 0) err(loc, "unknown component '" + e.source + "'");
        if (spec.index_of(e.target) < 0) err(loc, "unknown component '" + e.target + "'");
        if (!std::isfinite(e.gain)) err(loc, "gain must be finite");
        if (e.ring_l && !(*e.ring_l > 0.0)) err(loc, "nonpositive ring distance");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

void add(NetworkSpec& s, const char* src, const char* tgt, double gain,
         std::optional<double> ring = std::nullopt) {
    s.interactions.push_back({src, tgt, gain, ring});
}

NetworkSpec make_activator_inhibitor() {
    NetworkSpec s;
    s.components = {"u", "v"};
    s.transport = {TransportTerm::make_diffusion(0.05), TransportTerm::make_diffusion(3.0)};
    add(s, "u", "u", 1.0);
    add(s, "v", "u", -1.0);
    add(s, "u", "v", 4.0);
    add(s, "v", "v", -3.0);
    s.dimension_default = 1;
    s.notes = "two-component activator-inhibitor, linearized";
    return s;
}

NetworkSpec make_three_node() {
    NetworkSpec s;
    s.components = {"u", "v", "w"};
    s.transport = {TransportTerm::make_none(), TransportTerm::make_diffusion(0.02),
                   TransportTerm::make_diffusion(0.02)};
    add(s, "v", "u", 0.5);
    add(s, "u", "v", 1.0);
    add(s, "v", "v", -1.0);
    add(s, "w", "v", -1.0);
    add(s, "u", "w", 1.0);
    add(s, "w", "w", -1.0);
    s.dimension_default = 2;
    s.notes = "three-node network, immobile activator";
    return s;
}

NetworkSpec make_pigment(double k1, double d, double k2, double k3, double k4,
                         double k5, double k6, double l) {
    NetworkSpec s;
    s.components = {"u", "v"};
    s.transport = {TransportTerm::make_diffusion(d), TransportTerm::make_diffusion(d)};
    if (k1 != 0.0) add(s, "u", "u", -k1, l);
    add(s, "u", "u", -k5);
    add(s, "v", "u", -k3);
    add(s, "v", "u", k4, l);
    add(s, "u", "v", -k2);
    add(s, "v", "v", -k6);
    s.dimension_default = 2;
    s.notes = "pigment-cell network with ring-range couplings";
    return s;
}

NetworkSpec make_proneural(double a_e) {
    const double l = 1.0;
    const double d_e = 1.0, k_e = 1.0, k_n = 2.0, d_c = 0.1;
    const double d_t = 0.5 / (2.0 * std::numbers::pi * l);
    const double k_d = 1.5, a_d = 1.0, e_a = 10.0;
    NetworkSpec s;
    s.components = {"E", "N", "D", "As"};
    s.transport = {TransportTerm::make_diffusion(d_e), TransportTerm::make_none(),
                   TransportTerm::make_none(), TransportTerm::make_none()};
    add(s, "E", "E", -k_e);
    add(s, "As", "E", a_e);
    add(s, "N", "N", -k_n);
    add(s, "D", "N", d_t, l);
    add(s, "D", "N", -d_c);
    add(s, "D", "D", -k_d);
    add(s, "As", "D", a_d);
    add(s, "E", "As", e_a);
    add(s, "N", "As", -e_a);
    s.dimension_default = 2;
    s.notes = "proneural wave network (EGF/Notch/Delta/AS-C)";
    return s;
}

} // namespace

NetworkSpec builtin_preset(std::string_view name) {
    if (name == "activator_inhibitor") return make_activator_inhibitor();
    if (name == "three_node") return make_three_node();
    if (name == "pigment")
        return make_pigment(0.055 * 0.016, 0.02, 0.05, 0.04, 0.055 * 0.03, 0.02, 0.025, 3.0);
    if (name == "pigment_k1_zero")
        return make_pigment(0.0, 0.2, 5.0, 4.0, 5.5 * 0.03, 3.0, 3.0, 3.0);
    if (name == "proneural") return make_proneural(1.0);
    if (name == "proneural_salt_pepper") return make_proneural(0.1);
    throw std::invalid_argument("unknown preset name '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
    return {"activator_inhibitor", "three_node",          "pigment",
            "pigment_k1_zero",     "proneural",           "proneural_salt_pepper"};
}

} // namespace effkern
