#include "circaug/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "circaug/embedded_data.hpp"
#include "circaug/error.hpp"

namespace circaug {

namespace {

constexpr std::string_view kGateNames[] = {"NOT",  "NAND2", "AND2", "NOR2", "OR2",  "XOR2", "AO12",
                                           "FA",   "MUX2",  "NAND3", "AND3", "NOR3", "AO22", "AO31"};
constexpr std::size_t kGatePins[] = {1, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 4, 4};
constexpr char kPinNames[] = {'a', 'b', 'c', 'd'};

constexpr double kFemto = 1e-15;
constexpr double kPico = 1e-12;
constexpr double kMicro = 1e-6;
constexpr double kNano = 1e-9;
constexpr double kKilo = 1e3;

}  // namespace

std::string_view to_string(Corner c) { return kCornerNames[static_cast<int>(c)]; }

Corner parse_corner(std::string_view text) {
    for (int i = 0; i < kCornerCount; ++i)
        if (text == kCornerNames[i]) return static_cast<Corner>(i);
    throw ValidationError("unknown process corner '" + std::string(text) + "'");
}

std::string_view to_string(GateKind kind) { return kGateNames[static_cast<int>(kind)]; }

GateKind parse_gate_kind(std::string_view text) {
    for (std::size_t i = 0; i < std::size(kGateNames); ++i)
        if (text == kGateNames[i]) return static_cast<GateKind>(i);
    throw ValidationError("unknown gate kind '" + std::string(text) + "'");
}

std::size_t pin_count(GateKind kind) { return kGatePins[static_cast<int>(kind)]; }

double OracleConstants::vth(const ProcessPoint& p, bool pmos) const {
    const DeviceParams& d = pmos ? p.pmos : p.nmos;
    return vth0[static_cast<int>(p.corner)][pmos ? 1 : 0] + d.dvth - vth_temp_coeff * (p.temp - 27.0);
}

double OracleConstants::mobility(double temp) const { return mu0 * std::pow((temp + 273.15) / 300.0, -1.5); }

OracleConstants parse_constants(std::string_view toml_text, const std::string& source_name) {
    toml::table doc;
    try {
        doc = toml::parse(toml_text, source_name);
    } catch (const toml::parse_error& e) {
        throw ParseError(source_name, e.source().begin.line, std::string(e.description()));
    }
    auto need = [&](std::string_view key) -> double {
        auto v = doc[key].value<double>();
        if (!v) throw ParseError(source_name, 0, "missing numeric key '" + std::string(key) + "'");
        return *v;
    };
    OracleConstants k;
    k.version = doc["version"].value_or(0);
    if (k.version != 1) throw ParseError(source_name, 0, "unsupported constants version");
    k.alpha = need("alpha");
    k.mu0 = need("mu0");
    k.vth_temp_coeff = need("vth_temp_coeff");
    k.tox_ref = need("tox_ref_nm") * kNano;
    k.slew_coeff = need("slew_coeff");
    k.vdd_nom = need("vdd_nom");
    k.lambda = need("lambda");
    for (int c = 0; c < kCornerCount; ++c) {
        const auto* arr = doc["vth0"][kCornerNames[c]].as_array();
        if (arr == nullptr || arr->size() != 2) {
            throw ParseError(source_name, 0, "vth0." + std::string(kCornerNames[c]) + " must be [nmos, pmos]");
        }
        for (std::size_t g = 0; g < 2; ++g) {
            auto v = (*arr)[g].value<double>();
            if (!v) throw ParseError(source_name, arr->source().begin.line, "vth0 entries must be numbers");
            k.vth0[c][g] = *v;
        }
    }
    for (GateKind kind : kAllGateKinds) {
        const auto name = to_string(kind);
        const auto* tbl = doc["gate"][name].as_table();
        if (tbl == nullptr) throw ParseError(source_name, 0, "missing [gate." + std::string(name) + "]");
        const std::size_t line = tbl->source().begin.line;
        GateConstants g;
        auto drive = (*tbl)["drive"].value<double>();
        auto rise = (*tbl)["rise"].value<double>();
        auto fall = (*tbl)["fall"].value<double>();
        const auto* pins = (*tbl)["pins"].as_array();
        if (!drive || !rise || !fall || pins == nullptr) {
            throw ParseError(source_name, line, "gate." + std::string(name) + " needs drive, pins, rise, fall");
        }
        g.drive = *drive;
        g.rise = *rise;
        g.fall = *fall;
        for (const auto& p : *pins) {
            auto v = p.value<double>();
            if (!v) throw ParseError(source_name, line, "pin factors must be numbers");
            g.pins.push_back(*v);
        }
        if (g.pins.size() != pin_count(kind)) {
            throw ParseError(source_name, line,
                             "gate." + std::string(name) + " needs " + std::to_string(pin_count(kind)) + " pin factors");
        }
        const bool positive = g.drive > 0 && g.rise > 0 && g.fall > 0 &&
                              std::all_of(g.pins.begin(), g.pins.end(), [](double x) { return x > 0; });
        if (!positive) throw ParseError(source_name, line, "gate coefficients must be positive");
        k.gates[kind] = std::move(g);
    }
    return k;
}

OracleConstants load_constants(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open constants file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_constants(ss.str(), path.string());
}

const OracleConstants& default_constants() {
    static const OracleConstants k = parse_constants(embedded::kOracleConstants, "oracle_constants.toml");
    return k;
}

void validate_point(const ProcessPoint& p, const OracleConstants& k) {
    auto fail = [](const std::string& what) { throw ValidationError("operating region: " + what); };
    if (!(p.vdd >= 0.5 && p.vdd <= 2.5)) fail("vdd outside [0.5, 2.5] V");
    if (!(p.temp >= -40.0 && p.temp <= 150.0)) fail("temperature outside [-40, 150] C");
    if (!(p.c_load > 0.0) || !std::isfinite(p.c_load)) fail("c_load must be positive");
    if (!(p.input_slew >= 0.0) || !std::isfinite(p.input_slew)) fail("input slew must be non-negative");
    for (const DeviceParams* d : {&p.nmos, &p.pmos}) {
        if (!(d->w > 0.0 && d->l > 0.0 && d->tox > 0.0 && d->mobility > 0.0) || !std::isfinite(d->w) ||
            !std::isfinite(d->l) || !std::isfinite(d->tox) || !std::isfinite(d->mobility) || !std::isfinite(d->dvth)) {
            fail("device w, l, tox and mobility must be positive and finite");
        }
    }
    if (!(p.vdd > k.vth(p, false))) fail("vdd does not exceed the NMOS threshold");
    if (!(p.vdd > k.vth(p, true))) fail("vdd does not exceed the PMOS threshold");
}

double DelayResult::worst() const {
    double w = 0.0;
    for (const auto& pd : pins) w = std::max({w, pd.lh, pd.hl});
    return w;
}

DelayResult gate_delay(GateKind kind, const ProcessPoint& p, const OracleConstants& k) {
    validate_point(p, k);
    const GateConstants& g = k.gates.at(kind);
    const double mu_t = k.mobility(p.temp);
    const double common = (p.c_load / kFemto) * p.vdd * (1.0 + k.slew_coeff * (p.input_slew / kPico));
    auto drive_strength = [&](bool pmos) {
        const DeviceParams& d = pmos ? p.pmos : p.nmos;
        return mu_t * d.mobility * (d.w / d.l) * (k.tox_ref / d.tox) * std::pow(p.vdd - k.vth(p, pmos), k.alpha);
    };
    const double pull_up = drive_strength(true);
    const double pull_down = drive_strength(false);
    DelayResult r;
    for (double pin : g.pins) {
        const double base = g.drive * pin * common;
        r.pins.push_back({base * g.rise / pull_up, base * g.fall / pull_down});
    }
    return r;
}

double current_reference(const ProcessPoint& p, double r_ohms, const OracleConstants& k) {
    if (!(r_ohms > 0.0)) throw ValidationError("current_reference: r must be positive");
    validate_point(p, k);
    return (p.vdd - k.vth(p, false)) / r_ohms * (1.0 + k.lambda * (p.vdd - k.vdd_nom));
}

// --- netlists ------------------------------------------------------------------

Netlist::Netlist(std::string name, std::vector<std::string> inputs, std::vector<std::string> outputs,
                 std::vector<GateInstance> gates, const std::vector<NetSpec>& nets)
    : name_(std::move(name)), inputs_(std::move(inputs)), outputs_(std::move(outputs)), gates_(std::move(gates)) {
    auto fail = [this](const std::string& what) { throw ValidationError("netlist '" + name_ + "': " + what); };

    std::map<std::string, Driver> drivers;
    for (std::size_t i = 0; i < inputs_.size(); ++i)
        if (!drivers.emplace(inputs_[i], Driver{Driver::Kind::primary_input, i}).second) {
            fail("duplicate name '" + inputs_[i] + "'");
        }
    for (std::size_t g = 0; g < gates_.size(); ++g)
        if (!drivers.emplace(gates_[g].name, Driver{Driver::Kind::gate, g}).second) {
            fail("duplicate name '" + gates_[g].name + "'");
        }
    std::map<std::string, std::size_t> output_index;
    for (std::size_t o = 0; o < outputs_.size(); ++o) {
        if (drivers.count(outputs_[o])) fail("output '" + outputs_[o] + "' shadows an input or gate name");
        if (!output_index.emplace(outputs_[o], o).second) fail("duplicate output '" + outputs_[o] + "'");
    }
    if (outputs_.empty()) fail("no primary outputs");

    std::vector<std::vector<std::optional<Driver>>> fanin(gates_.size());
    for (std::size_t g = 0; g < gates_.size(); ++g) fanin[g].resize(pin_count(gates_[g].kind));
    std::vector<std::optional<Driver>> out_drivers(outputs_.size());

    for (const auto& net : nets) {
        auto d = drivers.find(net.driver);
        if (d == drivers.end()) fail("unknown driver '" + net.driver + "'");
        for (const auto& sink : net.sinks) {
            if (auto o = output_index.find(sink); o != output_index.end()) {
                if (out_drivers[o->second]) fail("output '" + sink + "' driven more than once");
                out_drivers[o->second] = d->second;
                continue;
            }
            const auto dot = sink.rfind('.');
            if (dot == std::string::npos || dot + 2 != sink.size()) fail("bad sink '" + sink + "'");
            auto gate = drivers.find(sink.substr(0, dot));
            if (gate == drivers.end() || gate->second.kind != Driver::Kind::gate) fail("sink '" + sink + "' names no gate");
            const char pin_name = sink.back();
            const auto pin_it = std::find(std::begin(kPinNames), std::end(kPinNames), pin_name);
            const std::size_t pin = static_cast<std::size_t>(pin_it - std::begin(kPinNames));
            auto& slots = fanin[gate->second.index];
            if (pin >= slots.size()) fail("sink '" + sink + "' names a pin the gate does not have");
            if (slots[pin]) fail("pin '" + sink + "' driven more than once");
            slots[pin] = d->second;
        }
    }

    fanin_.resize(gates_.size());
    for (std::size_t g = 0; g < gates_.size(); ++g)
        for (std::size_t pin = 0; pin < fanin[g].size(); ++pin) {
            if (!fanin[g][pin]) fail("pin '" + gates_[g].name + "." + kPinNames[pin] + "' is undriven");
            fanin_[g].push_back(*fanin[g][pin]);
        }
    for (std::size_t o = 0; o < outputs_.size(); ++o) {
        if (!out_drivers[o]) fail("output '" + outputs_[o] + "' is undriven");
        output_drivers_.push_back(*out_drivers[o]);
    }

    // Kahn's algorithm over gate-to-gate edges.
    std::vector<std::size_t> pending(gates_.size(), 0);
    std::vector<std::vector<std::size_t>> fanout(gates_.size());
    for (std::size_t g = 0; g < gates_.size(); ++g)
        for (const Driver& d : fanin_[g])
            if (d.kind == Driver::Kind::gate) {
                ++pending[g];
                fanout[d.index].push_back(g);
            }
    std::vector<std::size_t> ready;
    for (std::size_t g = 0; g < gates_.size(); ++g)
        if (pending[g] == 0) ready.push_back(g);
    while (!ready.empty()) {
        const std::size_t g = ready.front();
        ready.erase(ready.begin());
        topo_.push_back(g);
        for (std::size_t s : fanout[g])
            if (--pending[s] == 0) ready.push_back(s);
    }
    if (topo_.size() != gates_.size()) fail("combinational cycle detected");
}

Netlist parse_netlist(std::string_view toml_text, const std::string& source_name) {
    toml::table doc;
    try {
        doc = toml::parse(toml_text, source_name);
    } catch (const toml::parse_error& e) {
        throw ParseError(source_name, e.source().begin.line, std::string(e.description()));
    }
    auto strings = [&](const toml::node_view<const toml::node>& node, const char* what) {
        std::vector<std::string> out;
        const auto* arr = node.as_array();
        if (arr == nullptr) throw ParseError(source_name, 0, std::string("'") + what + "' must be an array of strings");
        for (const auto& v : *arr) {
            auto s = v.value<std::string>();
            if (!s) throw ParseError(source_name, v.source().begin.line, std::string("'") + what + "' holds a non-string");
            out.push_back(*s);
        }
        return out;
    };
    const toml::table& cdoc = doc;
    std::string name = cdoc["name"].value_or(std::string("netlist"));
    auto inputs = strings(cdoc["inputs"], "inputs");
    auto outputs = strings(cdoc["outputs"], "outputs");

    std::vector<GateInstance> gates;
    const auto* garr = cdoc["gates"].as_array();
    if (garr == nullptr) throw ParseError(source_name, 0, "missing 'gates' array");
    for (const auto& node : *garr) {
        const auto* t = node.as_table();
        const std::size_t line = node.source().begin.line;
        if (t == nullptr) throw ParseError(source_name, line, "gate entry must be a table");
        auto gname = (*t)["name"].value<std::string>();
        auto kind = (*t)["kind"].value<std::string>();
        if (!gname || !kind) throw ParseError(source_name, line, "gate needs name and kind");
        try {
            gates.push_back({*gname, parse_gate_kind(*kind)});
        } catch (const ValidationError& e) {
            throw ParseError(source_name, line, e.what());
        }
    }

    std::vector<NetSpec> nets;
    const auto* narr = cdoc["nets"].as_array();
    if (narr == nullptr) throw ParseError(source_name, 0, "missing 'nets' array");
    for (const auto& node : *narr) {
        const auto* t = node.as_table();
        const std::size_t line = node.source().begin.line;
        if (t == nullptr) throw ParseError(source_name, line, "net entry must be a table");
        auto driver = (*t)["driver"].value<std::string>();
        if (!driver) throw ParseError(source_name, line, "net needs a driver");
        const toml::table& ct = *t;
        nets.push_back({*driver, strings(ct["sinks"], "sinks")});
    }
    try {
        return Netlist(std::move(name), std::move(inputs), std::move(outputs), std::move(gates), nets);
    } catch (const ValidationError& e) {
        throw ParseError(source_name, 0, e.what());
    }
}

Netlist load_netlist(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open netlist file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_netlist(ss.str(), path.string());
}

Netlist builtin_c17() { return parse_netlist(embedded::kNetlistC17, "c17.toml"); }
Netlist builtin_rca4() { return parse_netlist(embedded::kNetlistRca4, "rca4.toml"); }

Netlist resolve_netlist(const std::string& name_or_path) {
    if (name_or_path == "c17") return builtin_c17();
    if (name_or_path == "rca4") return builtin_rca4();
    return load_netlist(name_or_path);
}

GateDelayProvider oracle_delay_provider(const OracleConstants& k) {
    return [&k](const GateInstance& g, const ProcessPoint& p) { return gate_delay(g.kind, p, k); };
}

double critical_path_delay(const Netlist& net, const ProcessPoint& point, const GateDelayProvider& delay_fn) {
    std::vector<double> arrival(net.gates().size(), 0.0);
    auto at = [&](const Driver& d) { return d.kind == Driver::Kind::gate ? arrival[d.index] : 0.0; };
    for (std::size_t g : net.topological_order()) {
        double in = 0.0;
        for (const Driver& d : net.fanin()[g]) in = std::max(in, at(d));
        const DelayResult r = delay_fn(net.gates()[g], point);
        const double w = r.worst();
        if (!std::isfinite(w) || w < 0.0) {
            throw ValidationError("delay provider returned an invalid delay for gate '" + net.gates()[g].name + "'");
        }
        arrival[g] = in + w;
    }
    double worst = 0.0;
    for (const Driver& d : net.output_drivers()) worst = std::max(worst, at(d));
    return worst;
}

// --- dataset generation ----------------------------------------------------

namespace {

struct Column {
    const char* name;
    const char* unit;
    bool categorical;
};

constexpr Column kGateInputs[] = {
    {"vdd", "V", false},      {"temp", "C", false},   {"corner", "code", true}, {"c_load", "fF", false},
    {"input_slew", "ps", false}, {"w_n", "um", false}, {"l_n", "um", false},     {"tox_n", "nm", false},
    {"dvth_n", "V", false},   {"mu_n", "1", false},   {"w_p", "um", false},     {"l_p", "um", false},
    {"tox_p", "nm", false},   {"dvth_p", "V", false}, {"mu_p", "1", false},
};

constexpr Column kCurrentRefInputs[] = {
    {"vdd", "V", false},  {"temp", "C", false}, {"corner", "code", true}, {"r", "kohm", false},
    {"w_n", "um", false}, {"l_n", "um", false}, {"tox_n", "nm", false},   {"dvth_n", "V", false},
};

const FeatureRanges& gate_default_ranges() {
    static const FeatureRanges r = {
        {"vdd", {1.6, 2.0}},        {"temp", {-40.0, 125.0}},   {"corner", {0.0, 4.0}},    {"c_load", {5.0, 15.0}},
        {"input_slew", {20.0, 80.0}}, {"w_n", {0.8, 1.6}},      {"l_n", {0.18, 0.22}},     {"tox_n", {3.8, 4.2}},
        {"dvth_n", {-0.03, 0.03}},  {"mu_n", {0.9, 1.1}},       {"w_p", {1.6, 3.2}},       {"l_p", {0.18, 0.22}},
        {"tox_p", {3.8, 4.2}},      {"dvth_p", {-0.03, 0.03}},  {"mu_p", {0.9, 1.1}},
    };
    return r;
}

const FeatureRanges& current_ref_default_ranges() {
    static const FeatureRanges r = {
        {"vdd", {1.6, 2.0}},  {"temp", {-40.0, 125.0}}, {"corner", {0.0, 4.0}}, {"r", {50.0, 200.0}},
        {"w_n", {0.8, 1.6}},  {"l_n", {0.18, 0.22}},    {"tox_n", {3.8, 4.2}},  {"dvth_n", {-0.03, 0.03}},
    };
    return r;
}

bool is_gate(const CircuitKind& kind) { return std::holds_alternative<GateKind>(kind); }

}  // namespace

std::string to_string(const CircuitKind& kind) {
    if (const auto* g = std::get_if<GateKind>(&kind)) return std::string(to_string(*g));
    return "current_reference";
}

CircuitKind parse_circuit_kind(std::string_view text) {
    if (text == "current_reference") return CurrentReferenceCircuit{};
    return parse_gate_kind(text);
}

FeatureSchema circuit_schema(const CircuitKind& kind) {
    std::vector<Feature> f;
    if (const auto* g = std::get_if<GateKind>(&kind)) {
        for (const auto& c : kGateInputs) f.push_back({c.name, FeatureRole::simulator_input, c.unit, c.categorical});
        for (std::size_t pin = 0; pin < pin_count(*g); ++pin) {
            f.push_back({std::string("delay_lh_") + kPinNames[pin], FeatureRole::simulator_output, "ps", false});
            f.push_back({std::string("delay_hl_") + kPinNames[pin], FeatureRole::simulator_output, "ps", false});
        }
    } else {
        for (const auto& c : kCurrentRefInputs) f.push_back({c.name, FeatureRole::simulator_input, c.unit, c.categorical});
        f.push_back({"i_ref", FeatureRole::simulator_output, "uA", false});
    }
    return FeatureSchema(std::move(f));
}

FeatureRanges default_ranges(const CircuitKind& kind) {
    return is_gate(kind) ? gate_default_ranges() : current_ref_default_ranges();
}

std::pair<ProcessPoint, double> point_from_inputs(const CircuitKind& kind, std::span<const double> in) {
    ProcessPoint p;
    auto corner_of = [](double code) {
        const double r = std::round(code);
        if (!(r >= 0.0 && r < kCornerCount)) throw ValidationError("corner code out of range");
        return static_cast<Corner>(static_cast<int>(r));
    };
    if (is_gate(kind)) {
        if (in.size() != std::size(kGateInputs)) throw ValidationError("gate inputs: wrong feature count");
        p.vdd = in[0];
        p.temp = in[1];
        p.corner = corner_of(in[2]);
        p.c_load = in[3] * kFemto;
        p.input_slew = in[4] * kPico;
        p.nmos = {in[5] * kMicro, in[6] * kMicro, in[7] * kNano, in[8], in[9]};
        p.pmos = {in[10] * kMicro, in[11] * kMicro, in[12] * kNano, in[13], in[14]};
        return {p, 0.0};
    }
    if (in.size() != std::size(kCurrentRefInputs)) throw ValidationError("current reference inputs: wrong feature count");
    p.vdd = in[0];
    p.temp = in[1];
    p.corner = corner_of(in[2]);
    p.nmos = {in[4] * kMicro, in[5] * kMicro, in[6] * kNano, in[7], 1.0};
    return {p, in[3] * kKilo};
}

std::vector<double> inputs_from_point(const ProcessPoint& p) {
    return {p.vdd,           p.temp,           static_cast<double>(static_cast<int>(p.corner)),
            p.c_load / kFemto, p.input_slew / kPico, p.nmos.w / kMicro,
            p.nmos.l / kMicro, p.nmos.tox / kNano, p.nmos.dvth,
            p.nmos.mobility,   p.pmos.w / kMicro,  p.pmos.l / kMicro,
            p.pmos.tox / kNano, p.pmos.dvth,       p.pmos.mobility};
}

Simulator make_simulator(const CircuitKind& kind, const OracleConstants& k) {
    return [kind, &k](std::span<const double> inputs) -> std::optional<std::vector<double>> {
        try {
            auto [p, r] = point_from_inputs(kind, inputs);
            if (const auto* g = std::get_if<GateKind>(&kind)) {
                const DelayResult d = gate_delay(*g, p, k);
                std::vector<double> out;
                for (const auto& pd : d.pins) {
                    out.push_back(pd.lh);
                    out.push_back(pd.hl);
                }
                return out;
            }
            return std::vector<double>{current_reference(p, r, k) / kMicro};
        } catch (const ValidationError&) {
            return std::nullopt;
        }
    };
}

Dataset generate_dataset(const CircuitKind& kind, const FeatureRanges& ranges, std::size_t n, std::uint64_t seed,
                         const OracleConstants& k) {
    if (n < 1) throw ValidationError("generate_dataset: n must be >= 1");
    const FeatureSchema schema = circuit_schema(kind);
    FeatureRanges r = default_ranges(kind);
    for (const auto& [name, range] : ranges) {
        if (!r.count(name)) throw ValidationError("generate_dataset: no input feature named '" + name + "'");
        if (!std::isfinite(range.first) || !std::isfinite(range.second) || range.first > range.second) {
            throw ValidationError("generate_dataset: invalid range for '" + name + "'");
        }
        r[name] = range;
    }
    const auto input_idx = schema.input_indices();
    const auto output_idx = schema.output_indices();
    const auto& corner_range = r.at("corner");
    const int corner_lo = static_cast<int>(std::ceil(corner_range.first));
    const int corner_hi = static_cast<int>(std::floor(corner_range.second));
    if (corner_lo < 0 || corner_hi >= kCornerCount || corner_lo > corner_hi) {
        throw ValidationError("generate_dataset: corner range must cover at least one code in [0, 4]");
    }

    const Simulator sim = make_simulator(kind, k);
    Rng rng = make_stream(seed, "data");
    Matrix rows(n, schema.size());
    std::vector<double> inputs(input_idx.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < input_idx.size(); ++j) {
            const Feature& f = schema[input_idx[j]];
            const auto [lo, hi] = r.at(f.name);
            if (f.categorical) {
                inputs[j] = static_cast<double>(std::uniform_int_distribution<int>(corner_lo, corner_hi)(rng));
            } else {
                inputs[j] = lo == hi ? lo : uniform(rng, lo, hi);
            }
            rows(i, input_idx[j]) = inputs[j];
        }
        const auto out = sim(inputs);
        if (!out) throw ValidationError("generate_dataset: sampling ranges leave the operating region");
        for (std::size_t j = 0; j < output_idx.size(); ++j) rows(i, output_idx[j]) = (*out)[j];
    }
    return Dataset(schema, std::move(rows));
}

}  // namespace circaug
