#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "circaug/dataio.hpp"

namespace circaug {

enum class Corner { TT = 0, FF = 1, SS = 2, FS = 3, SF = 4 };

std::string_view to_string(Corner c);
Corner parse_corner(std::string_view text);

/// Transistor parameters of one device group (NMOS pull-down or PMOS pull-up).
struct DeviceParams {
    double w = 1.0e-6;    // m
    double l = 0.18e-6;   // m
    double tox = 4.0e-9;  // m
    double dvth = 0.0;    // V, local threshold shift
    double mobility = 1.0;  // relative mobility multiplier

    friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

/// Operating and process conditions shared by every gate of an evaluation.
struct ProcessPoint {
    double vdd = 1.8;       // V
    double temp = 27.0;     // degrees C
    Corner corner = Corner::TT;
    double c_load = 10e-15;  // F
    double input_slew = 50e-12;  // s
    DeviceParams nmos{1.0e-6, 0.18e-6, 4.0e-9, 0.0, 1.0};
    DeviceParams pmos{2.0e-6, 0.18e-6, 4.0e-9, 0.0, 1.0};

    friend bool operator==(const ProcessPoint&, const ProcessPoint&) = default;
};

/// The fourteen digital blocks; pins are named a, b, c, d in order.
enum class GateKind { NOT, NAND2, AND2, NOR2, OR2, XOR2, AO12, FA, MUX2, NAND3, AND3, NOR3, AO22, AO31 };

inline constexpr std::array kAllGateKinds = {GateKind::NOT,  GateKind::NAND2, GateKind::AND2, GateKind::NOR2,
                                             GateKind::OR2,  GateKind::XOR2,  GateKind::AO12, GateKind::FA,
                                             GateKind::MUX2, GateKind::NAND3, GateKind::AND3, GateKind::NOR3,
                                             GateKind::AO22, GateKind::AO31};

std::string_view to_string(GateKind kind);
GateKind parse_gate_kind(std::string_view text);
std::size_t pin_count(GateKind kind);

struct GateConstants {
    double drive = 1.0;
    std::vector<double> pins;
    double rise = 1.0;
    double fall = 1.0;
};

/// Versioned constants table. See data/oracle_constants.toml.
struct OracleConstants {
    int version = 0;
    double alpha = 1.3;
    double mu0 = 1.0;
    double vth_temp_coeff = 0.0;
    double tox_ref = 4e-9;  // m
    double slew_coeff = 0.0;  // per ps
    double vdd_nom = 1.8;
    double lambda = 0.05;
    std::array<std::array<double, 2>, 5> vth0{};  // [corner][nmos, pmos]
    std::map<GateKind, GateConstants> gates;

    /// Threshold magnitude of the NMOS (`pmos == false`) or PMOS group.
    double vth(const ProcessPoint& p, bool pmos) const;
    double mobility(double temp) const;
};

OracleConstants parse_constants(std::string_view toml_text, const std::string& source_name = "<constants>");
OracleConstants load_constants(const std::filesystem::path& path);
/// Parsed from the constants file compiled into the library.
const OracleConstants& default_constants();

/// Throws ValidationError if p violates the operating-region guard.
void validate_point(const ProcessPoint& p, const OracleConstants& k = default_constants());

struct PinDelay {
    double lh = 0.0;  // ps
    double hl = 0.0;  // ps
};

struct DelayResult {
    std::vector<PinDelay> pins;

    double worst() const;
};

DelayResult gate_delay(GateKind kind, const ProcessPoint& p, const OracleConstants& k = default_constants());

/// Toy current reference, in amperes.
double current_reference(const ProcessPoint& p, double r_ohms, const OracleConstants& k = default_constants());

// --- netlists ------------------------------------------------------------------

struct GateInstance {
    std::string name;
    GateKind kind = GateKind::NAND2;
};

/// A signal source: a primary input or the output of a gate.
struct Driver {
    enum class Kind { primary_input, gate } kind = Kind::primary_input;
    std::size_t index = 0;

    friend bool operator==(const Driver&, const Driver&) = default;
};

struct NetSpec {
    std::string driver;
    std::vector<std::string> sinks;  // "gate.pin" or a primary output name
};

/// Validated combinational netlist: acyclic, every gate pin and primary
/// output driven exactly once.
class Netlist {
public:
    Netlist(std::string name, std::vector<std::string> inputs, std::vector<std::string> outputs,
            std::vector<GateInstance> gates, const std::vector<NetSpec>& nets);

    const std::string& name() const noexcept { return name_; }
    const std::vector<std::string>& inputs() const noexcept { return inputs_; }
    const std::vector<std::string>& outputs() const noexcept { return outputs_; }
    const std::vector<GateInstance>& gates() const noexcept { return gates_; }
    /// fanin()[g][pin]
    const std::vector<std::vector<Driver>>& fanin() const noexcept { return fanin_; }
    const std::vector<Driver>& output_drivers() const noexcept { return output_drivers_; }
    /// Gate indices such that every gate follows its drivers.
    const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

private:
    std::string name_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::vector<GateInstance> gates_;
    std::vector<std::vector<Driver>> fanin_;
    std::vector<Driver> output_drivers_;
    std::vector<std::size_t> topo_;
};

Netlist parse_netlist(std::string_view toml_text, const std::string& source_name = "<netlist>");
Netlist load_netlist(const std::filesystem::path& path);
Netlist builtin_c17();
Netlist builtin_rca4();
/// "c17" / "rca4", or a path to a netlist TOML file.
Netlist resolve_netlist(const std::string& name_or_path);

using GateDelayProvider = std::function<DelayResult(const GateInstance&, const ProcessPoint&)>;

GateDelayProvider oracle_delay_provider(const OracleConstants& k = default_constants());

/// Longest input-to-output path; each gate contributes its worst pin delay.
double critical_path_delay(const Netlist& net, const ProcessPoint& point, const GateDelayProvider& delay_fn);

// --- dataset generation ----------------------------------------------------

struct CurrentReferenceCircuit {
    friend bool operator==(const CurrentReferenceCircuit&, const CurrentReferenceCircuit&) = default;
};

using CircuitKind = std::variant<GateKind, CurrentReferenceCircuit>;

std::string to_string(const CircuitKind& kind);
/// Gate names from the constants table, or "current_reference".
CircuitKind parse_circuit_kind(std::string_view text);

/// Closed sampling interval per feature name.
using FeatureRanges = std::map<std::string, std::pair<double, double>>;

FeatureSchema circuit_schema(const CircuitKind& kind);
FeatureRanges default_ranges(const CircuitKind& kind);

/// Input features (in schema input order) to a ProcessPoint.
/// For the current reference, also returns r in ohms.
std::pair<ProcessPoint, double> point_from_inputs(const CircuitKind& kind, std::span<const double> inputs);
/// ProcessPoint back to the gate dataset's input features.
std::vector<double> inputs_from_point(const ProcessPoint& p);

/// Oracle outputs for one row of input features; nullopt if the inputs
/// violate the operating-region guard.
using Simulator = std::function<std::optional<std::vector<double>>(std::span<const double> inputs)>;
Simulator make_simulator(const CircuitKind& kind, const OracleConstants& k = default_constants());

/// Uniform samples over `ranges` (missing names take defaults); the corner
/// column is uniform over the integer codes in its range.
Dataset generate_dataset(const CircuitKind& kind, const FeatureRanges& ranges, std::size_t n, std::uint64_t seed,
                         const OracleConstants& k = default_constants());

}  // namespace circaug
