#include <doctest.h>

#include <cmath>
#include <map>

#include "circaug/error.hpp"
#include "circaug/oracle.hpp"
#include "support.hpp"

using namespace circaug;
using circaug::testing::brute_force_critical_path;
using circaug::testing::monotonicity_violations;
using circaug::testing::random_point;

TEST_CASE("NAND2 at the nominal point matches a hand evaluation of the delay formula") {
    // Shipped constants: drive 14, pins {1, 1.1}, rise 1.0, fall 1.3,
    // Vth0(TT) = {0.45, 0.50}, alpha 1.3, slew 0.002/ps at 50 ps.
    const double common = 10.0 * 1.8 * (1.0 + 0.002 * 50.0);
    const double mu = std::pow(300.15 / 300.0, -1.5);
    const double up = mu * (2.0 / 0.18) * std::pow(1.8 - 0.50, 1.3);
    const double down = mu * (1.0 / 0.18) * std::pow(1.8 - 0.45, 1.3);
    const DelayResult r = gate_delay(GateKind::NAND2, ProcessPoint{});
    REQUIRE(r.pins.size() == 2);
    CHECK(r.pins[0].lh == doctest::Approx(14.0 * common * 1.0 / up).epsilon(1e-12));
    CHECK(r.pins[0].hl == doctest::Approx(14.0 * common * 1.3 / down).epsilon(1e-12));
    CHECK(r.pins[1].lh == doctest::Approx(14.0 * 1.1 * common / up).epsilon(1e-12));
    CHECK(r.pins[1].hl == doctest::Approx(14.0 * 1.1 * common * 1.3 / down).epsilon(1e-12));
    // Pinned regression values.
    CHECK(r.pins[0].lh == doctest::Approx(17.7515).epsilon(1e-5));
    CHECK(r.pins[0].hl == doctest::Approx(43.9441).epsilon(1e-5));
}

TEST_CASE("doubling c_load doubles every delay of every gate") {
    ProcessPoint p;
    ProcessPoint q = p;
    q.c_load *= 2.0;
    for (GateKind g : kAllGateKinds) {
        const DelayResult a = gate_delay(g, p);
        const DelayResult b = gate_delay(g, q);
        REQUIRE(a.pins.size() == pin_count(g));
        for (std::size_t i = 0; i < a.pins.size(); ++i) {
            CHECK(a.pins[i].lh > 0.0);
            CHECK(b.pins[i].lh == doctest::Approx(2.0 * a.pins[i].lh).epsilon(1e-14));
            CHECK(b.pins[i].hl == doctest::Approx(2.0 * a.pins[i].hl).epsilon(1e-14));
        }
    }
}

TEST_CASE("delays are strictly monotone on a 5^4 lattice of c_load, temp, vdd and w") {
    CHECK(monotonicity_violations() == 0);
}

TEST_CASE("operating-region guard") {
    ProcessPoint p;
    p.vdd = 0.45;
    CHECK_THROWS_AS(gate_delay(GateKind::NOT, p), ValidationError);
    p = {};
    p.temp = 151;
    CHECK_THROWS_AS(validate_point(p), ValidationError);
    p = {};
    p.nmos.tox = 0.0;
    CHECK_THROWS_AS(validate_point(p), ValidationError);
    p = {};
    p.vdd = 0.6;
    p.pmos.dvth = 0.2;  // PMOS threshold 0.7 > vdd
    CHECK_THROWS_AS(validate_point(p), ValidationError);
}

TEST_CASE("current reference: nominal value, linearity in 1/r, increasing in vdd") {
    ProcessPoint p;
    p.nmos.dvth = 0.35;  // Vth = 0.8 at TT, 27 C, so vdd_nom = Vth + 1
    CHECK(current_reference(p, 1e6) == doctest::Approx(1e-6).epsilon(1e-14));
    CHECK(current_reference(p, 5e5) == doctest::Approx(2.0 * current_reference(p, 1e6)).epsilon(1e-14));
    double prev = 0.0;
    for (double v = 0.9; v <= 2.5; v += 0.05) {
        p.vdd = v;
        const double i = current_reference(p, 1e5);
        CHECK(i > prev);
        prev = i;
    }
    CHECK_THROWS_AS(current_reference(ProcessPoint{}, 0.0), ValidationError);
}

TEST_CASE("built-in netlists have the expected structure") {
    const Netlist c17 = builtin_c17();
    CHECK(c17.gates().size() == 6);
    for (const auto& g : c17.gates()) CHECK(g.kind == GateKind::NAND2);
    CHECK(c17.inputs().size() == 5);
    CHECK(c17.outputs().size() == 2);

    const Netlist rca = builtin_rca4();
    REQUIRE(rca.gates().size() == 4);
    for (const auto& g : rca.gates()) CHECK(g.kind == GateKind::FA);
    // Carry chain: FA(i) drives pin c of FA(i + 1).
    for (std::size_t i = 1; i < 4; ++i) {
        const Driver d = rca.fanin()[i][2];
        CHECK(d.kind == Driver::Kind::gate);
        CHECK(d.index == i - 1);
    }
}

TEST_CASE("critical path equals brute-force enumeration at 25 random points") {
    Rng rng = make_stream(2024, "points");
    for (const Netlist& net : {builtin_c17(), builtin_rca4()}) {
        for (int i = 0; i < 25; ++i) {
            const ProcessPoint p = random_point(rng);
            const double fast = critical_path_delay(net, p, oracle_delay_provider());
            CHECK(fast == brute_force_critical_path(net, p));
            for (const auto& g : net.gates()) CHECK(fast >= gate_delay(g.kind, p).worst());
        }
    }
}

TEST_CASE("critical path on one gate and on a series chain") {
    const Netlist one = parse_netlist(R"(
name = "one"
inputs = ["x", "y"]
outputs = ["z"]
gates = [{ name = "g", kind = "NAND2" }]
nets = [
  { driver = "x", sinks = ["g.a"] },
  { driver = "y", sinks = ["g.b"] },
  { driver = "g", sinks = ["z"] },
])");
    const ProcessPoint p;
    CHECK(critical_path_delay(one, p, oracle_delay_provider()) == gate_delay(GateKind::NAND2, p).worst());

    const Netlist chain = parse_netlist(R"(
name = "chain"
inputs = ["x"]
outputs = ["z"]
gates = [{ name = "n1", kind = "NOT" }, { name = "n2", kind = "NOT" }]
nets = [
  { driver = "x", sinks = ["n1.a"] },
  { driver = "n1", sinks = ["n2.a"] },
  { driver = "n2", sinks = ["z"] },
])");
    const double d = gate_delay(GateKind::NOT, p).worst();
    CHECK(critical_path_delay(chain, p, oracle_delay_provider()) == doctest::Approx(2.0 * d).epsilon(1e-15));
}

TEST_CASE("netlist validation: cycles, undriven pins and double drivers") {
    const char* cycle = R"(
name = "loop"
inputs = ["x"]
outputs = ["z"]
gates = [{ name = "g1", kind = "NAND2" }, { name = "g2", kind = "NOT" }]
nets = [
  { driver = "x", sinks = ["g1.a"] },
  { driver = "g2", sinks = ["g1.b"] },
  { driver = "g1", sinks = ["g2.a", "z"] },
])";
    CHECK_THROWS_AS(parse_netlist(cycle), ParseError);

    const char* undriven = R"(
name = "open"
inputs = ["x"]
outputs = ["z"]
gates = [{ name = "g", kind = "NAND2" }]
nets = [
  { driver = "x", sinks = ["g.a"] },
  { driver = "g", sinks = ["z"] },
])";
    CHECK_THROWS_AS(parse_netlist(undriven), ParseError);

    const char* twice = R"(
name = "twice"
inputs = ["x", "y"]
outputs = ["z"]
gates = [{ name = "g", kind = "NOT" }]
nets = [
  { driver = "x", sinks = ["g.a"] },
  { driver = "y", sinks = ["g.a"] },
  { driver = "g", sinks = ["z"] },
])";
    CHECK_THROWS_AS(parse_netlist(twice), ParseError);
    CHECK_THROWS_AS(parse_netlist("name = \"x\"\ninputs = [\n"), ParseError);
}

TEST_CASE("generated NAND2 dataset: 19 columns, deterministic, consistent with the oracle") {
    const CircuitKind kind = GateKind::NAND2;
    const Dataset a = generate_dataset(kind, {}, 1000, 5);
    CHECK(a.schema.size() == 19);
    CHECK(a.schema.output_indices().size() == 4);
    CHECK(generate_dataset(kind, {}, 1000, 5).rows == a.rows);
    CHECK_FALSE(generate_dataset(kind, {}, 1000, 6).rows == a.rows);

    const Simulator sim = make_simulator(kind);
    const auto in_idx = a.schema.input_indices();
    for (std::size_t r = 0; r < 20; ++r) {
        std::vector<double> in;
        for (std::size_t c : in_idx) in.push_back(a.rows(r, c));
        const auto out = sim(in);
        REQUIRE(out.has_value());
        for (std::size_t j = 0; j < 4; ++j) CHECK((*out)[j] == a.rows(r, 15 + j));
        const double code = a.rows(r, a.schema.index_of("corner"));
        CHECK(code == std::round(code));
    }
}

TEST_CASE("degenerate ranges reproduce the hand-computed nominal row") {
    FeatureRanges ranges;
    const std::vector<double> nominal = inputs_from_point(ProcessPoint{});
    const FeatureSchema schema = circuit_schema(GateKind::NAND2);
    for (std::size_t i = 0; i < nominal.size(); ++i) ranges[schema[i].name] = {nominal[i], nominal[i]};
    const Dataset d = generate_dataset(GateKind::NAND2, ranges, 1, 1);
    const DelayResult r = gate_delay(GateKind::NAND2, ProcessPoint{});
    CHECK(d.rows(0, 15) == doctest::Approx(r.pins[0].lh).epsilon(1e-12));
    CHECK(d.rows(0, 18) == doctest::Approx(r.pins[1].hl).epsilon(1e-12));

    FeatureRanges bad{{"vdd", {2.0, 1.0}}};
    CHECK_THROWS_AS(generate_dataset(GateKind::NAND2, bad, 5, 1), ValidationError);
    FeatureRanges unknown{{"nope", {0.0, 1.0}}};
    CHECK_THROWS_AS(generate_dataset(GateKind::NAND2, unknown, 5, 1), ValidationError);
}

TEST_CASE("simulator rejects points outside the operating region") {
    const Simulator sim = make_simulator(CurrentReferenceCircuit{});
    const std::vector<double> ok{1.8, 27, 0, 100, 1.0, 0.18, 4.0, 0.0};
    const auto i = sim(ok);
    REQUIRE(i.has_value());
    CHECK((*i)[0] == doctest::Approx((1.8 - 0.45) / 1e5 * 1e6));
    std::vector<double> low = ok;
    low[0] = 0.4;
    CHECK_FALSE(sim(low).has_value());
}
