#include "gkpsim/circuit_io.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace gkpsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw usage_error("circuit schema: " + where + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) fail(where, "unknown field '" + item.key() + "'");
}

double need_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) fail(where, "missing field '" + key + "'");
    if (!obj[key].is_number()) fail(where + "." + key, "expected a number");
    return obj[key].get<double>();
}

double optional_number(const json& obj, const std::string& key, double fallback,
                       const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(where + "." + key, "expected a number");
    return obj[key].get<double>();
}

int need_int(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) fail(where, "missing field '" + key + "'");
    if (!obj[key].is_number_integer()) fail(where + "." + key, "expected an integer");
    return obj[key].get<int>();
}

int one_mode(const json& obj, const std::string& where) {
    return need_int(obj, "mode", where);
}

std::pair<int, int> two_modes(const json& obj, const std::string& where) {
    if (!obj.contains("modes")) fail(where, "missing field 'modes'");
    const json& m = obj["modes"];
    if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() || !m[1].is_number_integer())
        fail(where + ".modes", "expected an array of two mode indices");
    return {m[0].get<int>(), m[1].get<int>()};
}

GateSpec parse_gate(const json& obj, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected a gate object");
    if (!obj.contains("gate") || !obj["gate"].is_string())
        fail(where, "missing string field 'gate'");
    const std::string name = obj["gate"].get<std::string>();
    GateSpec g;
    if (name == "squeeze") {
        reject_unknown_keys(obj, {"gate", "mode", "r"}, where);
        g.kind = GateSpec::Kind::squeeze;
        g.a = one_mode(obj, where);
        g.p1 = need_number(obj, "r", where);
    } else if (name == "phase") {
        reject_unknown_keys(obj, {"gate", "mode", "theta"}, where);
        g.kind = GateSpec::Kind::phase;
        g.a = one_mode(obj, where);
        g.p1 = need_number(obj, "theta", where);
    } else if (name == "beamsplit") {
        reject_unknown_keys(obj, {"gate", "modes", "theta", "phi"}, where);
        g.kind = GateSpec::Kind::beamsplit;
        std::tie(g.a, g.b) = two_modes(obj, where);
        g.p1 = need_number(obj, "theta", where);
        g.p2 = optional_number(obj, "phi", 0.0, where);
    } else if (name == "sum") {
        reject_unknown_keys(obj, {"gate", "modes"}, where);
        g.kind = GateSpec::Kind::sum;
        std::tie(g.a, g.b) = two_modes(obj, where);
    } else if (name == "displacement") {
        reject_unknown_keys(obj, {"gate", "mode", "re", "im"}, where);
        g.kind = GateSpec::Kind::displace;
        g.a = one_mode(obj, where);
        g.p1 = optional_number(obj, "re", 0.0, where);
        g.p2 = optional_number(obj, "im", 0.0, where);
    } else if (name == "two_mode_squeeze") {
        reject_unknown_keys(obj, {"gate", "modes", "r"}, where);
        g.kind = GateSpec::Kind::two_mode_squeeze;
        std::tie(g.a, g.b) = two_modes(obj, where);
        g.p1 = need_number(obj, "r", where);
    } else {
        fail(where + ".gate", "unknown gate '" + name + "'");
    }
    return g;
}

std::vector<GateSpec> parse_gate_list(const json& arr, const std::string& where) {
    if (!arr.is_array()) fail(where, "expected an array of gates");
    std::vector<GateSpec> out;
    for (size_t i = 0; i < arr.size(); ++i)
        out.push_back(parse_gate(arr[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

// index checks live here so diagnostics carry the JSON location; the
// engines re-validate on their own
void check_gate_modes(const std::vector<GateSpec>& gates, int modes, const std::string& where) {
    for (size_t i = 0; i < gates.size(); ++i) {
        const GateSpec& g = gates[i];
        const std::string at = where + "[" + std::to_string(i) + "]";
        const bool two = gate_is_two_mode(g.kind);
        if (g.a < 0 || g.a >= modes || (two && (g.b < 0 || g.b >= modes)))
            fail(at, "mode index out of range (live modes: " + std::to_string(modes) + ")");
        if (two && g.a == g.b) fail(at, "two-mode gate needs distinct modes");
    }
}

}  // namespace

int CircuitDocument::total_ancilla_photons() const {
    int total = 0;
    for (const OracleStage& st : circuit.stages) total += st.ancilla_photons;
    return total;
}

CircuitDocument parse_circuit_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw usage_error(std::string("circuit JSON does not parse: ") + e.what());
    }
    if (!doc.is_object()) fail("document", "expected a JSON object");
    reject_unknown_keys(doc, {"input_modes", "stages"}, "document");

    CircuitDocument out;
    if (doc.contains("input_modes")) {
        if (!doc["input_modes"].is_number_integer()) fail("input_modes", "expected an integer");
        out.input_modes = doc["input_modes"].get<int>();
    }
    if (out.input_modes < 1) fail("input_modes", "need at least one input mode");

    if (!doc.contains("stages") || !doc["stages"].is_array())
        fail("document", "missing array field 'stages'");

    int live = out.input_modes;
    for (size_t s = 0; s < doc["stages"].size(); ++s) {
        const std::string where = "stages[" + std::to_string(s) + "]";
        const json& st = doc["stages"][s];
        if (!st.is_object()) fail(where, "expected a stage object");
        reject_unknown_keys(
            st, {"gates", "ancilla_photons", "outcome", "measure_mode", "feedforward"}, where);

        OracleStage stage;
        const int attached = live + 1;
        if (st.contains("gates")) stage.gates = parse_gate_list(st["gates"], where + ".gates");
        check_gate_modes(stage.gates, attached, where + ".gates");

        if (st.contains("ancilla_photons")) {
            stage.ancilla_photons = need_int(st, "ancilla_photons", where);
            if (stage.ancilla_photons < 0)
                fail(where + ".ancilla_photons", "must be nonnegative");
        }
        stage.outcome = optional_number(st, "outcome", 0.0, where);
        if (st.contains("measure_mode")) {
            stage.measure_mode = need_int(st, "measure_mode", where);
            if (stage.measure_mode < -1 || stage.measure_mode >= attached)
                fail(where + ".measure_mode", "mode index out of range");
        }
        if (st.contains("feedforward")) {
            stage.feedforward = parse_gate_list(st["feedforward"], where + ".feedforward");
            check_gate_modes(stage.feedforward, attached - 1, where + ".feedforward");
        }
        out.circuit.stages.push_back(std::move(stage));
        // one mode measured away: live count returns to the pre-stage value
    }
    return out;
}

CircuitDocument load_circuit_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open circuit file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_circuit_json(buf.str());
}

}  // namespace gkpsim
