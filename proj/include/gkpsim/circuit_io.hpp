#pragma once

#include <string>

#include "gkpsim/fock_oracle.hpp"

namespace gkpsim {

// A staged circuit as read from a JSON document: the named-gate form that
// both the exact pipeline and the number-basis oracle consume. Input modes
// start in vacuum; photons enter through the stage ancillae.
struct CircuitDocument {
    int input_modes = 1;
    OracleCircuit circuit;

    int total_ancilla_photons() const;
};

// Parse and validate a circuit document. Diagnostics carry the offending
// stage/gate index and field name; every violation throws usage_error.
//
// Schema (all gates name their modes with 0-based indices; the fresh
// ancilla of a stage is the highest index):
//   {
//     "input_modes": 1,                 // optional, default 1
//     "stages": [
//       {
//         "gates": [
//           {"gate": "squeeze", "mode": 0, "r": 0.3},
//           {"gate": "phase", "mode": 1, "theta": 0.4},
//           {"gate": "beamsplit", "modes": [0, 1], "theta": 0.5, "phi": 0.0},
//           {"gate": "sum", "modes": [0, 1]},
//           {"gate": "displacement", "mode": 0, "re": 0.1, "im": -0.2},
//           {"gate": "two_mode_squeeze", "modes": [0, 1], "r": 0.2}
//         ],
//         "ancilla_photons": 2,         // optional, default 0
//         "outcome": 0.4,               // optional, default 0
//         "measure_mode": -1,           // optional, default -1 = the ancilla
//         "feedforward": [ ... gates on the remaining modes ... ]  // optional
//       }
//     ]
//   }
CircuitDocument parse_circuit_json(const std::string& text);

// Read the file and parse it; file errors also map to usage_error.
CircuitDocument load_circuit_file(const std::string& path);

}  // namespace gkpsim
