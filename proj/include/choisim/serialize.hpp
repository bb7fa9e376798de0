// Shared file formats. One document per program / channel / superchannel:
//   { "schema": "choisim-program-v1", "kind": "choi" | "kraus" | "superchannel",
//     "dims_head": [...], "dims_tail": [...], "matrix": ..., "metadata": {...} }
// Matrices are row-major arrays of [re, im] pairs; kind "kraus" stores an
// array of them under "matrix", kind "superchannel" stores the two unitary
// blocks under "v_matrix"/"u_matrix". Numbers round-trip exactly.
// Circuits:
//   { "schema": "choisim-circuit-v1", "wires": n, "inputs": [...],
//     "gates": [ { "kind": "H", "wires": [0], "switchable": false,
//                  "switch": "on" }, ... ] }
#pragma once

#include "choisim/channel.hpp"
#include "choisim/circuit.hpp"
#include "choisim/superchannel.hpp"

#include <filesystem>
#include <string>

#include "json.hpp"

namespace choisim {

using Json = nlohmann::json;

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line) : Error(what), line(line) {}
  int line = 0;
};

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, int rows, int cols);

Json program_to_json(const ProgramState& p,
                     const Json& metadata = Json::object());
ProgramState program_from_json(const Json& j, double tol = default_tol());

Json channel_to_json(const Channel& ch, const std::string& kind = "kraus",
                     const Json& metadata = Json::object());
Channel channel_from_json(const Json& j, double tol = default_tol());

Json superchannel_to_json(const SuperchannelSpec& s,
                          const Json& metadata = Json::object());
SuperchannelSpec superchannel_from_json(const Json& j);

// Any of the program-file kinds, loaded uniformly: choi and kraus kinds
// yield a program (kraus goes through choi_of).
struct ProgramFile {
  ProgramState program;
  std::string kind;
  Json metadata;
};
ProgramFile program_file_from_json(const Json& j, double tol = default_tol());

Json circuit_to_json(const TailedCircuit& c);
// Parses circuit text; syntax and semantic diagnostics carry 1-based line
// numbers pointing at the offending construct.
TailedCircuit circuit_from_text(const std::string& text);

// Document text with exact-round-trip numbers and sorted keys.
std::string to_canonical_text(const Json& j);
Json parse_text(const std::string& text);  // throws ParseError with line info

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace choisim
