#include "choisim/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace choisim {

namespace {

constexpr const char* kProgramSchema = "choisim-program-v1";
constexpr const char* kCircuitSchema = "choisim-circuit-v1";

int line_of_byte(const std::string& text, size_t byte) {
  int line = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

// 1-based line of the n-th occurrence (0-indexed) of a needle
int line_of_nth(const std::string& text, const std::string& needle, int n) {
  size_t pos = 0;
  for (int i = 0; i <= n; ++i) {
    pos = text.find(needle, pos);
    if (pos == std::string::npos) return 0;
    if (i < n) pos += needle.size();
  }
  return line_of_byte(text, pos);
}

std::vector<int> dims_from_json(const Json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array())
    throw ValidationError(std::string("missing or invalid field '") + field + "'");
  std::vector<int> dims;
  for (const auto& v : j[field]) {
    if (!v.is_number_integer() || v.get<int>() < 1)
      throw ValidationError(std::string("bad dimension in '") + field + "'");
    dims.push_back(v.get<int>());
  }
  if (dims.empty())
    throw ValidationError(std::string("empty dimension list '") + field + "'");
  return dims;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json arr = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      arr.push_back({m(r, c).real(), m(r, c).imag()});
  return arr;
}

Matrix matrix_from_json(const Json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
    throw ValidationError("matrix entry count does not match dims");
  Matrix m(rows, cols);
  int idx = 0;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw ValidationError("matrix entries must be [re, im] pairs");
    m(idx / cols, idx % cols) = Complex(e[0].get<double>(), e[1].get<double>());
    ++idx;
  }
  return m;
}

Json program_to_json(const ProgramState& p, const Json& metadata) {
  // canonical wire order: head group then tail group
  std::vector<int> order = p.head_wires;
  order.insert(order.end(), p.tail_wires.begin(), p.tail_wires.end());
  DensityOperator canonical = permute_wires(p.state, order);

  Json j;
  j["schema"] = kProgramSchema;
  j["kind"] = "choi";
  j["dims_head"] = p.head_dims();
  j["dims_tail"] = p.tail_dims();
  j["matrix"] = matrix_to_json(canonical.matrix);
  j["metadata"] = metadata.is_null() ? Json::object() : metadata;
  return j;
}

ProgramState program_from_json(const Json& j, double tol) {
  const auto head = dims_from_json(j, "dims_head");
  const auto tail = dims_from_json(j, "dims_tail");
  std::vector<int> dims = head;
  dims.insert(dims.end(), tail.begin(), tail.end());
  const int d = product_of(dims);
  if (!j.contains("matrix"))
    throw ValidationError("program file is missing 'matrix'");
  DensityOperator state(matrix_from_json(j["matrix"], d, d), dims);
  validate_density(state, std::max(tol, 1e-8));
  std::vector<int> hw(head.size()), tw(tail.size());
  std::iota(hw.begin(), hw.end(), 0);
  std::iota(tw.begin(), tw.end(), static_cast<int>(head.size()));
  return ProgramState(std::move(state), std::move(hw), std::move(tw));
}

Json channel_to_json(const Channel& ch, const std::string& kind, const Json& metadata) {
  Json j;
  j["schema"] = kProgramSchema;
  j["kind"] = kind;
  j["dims_head"] = std::vector<int>{ch.dim_out};
  j["dims_tail"] = std::vector<int>{ch.dim_in};
  if (kind == "choi") {
    j["matrix"] = matrix_to_json(ch.choi_matrix());
  } else if (kind == "kraus") {
    Json ops = Json::array();
    for (const auto& k : ch.kraus_ops()) ops.push_back(matrix_to_json(k));
    j["matrix"] = ops;
  } else {
    throw ValidationError("channel_to_json: kind must be 'choi' or 'kraus'");
  }
  j["metadata"] = metadata.is_null() ? Json::object() : metadata;
  return j;
}

Channel channel_from_json(const Json& j, double tol) {
  const std::string kind = j.value("kind", "");
  const int dout = product_of(dims_from_json(j, "dims_head"));
  const int din = product_of(dims_from_json(j, "dims_tail"));
  if (kind == "choi") {
    Channel ch;
    ch.dim_out = dout;
    ch.dim_in = din;
    ch.choi = matrix_from_json(j.at("matrix"), dout * din, dout * din);
    CptpReport rep = is_cptp(ch, std::max(tol, 1e-8));
    if (!rep.completely_positive)
      throw ValidationError("channel file: Choi matrix is not PSD");
    return ch;
  }
  if (kind == "kraus") {
    if (!j.contains("matrix") || !j["matrix"].is_array() || j["matrix"].empty())
      throw ValidationError("kraus channel file needs a nonempty 'matrix' array");
    std::vector<Matrix> kraus;
    for (const auto& e : j["matrix"]) kraus.push_back(matrix_from_json(e, dout, din));
    return channel_from_kraus(std::move(kraus));
  }
  throw ValidationError("channel file has unsupported kind '" + kind + "'");
}

Json superchannel_to_json(const SuperchannelSpec& s, const Json& metadata) {
  Json j;
  j["schema"] = kProgramSchema;
  j["kind"] = "superchannel";
  j["dims_head"] = std::vector<int>{s.head_dim};
  j["dims_tail"] = std::vector<int>{s.tail_dim};
  j["ebit_dim"] = s.ebit_dim;
  j["v_matrix"] = matrix_to_json(s.v);
  j["u_matrix"] = matrix_to_json(s.u);
  j["metadata"] = metadata.is_null() ? Json::object() : metadata;
  return j;
}

SuperchannelSpec superchannel_from_json(const Json& j) {
  if (j.value("kind", "") != "superchannel")
    throw ValidationError("not a superchannel file");
  const int head = product_of(dims_from_json(j, "dims_head"));
  const int tail = product_of(dims_from_json(j, "dims_tail"));
  if (!j.contains("ebit_dim") || !j["ebit_dim"].is_number_integer())
    throw ValidationError("superchannel file is missing 'ebit_dim'");
  const int e = j["ebit_dim"].get<int>();
  Matrix v = matrix_from_json(j.at("v_matrix"), head * e, head * e);
  Matrix u = matrix_from_json(j.at("u_matrix"), tail * e, tail * e);
  return SuperchannelSpec(std::move(v), std::move(u), head, tail, e);
}

ProgramFile program_file_from_json(const Json& j, double tol) {
  ProgramFile f;
  f.kind = j.value("kind", "");
  f.metadata = j.value("metadata", Json::object());
  if (f.kind == "choi") {
    f.program = program_from_json(j, tol);
  } else if (f.kind == "kraus") {
    f.program = choi_of(channel_from_json(j, tol), std::max(tol, 1e-8));
  } else {
    throw ValidationError("file kind '" + f.kind + "' does not store a program");
  }
  return f;
}

Json circuit_to_json(const TailedCircuit& c) {
  Json j;
  j["schema"] = kCircuitSchema;
  j["wires"] = c.n_wires;
  if (!c.inputs.empty()) j["inputs"] = c.inputs;
  Json gates = Json::array();
  for (const auto& g : c.gates) {
    Json rec;
    rec["kind"] = gate_name(g.kind);
    rec["wires"] = g.wires;
    if (g.switchable) {
      rec["switchable"] = true;
      rec["switch"] = g.switched_on ? "on" : "off";
    }
    gates.push_back(std::move(rec));
  }
  j["gates"] = std::move(gates);
  return j;
}

TailedCircuit circuit_from_text(const std::string& text) {
  Json j = parse_text(text);
  auto fail = [&](const std::string& msg, int gate_idx) -> ParseError {
    int line = line_of_nth(text, "\"kind\"", gate_idx);
    std::ostringstream os;
    os << msg << " (gate " << gate_idx << ", line " << line << ")";
    return ParseError(os.str(), line);
  };

  TailedCircuit c;
  if (!j.contains("wires") || !j["wires"].is_number_integer())
    throw ParseError("circuit file is missing integer 'wires'", 1);
  c.n_wires = j["wires"].get<int>();
  if (j.contains("inputs")) {
    if (!j["inputs"].is_array())
      throw ParseError("'inputs' must be an array of ket names", 1);
    for (const auto& k : j["inputs"]) c.inputs.push_back(k.get<std::string>());
  }
  if (!j.contains("gates") || !j["gates"].is_array())
    throw ParseError("circuit file is missing 'gates' array", 1);

  int idx = 0;
  for (const auto& rec : j["gates"]) {
    Gate g;
    if (!rec.is_object() || !rec.contains("kind") || !rec["kind"].is_string())
      throw fail("gate record needs a string 'kind'", idx);
    const std::string kind = rec["kind"].get<std::string>();
    if (kind == "H") g.kind = GateKind::H;
    else if (kind == "T") g.kind = GateKind::T;
    else if (kind == "CNOT") g.kind = GateKind::Cnot;
    else throw fail("unknown gate kind '" + kind + "'", idx);
    if (!rec.contains("wires") || !rec["wires"].is_array())
      throw fail("gate record needs a 'wires' array", idx);
    for (const auto& w : rec["wires"]) {
      if (!w.is_number_integer()) throw fail("gate wires must be integers", idx);
      g.wires.push_back(w.get<int>());
    }
    if (static_cast<int>(g.wires.size()) != gate_arity(g.kind))
      throw fail("gate has wrong wire count", idx);
    g.switchable = rec.value("switchable", false);
    if (rec.contains("switch")) {
      const std::string s = rec["switch"].get<std::string>();
      if (s != "on" && s != "off") throw fail("switch must be 'on' or 'off'", idx);
      g.switched_on = (s == "on");
      if (!g.switchable && !g.switched_on)
        throw fail("only switchable gates may be off", idx);
    }
    c.gates.push_back(std::move(g));
    ++idx;
  }

  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), 1);
  }
  return c;
}

std::string to_canonical_text(const Json& j) { return j.dump(1) + "\n"; }

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what(), line_of_byte(text, e.byte));
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace choisim
