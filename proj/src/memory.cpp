#include "choisim/memory.hpp"

#include "choisim/serialize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace choisim {

WriteOutcome write_input(const ProgramState& p, const DensityOperator& rho,
                         WriteMode mode, Rng* rng, double tol) {
  if (product_of(rho.dims) != p.tail_dim())
    throw DimensionError("write_input: input dims do not match program tail");
  validate_density(rho, std::max(tol, 1e-8));

  const Matrix rho_t = rho.matrix.transpose();
  const Matrix m_succ = psd_sqrt(rho_t, tol);
  const Matrix m_fail =
      psd_sqrt(Matrix::Identity(rho.dim(), rho.dim()) - rho_t, tol);

  DensityOperator post_succ = apply_on_wires(p.state, m_succ, p.tail_wires);
  const double p_succ = std::max(post_succ.trace_real(), 0.0);

  bool success = true;
  if (mode == WriteMode::Sample) {
    if (!rng) throw Error("write_input: sample mode needs a generator");
    const double u = (((*rng)() >> 11) * 0x1.0p-53);
    success = u < p_succ;
  } else if (p_succ < 1e-15) {
    throw ValidationError("write_input: success probability is zero");
  }

  WriteOutcome out;
  out.success = success;
  if (success) {
    out.probability = p_succ;
    DensityOperator head = partial_trace(post_succ, p.head_wires);
    head.matrix /= p_succ;
    out.head_state = std::move(head);
  } else {
    DensityOperator post_fail = apply_on_wires(p.state, m_fail, p.tail_wires);
    const double p_fail = std::max(post_fail.trace_real(), 0.0);
    out.probability = p_fail;
    DensityOperator head = partial_trace(post_fail, p.head_wires);
    if (p_fail > 1e-15) head.matrix /= p_fail;
    out.head_state = std::move(head);
  }
  return out;
}

double read_expectation(const DensityOperator& head, const Matrix& obs, double tol) {
  if (obs.rows() != head.dim() || obs.cols() != head.dim())
    throw DimensionError("read_expectation: observable dims mismatch");
  if (!is_hermitian(obs, std::max(tol, 1e-10)))
    throw ValidationError("read_expectation: observable is not Hermitian");
  return (obs * head.matrix).trace().real();
}

Channel stochastic_to_channel(const Eigen::MatrixXd& s, double tol) {
  if (s.rows() != s.cols() || s.rows() < 1)
    throw DimensionError("stochastic_to_channel: matrix must be square");
  const int d = static_cast<int>(s.rows());
  for (int j = 0; j < d; ++j) {
    double col = 0.0;
    for (int i = 0; i < d; ++i) {
      if (s(i, j) < -tol)
        throw ValidationError("stochastic_to_channel: negative entry");
      col += s(i, j);
    }
    if (std::abs(col - 1.0) > std::max(tol, 1e-10))
      throw ValidationError("stochastic_to_channel: column does not sum to 1");
  }
  std::vector<Matrix> kraus;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double w = std::max(s(i, j), 0.0);
      if (w == 0.0) continue;
      Matrix k = Matrix::Zero(d, d);
      k(i, j) = std::sqrt(w);
      kraus.push_back(std::move(k));
    }
  return channel_from_kraus(std::move(kraus));
}

namespace {

void check_name(const std::string& name) {
  if (name.empty()) throw ValidationError("registry: empty name");
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      throw ValidationError("registry: name must be alphanumeric with _ or -");
}

}  // namespace

Registry::Registry(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path Registry::path_of(const std::string& name) const {
  check_name(name);
  return dir_ / (name + ".json");
}

bool Registry::contains(const std::string& name) const {
  return std::filesystem::exists(path_of(name));
}

void Registry::save(const std::string& name, const ProgramState& p,
                    const nlohmann::json& metadata, bool overwrite) {
  const auto path = path_of(name);
  if (!overwrite && std::filesystem::exists(path))
    throw ValidationError("registry: name collision for '" + name + "'");
  std::filesystem::create_directories(dir_);
  write_text_file(path, to_canonical_text(program_to_json(p, metadata)));
}

ProgramState Registry::load(const std::string& name, double tol) const {
  const auto path = path_of(name);
  if (!std::filesystem::exists(path))
    throw ValidationError("registry: no entry named '" + name + "'");
  return program_file_from_json(parse_text(read_text_file(path)), tol).program;
}

std::vector<std::string> Registry::list() const {
  std::vector<std::string> names;
  if (!std::filesystem::exists(dir_)) return names;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace choisim
