// Program memory: write inputs into stored-program tails by binary
// measurement, read expectations from heads, embed classical stochastic
// maps as measure-and-prepare channels, and persist programs on disk.
#pragma once

#include "choisim/channel.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace choisim {

enum class WriteMode { Postselect, Sample };

struct WriteOutcome {
  bool success = false;
  double probability = 0.0;        // probability of the reported branch
  DensityOperator head_state;      // normalized post-measurement head state
};

// Binary measurement {sqrt(rho^t), sqrt(1 - rho^t)} on the tail wires.
// The success branch carries E(rho)/tr(E(rho)) on the head with branch
// probability tr(E(rho))/d (exactly 1/d for a TP program). Sample mode
// draws the branch from rng; Postselect always reports the success branch.
WriteOutcome write_input(const ProgramState& p, const DensityOperator& rho,
                         WriteMode mode, Rng* rng = nullptr,
                         double tol = default_tol());

// tr(obs * head); obs must be Hermitian within tol.
double read_expectation(const DensityOperator& head, const Matrix& obs,
                        double tol = default_tol());

// Column-stochastic S -> entanglement-breaking channel
// E(rho) = sum_i tr(F_i rho) |i><i| with F_i = sum_j S_ij |j><j|.
Channel stochastic_to_channel(const Eigen::MatrixXd& s, double tol = 1e-12);

// One program per file under a directory; names are keys, order is
// lexicographic. Mutations are single-writer.
class Registry {
 public:
  explicit Registry(std::filesystem::path dir);

  void save(const std::string& name, const ProgramState& p,
            const nlohmann::json& metadata = nlohmann::json::object(),
            bool overwrite = false);
  ProgramState load(const std::string& name, double tol = default_tol()) const;
  std::vector<std::string> list() const;
  bool contains(const std::string& name) const;
  std::filesystem::path path_of(const std::string& name) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace choisim
