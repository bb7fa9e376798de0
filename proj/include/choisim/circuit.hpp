// Tailed circuits: {H, T, CNOT} gate lists compiled into composition plans
// over stored programs and executed with byproducts pulled to the end.
// Inputs enter the accumulated program's tails, outputs leave the heads.
#pragma once

#include "choisim/memory.hpp"
#include "choisim/teleport.hpp"

#include <optional>
#include <string>
#include <vector>

namespace choisim {

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<int> wires;
  bool switchable = false;
  bool switched_on = true;
};

struct TailedCircuit {
  int n_wires = 0;
  std::vector<Gate> gates;
  // per-wire input kets by name: 0, 1, +, -, i, -i (default 0)
  std::vector<std::string> inputs;

  void validate() const;  // throws ValidationError on a malformed circuit
};

DensityOperator input_state(const std::string& ket);

enum class LinkFlavor { Standard, Covariant };

struct PlanLink {
  int circuit_wire = 0;
  LinkFlavor flavor = LinkFlavor::Standard;
};

struct PlanStep {
  int gate_index = 0;
  std::string program_name;
  std::vector<PlanLink> links;  // empty when the gate starts its wires
  LinkFlavor tag = LinkFlavor::Standard;
};

struct CompositionPlan {
  int n_wires = 0;
  std::vector<PlanStep> steps;
  int gate_count = 0;
  int composition_count = 0;  // steps with at least one link
};

// Junction flavor rule: a link into a Clifford destination (H, CNOT) is a
// standard teleportation except for the paper rule that a qubit gate
// composed after a CNOT takes the covariant flavor; a link into T is always
// covariant (an X byproduct cannot pass a T gate).
CompositionPlan compile(const TailedCircuit& c);

struct CostReport {
  int gate_count = 0;
  int ebit_count = 0;           // ancilla ebits attached by switch gadgets
  double expected_attempts = 0;  // 1 per standard step, d^2 per covariant step
};

CostReport cost_report(const CompositionPlan& plan, const TailedCircuit& c, int d = 2);

enum class ExecStrategy { Postselect, Frame, CovariantRetry };

struct StepTrace {
  int gate_index = 0;
  std::string gate;
  std::vector<int> wires;
  std::string flavor;  // "fetch", "standard", "covariant"
  std::vector<BellOutcome> outcomes;
  int attempts = 1;
  int ebits_consumed = 0;
  bool frame_resolved_before = false;  // pending frame corrected ahead of a T
};

struct ExecutionTrace {
  std::vector<StepTrace> steps;
  std::vector<double> write_probabilities;  // per-wire input writes
  std::vector<int> covariant_attempts;
  int total_attempts = 0;
  int ebits_consumed = 0;
  PauliFrame final_frame;  // accumulated frame corrected at circuit end
  bool residual_free = true;
};

struct ExecutionResult {
  DensityOperator output;  // on the circuit wires, after end-of-circuit correction
  ExecutionTrace trace;
};

// Executes the plan on per-wire product inputs. Input writes are taken on
// the success branch (their probabilities are recorded); composition
// randomness follows the strategy. Gate programs come from `registry` when
// given (names H, T, CNOT; missing names are errors), else built in.
ExecutionResult execute(const CompositionPlan& plan, const TailedCircuit& c,
                        const std::vector<DensityOperator>& inputs, Rng& rng,
                        ExecStrategy strategy = ExecStrategy::CovariantRetry,
                        int attempt_budget = 64, const Registry* registry = nullptr);

enum class SwitchMode { Postselect, Sampled };

// Switchable-gate gadget: an ebit is attached per head wire. ON completes
// the information path by Bell-linking the program head into the ebit
// (byproduct postselected or frame-tracked); OFF erases the program by a
// computational-basis measurement of its head and hands back the untouched
// ebit as the identity program. Supports 1- and 2-qubit unitary programs.
ProgramState switch_gate(const ProgramState& p, bool on,
                         SwitchMode mode = SwitchMode::Postselect, Rng* rng = nullptr);

// Reference path: the circuit's unitary and its direct action, used as the
// independent oracle by tests and the CLI fidelity report.
Matrix circuit_unitary(const TailedCircuit& c, bool honor_switches = true);
DensityOperator reference_output(const TailedCircuit& c,
                                 const std::vector<DensityOperator>& inputs,
                                 bool honor_switches = true);

}  // namespace choisim
