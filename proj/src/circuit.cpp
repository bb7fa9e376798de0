#include "choisim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace choisim {

void TailedCircuit::validate() const {
  if (n_wires < 1) throw ValidationError("circuit needs at least one wire");
  if (gates.empty()) throw ValidationError("circuit needs at least one gate");
  for (const auto& g : gates) {
    if (static_cast<int>(g.wires.size()) != gate_arity(g.kind))
      throw ValidationError("gate has wrong wire count");
    for (int w : g.wires)
      if (w < 0 || w >= n_wires) throw ValidationError("gate wire out of range");
    if (g.kind == GateKind::Cnot && g.wires[0] == g.wires[1])
      throw ValidationError("CNOT needs distinct control and target");
    if (!g.switched_on && !g.switchable)
      throw ValidationError("only switchable gates may be off");
  }
  if (!inputs.empty() && static_cast<int>(inputs.size()) != n_wires)
    throw ValidationError("inputs list must cover every wire");
  for (const auto& k : inputs) input_state(k);  // name check
}

DensityOperator input_state(const std::string& ket) {
  Vector v(2);
  const double s = 1.0 / std::sqrt(2.0);
  if (ket == "0") v << 1, 0;
  else if (ket == "1") v << 0, 1;
  else if (ket == "+") v << s, s;
  else if (ket == "-") v << s, -s;
  else if (ket == "i") v << s, Complex(0, s);
  else if (ket == "-i") v << s, Complex(0, -s);
  else throw ValidationError("unknown input ket '" + ket + "'");
  return PureState(v, {2}).to_density();
}

CompositionPlan compile(const TailedCircuit& c) {
  c.validate();
  CompositionPlan plan;
  plan.n_wires = c.n_wires;
  plan.gate_count = static_cast<int>(c.gates.size());

  // flavor of a junction is set by what the byproduct must pass through:
  // anything into a CNOT or an H is standard (Clifford destination), except
  // that a qubit gate right after a CNOT takes the covariant flavor; links
  // into T are always covariant (an X byproduct cannot cross T).
  std::vector<std::optional<GateKind>> last(c.n_wires);
  for (size_t gi = 0; gi < c.gates.size(); ++gi) {
    const Gate& g = c.gates[gi];
    PlanStep step;
    step.gate_index = static_cast<int>(gi);
    step.program_name = gate_name(g.kind);
    for (int w : g.wires) {
      if (!last[w].has_value()) continue;
      LinkFlavor flavor = LinkFlavor::Standard;
      if (g.kind == GateKind::T) flavor = LinkFlavor::Covariant;
      else if (g.kind == GateKind::H && *last[w] == GateKind::Cnot)
        flavor = LinkFlavor::Covariant;
      step.links.push_back({w, flavor});
    }
    step.tag = LinkFlavor::Standard;
    for (const auto& l : step.links)
      if (l.flavor == LinkFlavor::Covariant) step.tag = LinkFlavor::Covariant;
    if (!step.links.empty()) ++plan.composition_count;
    for (int w : g.wires) last[w] = g.kind;
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

CostReport cost_report(const CompositionPlan& plan, const TailedCircuit& c, int d) {
  CostReport r;
  r.gate_count = plan.gate_count;
  for (const auto& step : plan.steps) {
    if (step.links.empty()) continue;
    r.expected_attempts += (step.tag == LinkFlavor::Covariant) ? d * d : 1;
  }
  for (const auto& g : c.gates)
    if (g.switchable) r.ebit_count += gate_arity(g.kind);
  return r;
}

namespace {

ProgramState canonical_program(const ProgramState& p) {
  std::vector<int> order = p.head_wires;
  order.insert(order.end(), p.tail_wires.begin(), p.tail_wires.end());
  DensityOperator st = permute_wires(p.state, order);
  const int nh = static_cast<int>(p.head_wires.size());
  const int nt = static_cast<int>(p.tail_wires.size());
  std::vector<int> hw(nh), tw(nt);
  std::iota(hw.begin(), hw.end(), 0);
  std::iota(tw.begin(), tw.end(), nh);
  return ProgramState(std::move(st), std::move(hw), std::move(tw));
}

double draw(Rng& rng) { return (rng() >> 11) * 0x1.0p-53; }

}  // namespace

ProgramState switch_gate(const ProgramState& p_in, bool on, SwitchMode mode, Rng* rng) {
  if (p_in.head_dim() != p_in.tail_dim() ||
      (p_in.head_dim() != 2 && p_in.head_dim() != 4))
    throw ValidationError("switch_gate: supported on 1- and 2-qubit programs only");
  ProgramState p = as_qubit_program(p_in);
  const int nh = static_cast<int>(p.head_wires.size());

  if (!on) {
    // off path: the program head is measured in the computational basis
    // (outcome discarded with the tail) and the attached ebits come back
    // as the identity program
    return identity_program(2, nh);
  }

  ProgramState acc = canonical_program(p);
  DensityOperator state = acc.state;
  const int nt = static_cast<int>(acc.tail_wires.size());
  DensityOperator eb = ebit(2).to_density();

  PauliFrame frame = PauliFrame::identity_frame(2, nh);
  for (int h = 0; h < nh; ++h) {
    // the current first wire is the next head to link
    BellOutcome k{0, 0};
    if (mode == SwitchMode::Sampled) {
      if (!rng) throw Error("switch_gate: sampled mode needs a generator");
      // enumerate this link's outcome distribution
      std::vector<std::pair<double, BellOutcome>> branches;
      double total = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          DensityOperator raw = bell_link(state, {0}, eb, {0}, {{a, b}});
          branches.push_back({std::max(raw.trace_real(), 0.0), BellOutcome{a, b}});
          total += branches.back().first;
        }
      double u = draw(*rng) * total;
      size_t chosen = branches.size() - 1;
      for (size_t i = 0; i < branches.size(); ++i) {
        u -= branches[i].first;
        if (u <= 0.0) {
          chosen = i;
          break;
        }
      }
      k = branches[chosen].second;
    }
    DensityOperator raw = bell_link(state, {0}, eb, {0}, {k});
    const double prob = raw.trace_real();
    if (prob < 1e-15) throw ValidationError("switch_gate: zero-probability branch");
    raw.matrix /= prob;
    state = std::move(raw);
    frame.wires[h] = {(2 - k.a) % 2, (2 - k.b) % 2};
  }

  // layout now: [tails..., new heads...]; correct byproducts on the new heads
  std::vector<int> head_positions(nh);
  for (int h = 0; h < nh; ++h) head_positions[h] = nt + h;
  state = apply_frame_correction(state, frame, head_positions);

  std::vector<int> order;
  for (int h = 0; h < nh; ++h) order.push_back(nt + h);
  for (int t = 0; t < nt; ++t) order.push_back(t);
  DensityOperator canonical = permute_wires(state, order);
  std::vector<int> hw(nh), tw(nt);
  std::iota(hw.begin(), hw.end(), 0);
  std::iota(tw.begin(), tw.end(), nh);
  return ProgramState(std::move(canonical), std::move(hw), std::move(tw));
}

namespace {

struct EngineState {
  std::optional<DensityOperator> acc;
  std::vector<int> head_pos;              // circuit wire -> acc wire (-1 untouched)
  std::vector<std::pair<int, int>> tails;  // (circuit wire, acc wire)
  PauliFrame frame;

  explicit EngineState(int n_wires)
      : head_pos(n_wires, -1), frame(PauliFrame::identity_frame(2, n_wires)) {}

  bool touched(int w) const { return head_pos[w] >= 0; }

  void shift_after_removal(const std::vector<int>& removed) {
    auto new_index = [&](int old) {
      int shift = 0;
      for (int r : removed) {
        if (r == old) throw Error("engine: wire removed twice");
        if (r < old) ++shift;
      }
      return old - shift;
    };
    for (auto& h : head_pos)
      if (h >= 0) h = new_index(h);
    for (auto& t : tails) t.second = new_index(t.second);
  }
};

ProgramState fetch_program(GateKind kind, const Registry* registry) {
  if (registry) {
    try {
      return registry->load(gate_name(kind));
    } catch (const ValidationError&) {
      throw ValidationError(std::string("missing program '") + gate_name(kind) +
                            "' in registry");
    }
  }
  return gate_program(gate_matrix(kind));
}

}  // namespace

ExecutionResult execute(const CompositionPlan& plan, const TailedCircuit& c,
                        const std::vector<DensityOperator>& inputs, Rng& rng,
                        ExecStrategy strategy, int attempt_budget,
                        const Registry* registry) {
  c.validate();
  std::vector<DensityOperator> in = inputs;
  if (in.empty()) {
    for (int w = 0; w < c.n_wires; ++w)
      in.push_back(input_state(c.inputs.empty() ? "0" : c.inputs[w]));
  }
  if (static_cast<int>(in.size()) != c.n_wires)
    throw DimensionError("execute: one input state per wire required");
  for (const auto& s : in)
    if (s.dim() != 2) throw DimensionError("execute: qubit inputs required");

  EngineState eng(c.n_wires);
  ExecutionTrace trace;
  trace.final_frame = PauliFrame::identity_frame(2, c.n_wires);

  for (const auto& step : plan.steps) {
    const Gate& g = c.gates.at(step.gate_index);
    const int arity = gate_arity(g.kind);

    StepTrace st;
    st.gate_index = step.gate_index;
    st.gate = gate_name(g.kind);
    st.wires = g.wires;

    ProgramState pg = fetch_program(g.kind, registry);
    if (g.switchable) {
      SwitchMode mode = (strategy == ExecStrategy::Postselect) ? SwitchMode::Postselect
                                                               : SwitchMode::Sampled;
      pg = switch_gate(pg, g.switched_on, mode, &rng);
      st.ebits_consumed += arity;
      trace.ebits_consumed += arity;
    } else {
      pg = canonical_program(pg);
    }

    // resolve pending frames that cannot pass a T gate before composing
    if (g.kind == GateKind::T) {
      const int w = g.wires[0];
      if (eng.touched(w) && eng.frame.wires[w].x != 0) {
        PauliFrame one = PauliFrame::identity_frame(2, 1);
        one.wires[0] = eng.frame.wires[w];
        *eng.acc = apply_frame_correction(*eng.acc, one, {eng.head_pos[w]});
        eng.frame.wires[w] = {0, 0};
        st.frame_resolved_before = true;
      }
    }

    std::vector<int> linked, fresh;
    for (int w : g.wires)
      (eng.touched(w) ? linked : fresh).push_back(w);

    if (linked.empty()) {
      st.flavor = "fetch";
      const int offset = eng.acc ? eng.acc->wire_count() : 0;
      DensityOperator joined = eng.acc ? kron(*eng.acc, pg.state) : pg.state;
      eng.acc = std::move(joined);
      for (int i = 0; i < arity; ++i) {
        eng.head_pos[g.wires[i]] = offset + i;
        eng.tails.push_back({g.wires[i], offset + arity + i});
      }
    } else {
      std::vector<int> aw, bw;
      std::vector<LinkFlavor> flavors;
      for (int w : linked) {
        aw.push_back(eng.head_pos[w]);
        const int slot =
            static_cast<int>(std::find(g.wires.begin(), g.wires.end(), w) - g.wires.begin());
        bw.push_back(arity + slot);  // program tail wire for that slot
        LinkFlavor f = LinkFlavor::Standard;
        for (const auto& l : step.links)
          if (l.circuit_wire == w) f = l.flavor;
        flavors.push_back(f);
      }

      const bool covariant_step =
          strategy == ExecStrategy::CovariantRetry &&
          std::any_of(flavors.begin(), flavors.end(),
                      [](LinkFlavor f) { return f == LinkFlavor::Covariant; });
      const bool postselect_links =
          strategy == ExecStrategy::Postselect ||
          (strategy == ExecStrategy::Frame && g.kind == GateKind::T);

      std::vector<BellOutcome> outcomes(linked.size());
      DensityOperator raw;
      if (covariant_step) {
        st.flavor = "covariant";
        raw = bell_link(*eng.acc, aw, pg.state, bw, outcomes);
        const double p0 = std::max(raw.trace_real(), 0.0);
        if (p0 < 1e-15)
          throw ValidationError("execute: trivial branch has zero probability");
        int attempt = 1;
        for (; attempt <= attempt_budget; ++attempt) {
          if (draw(rng) < p0) break;
        }
        if (attempt > attempt_budget)
          throw HeraldedFailure("execute: covariant step exhausted its attempts",
                                attempt_budget);
        st.attempts = attempt;
        st.ebits_consumed += attempt;
        trace.ebits_consumed += attempt;
        trace.covariant_attempts.push_back(attempt);
        raw.matrix /= p0;
      } else if (postselect_links) {
        st.flavor = (strategy == ExecStrategy::Postselect) ? "postselect" : "covariant";
        raw = bell_link(*eng.acc, aw, pg.state, bw, outcomes);
        const double p0 = std::max(raw.trace_real(), 0.0);
        if (p0 < 1e-15)
          throw ValidationError("execute: trivial branch has zero probability");
        raw.matrix /= p0;
      } else {
        st.flavor = "standard";
        // sample the joint outcome across this step's links
        int combos = 1;
        for (size_t i = 0; i < linked.size(); ++i) combos *= 4;
        std::vector<double> probs(combos);
        std::vector<std::vector<BellOutcome>> all(combos);
        double total = 0.0;
        for (int f = 0; f < combos; ++f) {
          std::vector<BellOutcome> ks(linked.size());
          int rest = f;
          for (size_t i = 0; i < linked.size(); ++i) {
            ks[i].a = rest % 2;
            rest /= 2;
            ks[i].b = rest % 2;
            rest /= 2;
          }
          all[f] = ks;
          probs[f] = std::max(
              bell_link(*eng.acc, aw, pg.state, bw, ks).trace_real(), 0.0);
          total += probs[f];
        }
        double u = draw(rng) * total;
        int chosen = combos - 1;
        for (int f = 0; f < combos; ++f) {
          u -= probs[f];
          if (u <= 0.0) {
            chosen = f;
            break;
          }
        }
        outcomes = all[chosen];
        raw = bell_link(*eng.acc, aw, pg.state, bw, outcomes);
        raw.matrix /= probs[chosen];
      }
      st.outcomes = outcomes;
      trace.total_attempts += st.attempts;

      // index bookkeeping: acc loses the measured heads, the program keeps
      // its heads plus the tails of fresh wires
      const int n_acc = eng.acc->wire_count();
      std::vector<int> gate_removed = bw;
      std::vector<int> gate_survivors;
      for (int wsl = 0; wsl < pg.state.wire_count(); ++wsl)
        if (std::find(gate_removed.begin(), gate_removed.end(), wsl) == gate_removed.end())
          gate_survivors.push_back(wsl);

      eng.shift_after_removal(aw);
      const int n_acc_rest = n_acc - static_cast<int>(aw.size());
      auto gate_new_index = [&](int wsl) {
        auto it = std::find(gate_survivors.begin(), gate_survivors.end(), wsl);
        return n_acc_rest + static_cast<int>(it - gate_survivors.begin());
      };

      for (int i = 0; i < arity; ++i) {
        const int w = g.wires[i];
        eng.head_pos[w] = gate_new_index(i);
        if (std::find(fresh.begin(), fresh.end(), w) != fresh.end())
          eng.tails.push_back({w, gate_new_index(arity + i)});
      }
      eng.acc = std::move(raw);

      // combine sampled byproducts with pending frames at the gate input,
      // then push the lot through the gate
      PauliFrame local = PauliFrame::identity_frame(2, arity);
      for (int i = 0; i < arity; ++i) {
        const int w = g.wires[i];
        PauliXZ q = eng.frame.wires[w];
        for (size_t li = 0; li < linked.size(); ++li) {
          if (linked[li] != w) continue;
          q.x = (q.x + (2 - outcomes[li].a)) % 2;
          q.z = (q.z + (2 - outcomes[li].b)) % 2;
        }
        local.wires[i] = q;
      }
      std::vector<int> local_wires(arity);
      std::iota(local_wires.begin(), local_wires.end(), 0);
      FrameThroughGate pushed = commute_frame_through(local, g.kind, local_wires);
      if (pushed.residual.has_value()) {
        trace.residual_free = false;
        throw Error("execute: unresolved non-Pauli residual (engine bug)");
      }
      for (int i = 0; i < arity; ++i) eng.frame.wires[g.wires[i]] = pushed.frame.wires[i];
    }

    trace.steps.push_back(std::move(st));
  }

  // end-of-circuit byproduct correction on the heads
  trace.final_frame = eng.frame;
  for (int w = 0; w < c.n_wires; ++w) {
    if (!eng.touched(w) || eng.frame.wires[w].is_identity()) continue;
    PauliFrame one = PauliFrame::identity_frame(2, 1);
    one.wires[0] = eng.frame.wires[w];
    *eng.acc = apply_frame_correction(*eng.acc, one, {eng.head_pos[w]});
    eng.frame.wires[w] = {0, 0};
  }

  // write the inputs into the accumulated program's tails (success branch,
  // probabilities recorded), then read the heads
  DensityOperator out;
  std::vector<int> touched_order;
  if (eng.acc) {
    double running = eng.acc->trace_real();
    for (const auto& [w, tw] : eng.tails) {
      Matrix m = psd_sqrt(in[w].matrix.transpose(), 1e-9);
      *eng.acc = apply_on_wires(*eng.acc, m, {tw});
      const double now = eng.acc->trace_real();
      trace.write_probabilities.push_back(now / running);
      running = now;
    }
    std::vector<int> keep;
    for (int w = 0; w < c.n_wires; ++w)
      if (eng.touched(w)) {
        keep.push_back(eng.head_pos[w]);
        touched_order.push_back(w);
      }
    // partial_trace keeps wires sorted by index; sort the circuit wires
    // to match
    std::vector<size_t> perm(keep.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](size_t x, size_t y) { return keep[x] < keep[y]; });
    std::vector<int> sorted_wires;
    for (size_t i : perm) sorted_wires.push_back(touched_order[i]);
    touched_order = sorted_wires;

    out = partial_trace(*eng.acc, keep);
    const double tr = out.trace_real();
    if (tr < 1e-15) throw ValidationError("execute: output has zero weight");
    out.matrix /= tr;
  }

  // attach untouched wires (their inputs pass through) and order by wire
  std::vector<int> wire_order = touched_order;
  for (int w = 0; w < c.n_wires; ++w)
    if (!eng.touched(w)) {
      out = wire_order.empty() ? in[w] : kron(out, in[w]);
      wire_order.push_back(w);
    }
  // permute so circuit wire i sits at position i
  std::vector<int> order(c.n_wires);
  for (int pos = 0; pos < c.n_wires; ++pos) order[wire_order[pos]] = pos;
  ExecutionResult res;
  res.output = permute_wires(out, order);
  res.trace = std::move(trace);
  return res;
}

Matrix circuit_unitary(const TailedCircuit& c, bool honor_switches) {
  c.validate();
  const int dim = 1 << c.n_wires;
  Matrix u = Matrix::Identity(dim, dim);
  std::vector<int> dims(c.n_wires, 2);
  for (const auto& g : c.gates) {
    if (honor_switches && !g.switched_on) continue;
    u = embed_on_wires(gate_matrix(g.kind), dims, g.wires) * u;
  }
  return u;
}

DensityOperator reference_output(const TailedCircuit& c,
                                 const std::vector<DensityOperator>& inputs,
                                 bool honor_switches) {
  std::vector<DensityOperator> in = inputs;
  if (in.empty()) {
    for (int w = 0; w < c.n_wires; ++w)
      in.push_back(input_state(c.inputs.empty() ? "0" : c.inputs[w]));
  }
  if (static_cast<int>(in.size()) != c.n_wires)
    throw DimensionError("reference_output: one input per wire");
  DensityOperator rho = in[0];
  for (int w = 1; w < c.n_wires; ++w) rho = kron(rho, in[w]);
  Matrix u = circuit_unitary(c, honor_switches);
  return DensityOperator(u * rho.matrix * u.adjoint(), rho.dims);
}

}  // namespace choisim
