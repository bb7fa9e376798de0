#include "choisim/teleport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace choisim {

PauliFrame PauliFrame::identity_frame(int d, int n_wires) {
  PauliFrame f;
  f.d = d;
  f.wires.assign(n_wires, PauliXZ{});
  return f;
}

bool PauliFrame::is_identity() const {
  return std::all_of(wires.begin(), wires.end(),
                     [](const PauliXZ& p) { return p.is_identity(); });
}

void PauliFrame::multiply(const PauliFrame& other) {
  if (other.d != d || other.wires.size() != wires.size())
    throw DimensionError("PauliFrame::multiply: shape mismatch");
  for (size_t i = 0; i < wires.size(); ++i) {
    wires[i].x = (wires[i].x + other.wires[i].x) % d;
    wires[i].z = (wires[i].z + other.wires[i].z) % d;
  }
}

PauliFrame PauliFrame::inverse() const {
  PauliFrame f = *this;
  for (auto& p : f.wires) {
    p.x = (d - p.x) % d;
    p.z = (d - p.z) % d;
  }
  return f;
}

Matrix PauliFrame::wire_operator(int wire) const {
  return pauli_power(d, wires.at(wire).x, wires.at(wire).z);
}

namespace {

// |w_ab> = (X^a Z^b (x) 1)|w>: nonzero components indexed by the second
// wire's value m, with first-wire value (m + a) mod d and coefficient
// exp(2 pi i b m / d) / sqrt(d).
Complex bell_coeff(int d, const BellOutcome& k, int m) {
  return std::polar(1.0 / std::sqrt(static_cast<double>(d)),
                    2.0 * std::numbers::pi * k.b * m / d);
}

}  // namespace

std::pair<double, DensityOperator> bell_project(const DensityOperator& state,
                                                int wire_a, int wire_b,
                                                const BellOutcome& k) {
  if (wire_a == wire_b) throw DimensionError("bell_project: distinct wires required");
  const int d = state.dims.at(wire_a);
  if (state.dims.at(wire_b) != d)
    throw DimensionError("bell_project: wire dimensions differ");

  DensityOperator out;
  bool first = true;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      const Complex w = std::conj(bell_coeff(d, k, r)) * bell_coeff(d, k, c);
      DensityOperator slice = fix_wires(state, {wire_a, wire_b},
                                        {(r + k.a) % d, r}, {(c + k.a) % d, c});
      if (first) {
        slice.matrix *= w;
        out = std::move(slice);
        first = false;
      } else {
        out.matrix += w * slice.matrix;
      }
    }
  }
  double prob = out.trace_real();
  if (prob > 1e-15) out.matrix /= prob;
  prob = std::max(prob, 0.0);
  return {prob, std::move(out)};
}

std::pair<BellOutcome, DensityOperator> bell_measure(const DensityOperator& state,
                                                     int wire_a, int wire_b, Rng& rng) {
  const int d = state.dims.at(wire_a);
  std::vector<std::pair<double, BellOutcome>> branches;
  double total = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      BellOutcome k{a, b};
      auto [p, post] = bell_project(state, wire_a, wire_b, k);
      branches.push_back({p, k});
      total += p;
    }
  double u = ((rng() >> 11) * 0x1.0p-53) * total;
  size_t chosen = branches.size() - 1;
  for (size_t i = 0; i < branches.size(); ++i) {
    u -= branches[i].first;
    if (u <= 0.0) {
      chosen = i;
      break;
    }
  }
  const BellOutcome k = branches[chosen].second;
  auto [prob, post] = bell_project(state, wire_a, wire_b, k);
  return {k, std::move(post)};
}

DensityOperator bell_link(const DensityOperator& a, const std::vector<int>& aw,
                          const DensityOperator& b, const std::vector<int>& bw,
                          const std::vector<BellOutcome>& outcomes) {
  const size_t links = aw.size();
  if (bw.size() != links || outcomes.size() != links)
    throw DimensionError("bell_link: wire/outcome count mismatch");
  std::vector<int> dims;
  for (size_t i = 0; i < links; ++i) {
    if (a.dims.at(aw[i]) != b.dims.at(bw[i]))
      throw DimensionError("bell_link: linked wire dimensions differ");
    dims.push_back(a.dims[aw[i]]);
  }

  int combos = 1;
  for (size_t i = 0; i < links; ++i) combos *= dims[i];

  auto decode = [&](int flat, std::vector<int>& vals) {
    for (int i = static_cast<int>(links) - 1; i >= 0; --i) {
      vals[i] = flat % dims[i];
      flat /= dims[i];
    }
  };

  DensityOperator out;
  bool first = true;
  std::vector<int> rv(links), cv(links), ra(links), ca(links);
  for (int r = 0; r < combos; ++r) {
    decode(r, rv);
    Complex wr = 1.0;
    for (size_t i = 0; i < links; ++i) {
      wr *= std::conj(bell_coeff(dims[i], outcomes[i], rv[i]));
      ra[i] = (rv[i] + outcomes[i].a) % dims[i];
    }
    for (int c = 0; c < combos; ++c) {
      decode(c, cv);
      Complex w = wr;
      for (size_t i = 0; i < links; ++i) {
        w *= bell_coeff(dims[i], outcomes[i], cv[i]);
        ca[i] = (cv[i] + outcomes[i].a) % dims[i];
      }
      DensityOperator slice_a = fix_wires(a, aw, ra, ca);
      DensityOperator slice_b = fix_wires(b, bw, rv, cv);
      DensityOperator term = kron(slice_a, slice_b);
      if (first) {
        term.matrix *= w;
        out = std::move(term);
        first = false;
      } else {
        out.matrix += w * term.matrix;
      }
    }
  }
  return out;
}

namespace {

// Remainder of bell_link(first.state, first.heads, second.state, second.tails)
// canonicalized to [second's heads..., first's tails...].
ProgramState composed_program(DensityOperator raw, const ProgramState& first,
                              const ProgramState& second) {
  // raw wire order: first's surviving wires by index, then second's
  std::vector<int> a_rest, b_rest;
  for (int w = 0; w < first.state.wire_count(); ++w)
    if (std::find(first.head_wires.begin(), first.head_wires.end(), w) ==
        first.head_wires.end())
      a_rest.push_back(w);
  for (int w = 0; w < second.state.wire_count(); ++w)
    if (std::find(second.tail_wires.begin(), second.tail_wires.end(), w) ==
        second.tail_wires.end())
      b_rest.push_back(w);

  auto rank_of = [](const std::vector<int>& rest, int wire) {
    auto it = std::find(rest.begin(), rest.end(), wire);
    if (it == rest.end()) throw Error("composed_program: wire bookkeeping broke");
    return static_cast<int>(it - rest.begin());
  };

  std::vector<int> order;
  for (int hw : second.head_wires)
    order.push_back(static_cast<int>(a_rest.size()) + rank_of(b_rest, hw));
  for (int tw : first.tail_wires) order.push_back(rank_of(a_rest, tw));

  DensityOperator canonical = permute_wires(raw, order);
  const int n_head = static_cast<int>(second.head_wires.size());
  const int n_tail = static_cast<int>(first.tail_wires.size());
  std::vector<int> hw(n_head), tw(n_tail);
  for (int i = 0; i < n_head; ++i) hw[i] = i;
  for (int i = 0; i < n_tail; ++i) tw[i] = n_head + i;
  return ProgramState(std::move(canonical), std::move(hw), std::move(tw));
}

void check_composable(const ProgramState& first, const ProgramState& second) {
  if (first.head_wires.size() != second.tail_wires.size())
    throw DimensionError("compose: head/tail wire counts differ");
  for (size_t i = 0; i < first.head_wires.size(); ++i)
    if (first.state.dims[first.head_wires[i]] != second.state.dims[second.tail_wires[i]])
      throw DimensionError("compose: head dim does not match tail dim");
}

}  // namespace

CompositionResult compose_standard(const ProgramState& first, const ProgramState& second,
                                   ComposeStrategy strategy, Rng* rng) {
  check_composable(first, second);
  const size_t links = first.head_wires.size();
  const int d = first.state.dims[first.head_wires[0]];

  CompositionResult res;
  res.strategy = strategy;
  res.attempts = 1;
  res.ebits_consumed = 0;

  if (strategy == ComposeStrategy::Postselect) {
    std::vector<BellOutcome> trivial(links);
    DensityOperator raw =
        bell_link(first.state, first.head_wires, second.state, second.tail_wires, trivial);
    const double p = raw.trace_real();
    if (p < 1e-15) throw ValidationError("compose: trivial outcome has zero probability");
    raw.matrix /= p;
    res.program = composed_program(std::move(raw), first, second);
    res.frame = PauliFrame::identity_frame(d, static_cast<int>(links));
    res.outcomes = trivial;
    return res;
  }

  if (strategy != ComposeStrategy::FrameTracked)
    throw Error("compose_standard: use compose_covariant for the covariant strategy");
  if (!rng) throw Error("compose_standard: frame-tracked mode needs a generator");

  // enumerate joint outcomes, then sample
  int combos = 1;
  for (size_t i = 0; i < links; ++i) combos *= d * d;
  std::vector<std::vector<BellOutcome>> all(combos);
  std::vector<double> probs(combos);
  double total = 0.0;
  for (int f = 0; f < combos; ++f) {
    std::vector<BellOutcome> ks(links);
    int rest = f;
    for (size_t i = 0; i < links; ++i) {
      ks[i].a = rest % d;
      rest /= d;
      ks[i].b = rest % d;
      rest /= d;
    }
    all[f] = ks;
    probs[f] = bell_link(first.state, first.head_wires, second.state, second.tail_wires, ks)
                   .trace_real();
    total += std::max(probs[f], 0.0);
  }

  double u = (((*rng)() >> 11) * 0x1.0p-53) * total;
  int chosen = combos - 1;
  for (int f = 0; f < combos; ++f) {
    u -= std::max(probs[f], 0.0);
    if (u <= 0.0) {
      chosen = f;
      break;
    }
  }

  DensityOperator raw = bell_link(first.state, first.head_wires, second.state,
                                  second.tail_wires, all[chosen]);
  raw.matrix /= probs[chosen];
  res.program = composed_program(std::move(raw), first, second);
  res.outcomes = all[chosen];
  res.frame = PauliFrame::identity_frame(d, static_cast<int>(links));
  for (size_t i = 0; i < links; ++i) {
    // program = choi of U2 P_f U1 with P_f = X^{-a} Z^{-b} per slot
    res.frame.wires[i].x = (d - all[chosen][i].a) % d;
    res.frame.wires[i].z = (d - all[chosen][i].b) % d;
  }
  return res;
}

CompositionResult compose_covariant(const ProgramState& first, const ProgramState& second,
                                    Rng& rng, int max_attempts) {
  check_composable(first, second);
  const size_t links = first.head_wires.size();
  const int d = first.state.dims[first.head_wires[0]];

  std::vector<BellOutcome> trivial(links);
  DensityOperator raw =
      bell_link(first.state, first.head_wires, second.state, second.tail_wires, trivial);
  const double p_trivial = std::max(raw.trace_real(), 0.0);
  if (p_trivial < 1e-15)
    throw ValidationError("compose_covariant: trivial outcome has zero probability");

  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const double u = ((rng() >> 11) * 0x1.0p-53);
    if (u < p_trivial) {
      CompositionResult res;
      res.strategy = ComposeStrategy::Covariant;
      res.attempts = attempt;
      res.ebits_consumed = attempt;  // one fresh copy of `second` per attempt
      DensityOperator state = raw;
      state.matrix /= p_trivial;
      res.program = composed_program(std::move(state), first, second);
      res.frame = PauliFrame::identity_frame(d, static_cast<int>(links));
      res.outcomes = trivial;
      return res;
    }
  }
  throw HeraldedFailure("compose_covariant: attempt budget exhausted", max_attempts);
}

FrameThroughGate commute_frame_through(const PauliFrame& frame, GateKind gate,
                                       const std::vector<int>& wires) {
  if (frame.d != 2)
    throw DimensionError("commute_frame_through: gate set is qubit-only");
  FrameThroughGate out;
  out.frame = frame;

  switch (gate) {
    case GateKind::H: {
      auto& p = out.frame.wires.at(wires.at(0));
      std::swap(p.x, p.z);  // HXH = Z, HZH = X
      return out;
    }
    case GateKind::T: {
      const auto& p = frame.wires.at(wires.at(0));
      if (p.x != 0) {
        // T X = X (X T X T^dag) T; the leftover is Clifford but not Pauli
        Matrix pm = pauli_power(2, p.x, p.z);
        out.residual = pm.adjoint() * t_gate() * pm * t_gate().adjoint();
      }
      return out;
    }
    case GateKind::Cnot: {
      auto& c = out.frame.wires.at(wires.at(0));
      auto& t = out.frame.wires.at(wires.at(1));
      const int xc = c.x, zc = c.z, xt = t.x, zt = t.z;
      c.x = xc;
      c.z = (zc + zt) % 2;
      t.x = (xt + xc) % 2;
      t.z = zt;
      return out;
    }
  }
  throw Error("commute_frame_through: unsupported gate");
}

DensityOperator apply_frame_correction(const DensityOperator& state, const PauliFrame& frame,
                                       const std::vector<int>& wires) {
  if (wires.size() != frame.wires.size())
    throw DimensionError("apply_frame_correction: wire count mismatch");
  DensityOperator out = state;
  for (size_t i = 0; i < wires.size(); ++i) {
    if (frame.wires[i].is_identity()) continue;
    out = apply_on_wires(out, frame.wire_operator(static_cast<int>(i)).adjoint(),
                         {wires[i]});
  }
  return out;
}

}  // namespace choisim
