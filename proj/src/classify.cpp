#include "choisim/classify.hpp"

#include "choisim/gates.hpp"

#include <cmath>

namespace choisim {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* tier_verdict_name(TierVerdict v) {
  switch (v) {
    case TierVerdict::Free: return "free";
    case TierVerdict::Resource: return "resource";
    case TierVerdict::UniversalCandidate: return "universal-candidate";
    case TierVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

double negativity(const DensityOperator& state, const std::vector<int>& cut_wires) {
  DensityOperator pt = partial_transpose(state, cut_wires);
  auto [vals, vecs] = eig_hermitian(pt.matrix);
  double neg = 0.0;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals(i) < 0) neg -= vals(i);
  return neg;
}

namespace {

// PPT test on a bipartite state: exact separability decision for 2x2 and
// 2x3, otherwise NPT refutes and PPT stays open.
Verdict ppt_separability(const DensityOperator& state, const std::vector<int>& cut,
                         int dim_a, int dim_b, double tol) {
  const double neg = negativity(state, cut);
  if (neg > tol) return Verdict::No;
  const int prod = dim_a * dim_b;
  if (prod <= 6) return Verdict::Yes;
  return Verdict::Inconclusive;
}

}  // namespace

Verdict is_entanglement_breaking(const Channel& ch, double tol) {
  CptpReport rep = is_cptp(ch, std::max(tol, 1e-8));
  if (!rep.ok())
    throw ValidationError("is_entanglement_breaking: channel is not CPTP");
  DensityOperator choi(ch.choi_matrix(), {ch.dim_out, ch.dim_in});
  return ppt_separability(choi, {1}, ch.dim_out, ch.dim_in, std::max(tol, 1e-10));
}

namespace {

// Choi state of a bipartite channel as four wires (A out, B out, A in, B in).
DensityOperator bipartite_choi(const Channel& ch, const BipartiteDims& dims) {
  if (ch.dim_out != dims.a_out * dims.b_out || ch.dim_in != dims.a_in * dims.b_in)
    throw DimensionError("bipartite channel dims do not match metadata");
  return DensityOperator(ch.choi_matrix(),
                         {dims.a_out, dims.b_out, dims.a_in, dims.b_in});
}

}  // namespace

bool is_product_channel(const Channel& ch, const BipartiteDims& dims, double tol,
                        double* distance) {
  DensityOperator choi = bipartite_choi(ch, dims);
  DensityOperator a = partial_trace(choi, {0, 2});  // A out, A in
  DensityOperator b = partial_trace(choi, {1, 3});
  DensityOperator prod = kron(a, b);  // wires (Ao, Ai, Bo, Bi)
  DensityOperator arranged = permute_wires(prod, {0, 2, 1, 3});
  const double dist = (arranged.matrix - choi.matrix).cwiseAbs().maxCoeff();
  if (distance) *distance = dist;
  return dist < tol;
}

Verdict is_separable_bipartite_channel(const Channel& ch, const BipartiteDims& dims,
                                       double tol) {
  if (is_product_channel(ch, dims, std::max(tol, 1e-8)))
    return Verdict::Yes;  // constructive product decomposition
  DensityOperator choi = bipartite_choi(ch, dims);
  const int da = dims.a_out * dims.a_in;
  const int db = dims.b_out * dims.b_in;
  return ppt_separability(choi, {0, 2}, da, db, std::max(tol, 1e-10));
}

double entanglement_entropy(const ProgramState& p, double tol) {
  const double purity = (p.state.matrix * p.state.matrix).trace().real();
  if (std::abs(purity - 1.0) > std::max(tol, 1e-6))
    throw ValidationError("entanglement_entropy: program state is not pure");
  return von_neumann_entropy(p.head_marginal(), tol);
}

double cnot_reference_negativity() {
  static const double value = [] {
    ProgramState p = gate_program(cnot());
    DensityOperator choi(p.state.matrix, {2, 2, 2, 2});
    return negativity(choi, {0, 2});
  }();
  return value;
}

ResourceReport classify(const ProgramState& p, const std::optional<BipartiteDims>& dims,
                        double tol) {
  ResourceReport rep;
  rep.tol = tol;

  Channel ch = channel_from_choi(p, std::max(tol, 1e-7));
  rep.eb = is_entanglement_breaking(ch, tol);
  rep.negativity_head_tail = negativity(
      DensityOperator(ch.choi_matrix(), {ch.dim_out, ch.dim_in}), {1});
  rep.ppt_head_tail = rep.negativity_head_tail <= std::max(tol, 1e-10);

  const double purity = (p.state.matrix * p.state.matrix).trace().real();
  const bool pure = std::abs(purity - 1.0) <= 1e-8;
  if (pure) rep.entropy_head_tail = von_neumann_entropy(p.head_marginal(), tol);

  // a unitary program is pure with both marginals maximally mixed
  bool unitary = pure && ch.dim_in == ch.dim_out;
  if (unitary) {
    Matrix head = p.head_marginal().matrix;
    Matrix tail = p.tail_marginal().matrix;
    const double d = ch.dim_in;
    unitary = (d * head - Matrix::Identity(ch.dim_out, ch.dim_out)).cwiseAbs().maxCoeff() <
                  1e-8 &&
              (d * tail - Matrix::Identity(ch.dim_in, ch.dim_in)).cwiseAbs().maxCoeff() <
                  1e-8;
  }
  rep.unitary_program = unitary;

  // entanglement-breaking tier
  if (rep.eb == Verdict::Yes) rep.ebc = TierVerdict::Free;
  else if (rep.eb == Verdict::No)
    rep.ebc = unitary ? TierVerdict::UniversalCandidate : TierVerdict::Resource;
  else rep.ebc = TierVerdict::Inconclusive;

  if (dims) {
    rep.separable = is_separable_bipartite_channel(ch, *dims, tol);
    double dist = 0.0;
    const bool product = is_product_channel(ch, *dims, std::max(tol, 1e-8), &dist);
    rep.product = product ? Verdict::Yes : Verdict::No;
    rep.product_distance = dist;
    DensityOperator choi = bipartite_choi(ch, *dims);
    rep.negativity_cut = negativity(choi, {0, 2});

    // separable-channel tier
    if (rep.separable == Verdict::Yes) rep.sepc = TierVerdict::Free;
    else if (rep.separable == Verdict::No) {
      const bool cnot_like =
          unitary &&
          std::abs(*rep.negativity_cut - cnot_reference_negativity()) < 1e-6;
      rep.sepc = cnot_like ? TierVerdict::UniversalCandidate : TierVerdict::Resource;
    } else {
      rep.sepc = TierVerdict::Inconclusive;
    }

    // product-channel tier
    rep.proc = product ? TierVerdict::Free : TierVerdict::Resource;
  }

  return rep;
}

}  // namespace choisim
