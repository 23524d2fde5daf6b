#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "blocksolve/block_qp.hpp"
#include "blocksolve/rng.hpp"

namespace blocksolve {

struct Bus {
  int id = 0;
  double load = 0.0;  // MW, per-unit normalized
};

struct Line {
  int from = 0;
  int to = 0;
  double reactance = 0.0;
};

struct Generator {
  int id = 0;
  int bus = 0;
  double dispatch = 0.0;
  bool has_dispatch = false;
};

struct ObjectiveWeights {
  double generator = 1.0;
  double line = 1.0;
  double bus = 1.0;
};

// Lossless DC network. Reference bus pins the angle; lines are directed as
// listed, with one flow variable each.
struct PowerNetwork {
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  int reference_bus = 0;
  ObjectiveWeights weights;

  int bus_index(int id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
      if (buses[i].id == id) return static_cast<int>(i);
    throw ParseError("network: unknown bus id " + std::to_string(id));
  }

  bool connected() const {
    if (buses.empty()) return false;
    std::vector<char> seen(buses.size(), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int count = 1;
    while (!frontier.empty()) {
      const int b = frontier.front();
      frontier.pop();
      for (const Line& l : lines) {
        const int from = bus_index(l.from), to = bus_index(l.to);
        const int other = from == b ? to : (to == b ? from : -1);
        if (other >= 0 && !seen[other]) {
          seen[other] = 1;
          ++count;
          frontier.push(other);
        }
      }
    }
    return count == static_cast<int>(buses.size());
  }

  void validate() const {
    if (buses.empty()) throw ParseError("network: no buses");
    if (generators.empty()) throw ParseError("network: at least one generator required");
    for (std::size_t i = 0; i < buses.size(); ++i)
      for (std::size_t j = i + 1; j < buses.size(); ++j)
        if (buses[i].id == buses[j].id) throw ParseError("network: duplicate bus id " + std::to_string(buses[i].id));
    for (const Line& l : lines) {
      bus_index(l.from);
      bus_index(l.to);
      if (l.reactance <= 0.0)
        throw ParseError("network: nonpositive reactance on line " + std::to_string(l.from) + "-" +
                         std::to_string(l.to));
    }
    for (const Generator& g : generators) bus_index(g.bus);
    bus_index(reference_bus);
    if (!connected()) throw DisconnectedNetworkError("network: graph is not connected");
    if (weights.generator <= 0.0 || weights.line <= 0.0 || weights.bus <= 0.0)
      throw ParseError("network: objective weights must be positive");
  }
};

// Nominal operating point (P_G, P_F, theta) from a dispatch + DC power flow.
struct SetpointNominal {
  Vector gen_output;  // per generator
  Vector line_flow;   // per line
  Vector bus_angle;   // per bus, reference at zero
};

// Solves the reduced susceptance system for the bus angles given a balanced
// dispatch, then derives line flows. Requires generation to match load to
// 1e-9 (lossless network) and a connected graph.
inline SetpointNominal dc_power_flow(const PowerNetwork& net, const Vector& dispatch) {
  net.validate();
  if (dispatch.size() != net.generators.size())
    throw DimensionMismatchError("dc_power_flow: dispatch length must match generator count");
  double total = 0.0;
  for (double d : dispatch) total += d;
  for (const Bus& b : net.buses) total -= b.load;
  if (std::abs(total) > 1e-9)
    throw ImbalancedDispatchError("dc_power_flow: generation minus load is " + std::to_string(total));

  const int nb = static_cast<int>(net.buses.size());
  const int ref = net.bus_index(net.reference_bus);
  Vector injection(nb, 0.0);
  for (std::size_t g = 0; g < net.generators.size(); ++g) injection[net.bus_index(net.generators[g].bus)] += dispatch[g];
  for (int b = 0; b < nb; ++b) injection[b] -= net.buses[b].load;

  // Weighted Laplacian with the reference row/column removed.
  std::vector<int> reduced_index(nb, -1);
  int pos = 0;
  for (int b = 0; b < nb; ++b)
    if (b != ref) reduced_index[b] = pos++;
  DenseMatrix laplacian(nb - 1, nb - 1);
  for (const Line& l : net.lines) {
    const int i = net.bus_index(l.from), j = net.bus_index(l.to);
    const double w = 1.0 / l.reactance;
    if (i != ref) laplacian(reduced_index[i], reduced_index[i]) += w;
    if (j != ref) laplacian(reduced_index[j], reduced_index[j]) += w;
    if (i != ref && j != ref) {
      laplacian(reduced_index[i], reduced_index[j]) -= w;
      laplacian(reduced_index[j], reduced_index[i]) -= w;
    }
  }
  Vector reduced_rhs(nb - 1, 0.0);
  for (int b = 0; b < nb; ++b)
    if (b != ref) reduced_rhs[reduced_index[b]] = injection[b];

  SetpointNominal nominal;
  nominal.bus_angle.assign(nb, 0.0);
  if (nb > 1) {
    Vector theta;
    try {
      SpdFactor factor(laplacian);
      theta = factor.solve(reduced_rhs);
    } catch (const NotPositiveDefiniteError&) {
      throw DisconnectedNetworkError("dc_power_flow: reduced susceptance matrix is singular");
    }
    for (int b = 0; b < nb; ++b)
      if (b != ref) nominal.bus_angle[b] = theta[reduced_index[b]];
  }
  nominal.line_flow.resize(net.lines.size());
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    const Line& line = net.lines[l];
    nominal.line_flow[l] =
        (nominal.bus_angle[net.bus_index(line.from)] - nominal.bus_angle[net.bus_index(line.to)]) / line.reactance;
  }
  nominal.gen_output = dispatch;

  // Balance must close at every non-reference bus to 1e-10.
  for (int b = 0; b < nb; ++b) {
    if (b == ref) continue;
    double net_flow = 0.0;
    for (std::size_t l = 0; l < net.lines.size(); ++l) {
      if (net.bus_index(net.lines[l].from) == b) net_flow += nominal.line_flow[l];
      if (net.bus_index(net.lines[l].to) == b) net_flow -= nominal.line_flow[l];
    }
    if (std::abs(injection[b] - net_flow) > 1e-10)
      throw Error("dc_power_flow: internal balance check failed at bus " + std::to_string(net.buses[b].id));
  }
  return nominal;
}

// Scenario set-point QP: per scenario s the variables are
// x_s = (P_G, P_F, theta); the objective tracks the nominal with diagonal
// weight 2w; balance is enforced at every non-reference bus (the reference
// bus absorbs scenario load mismatch, which keeps the per-partition
// constraint blocks full row rank); flow definitions and the reference-angle
// row complete the partition constraints. Coupling rows share generator
// outputs across scenarios: P_G - z = 0, so the coupling dimension equals
// the generator count.
inline BlockQp build_setpoint_qp(const PowerNetwork& net, const SetpointNominal& nominal, int scenarios,
                                 double load_noise, std::uint64_t seed) {
  net.validate();
  if (scenarios < 1) throw InvalidSpecError("build_setpoint_qp: at least one scenario required");
  if (nominal.gen_output.size() != net.generators.size() || nominal.line_flow.size() != net.lines.size() ||
      nominal.bus_angle.size() != net.buses.size())
    throw DimensionMismatchError("build_setpoint_qp: nominal point does not match the network");

  const int ng = static_cast<int>(net.generators.size());
  const int nl = static_cast<int>(net.lines.size());
  const int nb = static_cast<int>(net.buses.size());
  const int nx = ng + nl + nb;
  const int ref = net.bus_index(net.reference_bus);

  SparseMatrix hessian(nx, nx, true);
  Vector cost(nx, 0.0);
  for (int g = 0; g < ng; ++g) {
    hessian.add(g, g, 2.0 * net.weights.generator);
    cost[g] = -2.0 * net.weights.generator * nominal.gen_output[g];
  }
  for (int l = 0; l < nl; ++l) {
    hessian.add(ng + l, ng + l, 2.0 * net.weights.line);
    cost[ng + l] = -2.0 * net.weights.line * nominal.line_flow[l];
  }
  for (int b = 0; b < nb; ++b) {
    hessian.add(ng + nl + b, ng + nl + b, 2.0 * net.weights.bus);
    cost[ng + nl + b] = -2.0 * net.weights.bus * nominal.bus_angle[b];
  }
  hessian.finalize();

  // Constraint rows: (nb - 1) balance rows, nl flow rows, one reference row.
  const int m = (nb - 1) + nl + 1;
  SparseMatrix eq_jac(m, nx);
  std::vector<int> balance_row(nb, -1);
  int row = 0;
  for (int b = 0; b < nb; ++b) {
    if (b == ref) continue;
    balance_row[b] = row;
    ++row;
  }
  for (int g = 0; g < ng; ++g) {
    const int b = net.bus_index(net.generators[g].bus);
    if (balance_row[b] >= 0) eq_jac.add(balance_row[b], g, 1.0);
  }
  for (int l = 0; l < nl; ++l) {
    const int from = net.bus_index(net.lines[l].from);
    const int to = net.bus_index(net.lines[l].to);
    if (balance_row[from] >= 0) eq_jac.add(balance_row[from], ng + l, -1.0);
    if (balance_row[to] >= 0) eq_jac.add(balance_row[to], ng + l, 1.0);
  }
  for (int l = 0; l < nl; ++l) {
    const Line& line = net.lines[l];
    eq_jac.add(row, ng + l, 1.0);
    eq_jac.add(row, ng + nl + net.bus_index(line.from), -1.0 / line.reactance);
    eq_jac.add(row, ng + nl + net.bus_index(line.to), 1.0 / line.reactance);
    ++row;
  }
  eq_jac.add(row, ng + nl + ref, 1.0);
  eq_jac.finalize();

  SparseMatrix link(ng, nx);
  for (int g = 0; g < ng; ++g) link.add(g, g, 1.0);
  link.finalize();
  SparseMatrix coupling(ng, ng);
  for (int g = 0; g < ng; ++g) coupling.add(g, g, -1.0);
  coupling.finalize();

  std::vector<Partition> parts;
  parts.reserve(scenarios);
  for (int s = 0; s < scenarios; ++s) {
    Partition p;
    p.hessian = hessian;
    p.cost = cost;
    p.eq_jac = eq_jac;
    p.eq_rhs.assign(m, 0.0);
    PhiloxStream rng(seed, "load.scenario." + std::to_string(s));
    for (int b = 0; b < nb; ++b) {
      double load = net.buses[b].load;
      if (load != 0.0 && load_noise > 0.0) load *= 1.0 + load_noise * rng.next_normal();
      if (balance_row[b] >= 0) p.eq_rhs[balance_row[b]] = load;
    }
    p.link_jac = link;
    p.coupling_jac = coupling;
    parts.push_back(std::move(p));
  }
  return BlockQp(std::move(parts), ng);
}

// Deviation objective sum of w (value - nominal)^2 over the three variable
// classes, evaluated at a compact iterate.
inline double setpoint_objective(const PowerNetwork& net, const SetpointNominal& nominal, const BlockQp& qp,
                                 const Iterate& it) {
  const int ng = static_cast<int>(net.generators.size());
  const int nl = static_cast<int>(net.lines.size());
  const int nb = static_cast<int>(net.buses.size());
  const BlockLayout& lay = qp.layout();
  double obj = 0.0;
  for (int s = 0; s < qp.num_partitions(); ++s) {
    auto x = lay.x(it.u, s);
    for (int g = 0; g < ng; ++g) obj += net.weights.generator * (x[g] - nominal.gen_output[g]) * (x[g] - nominal.gen_output[g]);
    for (int l = 0; l < nl; ++l)
      obj += net.weights.line * (x[ng + l] - nominal.line_flow[l]) * (x[ng + l] - nominal.line_flow[l]);
    for (int b = 0; b < nb; ++b)
      obj += net.weights.bus * (x[ng + nl + b] - nominal.bus_angle[b]) * (x[ng + nl + b] - nominal.bus_angle[b]);
  }
  return obj;
}

// Extends the nominal point scenario-wise into a full primal-dual iterate
// (duals zero, first stage at the nominal dispatch).
inline Iterate nominal_iterate(const PowerNetwork& net, const SetpointNominal& nominal, const BlockQp& qp) {
  const BlockLayout& lay = qp.layout();
  Iterate it(lay.dim);
  const int ng = static_cast<int>(net.generators.size());
  const int nl = static_cast<int>(net.lines.size());
  const int nb = static_cast<int>(net.buses.size());
  for (int s = 0; s < qp.num_partitions(); ++s) {
    auto x = lay.x(it.u, s);
    for (int g = 0; g < ng; ++g) x[g] = nominal.gen_output[g];
    for (int l = 0; l < nl; ++l) x[ng + l] = nominal.line_flow[l];
    for (int b = 0; b < nb; ++b) x[ng + nl + b] = nominal.bus_angle[b];
  }
  auto z = lay.z(it.u);
  for (int g = 0; g < ng; ++g) z[g] = nominal.gen_output[g];
  return it;
}

}  // namespace blocksolve
