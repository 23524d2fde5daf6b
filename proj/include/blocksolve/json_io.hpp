#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "blocksolve/block_qp.hpp"
#include "blocksolve/power.hpp"

namespace blocksolve {

namespace detail {

inline nlohmann::json matrix_to_json(const SparseMatrix& m) {
  nlohmann::json j;
  j["nrows"] = m.rows();
  j["ncols"] = m.cols();
  if (m.symmetric()) j["symmetric"] = true;
  nlohmann::json triplets = nlohmann::json::array();
  for (int c = 0; c < m.cols(); ++c)
    for (std::size_t k = 0; k < m.col_rows(c).size(); ++k)
      triplets.push_back({m.col_rows(c)[k], c, m.col_values(c)[k]});
  j["triplets"] = std::move(triplets);
  return j;
}

inline SparseMatrix matrix_from_json(const nlohmann::json& j, const std::string& context) {
  if (!j.contains("nrows") || !j.contains("ncols") || !j.contains("triplets"))
    throw ParseError(context + ": matrix requires nrows, ncols, triplets");
  const bool symmetric = j.value("symmetric", false);
  SparseMatrix m(j.at("nrows").get<int>(), j.at("ncols").get<int>(), symmetric);
  for (const auto& t : j.at("triplets")) {
    if (!t.is_array() || t.size() != 3) throw ParseError(context + ": triplet must be [row, col, value]");
    m.add(t[0].get<int>(), t[1].get<int>(), t[2].get<double>());
  }
  m.finalize();
  return m;
}

inline void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& context) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known) throw ParseError(context + ": unknown field '" + item.key() + "'");
  }
}

}  // namespace detail

inline nlohmann::json block_qp_to_json(const BlockQp& qp) {
  nlohmann::json j;
  j["n_z"] = qp.coupling_dim();
  nlohmann::json parts = nlohmann::json::array();
  for (int i = 0; i < qp.num_partitions(); ++i) {
    const Partition& p = qp.partition(i);
    nlohmann::json jp;
    jp["D"] = detail::matrix_to_json(p.hessian);
    jp["c"] = p.cost;
    jp["J"] = detail::matrix_to_json(p.eq_jac);
    jp["b"] = p.eq_rhs;
    jp["A"] = detail::matrix_to_json(p.link_jac);
    jp["B"] = detail::matrix_to_json(p.coupling_jac);
    parts.push_back(std::move(jp));
  }
  j["partitions"] = std::move(parts);
  return j;
}

inline BlockQp block_qp_from_json(const nlohmann::json& j) {
  if (!j.contains("partitions") || !j.contains("n_z")) throw ParseError("block qp: requires partitions and n_z");
  const int nz = j.at("n_z").get<int>();
  std::vector<Partition> parts;
  int index = 0;
  for (const auto& jp : j.at("partitions")) {
    const std::string context = "partitions[" + std::to_string(index) + "]";
    detail::require_keys(jp, {"D", "c", "J", "b", "A", "B"}, context);
    Partition p;
    p.hessian = detail::matrix_from_json(jp.at("D"), context + ".D");
    if (!p.hessian.symmetric()) {
      // accept a general lower-triangle dump by re-tagging
      SparseMatrix sym(p.hessian.rows(), p.hessian.cols(), true);
      for (int c = 0; c < p.hessian.cols(); ++c)
        for (std::size_t k = 0; k < p.hessian.col_rows(c).size(); ++k)
          sym.add(p.hessian.col_rows(c)[k], c, p.hessian.col_values(c)[k]);
      sym.finalize();
      p.hessian = std::move(sym);
    }
    p.cost = jp.at("c").get<Vector>();
    p.eq_jac = detail::matrix_from_json(jp.at("J"), context + ".J");
    p.eq_rhs = jp.at("b").get<Vector>();
    p.link_jac = detail::matrix_from_json(jp.at("A"), context + ".A");
    p.coupling_jac = detail::matrix_from_json(jp.at("B"), context + ".B");
    parts.push_back(std::move(p));
    ++index;
  }
  return BlockQp(std::move(parts), nz);
}

inline void save_block_qp(const BlockQp& qp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << block_qp_to_json(qp).dump(1) << "\n";
}

inline BlockQp load_block_qp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return block_qp_from_json(j);
}

// Network schema:
//   {buses:[{id, load}], lines:[{from, to, x}],
//    generators:[{id, bus, dispatch?}], reference_bus,
//    weights:{gen, line, bus}}
// Unknown fields are rejected; weights are optional and default to 1.
inline PowerNetwork network_from_json(const nlohmann::json& j) {
  detail::require_keys(j, {"buses", "lines", "generators", "reference_bus", "weights"}, "network");
  if (!j.contains("buses")) throw ParseError("network: missing buses");
  if (!j.contains("lines")) throw ParseError("network: missing lines");
  if (!j.contains("generators")) throw ParseError("network: missing generators");
  if (!j.contains("reference_bus")) throw ParseError("network: missing reference_bus");
  PowerNetwork net;
  int index = 0;
  for (const auto& jb : j.at("buses")) {
    const std::string context = "buses[" + std::to_string(index++) + "]";
    detail::require_keys(jb, {"id", "load"}, context);
    if (!jb.contains("id")) throw ParseError(context + ": missing id");
    net.buses.push_back({jb.at("id").get<int>(), jb.value("load", 0.0)});
  }
  index = 0;
  for (const auto& jl : j.at("lines")) {
    const std::string context = "lines[" + std::to_string(index++) + "]";
    detail::require_keys(jl, {"from", "to", "x"}, context);
    if (!jl.contains("from") || !jl.contains("to") || !jl.contains("x"))
      throw ParseError(context + ": requires from, to, x");
    net.lines.push_back({jl.at("from").get<int>(), jl.at("to").get<int>(), jl.at("x").get<double>()});
  }
  index = 0;
  for (const auto& jg : j.at("generators")) {
    const std::string context = "generators[" + std::to_string(index++) + "]";
    detail::require_keys(jg, {"id", "bus", "dispatch"}, context);
    if (!jg.contains("id") || !jg.contains("bus")) throw ParseError(context + ": requires id and bus");
    Generator g;
    g.id = jg.at("id").get<int>();
    g.bus = jg.at("bus").get<int>();
    if (jg.contains("dispatch")) {
      g.dispatch = jg.at("dispatch").get<double>();
      g.has_dispatch = true;
    }
    net.generators.push_back(g);
  }
  net.reference_bus = j.at("reference_bus").get<int>();
  if (j.contains("weights")) {
    const auto& jw = j.at("weights");
    detail::require_keys(jw, {"gen", "line", "bus"}, "weights");
    net.weights.generator = jw.value("gen", 1.0);
    net.weights.line = jw.value("line", 1.0);
    net.weights.bus = jw.value("bus", 1.0);
  }
  net.validate();
  return net;
}

inline PowerNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    return network_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// Dispatch vector for the nominal power flow: file-specified values are
// kept; generators without one share the remaining load equally.
inline Vector nominal_dispatch(const PowerNetwork& net) {
  double total_load = 0.0;
  for (const Bus& b : net.buses) total_load += b.load;
  double fixed = 0.0;
  int free_count = 0;
  for (const Generator& g : net.generators) {
    if (g.has_dispatch)
      fixed += g.dispatch;
    else
      ++free_count;
  }
  Vector dispatch(net.generators.size(), 0.0);
  const double share = free_count > 0 ? (total_load - fixed) / free_count : 0.0;
  for (std::size_t g = 0; g < net.generators.size(); ++g)
    dispatch[g] = net.generators[g].has_dispatch ? net.generators[g].dispatch : share;
  return dispatch;
}

}  // namespace blocksolve
