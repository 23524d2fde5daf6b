#pragma once

// Shared tiny fixtures: the single-variable coupled QP
//   min x^2 - 2x  s.t.  x - z = 0
// whose KKT system is [[2,0,1],[0,0,-1],[1,-1,0]] u = (2,0,0) with solution
// u = (1, 1, 0), and small helpers around it.

#include "blocksolve/block_qp.hpp"
#include "blocksolve/verify.hpp"

namespace fixtures {

inline blocksolve::BlockQp tiny_qp(int copies = 1) {
  using blocksolve::SparseMatrix;
  std::vector<blocksolve::Partition> parts;
  for (int i = 0; i < copies; ++i) {
    blocksolve::Partition p;
    p.hessian = SparseMatrix(1, 1, true);
    p.hessian.add(0, 0, 2.0);
    p.hessian.finalize();
    p.cost = {-2.0};
    p.eq_jac = SparseMatrix(0, 1);
    p.eq_jac.finalize();
    p.link_jac = SparseMatrix(1, 1);
    p.link_jac.add(0, 0, 1.0);
    p.link_jac.finalize();
    p.coupling_jac = SparseMatrix(1, 1);
    p.coupling_jac.add(0, 0, -1.0);
    p.coupling_jac.finalize();
    parts.push_back(std::move(p));
  }
  return blocksolve::BlockQp(std::move(parts), 1);
}

}  // namespace fixtures
