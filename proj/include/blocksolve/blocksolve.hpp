#pragma once

#include "blocksolve/admm.hpp"
#include "blocksolve/block_qp.hpp"
#include "blocksolve/dense.hpp"
#include "blocksolve/errors.hpp"
#include "blocksolve/factorization.hpp"
#include "blocksolve/gmres.hpp"
#include "blocksolve/json_io.hpp"
#include "blocksolve/kkt.hpp"
#include "blocksolve/matrix_market.hpp"
#include "blocksolve/power.hpp"
#include "blocksolve/precond.hpp"
#include "blocksolve/report.hpp"
#include "blocksolve/rng.hpp"
#include "blocksolve/schur.hpp"
#include "blocksolve/sparse.hpp"
#include "blocksolve/splitting.hpp"
#include "blocksolve/stochastic.hpp"
#include "blocksolve/verify.hpp"
