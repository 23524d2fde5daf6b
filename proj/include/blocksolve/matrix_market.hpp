#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "blocksolve/sparse.hpp"

namespace blocksolve {

// MatrixMarket coordinate format, 1-based indices. Symmetric matrices write
// the stored lower triangle under the `symmetric` qualifier.
inline void write_matrix_market(const SparseMatrix& m, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real " << (m.symmetric() ? "symmetric" : "general") << "\n";
  out << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
  out << std::setprecision(17);
  for (int j = 0; j < m.cols(); ++j)
    for (std::size_t k = 0; k < m.col_rows(j).size(); ++k)
      out << m.col_rows(j)[k] + 1 << " " << j + 1 << " " << m.col_values(j)[k] << "\n";
}

inline void write_matrix_market(const SparseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_matrix_market(m, out);
}

inline void write_matrix_market(const DenseMatrix& m, std::ostream& out) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  out << std::setprecision(17);
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) out << m(i, j) << "\n";
}

inline SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("MatrixMarket: empty stream");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || object != "matrix" || format != "coordinate" || field != "real")
    throw ParseError("MatrixMarket: unsupported banner: " + line);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") throw ParseError("MatrixMarket: unsupported symmetry: " + symmetry);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  long rows = 0, cols = 0, entries = 0;
  if (!(dims >> rows >> cols >> entries)) throw ParseError("MatrixMarket: bad size line " + std::to_string(lineno));
  SparseMatrix m(static_cast<int>(rows), static_cast<int>(cols), symmetric);
  for (long k = 0; k < entries; ++k) {
    if (!std::getline(in, line)) throw ParseError("MatrixMarket: truncated at entry " + std::to_string(k + 1));
    ++lineno;
    std::istringstream es(line);
    long i = 0, j = 0;
    double v = 0.0;
    if (!(es >> i >> j >> v)) throw ParseError("MatrixMarket: bad entry at line " + std::to_string(lineno));
    m.add(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
  }
  m.finalize();
  return m;
}

inline SparseMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_matrix_market(in);
}

}  // namespace blocksolve
