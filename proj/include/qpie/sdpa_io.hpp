#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qpie/lpi_sdp.hpp"

namespace qpie {

/// Parsed sparse SDPA (.dat-s) problem. Entries hold the upper triangle of
/// each symmetric coefficient matrix: key = (matno, blkno, i, j), 1-based,
/// matno 0 is the constant matrix.
struct SdpaProblem {
  int m = 0;
  std::vector<int> block_sizes;  // negative size = diagonal block
  std::vector<double> c;
  std::map<std::tuple<int, int, int, int>, double> entries;
};

namespace detail {
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

/// Serialize the feasibility program in sparse SDPA primal form:
/// one primal variable per Gram-matrix entry, one PSD block per Gram
/// matrix, and a diagonal block encoding each equality row as a +/- pair
/// of inequalities. The objective is zero. Output is byte-deterministic.
inline void export_sdpa(const SDPProblem& prob, std::ostream& out) {
  std::vector<const LinRow*> eq;
  for (const LinRow& row : prob.rows)
    if (!row.a.empty()) eq.push_back(&row);
  const int npsd = static_cast<int>(prob.block_sizes.size());
  const int diag_block = npsd + 1;

  out << prob.n_vars << " = mDIM\n";
  out << npsd + 1 << " = nBLOCK\n";
  for (int b = 0; b < npsd; ++b) out << prob.block_sizes[b] << " ";
  out << "-" << 2 * eq.size() << " = bLOCKsTRUCT\n";
  for (int k = 0; k < prob.n_vars; ++k) out << (k ? " 0" : "0");
  out << "\n";

  // block/position of each variable inside its Gram matrix
  std::vector<std::tuple<int, int, int>> pos(prob.n_vars);
  for (int b = 0, off = 0; b < npsd; ++b) {
    int mb = prob.block_sizes[b];
    for (int j = 0; j < mb; ++j)
      for (int i = 0; i <= j; ++i)
        pos[tri_index(off, i, j)] = {b + 1, i + 1, j + 1};
    off += mb * (mb + 1) / 2;
  }

  // F0: paired +/- right-hand sides on the diagonal block
  for (size_t r = 0; r < eq.size(); ++r) {
    double v = to_double(eq[r]->rhs);
    if (v != 0.0) {
      out << "0 " << diag_block << " " << 2 * r + 1 << " " << 2 * r + 1 << " "
          << detail::fmt_double(v) << "\n";
      out << "0 " << diag_block << " " << 2 * r + 2 << " " << 2 * r + 2 << " "
          << detail::fmt_double(-v) << "\n";
    }
  }
  // F_k: the Gram position of variable k, plus its +/- row coefficients
  for (int k = 0; k < prob.n_vars; ++k) {
    auto [blk, i, j] = pos[k];
    out << k + 1 << " " << blk << " " << i << " " << j << " 1\n";
  }
  for (size_t r = 0; r < eq.size(); ++r)
    for (const auto& [k, a] : eq[r]->a) {
      std::string v = detail::fmt_double(to_double(a));
      std::string nv = detail::fmt_double(-to_double(a));
      out << k + 1 << " " << diag_block << " " << 2 * r + 1 << " " << 2 * r + 1 << " " << v
          << "\n";
      out << k + 1 << " " << diag_block << " " << 2 * r + 2 << " " << 2 * r + 2 << " " << nv
          << "\n";
    }
}

inline void export_sdpa(const SDPProblem& prob, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  export_sdpa(prob, out);
}

inline SdpaProblem read_sdpa(std::istream& in) {
  SdpaProblem p;
  std::string line;
  auto next_data_line = [&]() {
    while (std::getline(in, line)) {
      size_t pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos) continue;
      if (line[pos] == '"' || line[pos] == '*') continue;  // comment
      return true;
    }
    return false;
  };
  auto strip_tail = [&](std::string& str) {
    size_t eq = str.find('=');
    if (eq != std::string::npos) str.resize(eq);
    for (char& ch : str)
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')')
        ch = ' ';
  };

  if (!next_data_line()) throw std::runtime_error("sdpa: missing mDIM");
  strip_tail(line);
  std::istringstream(line) >> p.m;
  if (!next_data_line()) throw std::runtime_error("sdpa: missing nBLOCK");
  strip_tail(line);
  int nblock = 0;
  std::istringstream(line) >> nblock;
  if (!next_data_line())
    throw std::runtime_error("sdpa: missing block structure");
  strip_tail(line);
  {
    std::istringstream ss(line);
    int b;
    while (ss >> b) p.block_sizes.push_back(b);
  }
  if (static_cast<int>(p.block_sizes.size()) != nblock)
    throw std::runtime_error("sdpa: block structure length mismatch");
  if (!next_data_line()) {
    if (p.m == 0) return p;  // header-only file for an empty problem
    throw std::runtime_error("sdpa: missing objective");
  }
  strip_tail(line);
  {
    std::istringstream ss(line);
    double v;
    while (ss >> v) p.c.push_back(v);
  }
  if (static_cast<int>(p.c.size()) != p.m)
    throw std::runtime_error("sdpa: objective length mismatch");
  while (next_data_line()) {
    std::istringstream ss(line);
    int matno, blk, i, j;
    double v;
    if (!(ss >> matno >> blk >> i >> j >> v))
      throw std::runtime_error("sdpa: malformed entry line");
    if (i > j) std::swap(i, j);
    p.entries[{matno, blk, i, j}] += v;
  }
  return p;
}

inline SdpaProblem read_sdpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_sdpa(in);
}

/// Rebuild a solvable problem from a parsed SDPA file that follows the
/// layout produced by export_sdpa (PSD blocks followed by one diagonal
/// block of paired +/- rows). Used to cross-check that the exported file
/// carries the full problem content.
inline SolveResult solve_sdpa(const SdpaProblem& p,
                              const SolveOptions& opts = {}) {
  SDPProblem prob;
  prob.n_vars = p.m;
  int diag_size = 0;
  for (int b : p.block_sizes)
    if (b > 0)
      prob.block_sizes.push_back(b);
    else
      diag_size = -b;
  if (diag_size % 2 != 0)
    throw std::runtime_error("sdpa: expected paired inequality rows");
  int n_eq = diag_size / 2;

  prob.is_diag.assign(p.m, false);
  int psd_blocks = static_cast<int>(prob.block_sizes.size());
  std::vector<int> offsets(psd_blocks, 0);
  for (int b = 1; b < psd_blocks; ++b)
    offsets[b] = offsets[b - 1] +
                 prob.block_sizes[b - 1] * (prob.block_sizes[b - 1] + 1) / 2;
  std::vector<LinRow> rows(n_eq);
  for (const auto& [key, v] : p.entries) {
    auto [matno, blk, i, j] = key;
    if (blk <= psd_blocks) {
      if (matno == 0 || v != 1.0)
        throw std::runtime_error("sdpa: unexpected Gram-block entry");
      int idx = tri_index(offsets[blk - 1], i - 1, j - 1);
      if (idx != matno - 1)
        throw std::runtime_error("sdpa: variable/entry mapping mismatch");
      if (i == j) prob.is_diag[matno - 1] = true;
    } else {
      if (i != j) throw std::runtime_error("sdpa: off-diagonal in diag block");
      int r = (i - 1) / 2;
      bool plus = ((i - 1) % 2) == 0;
      if (matno == 0) {
        if (plus) rows[r].rhs = Rat(v);
      } else if (plus) {
        rows[r].a[matno - 1] = Rat(v);
      }
    }
  }
  return solve_feasibility(p.m, prob.block_sizes, prob.is_diag, rows, opts);
}

}  // namespace qpie
