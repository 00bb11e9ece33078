#pragma once

#include <vector>

#include "qpie/rational.hpp"

namespace qpie {

/// Dense univariate polynomial with exact rational coefficients,
/// coeffs[k] multiplying x^k. Used for root isolation when bounding
/// multiplier kernels on an interval.
namespace sturm {

using Dense = std::vector<Rat>;

inline void trim(Dense& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Rat eval(const Dense& p, const Rat& x) {
  Rat acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline Dense derivative(const Dense& p) {
  Dense d;
  for (size_t k = 1; k < p.size(); ++k) d.push_back(Rat(long(k)) * p[k]);
  trim(d);
  return d;
}

/// Remainder of polynomial division a / b (b nonzero).
inline Dense rem(Dense a, const Dense& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Rat q = a.back() / b.back();
    size_t shift = a.size() - b.size();
    for (size_t k = 0; k < b.size(); ++k) a[shift + k] -= q * b[k];
    trim(a);
  }
  return a;
}

inline std::vector<Dense> chain(const Dense& p) {
  std::vector<Dense> seq;
  Dense p0 = p;
  trim(p0);
  if (p0.empty()) return seq;
  seq.push_back(p0);
  Dense p1 = derivative(p0);
  if (p1.empty()) return seq;
  seq.push_back(p1);
  while (true) {
    Dense r = rem(seq[seq.size() - 2], seq.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    seq.push_back(r);
  }
  return seq;
}

inline int sign_changes(const std::vector<Dense>& seq, const Rat& x) {
  int changes = 0, prev = 0;
  for (const auto& q : seq) {
    Rat v = eval(q, x);
    int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

/// Isolating intervals (half-open (l, r]) for the distinct real roots of p in
/// (lo, hi], each refined by bisection until its width is at most `width`.
inline std::vector<std::pair<Rat, Rat>> isolate_roots(const Dense& p,
                                                      const Rat& lo,
                                                      const Rat& hi,
                                                      const Rat& width) {
  std::vector<std::pair<Rat, Rat>> out;
  auto seq = chain(p);
  if (seq.size() < 2) return out;  // constant or zero polynomial
  struct Seg {
    Rat l, r;
    int vl, vr;
  };
  std::vector<Seg> stack{{lo, hi, sign_changes(seq, lo), sign_changes(seq, hi)}};
  while (!stack.empty()) {
    Seg seg = stack.back();
    stack.pop_back();
    int nroots = seg.vl - seg.vr;
    if (nroots <= 0) continue;
    if (nroots == 1 && seg.r - seg.l <= width) {
      out.emplace_back(seg.l, seg.r);
      continue;
    }
    Rat mid = (seg.l + seg.r) / 2;
    int vm = sign_changes(seq, mid);
    stack.push_back({seg.l, mid, seg.vl, vm});
    stack.push_back({mid, seg.r, vm, seg.vr});
  }
  return out;
}

}  // namespace sturm
}  // namespace qpie
