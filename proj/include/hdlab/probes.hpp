#pragma once

// Trace-word probe observables. Words with a fixed coefficient matrix give
// generic (non-invariant) probes; coefficient-free words in the components
// are invariant under simultaneous conjugation and restrict to the gauge
// slice as torus-invariant observables.

#include "hdlab/factor.hpp"
#include "hdlab/observable.hpp"

namespace hdlab {

struct Word {
  cmat A;                                     // leading coefficient; identity -> invariant word
  std::vector<std::pair<int, int>> factors;   // (slot, power), power may be negative
  bool real_part = true;
};

inline double eval_word(const Word& w, const std::vector<cmat>& comps) {
  cmat acc = w.A;
  for (auto [slot, pw] : w.factors) {
    const cmat& c = comps[slot];
    cmat f = pw >= 0 ? c : cmat(c.inverse());
    for (int i = 0; i < std::abs(pw); ++i) acc = acc * f;
  }
  const cplx t = acc.trace();
  return w.real_part ? t.real() : t.imag();
}

inline Word invariant_word(std::vector<std::pair<int, int>> factors, bool re, int n) {
  return Word{cmat::Identity(n, n), std::move(factors), re};
}

inline ObsB word_obs_borel(const Word& w) {
  return ObsB{[w](const cmat& b) { return eval_word(w, {b}); }, nullptr, {}};
}

inline ObsG word_obs_unitary(const Word& w) {
  return ObsG{[w](const cmat& g) { return eval_word(w, {g}); }, nullptr, {}};
}

inline ObsP word_obs_posherm(const Word& w) {
  return ObsP{[w](const cmat& L) { return eval_word(w, {L}); }, nullptr, {}};
}

inline ObsGL word_obs_master(const Word& w) {
  return ObsGL{[w](const PairGL& x) { return eval_word(w, {x.g, x.L}); }, nullptr, {}};
}

inline ObsGB word_obs_gb(const Word& w) {
  return ObsGB{[w](const PairGB& x) { return eval_word(w, {x.g, x.b}); }, nullptr, {}};
}

inline ObsSlice word_obs_slice(const Word& w) {
  return ObsSlice{[w](const SlicePoint& x) { return eval_word(w, {x.Q, x.L}); }, nullptr, {}};
}

/// Same word read through (Q, b) -> (Q, b b^†); used for cross-checking the
/// two forms of the reduced bracket.
inline ObsSliceGB word_obs_slice_gb(const Word& w) {
  return ObsSliceGB{[w](const SliceGB& x) { return eval_word(w, {x.Q, nu(x.b)}); }, nullptr, {}};
}

inline ObsBB word_obs_bb(const Word& w) {
  return ObsBB{[w](const PairBB& x) { return eval_word(w, {x.b1, x.b2}); }, nullptr, {}};
}

inline ObsPP word_obs_pp(const Word& w) {
  return ObsPP{[w](const PairPP& x) { return eval_word(w, {x.L1, x.L2}); }, nullptr, {}};
}

}  // namespace hdlab
