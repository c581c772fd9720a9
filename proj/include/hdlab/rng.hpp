#pragma once

// Counter-based seeded sampling. Every sample index owns an independent
// stream, so sweeps can run in any order (or concurrently) and still
// reproduce bit-identical data for a fixed seed.

#include "hdlab/algebra.hpp"
#include "hdlab/factor.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <vector>

namespace hdlab {

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : state_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in [lo, hi) from the top 53 bits.
  double uniform(double lo = 0.0, double hi = 1.0) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  double gauss() {
    // Box-Muller; cache the second variate.
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    u1 = std::max(u1, 0x1.0p-60);
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  cplx cgauss() { return {gauss(), gauss()}; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Samplers. Amplitudes default to unit scale; callers shrink them where a
// convergence window asks for it.

inline cmat random_traceless(Rng& rng, int n, double amp = 1.0) {
  cmat x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = amp * rng.cgauss();
  return traceless(x);
}

inline cmat random_su(Rng& rng, int n, double amp = 1.0) {
  cmat x = random_traceless(rng, n, amp);
  return manin_g(x);
}

inline cmat random_borel_algebra(Rng& rng, int n, double amp = 1.0) {
  cmat x = random_traceless(rng, n, amp);
  return manin_b(x);
}

inline cmat random_unitary(Rng& rng, int n, double amp = 1.0) {
  return exp_skew(random_su(rng, n, amp));
}

inline cmat random_borel(Rng& rng, int n, double amp = 1.0) {
  cmat z = random_borel_algebra(rng, n, amp);
  cmat p = cmat::Zero(n, n);
  for (int i = 0; i < n; ++i) p(i, i) = z(i, i).real();
  return exp_algebra(p, SubspaceTag::DiagReal) * exp_nilpotent(cmat(z - p));
}

inline cmat random_pos_hermitian(Rng& rng, int n, double amp = 1.0) {
  cmat h = random_traceless(rng, n, amp);
  return exp_hermitian(cmat(0.5 * (h + h.adjoint())));
}

inline cmat random_sl(Rng& rng, int n, double amp = 1.0) {
  // Iwasawa product of generic factors: reaches everything, stays tame.
  return random_unitary(rng, n, amp) * random_borel(rng, n, amp);
}

/// n unit-circle entries with pairwise phase gaps at least `min_gap`,
/// product one (diagonal of a regular torus element).
inline cmat random_regular_torus(Rng& rng, int n, double min_gap = 0.3) {
  std::vector<double> phases(n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (auto& p : phases) p = rng.uniform(-M_PI, M_PI);
    double sum = 0.0;
    for (double p : phases) sum += p;
    for (auto& p : phases) p -= sum / n;
    bool ok = true;
    for (int j = 0; j < n && ok; ++j)
      for (int k = j + 1; k < n && ok; ++k) {
        const double d = std::abs(std::exp(cplx(0, phases[j])) - std::exp(cplx(0, phases[k])));
        ok = d > min_gap;
      }
    if (ok) {
      cmat q = cmat::Zero(n, n);
      for (int i = 0; i < n; ++i) q(i, i) = std::exp(cplx(0, phases[i]));
      return q;
    }
  }
  throw std::runtime_error("random_regular_torus: rejection sampling failed");
}

/// Traceless real diagonal (momentum-type) entries in [-amp, amp].
inline cmat random_b0(Rng& rng, int n, double amp = 1.0) {
  cmat p = cmat::Zero(n, n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.uniform(-amp, amp);
    p(i, i) = v;
    sum += v;
  }
  for (int i = 0; i < n; ++i) p(i, i) -= sum / n;
  return p;
}

inline cmat random_strict_upper(Rng& rng, int n, double amp = 1.0) {
  cmat x = cmat::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) x(j, k) = amp * rng.cgauss();
  return x;
}

/// Sorted positions with pairwise gaps >= min_gap and range inside
/// (-span, span); keeps every sin(q_j - q_k) safely away from zero.
inline rvec random_positions(Rng& rng, int n, double min_gap = 0.25, double span = 1.3) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> q(n);
    for (auto& v : q) v = rng.uniform(-span, span);
    std::sort(q.begin(), q.end());
    bool ok = true;
    for (int i = 0; i + 1 < n; ++i) ok = ok && (q[i + 1] - q[i] > min_gap);
    if (!ok) continue;
    double mean = 0.0;
    for (double v : q) mean += v;
    mean /= n;
    rvec out(n);
    for (int i = 0; i < n; ++i) out[i] = q[i] - mean;
    if (out.maxCoeff() - out.minCoeff() < 2 * span - min_gap) return out;
  }
  throw std::runtime_error("random_positions: rejection sampling failed");
}

}  // namespace hdlab
