#pragma once

// Test-side generators and brute-force oracles. Deliberately independent of the
// library's random module and spectral helpers so they can cross-check it.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "qchain/divergence.hpp"

namespace qtest {

using qchain::Complex;
using qchain::DensityOperator;
using qchain::Matrix;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// splitmix64 stream with Box-Muller normals.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double normal() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * uniform());
  }
  Complex cnormal() { return {normal(), normal()}; }

 private:
  std::uint64_t s_;
};

inline Matrix gaussian(Gen& g, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = g.cnormal();
  return m;
}

// Modified Gram-Schmidt on the columns.
inline Matrix orthonormalize(Matrix m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index k = 0; k < c; ++k) {
      const Complex ip = m.col(k).dot(m.col(c));
      m.col(c) -= ip * m.col(k);
    }
    m.col(c) /= m.col(c).norm();
  }
  return m;
}

inline Matrix unitary(Gen& g, Eigen::Index d) { return orthonormalize(gaussian(g, d, d)); }

inline Matrix hermitian(Gen& g, Eigen::Index d) {
  const Matrix a = gaussian(g, d, d);
  return (a + a.adjoint()) / 2.0;
}

inline DensityOperator state(Gen& g, Eigen::Index d, Eigen::Index rank) {
  const Matrix a = gaussian(g, d, rank);
  Matrix m = a * a.adjoint();
  m /= m.trace().real();
  return DensityOperator(m);
}

// Eigenvalues drawn in [0.05, 1] before normalization, so condition number <= 20.
inline DensityOperator full_rank_state(Gen& g, Eigen::Index d) {
  const Matrix u = unitary(g, d);
  Eigen::VectorXd lam(d);
  for (Eigen::Index i = 0; i < d; ++i) lam(i) = g.uniform(0.05, 1.0);
  lam /= lam.sum();
  return DensityOperator(u * lam.cast<Complex>().asDiagonal() * u.adjoint());
}

inline DensityOperator diagonal_state(const std::vector<double>& p) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p[i];
  return DensityOperator(m);
}

inline std::vector<double> simplex_point(Gen& g, std::size_t n, double floor = 0.0) {
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& x : p) {
    x = floor - std::log(std::max(g.uniform(), 1e-300));
    s += x;
  }
  for (auto& x : p) x /= s;
  return p;
}

// Stinespring channel: Kraus operators are row blocks of a random isometry.
inline qchain::PositiveMapRep channel(Gen& g, Eigen::Index d, Eigen::Index env) {
  const Matrix v = orthonormalize(gaussian(g, d * env, d));
  std::vector<Matrix> kraus;
  for (Eigen::Index k = 0; k < env; ++k) kraus.push_back(v.middleRows(k * d, d));
  return qchain::PositiveMapRep(std::move(kraus));
}

inline qchain::PositiveMapRep unital_channel(Gen& g, Eigen::Index d, std::size_t terms) {
  std::vector<Matrix> us;
  for (std::size_t i = 0; i < terms; ++i) us.push_back(unitary(g, d));
  return qchain::PositiveMapRep::unitary_mixture(us, simplex_point(g, terms));
}

inline qchain::Distribution dist(std::vector<double> p) { return qchain::Distribution(std::move(p)); }

// ---------------------------------------------------------------------------
// Oracles

// Classical Renyi divergence, written out from the definition with long doubles.
inline double classical_oracle(const std::vector<double>& p, const std::vector<double>& q, double alpha) {
  long double s = 0.0L;
  if (alpha == 1.0) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      if (q[i] <= 0.0) return kInf;
      s += p[i] * std::log2(static_cast<long double>(p[i]) / q[i]);
    }
    return static_cast<double>(s);
  }
  if (std::isinf(alpha)) {
    long double best = -kInf;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      if (q[i] <= 0.0) return kInf;
      best = std::max(best, std::log2(static_cast<long double>(p[i]) / q[i]));
    }
    return static_cast<double>(best);
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      if (alpha > 1.0) return kInf;
      continue;
    }
    s += std::pow(static_cast<long double>(p[i]), alpha) * std::pow(static_cast<long double>(q[i]), 1.0L - alpha);
  }
  if (s <= 0.0L) return kInf;
  return static_cast<double>(std::log2(s) / (alpha - 1.0));
}

inline double order_value(const qchain::RenyiOrder& o) { return o.is_one() ? 1.0 : o.value(); }

// Sandwiched quasi-value through singular values: Tr[(s^t r s^t)^a] = sum sv(r^{1/2} s^t)^{2a}.
// Full-rank sigma only.
inline double sandwiched_svd_oracle(const DensityOperator& rho, const DensityOperator& sigma, double alpha) {
  Eigen::SelfAdjointEigenSolver<Matrix> er(rho.matrix()), es(sigma.matrix());
  const double t = (1.0 - alpha) / (2.0 * alpha);
  // Rounding noise in rho's kernel would otherwise survive the square root.
  const double floor = 1e-12 * er.eigenvalues().maxCoeff();
  Eigen::VectorXd rs = er.eigenvalues().unaryExpr([floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
  Eigen::VectorXd st = es.eigenvalues().array().pow(t);
  const Matrix r_half = er.eigenvectors() * rs.cast<Complex>().asDiagonal() * er.eigenvectors().adjoint();
  const Matrix s_t = es.eigenvectors() * st.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  Eigen::JacobiSVD<Matrix> svd(r_half * s_t);
  double q = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double sv = svd.singularValues()(i);
    if (sv > 0.0) q += std::pow(sv, 2.0 * alpha);
  }
  return std::log2(q) / (alpha - 1.0);
}

// Brute-force measured divergence for qubits: grid over bases
// |b0> = (cos t/2, e^{ip} sin t/2), |b1> orthogonal.
inline double qubit_measured_grid(const DensityOperator& rho, const DensityOperator& sigma, double alpha,
                                  int steps = 400) {
  double best = -kInf;
  for (int i = 0; i <= steps; ++i) {
    const double th = M_PI * i / steps;
    for (int j = 0; j < 2 * steps; ++j) {
      const double ph = M_PI * j / steps;
      Eigen::Vector2cd b0(std::cos(th / 2), std::polar(std::sin(th / 2), ph));
      Eigen::Vector2cd b1(-std::conj(b0(1)), std::conj(b0(0)));
      std::vector<double> p{std::max(0.0, (b0.adjoint() * rho.matrix() * b0)(0, 0).real()),
                            std::max(0.0, (b1.adjoint() * rho.matrix() * b1)(0, 0).real())};
      std::vector<double> q{std::max(0.0, (b0.adjoint() * sigma.matrix() * b0)(0, 0).real()),
                            std::max(0.0, (b1.adjoint() * sigma.matrix() * b1)(0, 0).real())};
      best = std::max(best, classical_oracle(p, q, alpha));
    }
  }
  return best;
}

// Number of distinct values among products a^k b^(n-k), by enumeration of all 2^n strings.
inline std::size_t product_spectrum_count(double a, double b, std::size_t n, double rel_tol = 1e-8) {
  std::vector<double> vals;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double v = 1.0;
    for (std::size_t i = 0; i < n; ++i) v *= (mask >> i & 1U) ? a : b;
    vals.push_back(v);
  }
  std::sort(vals.begin(), vals.end());
  std::size_t count = 1;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i] - vals[i - 1] > rel_tol * vals.back()) ++count;
  return count;
}

}  // namespace qtest
