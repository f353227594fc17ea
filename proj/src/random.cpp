#include "qchain/random.hpp"

#include <cmath>
#include <numbers>

#include "qchain/quantum.hpp"

namespace qchain {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t k : path) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

// std::uniform_real_distribution and std::normal_distribution are not specified
// bit-for-bit across standard libraries; these are.
double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace {

double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix g(rows, cols);
  const double s = std::sqrt(0.5);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      g(i, j) = Complex(s * re, s * im);
    }
  }
  return g;
}

Matrix random_unitary(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "random_unitary: dim must be positive");
  Rng rng(seed);
  const auto n = static_cast<Eigen::Index>(dim);
  const Matrix g = ginibre(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Mezzadri's phase fix makes the distribution exactly Haar.
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double a = std::abs(d);
    if (a > 0) q.col(k) *= d / a;
  }
  return q;
}

DensityOperator random_state(std::size_t dim, std::size_t rank, std::uint64_t seed) {
  if (dim == 0 || rank == 0 || rank > dim) {
    throw Error(ErrorCode::InvalidArgument, "random_state: need 1 <= rank <= dim");
  }
  Rng rng(seed);
  const Matrix g = ginibre(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rank), rng);
  return DensityOperator::normalized(g * g.adjoint());
}

DensityOperator random_full_rank_state(std::size_t dim, std::uint64_t seed,
                                       double max_condition) {
  if (!(max_condition > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "random_full_rank_state: max_condition must exceed 1");
  }
  const DensityOperator base = random_state(dim, dim, seed);
  const double lo = std::max(0.0, base.eigen().values(0));
  const double hi = base.eigen().values(base.eigen().values.size() - 1);
  if (lo * max_condition >= hi) return base;
  // (1-w) rho + w I/d has condition ((1-w) hi + w/d) / ((1-w) lo + w/d); solve for equality.
  const double inv_d = 1.0 / static_cast<double>(dim);
  const double w = (hi - max_condition * lo) /
                   ((hi - max_condition * lo) + (max_condition - 1.0) * inv_d);
  const double safe_w = std::min(1.0, w * (1.0 + 1e-9));
  return DensityOperator::normalized((1.0 - safe_w) * base.matrix() +
                                     safe_w * inv_d * identity(dim));
}

PositiveMapRep random_channel(std::size_t d_in, std::size_t d_out, std::size_t d_env,
                              std::uint64_t seed) {
  if (d_in == 0 || d_out == 0 || d_env == 0) {
    throw Error(ErrorCode::InvalidArgument, "random_channel: dimensions must be positive");
  }
  if (d_out * d_env < d_in) {
    throw Error(ErrorCode::InvalidArgument,
                "random_channel: d_out * d_env must be at least d_in for an isometry");
  }
  const Matrix u = random_unitary(d_out * d_env, seed);
  const Matrix v = u.leftCols(static_cast<Eigen::Index>(d_in));
  // Output index layout (out, env): row = o * d_env + k.
  std::vector<Matrix> kraus;
  kraus.reserve(d_env);
  for (std::size_t k = 0; k < d_env; ++k) {
    Matrix kk(static_cast<Eigen::Index>(d_out), static_cast<Eigen::Index>(d_in));
    for (std::size_t o = 0; o < d_out; ++o) {
      kk.row(static_cast<Eigen::Index>(o)) = v.row(static_cast<Eigen::Index>(o * d_env + k));
    }
    kraus.push_back(std::move(kk));
  }
  return PositiveMapRep(std::move(kraus));
}

PositiveMapRep random_unital_channel(std::size_t dim, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "random_unital_channel: count is zero");
  Rng rng(seed);
  std::vector<double> weights(count);
  double total = 0.0;
  for (auto& w : weights) {
    // Exponential spacings give a uniform point on the simplex.
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    w = -std::log(u);
    total += w;
  }
  std::vector<Matrix> unitaries;
  for (std::size_t k = 0; k < count; ++k) {
    weights[k] /= total;
    unitaries.push_back(random_unitary(dim, substream(seed, {k})));
  }
  return PositiveMapRep::unitary_mixture(unitaries, weights);
}

}  // namespace qchain
