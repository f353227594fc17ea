#include <cmath>
#include <limits>

#include "qchain/divergence.hpp"
#include "qchain/random.hpp"

namespace qchain {

namespace {

double clip(double p) { return p < kMeasureFloor ? 0.0 : p; }

double column_expectation(const Matrix& u, Eigen::Index i, const Matrix& x) {
  return (u.col(i).adjoint() * x * u.col(i))(0, 0).real();
}

// Compares extended reals; +inf beats everything, NaN never wins.
bool improves(double candidate, double incumbent) {
  if (std::isnan(candidate)) return false;
  if (std::isnan(incumbent)) return true;
  return candidate > incumbent + 1e-15 * std::max(1.0, std::abs(incumbent));
}

// Coordinate search over complex Givens rotations acting on basis columns. Each trial
// rotates one pair (j, k) by +-step about either the real or the imaginary generator;
// phases of single columns do not change outcome probabilities, so they are skipped.
class BasisSearch {
 public:
  BasisSearch(const DensityOperator& rho, const DensityOperator& sigma, const RenyiOrder& order)
      : rho_(rho), sigma_(sigma), order_(order) {}

  DivValue evaluate(const Matrix& u, std::vector<double>& p, std::vector<double>& q) const {
    const auto n = u.cols();
    p.resize(static_cast<std::size_t>(n));
    q.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      p[static_cast<std::size_t>(i)] = clip(column_expectation(u, i, rho_.matrix()));
      q[static_cast<std::size_t>(i)] = clip(column_expectation(u, i, sigma_.matrix()));
    }
    return score(p, q);
  }

  DivValue score(const std::vector<double>& p, const std::vector<double>& q) const {
    return classical_renyi(Distribution(p), Distribution(q), order_);
  }

  // Refines u in place; returns the value at the final basis.
  DivValue refine(Matrix& u, std::size_t budget) const {
    std::vector<double> p, q;
    DivValue best = evaluate(u, p, q);
    const Eigen::Index d = u.cols();
    if (d < 2 || budget == 0) return best;
    const std::size_t coords = static_cast<std::size_t>(d * (d - 1));  // pairs x {re, im}
    const std::size_t cycle = 2 * coords;
    double step = 0.5;
    bool improved_in_cycle = false;
    std::vector<double> tp, tq;
    for (std::size_t t = 0; t < budget; ++t) {
      if (best.is_infinite()) break;
      const std::size_t slot = t % cycle;
      if (slot == 0 && t > 0) {
        if (!improved_in_cycle) step *= 0.5;
        if (step < 1e-9) break;
        improved_in_cycle = false;
      }
      const double theta = (slot % 2 == 0) ? step : -step;
      const std::size_t c = slot / 2;
      const bool imaginary = (c % 2) == 1;
      std::size_t pair = c / 2;
      Eigen::Index j = 0;
      while (pair >= static_cast<std::size_t>(d - 1 - j)) {
        pair -= static_cast<std::size_t>(d - 1 - j);
        ++j;
      }
      const Eigen::Index k = j + 1 + static_cast<Eigen::Index>(pair);

      const double cs = std::cos(theta), sn = std::sin(theta);
      const Eigen::VectorXcd uj = u.col(j), uk = u.col(k);
      Eigen::VectorXcd nj, nk;
      if (imaginary) {
        const Complex is(0.0, sn);
        nj = cs * uj + is * uk;
        nk = is * uj + cs * uk;
      } else {
        nj = cs * uj + sn * uk;
        nk = -sn * uj + cs * uk;
      }
      tp = p;
      tq = q;
      const auto js = static_cast<std::size_t>(j), ks = static_cast<std::size_t>(k);
      tp[js] = clip((nj.adjoint() * rho_.matrix() * nj)(0, 0).real());
      tp[ks] = clip((nk.adjoint() * rho_.matrix() * nk)(0, 0).real());
      tq[js] = clip((nj.adjoint() * sigma_.matrix() * nj)(0, 0).real());
      tq[ks] = clip((nk.adjoint() * sigma_.matrix() * nk)(0, 0).real());
      const DivValue trial = score(tp, tq);
      if (improves(trial.value, best.value)) {
        best = trial;
        u.col(j) = nj;
        u.col(k) = nk;
        p.swap(tp);
        q.swap(tq);
        improved_in_cycle = true;
      }
    }
    // Re-evaluate from scratch so the reported value certifies the returned basis.
    return evaluate(u, p, q);
  }

 private:
  const DensityOperator& rho_;
  const DensityOperator& sigma_;
  const RenyiOrder& order_;
};

}  // namespace

DivValue measured_in_basis(const DensityOperator& rho, const DensityOperator& sigma,
                           const RenyiOrder& order, const Matrix& basis) {
  if (rho.dim() != sigma.dim() || static_cast<std::size_t>(basis.rows()) != rho.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "measured_in_basis: dimensions differ");
  }
  return classical_renyi(measure(basis, rho), measure(basis, sigma), order);
}

MeasuredResult measured(const DensityOperator& rho, const DensityOperator& sigma,
                        const RenyiOrder& order, const MeasuredOptions& opts) {
  if (rho.dim() != sigma.dim()) throw Error(ErrorCode::DimensionMismatch, "measured: dimensions differ");
  if (opts.restarts < 1) throw Error(ErrorCode::InvalidArgument, "measured: restarts must be at least 1");

  std::vector<Matrix> candidates;
  const DensityOperator pinched = pinch(sigma, rho);
  candidates.push_back(joint_eigenbasis(sigma, pinched));
  candidates.push_back(rho.eigen().vectors);
  candidates.push_back(sigma.eigen().vectors);
  {
    const Matrix s = psd_power(sigma.eigen(), -0.5);
    candidates.push_back(hermitian_eig(hermitian_part(s * rho.matrix() * s)).vectors);
  }
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    candidates.push_back(random_unitary(rho.dim(), substream(opts.seed, {r})));
  }

  const BasisSearch search(rho, sigma, order);
  MeasuredResult best{DivValue{-std::numeric_limits<double>::infinity(), {}}, Matrix()};
  bool first = true;
  for (Matrix& u : candidates) {
    const DivValue v = search.refine(u, opts.refine_iters);
    if (first || improves(v.value, best.value.value)) {
      best = {v, u};
      first = false;
    }
    if (best.value.is_infinite()) break;
  }
  return best;
}

}  // namespace qchain
