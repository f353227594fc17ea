#include "qchain/divergence.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

namespace qchain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSupportTol = 1e-10;

std::string format_g12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Eigenvalues above the support cutoff, clipped below at zero.
std::vector<double> support_eigenvalues(const HermitianEigen& eig) {
  std::vector<double> out;
  const double cut = support_threshold(eig);
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > cut) out.push_back(eig.values(i));
  }
  return out;
}

DivValue finite_value(double v) {
  DivValue d;
  d.value = v;
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Distribution

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  double total = 0.0;
  for (double& p : probs_) {
    if (!std::isfinite(p) || p < -1e-12) {
      throw Error(ErrorCode::InvalidArgument, "Distribution: entries must be finite and nonnegative");
    }
    if (p < 0.0) p = 0.0;
    total += p;
  }
  if (probs_.empty() || std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "Distribution: probabilities must sum to 1");
  }
}

double Distribution::total() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

Distribution Distribution::uniform(std::size_t n) {
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(std::size_t n, std::size_t at) {
  std::vector<double> v(n, 0.0);
  v.at(at) = 1.0;
  return Distribution(std::move(v));
}

// ---------------------------------------------------------------------------
// RenyiOrder

RenyiOrder RenyiOrder::finite(double alpha) {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "Renyi order must be positive and finite");
  }
  if (std::abs(alpha - 1.0) < kNearOne) {
    throw Error(ErrorCode::NearOneOrder,
                "finite order " + format_g12(alpha) + " is too close to 1; use the order \"1\"");
  }
  return RenyiOrder(Tag::Finite, alpha);
}

RenyiOrder RenyiOrder::parse(std::string_view text) {
  const std::string s = lower(text);
  if (s == "inf" || s == "infinity" || s == "+inf") return infinity();
  if (s == "1" || s == "one") return one();
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::MalformedInput, "cannot parse Renyi order '" + std::string(text) + "'");
  }
  if (v == 1.0) return one();
  return finite(v);
}

double RenyiOrder::value() const noexcept {
  switch (tag_) {
    case Tag::Finite: return alpha_;
    case Tag::One: return 1.0;
    case Tag::Infinity: return kInf;
  }
  return alpha_;
}

bool RenyiOrder::within(double lo, double hi) const noexcept {
  const double a = value();
  return a >= lo && a <= hi;
}

std::string RenyiOrder::to_string() const {
  switch (tag_) {
    case Tag::One: return "1";
    case Tag::Infinity: return "inf";
    case Tag::Finite: break;
  }
  return format_g12(alpha_);
}

// ---------------------------------------------------------------------------

bool DivValue::is_infinite() const noexcept { return std::isinf(value); }

DivValue DivValue::infinite_support() {
  DivValue d;
  d.value = kInf;
  d.diagnostics.support_violation = true;
  return d;
}

std::string_view to_string(DivergenceKind kind) {
  return kind == DivergenceKind::Sandwiched ? "sandwiched" : "geometric";
}

DivergenceKind parse_divergence_kind(std::string_view text) {
  const std::string s = lower(text);
  if (s == "sandwiched") return DivergenceKind::Sandwiched;
  if (s == "geometric") return DivergenceKind::Geometric;
  throw Error(ErrorCode::MalformedInput, "unknown divergence kind '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Classical

DivValue classical_renyi(const Distribution& p, const Distribution& q, const RenyiOrder& order) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::AlphabetMismatch, "classical_renyi: alphabet sizes " +
                                                 std::to_string(p.size()) + " and " +
                                                 std::to_string(q.size()) + " differ");
  }
  const std::size_t n = p.size();
  bool violation = false;
  for (std::size_t x = 0; x < n; ++x) {
    if (p[x] > 0.0 && q[x] <= 0.0) violation = true;
  }

  if (order.is_finite() && order.value() < 1.0) {
    const double a = order.value();
    double quasi = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      if (p[x] > 0.0 && q[x] > 0.0) quasi += std::pow(p[x], a) * std::pow(q[x], 1.0 - a);
    }
    DivValue d;
    d.diagnostics.quasi_value = quasi;
    if (quasi <= 0.0) {
      d.value = kInf;
      d.diagnostics.zero_overlap = true;
    } else {
      d.value = std::log2(quasi) / (a - 1.0);
    }
    return d;
  }

  if (violation) return DivValue::infinite_support();

  switch (order.tag()) {
    case RenyiOrder::Tag::One: {
      double kl = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        if (p[x] > 0.0) kl += p[x] * std::log2(p[x] / q[x]);
      }
      return finite_value(kl);
    }
    case RenyiOrder::Tag::Infinity: {
      double best = -kInf;
      for (std::size_t x = 0; x < n; ++x) {
        if (p[x] > 0.0) best = std::max(best, std::log2(p[x] / q[x]));
      }
      return finite_value(best);
    }
    case RenyiOrder::Tag::Finite: break;
  }
  const double a = order.value();
  double quasi = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    if (p[x] > 0.0) quasi += p[x] * std::pow(p[x] / q[x], a - 1.0);
  }
  DivValue d = finite_value(std::log2(quasi) / (a - 1.0));
  d.diagnostics.quasi_value = quasi;
  return d;
}

// ---------------------------------------------------------------------------
// Quantum

bool is_absolutely_continuous(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw Error(ErrorCode::DimensionMismatch, "support check: dimensions differ");
  const Matrix outside = identity(sigma.dim()) - sigma.support_projector();
  return (outside * rho.matrix()).trace().real() <= kSupportTol;
}

namespace {

void require_same_dim(const DensityOperator& rho, const DensityOperator& sigma, const char* where) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": dimensions " +
                                                  std::to_string(rho.dim()) + " and " +
                                                  std::to_string(sigma.dim()) + " differ");
  }
}

bool orthogonal_supports(const DensityOperator& rho, const DensityOperator& sigma) {
  return (rho.support_projector() * sigma.matrix()).trace().real() <= kSupportTol;
}

// sigma^{-1/2} rho sigma^{-1/2} with the generalized inverse.
Matrix relative_operator(const DensityOperator& rho, const DensityOperator& sigma) {
  const Matrix s = psd_power(sigma.eigen(), -0.5);
  return hermitian_part(s * rho.matrix() * s);
}

double log2_lambda_max(const Matrix& y) {
  const HermitianEigen eig = hermitian_eig(y);
  return std::log2(eig.values(eig.values.size() - 1));
}

}  // namespace

double sandwiched_quasi(const DensityOperator& rho, const DensityOperator& sigma, double alpha) {
  require_same_dim(rho, sigma, "sandwiched_quasi");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidArgument, "sandwiched_quasi: alpha must be positive and finite");
  }
  if (alpha > 1.0 && !is_absolutely_continuous(rho, sigma)) return kInf;
  if (alpha < 1.0 && orthogonal_supports(rho, sigma)) return 0.0;
  const double s = (1.0 - alpha) / (2.0 * alpha);
  const Matrix sp = psd_power(sigma.eigen(), s);
  const Matrix x = hermitian_part(sp * rho.matrix() * sp);
  // X has rank at most min(rank rho, rank sigma). Keep exactly that many eigenvalues:
  // a relative cutoff on X would drop genuine mass like 1e-12 that still matters
  // after the power alpha < 1.
  const HermitianEigen ex = hermitian_eig(x);
  const std::size_t r = std::min(support_rank(rho.eigen()), support_rank(sigma.eigen()));
  const Eigen::Index n = ex.values.size();
  double q = 0.0;
  for (Eigen::Index i = n - static_cast<Eigen::Index>(r); i < n; ++i) q += std::pow(std::max(ex.values(i), 0.0), alpha);
  return q;
}

DivValue sandwiched(const DensityOperator& rho, const DensityOperator& sigma, const RenyiOrder& order) {
  require_same_dim(rho, sigma, "sandwiched");
  if (order.is_finite() && order.value() < 1.0) {
    const double a = order.value();
    const double q = sandwiched_quasi(rho, sigma, a);
    DivValue d;
    d.diagnostics.quasi_value = q;
    if (q <= 0.0) {
      d.value = kInf;
      d.diagnostics.zero_overlap = true;
    } else {
      d.value = std::log2(q) / (a - 1.0);
    }
    return d;
  }
  if (!is_absolutely_continuous(rho, sigma)) return DivValue::infinite_support();

  switch (order.tag()) {
    case RenyiOrder::Tag::One: {
      double neg_entropy = 0.0;
      for (double l : support_eigenvalues(rho.eigen())) neg_entropy += l * std::log2(l);
      const double cross = (rho.matrix() * psd_log(sigma.eigen())).trace().real();
      return finite_value(neg_entropy - cross);
    }
    case RenyiOrder::Tag::Infinity:
      return finite_value(log2_lambda_max(relative_operator(rho, sigma)));
    case RenyiOrder::Tag::Finite: break;
  }
  const double a = order.value();
  const double q = sandwiched_quasi(rho, sigma, a);
  DivValue d = finite_value(std::log2(q) / (a - 1.0));
  d.diagnostics.quasi_value = q;
  return d;
}

DivValue geometric(const DensityOperator& rho, const DensityOperator& sigma, const RenyiOrder& order) {
  require_same_dim(rho, sigma, "geometric");
  DivValue d;
  if (!is_absolutely_continuous(rho, sigma)) {
    d = DivValue::infinite_support();
    d.diagnostics.outside_operational_range = order.value() > 2.0;
    return d;
  }
  switch (order.tag()) {
    case RenyiOrder::Tag::One: {
      // Tr[rho log(rho^{1/2} sigma^{-1} rho^{1/2})]
      const Matrix r = psd_power(rho.eigen(), 0.5);
      const Matrix z = hermitian_part(r * psd_power(sigma.eigen(), -1.0) * r);
      d.value = (rho.matrix() * psd_log(z)).trace().real();
      return d;
    }
    case RenyiOrder::Tag::Infinity:
      d.value = log2_lambda_max(relative_operator(rho, sigma));
      d.diagnostics.outside_operational_range = true;
      return d;
    case RenyiOrder::Tag::Finite: break;
  }
  const double a = order.value();
  const HermitianEigen y = hermitian_eig(relative_operator(rho, sigma));
  // Tr[sigma^{1/2} Y^a sigma^{1/2}] = sum_i lambda_i^a <v_i|sigma|v_i>
  const double cut = support_threshold(y);
  double q = 0.0;
  for (Eigen::Index i = 0; i < y.values.size(); ++i) {
    if (y.values(i) <= cut) continue;
    const double w = (y.vectors.col(i).adjoint() * sigma.matrix() * y.vectors.col(i))(0, 0).real();
    q += std::pow(y.values(i), a) * w;
  }
  d.value = std::log2(q) / (a - 1.0);
  d.diagnostics.quasi_value = q;
  d.diagnostics.outside_operational_range = a > 2.0;
  return d;
}

DivValue divergence(DivergenceKind kind, const DensityOperator& rho, const DensityOperator& sigma,
                    const RenyiOrder& order) {
  return kind == DivergenceKind::Sandwiched ? sandwiched(rho, sigma, order)
                                            : geometric(rho, sigma, order);
}

// ---------------------------------------------------------------------------
// Entropies

namespace {

double entropy_from_spectrum(const std::vector<double>& lambdas, const RenyiOrder& order) {
  switch (order.tag()) {
    case RenyiOrder::Tag::One: {
      double h = 0.0;
      for (double l : lambdas) h -= l * std::log2(l);
      return h;
    }
    case RenyiOrder::Tag::Infinity:
      return -std::log2(*std::max_element(lambdas.begin(), lambdas.end()));
    case RenyiOrder::Tag::Finite: break;
  }
  const double a = order.value();
  double s = 0.0;
  for (double l : lambdas) s += std::pow(l, a);
  return std::log2(s) / (1.0 - a);
}

}  // namespace

double renyi_entropy(const DensityOperator& rho, const RenyiOrder& order) {
  return std::max(0.0, entropy_from_spectrum(support_eigenvalues(rho.eigen()), order));
}

double renyi_entropy(const Distribution& p, const RenyiOrder& order) {
  std::vector<double> nz;
  for (double x : p.probs()) {
    if (x > 0.0) nz.push_back(x);
  }
  return std::max(0.0, entropy_from_spectrum(nz, order));
}

}  // namespace qchain
