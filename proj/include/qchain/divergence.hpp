#pragma once

// Classical and quantum Renyi divergences and entropies, in bits.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qchain/distribution.hpp"
#include "qchain/quantum.hpp"

namespace qchain {

/// Renyi order in (0, inf]: a finite value away from 1, exactly one, or infinity.
class RenyiOrder {
 public:
  enum class Tag { Finite, One, Infinity };

  /// Finite orders within kNearOne of 1 are rejected with NearOneOrder.
  static constexpr double kNearOne = 1e-4;

  static RenyiOrder finite(double alpha);
  static RenyiOrder one() { return RenyiOrder(Tag::One, 1.0); }
  static RenyiOrder infinity() { return RenyiOrder(Tag::Infinity, 0.0); }

  /// Parses "1", "inf" (or "infinity") and decimal literals.
  static RenyiOrder parse(std::string_view text);

  Tag tag() const noexcept { return tag_; }
  bool is_finite() const noexcept { return tag_ == Tag::Finite; }
  bool is_one() const noexcept { return tag_ == Tag::One; }
  bool is_infinite() const noexcept { return tag_ == Tag::Infinity; }

  /// The order as a real number (+inf for Infinity).
  double value() const noexcept;

  /// True when the order lies in [lo, hi] (hi may be +inf).
  bool within(double lo, double hi) const noexcept;

  /// "1", "inf", or the finite value with up to 12 significant digits.
  std::string to_string() const;

  friend bool operator==(const RenyiOrder&, const RenyiOrder&) = default;

 private:
  RenyiOrder(Tag tag, double alpha) : tag_(tag), alpha_(alpha) {}
  Tag tag_;
  double alpha_;
};

struct DivDiagnostics {
  bool support_violation = false;  // rho not << sigma where the order requires it
  bool zero_overlap = false;       // alpha < 1 with quasi-value 0
  bool outside_operational_range = false;
  std::optional<double> quasi_value;
};

/// Extended-real divergence value in bits (+inf allowed).
struct DivValue {
  double value = 0.0;
  DivDiagnostics diagnostics;

  bool is_infinite() const noexcept;
  static DivValue infinite_support();
};

enum class DivergenceKind { Sandwiched, Geometric };

std::string_view to_string(DivergenceKind kind);
DivergenceKind parse_divergence_kind(std::string_view text);

DivValue classical_renyi(const Distribution& p, const Distribution& q, const RenyiOrder& order);

/// Tr[(1 - Pi_supp(sigma)) rho] <= 1e-10.
bool is_absolutely_continuous(const DensityOperator& rho, const DensityOperator& sigma);

DivValue sandwiched(const DensityOperator& rho, const DensityOperator& sigma, const RenyiOrder& order);

/// Geometric divergence. Orders above 2 (including Infinity) are evaluated formally and
/// flagged with outside_operational_range.
DivValue geometric(const DensityOperator& rho, const DensityOperator& sigma, const RenyiOrder& order);

DivValue divergence(DivergenceKind kind, const DensityOperator& rho, const DensityOperator& sigma,
                    const RenyiOrder& order);

/// Sandwiched quasi-value Tr[(sigma^s rho sigma^s)^alpha], s = (1-alpha)/(2 alpha), for
/// finite alpha. Returns +inf when alpha > 1 and rho is not << sigma, and 0 when alpha < 1
/// and the supports are orthogonal.
double sandwiched_quasi(const DensityOperator& rho, const DensityOperator& sigma, double alpha);

/// Quantum Renyi entropy in bits; Infinity gives the min-entropy.
double renyi_entropy(const DensityOperator& rho, const RenyiOrder& order);

/// Same for a probability vector.
double renyi_entropy(const Distribution& p, const RenyiOrder& order);

struct MeasuredOptions {
  std::size_t restarts = 8;
  std::size_t refine_iters = 400;
  std::uint64_t seed = 0;
};

struct MeasuredResult {
  DivValue value;  // lower bound on the measured divergence
  Matrix basis;    // achieving orthonormal basis (columns)
};

/// Lower bound on the measured Renyi divergence: the best classical divergence over
/// candidate bases (joint eigenbasis of sigma and its pinching of rho, eigenbases of rho,
/// sigma and sigma^{-1/2} rho sigma^{-1/2}, and refined random bases).
MeasuredResult measured(const DensityOperator& rho, const DensityOperator& sigma,
                        const RenyiOrder& order, const MeasuredOptions& opts = {});

/// Classical divergence of the outcome distributions of `basis`.
DivValue measured_in_basis(const DensityOperator& rho, const DensityOperator& sigma,
                           const RenyiOrder& order, const Matrix& basis);

}  // namespace qchain
