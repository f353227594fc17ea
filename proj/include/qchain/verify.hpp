#pragma once

// Deterministic verification of chain-rule inequalities on concrete instances.
//
// Each check evaluates closed-form decompositions (reverse tests, joint eigenbases,
// pinching) so that a pass certifies the inequality on that instance without relying on
// a global optimum. Heuristic channel-divergence estimates only appear on the
// right-hand side, where a lower bound is the safe direction.

#include <cstdint>
#include <string>
#include <vector>

#include "qchain/channel_div.hpp"
#include "qchain/divergence.hpp"

namespace qchain {

inline constexpr double kDefaultCheckTol = 1e-7;

struct Term {
  std::string name;
  double value;
};

struct InstanceDigest {
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::string order;
};

struct CheckResult {
  std::string name;
  double lhs_bits = 0.0;
  double rhs_bits = 0.0;
  double slack = 0.0;  // rhs - lhs
  double tol = kDefaultCheckTol;
  bool pass = false;   // slack >= -tol
  bool gated = true;   // false in exploration mode
  InstanceDigest digest;
  std::vector<Term> details;

  double detail(const std::string& key) const;
};

struct CheckOptions {
  double tol = kDefaultCheckTol;
  /// Run outside the order range where the inequality is asserted; results are
  /// reported with gated = false.
  bool exploration = false;
  /// Budget for the statement-form channel-divergence estimate of the meta chain rule.
  std::size_t statement_restarts = 0;
  std::size_t statement_refine_iters = 0;
  std::uint64_t seed = 0;
};

/// Q(E rho || F sigma) <= |spec sigma|^alpha Q(E(P_sigma rho) || F sigma), compared as
/// log2 of the quasi-values; for Infinity, the max-divergence form with additive
/// log2 |spec sigma|.
CheckResult check_pinching_lemma(const PositiveMapRep& e, const PositiveMapRep& f,
                                 const DensityOperator& rho, const DensityOperator& sigma,
                                 const RenyiOrder& order, const CheckOptions& opts = {});

/// Proof form: D(E rho || F sigma) <= D_alpha(P||Q) + max_x D(E rho^x || F rho^x) with
/// (P, Q, rho^x) the optimal reverse test. Also reports the statement form with the
/// geometric divergence and a channel-divergence estimate seeded by {rho^x}.
CheckResult check_meta_chain(const PositiveMapRep& e, const PositiveMapRep& f,
                             const DensityOperator& rho, const DensityOperator& sigma,
                             const RenyiOrder& order, DivergenceKind kind,
                             const CheckOptions& opts = {});

CheckResult check_geometric_chain(const PositiveMapRep& e, const PositiveMapRep& f,
                                  const DensityOperator& rho, const DensityOperator& sigma,
                                  const RenyiOrder& order, const CheckOptions& opts = {});

/// D~(E rho || F sigma) <= D(p||q) + max_x D~(E|x><x| || F|x><x|) + a/(a-1) log2|spec sigma|
/// with {|x>} the joint eigenbasis of sigma and its pinching of rho. Orders must exceed 1.
CheckResult check_sandwiched_chain(const PositiveMapRep& e, const PositiveMapRep& f,
                                   const DensityOperator& rho, const DensityOperator& sigma,
                                   const RenyiOrder& order, const CheckOptions& opts = {});

/// -H(E rho) <= -H(rho) + max_x D~(E|x><x| || F|x><x|) over the eigenbasis of rho; F unital.
CheckResult check_unital_entropy(const PositiveMapRep& e, const PositiveMapRep& f_unital,
                                 const DensityOperator& rho, const RenyiOrder& order,
                                 const CheckOptions& opts = {});

/// D(E(L rho) || F(L sigma)) <= D(p||q) + max_x D(E|x><x| || F|x><x|), L the rank-one
/// measurement map in `basis`.
CheckResult check_preprocessing_chain(const PositiveMapRep& e, const PositiveMapRep& f,
                                      const DensityOperator& rho, const DensityOperator& sigma,
                                      const RenyiOrder& order, const Matrix& basis,
                                      DivergenceKind kind = DivergenceKind::Sandwiched,
                                      const CheckOptions& opts = {});

/// check_sandwiched_chain on n-fold tensor powers with every term divided by n. Also
/// requires the per-copy spectrum term to decrease strictly over k = 1..n.
CheckResult check_regularized_chain(const PositiveMapRep& e, const PositiveMapRep& f,
                                    const DensityOperator& rho, const DensityOperator& sigma,
                                    const RenyiOrder& order, std::size_t n,
                                    const CheckOptions& opts = {});

/// lambda_min(|spec sigma| P_sigma(rho) - rho) >= -1e-9.
CheckResult check_pinching_inequality(const DensityOperator& rho, const DensityOperator& sigma,
                                      const CheckOptions& opts = {});

/// Reverse-test achievement |D(P||Q) - geometric(rho||sigma)| <= 1e-7 and reconstruction
/// errors <= 1e-8. lhs is the classical value, rhs the geometric one; slack is -gap.
CheckResult check_reverse_test(const DensityOperator& rho, const DensityOperator& sigma,
                               const RenyiOrder& order, const CheckOptions& opts = {});

/// (alpha / (alpha - 1)) log2 |spec(sigma^{(x)n})| / n.
double per_copy_spectrum_term(const DensityOperator& sigma, const RenyiOrder& order, std::size_t n);

// ---------------------------------------------------------------------------
// Exploration of the preprocessing conjecture (no pass/fail).

struct ConjectureRow {
  std::size_t n = 0;
  double lhs_per_copy = 0.0;       // (1/n) D(E^n(L^n rho^n) || F^n(L^n sigma^n)), pinching measurement
  double rhs = 0.0;                // D~(rho||sigma) + f_n estimate
  double target = 0.0;             // D~(E rho || F sigma)
  double gap = 0.0;                // rhs - lhs_per_copy
};

std::vector<ConjectureRow> explore_preprocessing_conjecture(const PositiveMapRep& e, const PositiveMapRep& f,
                                                            const DensityOperator& rho,
                                                            const DensityOperator& sigma,
                                                            const RenyiOrder& order, std::size_t n_max,
                                                            const ChannelDivOptions& opts = {});

}  // namespace qchain
