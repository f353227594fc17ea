#pragma once

// Channel divergence functionals as certified lower bounds. Every estimate carries the
// input state (or pair of states) that achieves the reported value.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qchain/divergence.hpp"

namespace qchain {

enum class ChannelMode { Plain, Stabilized, Amortized };

std::string_view to_string(ChannelMode mode);
ChannelMode parse_channel_mode(std::string_view text);

struct ChannelDivOptions {
  std::size_t restarts = 32;
  std::vector<DensityOperator> seeds;
  std::size_t refine_iters = 200;
  std::uint64_t rng_seed = 0;
};

struct ChannelDivEstimate {
  double value_bits = 0.0;
  DensityOperator witness;  // on A, or on A (x) R for stabilized and amortized modes
  std::optional<DensityOperator> witness_sigma;  // amortized mode only
  ChannelMode mode = ChannelMode::Plain;
  RenyiOrder order = RenyiOrder::one();
  DivergenceKind kind = DivergenceKind::Sandwiched;
  std::size_t restarts_used = 0;
};

/// Lower bound on sup_omega D(E(omega) || F(omega)). Candidates are the caller's seeds,
/// the maximally mixed state, the computational basis states and `restarts` random
/// states; each is refined by coordinate search over a purification parameter.
ChannelDivEstimate channel_divergence(const PositiveMapRep& e, const PositiveMapRep& f,
                                      const RenyiOrder& order, DivergenceKind kind,
                                      const ChannelDivOptions& opts = {});

/// Same search on inputs over A (x) R with |R| = |A| and maps E (x) id_R. Seeds on A
/// alone are lifted to A (x) R by appending |0><0|_R; the maximally entangled state is
/// always a candidate.
ChannelDivEstimate stabilized_channel_divergence(const PositiveMapRep& e, const PositiveMapRep& f,
                                                 const RenyiOrder& order, DivergenceKind kind,
                                                 const ChannelDivOptions& opts = {});

/// Lower bound on the amortized divergence: the stabilized estimate (equal pairs) and
/// `restarts` refined random pairs with sigma floored to full rank.
ChannelDivEstimate amortized_divergence(const PositiveMapRep& e, const PositiveMapRep& f,
                                        const RenyiOrder& order, DivergenceKind kind,
                                        const ChannelDivOptions& opts = {});

/// Objective value of an estimate re-evaluated at its stored witness.
double reevaluate(const ChannelDivEstimate& est, const PositiveMapRep& e, const PositiveMapRep& f);

struct RegularizedTerm {
  std::size_t n = 0;
  double per_copy_bits = 0.0;   // f_n
  ChannelDivEstimate estimate;  // for E^{(x)n} vs F^{(x)n}, not divided by n
};

/// f_n = D(E^{(x)n} || F^{(x)n}) / n for n = 1..n_max, each level seeded with the product
/// of the previous witness and the single-copy witness.
std::vector<RegularizedTerm> regularized_sequence(const PositiveMapRep& e, const PositiveMapRep& f,
                                                  const RenyiOrder& order, DivergenceKind kind,
                                                  std::size_t n_max, const ChannelDivOptions& opts = {});

/// Heuristic min over unital candidates F of the sandwiched channel-divergence estimate.
DivValue unital_upper_ref(const PositiveMapRep& e, const RenyiOrder& order,
                          const std::vector<PositiveMapRep>& candidates,
                          const ChannelDivOptions& opts = {});

DensityOperator maximally_entangled(std::size_t dim);

}  // namespace qchain
