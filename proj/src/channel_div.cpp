#include "qchain/channel_div.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "qchain/random.hpp"

namespace qchain {

std::string_view to_string(ChannelMode mode) {
  switch (mode) {
    case ChannelMode::Plain: return "plain";
    case ChannelMode::Stabilized: return "stab";
    case ChannelMode::Amortized: return "amortized";
  }
  return "plain";
}

ChannelMode parse_channel_mode(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "plain") return ChannelMode::Plain;
  if (s == "stab" || s == "stabilized") return ChannelMode::Stabilized;
  if (s == "amortized") return ChannelMode::Amortized;
  throw Error(ErrorCode::MalformedInput, "unknown channel mode '" + std::string(text) + "'");
}

DensityOperator maximally_entangled(std::size_t dim) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim * dim));
  for (std::size_t i = 0; i < dim; ++i) psi(static_cast<Eigen::Index>(i * dim + i)) = 1.0;
  return DensityOperator::pure(psi);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAmortizedFloor = 1e-6;

bool improves(double candidate, double incumbent) {
  if (std::isnan(candidate)) return false;
  if (std::isnan(incumbent)) return true;
  return candidate > incumbent + 1e-15 * std::max(1.0, std::abs(incumbent));
}

void require_compatible(const PositiveMapRep& e, const PositiveMapRep& f, const char* where) {
  if (e.dim_in() != f.dim_in() || e.dim_out() != f.dim_out()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": maps have different input/output dimensions");
  }
}

DensityOperator state_from_factor(const Matrix& g) {
  return DensityOperator::normalized(g * g.adjoint());
}

// Raises every eigenvalue to at least kAmortizedFloor, then renormalizes.
DensityOperator floored(const DensityOperator& s) {
  const HermitianEigen& eig = s.eigen();
  RealVector v = eig.values.cwiseMax(kAmortizedFloor);
  return DensityOperator::normalized(eig.vectors * v.cast<Complex>().asDiagonal() * eig.vectors.adjoint());
}

Matrix factor_of(const DensityOperator& omega) { return psd_power(omega.eigen(), 0.5); }

// Coordinate ascent over the real and imaginary parts of one or more factor matrices.
// A trial moves a single coordinate by +-step; after a full cycle without an accepted
// move the step halves. The budget counts trials.
using Objective = std::function<double(const std::vector<Matrix>&)>;

double refine(std::vector<Matrix>& factors, const Objective& objective, std::size_t budget) {
  double best = objective(factors);
  std::size_t coords = 0;
  for (const auto& g : factors) coords += 2 * static_cast<std::size_t>(g.size());
  if (coords == 0 || budget == 0) return best;
  for (auto& g : factors) g /= g.norm();
  const std::size_t cycle = 2 * coords;
  double step = 0.25;
  bool improved_in_cycle = false;
  for (std::size_t t = 0; t < budget; ++t) {
    if (std::isinf(best) && best > 0) break;
    const std::size_t slot = t % cycle;
    if (slot == 0 && t > 0) {
      if (!improved_in_cycle) step *= 0.5;
      if (step < 1e-7) break;
      improved_in_cycle = false;
    }
    const double delta = (slot % 2 == 0) ? step : -step;
    std::size_t c = slot / 2;
    const bool imaginary = (c % 2) == 1;
    c /= 2;
    std::size_t which = 0;
    while (c >= static_cast<std::size_t>(factors[which].size())) {
      c -= static_cast<std::size_t>(factors[which].size());
      ++which;
    }
    std::vector<Matrix> trial = factors;
    Complex& entry = trial[which].data()[c];
    entry += imaginary ? Complex(0.0, delta) : Complex(delta, 0.0);
    if (!(trial[which].norm() > 1e-12)) continue;
    trial[which] /= trial[which].norm();
    const double v = objective(trial);
    if (improves(v, best)) {
      best = v;
      factors.swap(trial);
      improved_in_cycle = true;
    }
  }
  return objective(factors);
}

struct Candidate {
  std::vector<Matrix> factors;
};

// Runs every candidate through `refine` and keeps the best, in candidate order.
std::pair<double, std::vector<Matrix>> best_of(std::vector<Candidate> candidates,
                                               const Objective& objective, std::size_t budget) {
  double best = -kInf;
  std::vector<Matrix> best_factors;
  for (auto& cand : candidates) {
    const double v = refine(cand.factors, objective, budget);
    if (best_factors.empty() || improves(v, best)) {
      best = v;
      best_factors = cand.factors;
    }
    if (std::isinf(best) && best > 0) break;
  }
  return {best, best_factors};
}

Matrix random_factor(std::size_t dim, std::uint64_t seed, bool pure) {
  Rng rng(seed);
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix g = Matrix::Zero(n, n);
  if (pure) {
    g.col(0) = ginibre(n, 1, rng);
  } else {
    g = ginibre(n, n, rng);
  }
  return g;
}

double output_divergence(const PositiveMapRep& e, const PositiveMapRep& f, const DensityOperator& omega,
                         const RenyiOrder& order, DivergenceKind kind) {
  return divergence(kind, e.apply(omega), f.apply(omega), order).value;
}

// Shared search for plain and stabilized modes; `e` and `f` already act on the full input.
ChannelDivEstimate search_inputs(const PositiveMapRep& e, const PositiveMapRep& f, const RenyiOrder& order,
                                 DivergenceKind kind, const ChannelDivOptions& opts,
                                 const std::vector<DensityOperator>& seeds, ChannelMode mode) {
  const std::size_t d = e.dim_in();
  std::vector<Candidate> candidates;
  for (const auto& s : seeds) candidates.push_back({{factor_of(s)}});
  candidates.push_back({{identity(d)}});
  for (std::size_t i = 0; i < d; ++i) candidates.push_back({{DensityOperator::basis_state(d, i).matrix()}});
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    candidates.push_back({{random_factor(d, substream(opts.rng_seed, {r}), r % 2 == 0)}});
  }
  const Objective objective = [&](const std::vector<Matrix>& g) {
    return output_divergence(e, f, state_from_factor(g[0]), order, kind);
  };
  auto [value, factors] = best_of(std::move(candidates), objective, opts.refine_iters);
  DensityOperator witness = state_from_factor(factors[0]);
  return ChannelDivEstimate{.value_bits = value,
                            .witness = std::move(witness),
                            .witness_sigma = std::nullopt,
                            .mode = mode,
                            .order = order,
                            .kind = kind,
                            .restarts_used = opts.restarts};
}

}  // namespace

ChannelDivEstimate channel_divergence(const PositiveMapRep& e, const PositiveMapRep& f,
                                      const RenyiOrder& order, DivergenceKind kind,
                                      const ChannelDivOptions& opts) {
  require_compatible(e, f, "channel_divergence");
  for (const auto& s : opts.seeds) {
    if (s.dim() != e.dim_in()) throw Error(ErrorCode::DimensionMismatch, "channel_divergence: seed dimension differs from map input");
  }
  return search_inputs(e, f, order, kind, opts, opts.seeds, ChannelMode::Plain);
}

ChannelDivEstimate stabilized_channel_divergence(const PositiveMapRep& e, const PositiveMapRep& f,
                                                 const RenyiOrder& order, DivergenceKind kind,
                                                 const ChannelDivOptions& opts) {
  require_compatible(e, f, "stabilized_channel_divergence");
  const std::size_t da = e.dim_in();
  const PositiveMapRep ea = tensor_with_identity(e, da);
  const PositiveMapRep fa = tensor_with_identity(f, da);
  std::vector<DensityOperator> seeds;
  const DensityOperator ref0 = DensityOperator::basis_state(da, 0);
  for (const auto& s : opts.seeds) {
    if (s.dim() == da) {
      seeds.push_back(tensor(s, ref0));
    } else if (s.dim() == da * da) {
      seeds.push_back(s);
    } else {
      throw Error(ErrorCode::DimensionMismatch, "stabilized_channel_divergence: seed dimension fits neither A nor AR");
    }
  }
  seeds.push_back(maximally_entangled(da));
  return search_inputs(ea, fa, order, kind, opts, seeds, ChannelMode::Stabilized);
}

ChannelDivEstimate amortized_divergence(const PositiveMapRep& e, const PositiveMapRep& f,
                                        const RenyiOrder& order, DivergenceKind kind,
                                        const ChannelDivOptions& opts) {
  require_compatible(e, f, "amortized_divergence");
  const ChannelDivEstimate stab = stabilized_channel_divergence(e, f, order, kind, opts);
  const std::size_t da = e.dim_in();
  const PositiveMapRep ea = tensor_with_identity(e, da);
  const PositiveMapRep fa = tensor_with_identity(f, da);

  auto pair_value = [&](const DensityOperator& rho, const DensityOperator& sigma) {
    const double out = divergence(kind, ea.apply(rho), fa.apply(sigma), order).value;
    if (std::isinf(out) && out > 0) return out;
    return out - divergence(kind, rho, sigma, order).value;
  };

  // Equal pair at the stabilized witness.
  double best = pair_value(stab.witness, stab.witness);
  DensityOperator best_rho = stab.witness;
  DensityOperator best_sigma = stab.witness;

  const Objective objective = [&](const std::vector<Matrix>& g) {
    return pair_value(state_from_factor(g[0]), floored(state_from_factor(g[1])));
  };
  const std::size_t dar = da * da;
  std::vector<Candidate> candidates;
  candidates.push_back({{factor_of(stab.witness), factor_of(floored(stab.witness))}});
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    const std::uint64_t s = substream(opts.rng_seed, {0xA11, r});
    candidates.push_back({{random_factor(dar, substream(s, {0}), r % 2 == 0),
                           random_factor(dar, substream(s, {1}), false)}});
  }
  auto [value, factors] = best_of(std::move(candidates), objective, opts.refine_iters);
  if (improves(value, best)) {
    best = value;
    best_rho = state_from_factor(factors[0]);
    best_sigma = floored(state_from_factor(factors[1]));
  }
  return ChannelDivEstimate{.value_bits = best,
                            .witness = std::move(best_rho),
                            .witness_sigma = std::move(best_sigma),
                            .mode = ChannelMode::Amortized,
                            .order = order,
                            .kind = kind,
                            .restarts_used = opts.restarts};
}

double reevaluate(const ChannelDivEstimate& est, const PositiveMapRep& e, const PositiveMapRep& f) {
  switch (est.mode) {
    case ChannelMode::Plain:
      return output_divergence(e, f, est.witness, est.order, est.kind);
    case ChannelMode::Stabilized: {
      const std::size_t da = e.dim_in();
      return output_divergence(tensor_with_identity(e, da), tensor_with_identity(f, da), est.witness,
                               est.order, est.kind);
    }
    case ChannelMode::Amortized: {
      const std::size_t da = e.dim_in();
      const DensityOperator& sigma = est.witness_sigma.value();
      const double out = divergence(est.kind, tensor_with_identity(e, da).apply(est.witness),
                                    tensor_with_identity(f, da).apply(sigma), est.order)
                             .value;
      if (std::isinf(out) && out > 0) return out;
      return out - divergence(est.kind, est.witness, sigma, est.order).value;
    }
  }
  return 0.0;
}

std::vector<RegularizedTerm> regularized_sequence(const PositiveMapRep& e, const PositiveMapRep& f,
                                                  const RenyiOrder& order, DivergenceKind kind,
                                                  std::size_t n_max, const ChannelDivOptions& opts) {
  require_compatible(e, f, "regularized_sequence");
  if (n_max == 0) throw Error(ErrorCode::InvalidArgument, "regularized_sequence: n_max must be at least 1");
  std::size_t din = 1, dout = 1;
  for (std::size_t k = 0; k < n_max; ++k) {
    din *= e.dim_in();
    dout *= e.dim_out();
    if (din > kMaxDimension || dout > kMaxDimension) {
      throw Error(ErrorCode::DimensionTooLarge,
                  "regularized_sequence: n_max = " + std::to_string(n_max) + " exceeds the dimension guard");
    }
  }

  std::vector<RegularizedTerm> out;
  ChannelDivOptions level_opts = opts;
  ChannelDivEstimate first = channel_divergence(e, f, order, kind, level_opts);
  out.push_back({1, first.value_bits, first});
  PositiveMapRep en = e, fn = f;
  for (std::size_t n = 2; n <= n_max; ++n) {
    en = tensor(en, e);
    fn = tensor(fn, f);
    level_opts.seeds = {tensor(out.back().estimate.witness, first.witness),
                        tensor_power(first.witness, n)};
    level_opts.rng_seed = substream(opts.rng_seed, {n});
    ChannelDivEstimate est = channel_divergence(en, fn, order, kind, level_opts);
    const double per_copy = est.value_bits / static_cast<double>(n);
    out.push_back({n, per_copy, std::move(est)});
  }
  return out;
}

DivValue unital_upper_ref(const PositiveMapRep& e, const RenyiOrder& order,
                          const std::vector<PositiveMapRep>& candidates, const ChannelDivOptions& opts) {
  if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "unital_upper_ref: no candidates");
  for (const auto& f : candidates) {
    if (!f.is_unital()) throw Error(ErrorCode::NonUnitalCandidate, "unital_upper_ref: candidate map is not unital");
    require_compatible(e, f, "unital_upper_ref");
  }
  DivValue best{kInf, {}};
  for (const auto& f : candidates) {
    const double v = channel_divergence(e, f, order, DivergenceKind::Sandwiched, opts).value_bits;
    if (v < best.value) best.value = v;
  }
  return best;
}

}  // namespace qchain
