#include "qchain/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qchain/reverse_test.hpp"

namespace qchain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPinchingTol = 1e-9;

void finish(CheckResult& r) {
  const bool same_inf = std::isinf(r.lhs_bits) && std::isinf(r.rhs_bits) &&
                        (r.lhs_bits > 0) == (r.rhs_bits > 0);
  r.slack = same_inf ? 0.0 : r.rhs_bits - r.lhs_bits;
  r.pass = r.slack >= -r.tol;
}

double safe_log2(double q) {
  if (q <= 0.0) return -kInf;
  return std::log2(q);
}

void require_instance(const PositiveMapRep& e, const PositiveMapRep& f, const DensityOperator& rho,
                      const DensityOperator& sigma, const char* where) {
  if (e.dim_in() != f.dim_in() || e.dim_out() != f.dim_out() || rho.dim() != sigma.dim() ||
      rho.dim() != e.dim_in()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": maps and states have inconsistent dimensions");
  }
}

bool in_kind_range(DivergenceKind kind, const RenyiOrder& order) {
  return kind == DivergenceKind::Sandwiched ? order.within(0.5, kInf) : order.within(0.0, 2.0);
}

double spectrum_coefficient(const RenyiOrder& order) {
  if (order.is_infinite()) return 1.0;
  if (order.is_one()) {
    throw Error(ErrorCode::OrderOutOfRange, "spectrum term is undefined at order 1");
  }
  const double a = order.value();
  return a / (a - 1.0);
}

CheckResult make_result(std::string name, std::size_t dim, const RenyiOrder& order, const CheckOptions& opts) {
  CheckResult r;
  r.name = std::move(name);
  r.tol = opts.tol;
  r.digest.seed = opts.seed;
  r.digest.dim = dim;
  r.digest.order = order.to_string();
  return r;
}

// max_x D(E|x><x| || F|x><x|) over the columns of `basis`.
double max_basis_term(const PositiveMapRep& e, const PositiveMapRep& f, const Matrix& basis,
                      const RenyiOrder& order, DivergenceKind kind) {
  double best = -kInf;
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    const DensityOperator x = DensityOperator::pure(basis.col(i));
    best = std::max(best, divergence(kind, e.apply(x), f.apply(x), order).value);
  }
  return best;
}

}  // namespace

double CheckResult::detail(const std::string& key) const {
  for (const auto& t : details) {
    if (t.name == key) return t.value;
  }
  throw Error(ErrorCode::InvalidArgument, "CheckResult: no detail named '" + key + "'");
}

double per_copy_spectrum_term(const DensityOperator& sigma, const RenyiOrder& order, std::size_t n) {
  const double coef = spectrum_coefficient(order);
  const std::size_t count = spectrum(tensor_power(sigma, n)).count();
  return coef * std::log2(static_cast<double>(count)) / static_cast<double>(n);
}

CheckResult check_pinching_lemma(const PositiveMapRep& e, const PositiveMapRep& f,
                                 const DensityOperator& rho, const DensityOperator& sigma,
                                 const RenyiOrder& order, const CheckOptions& opts) {
  require_instance(e, f, rho, sigma, "check_pinching_lemma");
  if (order.is_one()) {
    throw Error(ErrorCode::OrderOutOfRange, "check_pinching_lemma: needs a finite order or Infinity");
  }
  CheckResult r = make_result("pinching_lemma", rho.dim(), order, opts);
  const SpectrumInfo spec = spectrum(sigma);
  const double log_count = std::log2(static_cast<double>(spec.count()));
  const DensityOperator pinched = pinch(sigma, rho);
  const DensityOperator out_rho = e.apply(rho);
  const DensityOperator out_pinched = e.apply(pinched);
  const DensityOperator out_sigma = f.apply(sigma);
  if (order.is_infinite()) {
    r.lhs_bits = sandwiched(out_rho, out_sigma, order).value;
    const double inner = sandwiched(out_pinched, out_sigma, order).value;
    r.rhs_bits = log_count + inner;
    r.details = {{"spec_count", static_cast<double>(spec.count())}, {"pinched_dmax", inner}};
  } else {
    const double a = order.value();
    const double q_lhs = sandwiched_quasi(out_rho, out_sigma, a);
    const double q_rhs = sandwiched_quasi(out_pinched, out_sigma, a);
    r.lhs_bits = safe_log2(q_lhs);
    r.rhs_bits = a * log_count + safe_log2(q_rhs);
    r.details = {{"spec_count", static_cast<double>(spec.count())},
                 {"quasi_lhs", q_lhs},
                 {"quasi_pinched", q_rhs}};
  }
  finish(r);
  return r;
}

CheckResult check_meta_chain(const PositiveMapRep& e, const PositiveMapRep& f,
                             const DensityOperator& rho, const DensityOperator& sigma,
                             const RenyiOrder& order, DivergenceKind kind, const CheckOptions& opts) {
  require_instance(e, f, rho, sigma, "check_meta_chain");
  CheckResult r = make_result(std::string("meta_chain_") + std::string(to_string(kind)), rho.dim(), order, opts);
  r.gated = in_kind_range(kind, order);
  const ReverseTest rt = build_reverse_test(rho, sigma);

  r.lhs_bits = divergence(kind, e.apply(rho), f.apply(sigma), order).value;
  const double dpq = classical_renyi(rt.p, rt.q, order).value;
  double max_term = -kInf;
  for (const auto& state : rt.gamma_states) {
    max_term = std::max(max_term, divergence(kind, e.apply(state), f.apply(state), order).value);
  }
  r.rhs_bits = dpq + max_term;
  finish(r);

  // Statement form: geometric divergence plus a channel-divergence estimate whose
  // candidate set contains every rho^x, hence at least max_term.
  ChannelDivOptions copts;
  copts.restarts = opts.statement_restarts;
  copts.refine_iters = opts.statement_refine_iters;
  copts.rng_seed = opts.seed;
  copts.seeds = rt.gamma_states;
  const double geo = geometric(rho, sigma, order).value;
  const double estimate = channel_divergence(e, f, order, kind, copts).value_bits;
  const double statement_rhs = geo + estimate;
  const bool same_inf = std::isinf(r.lhs_bits) && std::isinf(statement_rhs);
  const double statement_slack = same_inf ? 0.0 : statement_rhs - r.lhs_bits;

  r.details = {{"dpq", dpq},
               {"max_term", max_term},
               {"alphabet_size", static_cast<double>(rt.alphabet_size())},
               {"proof_slack", r.slack},
               {"statement_geometric", geo},
               {"statement_channel_estimate", estimate},
               {"statement_rhs", statement_rhs},
               {"statement_slack", statement_slack}};
  r.pass = r.pass && statement_slack >= -r.tol;
  return r;
}

CheckResult check_geometric_chain(const PositiveMapRep& e, const PositiveMapRep& f,
                                  const DensityOperator& rho, const DensityOperator& sigma,
                                  const RenyiOrder& order, const CheckOptions& opts) {
  CheckResult r = check_meta_chain(e, f, rho, sigma, order, DivergenceKind::Geometric, opts);
  r.name = "geometric_chain";
  r.details.push_back({"stabilization_used", 0.0});
  return r;
}

CheckResult check_sandwiched_chain(const PositiveMapRep& e, const PositiveMapRep& f,
                                   const DensityOperator& rho, const DensityOperator& sigma,
                                   const RenyiOrder& order, const CheckOptions& opts) {
  require_instance(e, f, rho, sigma, "check_sandwiched_chain");
  const bool asserted = order.value() > 1.0;
  if (!asserted && (!opts.exploration || order.is_one())) {
    throw Error(ErrorCode::OrderOutOfRange,
                "check_sandwiched_chain: order " + order.to_string() + " must exceed 1");
  }
  CheckResult r = make_result("sandwiched_chain", rho.dim(), order, opts);
  r.gated = asserted;

  const SpectrumInfo spec = spectrum(sigma);
  const Matrix basis = joint_eigenbasis(sigma, pinch(sigma, rho));
  const Distribution p = measure(basis, rho);
  const Distribution q = measure(basis, sigma);

  r.lhs_bits = sandwiched(e.apply(rho), f.apply(sigma), order).value;
  const double dpq = classical_renyi(p, q, order).value;
  const double max_term = max_basis_term(e, f, basis, order, DivergenceKind::Sandwiched);
  const double spec_term = spectrum_coefficient(order) * std::log2(static_cast<double>(spec.count()));
  r.rhs_bits = dpq + max_term + spec_term;
  r.details = {{"dpq", dpq},
               {"max_term", max_term},
               {"spectrum_term", spec_term},
               {"spec_count", static_cast<double>(spec.count())}};
  finish(r);
  return r;
}

CheckResult check_unital_entropy(const PositiveMapRep& e, const PositiveMapRep& f_unital,
                                 const DensityOperator& rho, const RenyiOrder& order,
                                 const CheckOptions& opts) {
  if (!f_unital.is_unital()) {
    throw Error(ErrorCode::NonUnitalCandidate, "check_unital_entropy: reference map is not unital");
  }
  require_instance(e, f_unital, rho, rho, "check_unital_entropy");
  const bool asserted = order.value() >= 1.0;
  if (!asserted && !opts.exploration) {
    throw Error(ErrorCode::OrderOutOfRange, "check_unital_entropy: order must be at least 1");
  }
  CheckResult r = make_result("unital_entropy", rho.dim(), order, opts);
  r.gated = asserted;
  const double h_in = renyi_entropy(rho, order);
  const double h_out = renyi_entropy(e.apply(rho), order);
  const double max_term = max_basis_term(e, f_unital, rho.eigen().vectors, order, DivergenceKind::Sandwiched);
  r.lhs_bits = -h_out;
  r.rhs_bits = -h_in + max_term;
  r.details = {{"entropy_in", h_in},
               {"entropy_out", h_out},
               {"max_term", max_term},
               {"entropy_gain", h_out - h_in}};
  finish(r);
  return r;
}

CheckResult check_preprocessing_chain(const PositiveMapRep& e, const PositiveMapRep& f,
                                      const DensityOperator& rho, const DensityOperator& sigma,
                                      const RenyiOrder& order, const Matrix& basis,
                                      DivergenceKind kind, const CheckOptions& opts) {
  require_instance(e, f, rho, sigma, "check_preprocessing_chain");
  if (static_cast<std::size_t>(basis.rows()) != rho.dim() || !is_orthonormal(basis)) {
    throw Error(ErrorCode::InvalidArgument, "check_preprocessing_chain: basis is not orthonormal");
  }
  CheckResult r = make_result("preprocessing_chain", rho.dim(), order, opts);
  r.gated = in_kind_range(kind, order);
  const Distribution p = measure(basis, rho);
  const Distribution q = measure(basis, sigma);
  const DensityOperator lam_rho = measurement_map(basis, rho);
  const DensityOperator lam_sigma = measurement_map(basis, sigma);
  r.lhs_bits = divergence(kind, e.apply(lam_rho), f.apply(lam_sigma), order).value;
  const double dpq = classical_renyi(p, q, order).value;
  const double max_term = max_basis_term(e, f, basis, order, kind);
  r.rhs_bits = dpq + max_term;
  r.details = {{"dpq", dpq}, {"max_term", max_term}};
  finish(r);
  return r;
}

CheckResult check_regularized_chain(const PositiveMapRep& e, const PositiveMapRep& f,
                                    const DensityOperator& rho, const DensityOperator& sigma,
                                    const RenyiOrder& order, std::size_t n, const CheckOptions& opts) {
  require_instance(e, f, rho, sigma, "check_regularized_chain");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "check_regularized_chain: n must be at least 1");
  if (!(order.value() > 1.0)) {
    throw Error(ErrorCode::OrderOutOfRange, "check_regularized_chain: order must exceed 1");
  }
  CheckResult r = make_result("regularized_chain", rho.dim(), order, opts);
  const auto nd = static_cast<double>(n);

  bool trend_ok = true;
  double previous_term = kInf;
  for (std::size_t k = 1; k <= n; ++k) {
    const double term = per_copy_spectrum_term(sigma, order, k);
    r.details.push_back({"spectrum_term_n" + std::to_string(k), term});
    if (k > 1 && !(term < previous_term)) trend_ok = false;
    previous_term = term;
    if (k < n) {
      const CheckResult partial = check_sandwiched_chain(tensor_power(e, k), tensor_power(f, k),
                                                         tensor_power(rho, k), tensor_power(sigma, k),
                                                         order, opts);
      r.details.push_back({"slack_n" + std::to_string(k), partial.slack / static_cast<double>(k)});
    }
  }
  const CheckResult full = check_sandwiched_chain(tensor_power(e, n), tensor_power(f, n), tensor_power(rho, n),
                                                  tensor_power(sigma, n), order, opts);
  r.lhs_bits = full.lhs_bits / nd;
  r.rhs_bits = full.rhs_bits / nd;
  r.details.push_back({"slack_n" + std::to_string(n), full.slack / nd});
  r.details.push_back({"dpq_per_copy", full.detail("dpq") / nd});
  r.details.push_back({"max_term_per_copy", full.detail("max_term") / nd});
  r.details.push_back({"spectrum_trend_decreasing", trend_ok ? 1.0 : 0.0});
  finish(r);
  r.pass = r.pass && trend_ok;
  return r;
}

CheckResult check_pinching_inequality(const DensityOperator& rho, const DensityOperator& sigma,
                                      const CheckOptions& opts) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "check_pinching_inequality: dimensions differ");
  }
  CheckOptions local = opts;
  local.tol = kPinchingTol;
  CheckResult r = make_result("pinching_inequality", rho.dim(), RenyiOrder::one(), local);
  r.digest.order = "-";
  const SpectrumInfo spec = spectrum(sigma);
  const Matrix scaled = static_cast<double>(spec.count()) * pinch(spec, rho.matrix());
  const LoewnerReport rep = loewner_geq(scaled, rho.matrix(), kPinchingTol);
  r.lhs_bits = 0.0;
  r.rhs_bits = rep.min_eigenvalue;
  r.details = {{"spec_count", static_cast<double>(spec.count())}, {"min_eigenvalue", rep.min_eigenvalue}};
  finish(r);
  return r;
}

CheckResult check_reverse_test(const DensityOperator& rho, const DensityOperator& sigma,
                               const RenyiOrder& order, const CheckOptions& opts) {
  CheckOptions local = opts;
  local.tol = ReverseTestReport::kGapTol;
  CheckResult r = make_result("reverse_test", rho.dim(), order, local);
  const ReverseTest rt = build_reverse_test(rho, sigma);
  const ReverseTestReport rep = verify_reverse_test(rt, rho, sigma, {order});
  const OrderGap& g = rep.gaps.front();
  r.lhs_bits = g.classical_bits;
  r.rhs_bits = g.geometric_bits;
  r.slack = -g.gap;
  r.pass = rep.pass;
  r.details = {{"gap", g.gap},
               {"gamma_p_error", rep.gamma_p_error},
               {"gamma_q_error", rep.gamma_q_error},
               {"alphabet_size", static_cast<double>(rt.alphabet_size())}};
  return r;
}

std::vector<ConjectureRow> explore_preprocessing_conjecture(const PositiveMapRep& e, const PositiveMapRep& f,
                                                            const DensityOperator& rho,
                                                            const DensityOperator& sigma,
                                                            const RenyiOrder& order, std::size_t n_max,
                                                            const ChannelDivOptions& opts) {
  require_instance(e, f, rho, sigma, "explore_preprocessing_conjecture");
  const auto sequence = regularized_sequence(e, f, order, DivergenceKind::Sandwiched, n_max, opts);
  const double input_div = sandwiched(rho, sigma, order).value;
  const double target = sandwiched(e.apply(rho), f.apply(sigma), order).value;
  std::vector<ConjectureRow> rows;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const DensityOperator rn = tensor_power(rho, n);
    const DensityOperator sn = tensor_power(sigma, n);
    const PositiveMapRep en = tensor_power(e, n);
    const PositiveMapRep fn = tensor_power(f, n);
    const Matrix basis = joint_eigenbasis(sn, pinch(sn, rn));
    const double lhs = sandwiched(en.apply(measurement_map(basis, rn)), fn.apply(measurement_map(basis, sn)), order)
                           .value /
                       static_cast<double>(n);
    ConjectureRow row;
    row.n = n;
    row.lhs_per_copy = lhs;
    row.rhs = input_div + sequence[n - 1].per_copy_bits;
    row.target = target;
    row.gap = row.rhs - row.lhs_per_copy;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qchain
