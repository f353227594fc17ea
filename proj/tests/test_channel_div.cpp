#include "doctest.h"
#include "qchain/channel_div.hpp"
#include "qchain/error.hpp"
#include "support.hpp"

using namespace qchain;

namespace {

ChannelDivOptions small_budget(std::uint64_t seed, std::size_t restarts = 6, std::size_t refine = 150) {
  ChannelDivOptions o;
  o.restarts = restarts;
  o.refine_iters = refine;
  o.rng_seed = seed;
  return o;
}

// Classical channel divergence by brute force over the simplex at step h.
double simplex_grid(const std::vector<std::vector<double>>& we, const std::vector<std::vector<double>>& wf,
                    double alpha, double h = 0.01) {
  const std::size_t nx = we.front().size(), ny = we.size();
  double best = -qtest::kInf;
  const int steps = static_cast<int>(std::lround(1.0 / h));
  auto eval = [&](const std::vector<double>& p) {
    std::vector<double> pe(ny, 0.0), pf(ny, 0.0);
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x) {
        pe[y] += we[y][x] * p[x];
        pf[y] += wf[y][x] * p[x];
      }
    best = std::max(best, qtest::classical_oracle(pe, pf, alpha));
  };
  if (nx == 2) {
    for (int i = 0; i <= steps; ++i) eval({i * h, 1.0 - i * h});
  } else {
    for (int i = 0; i <= steps; ++i)
      for (int j = 0; i + j <= steps; ++j) eval({i * h, j * h, 1.0 - (i + j) * h});
  }
  return best;
}

// |a - b| with equal infinities counted as agreement.
double gap(double a, double b) {
  if (std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0)) return 0.0;
  return std::abs(a - b);
}

std::vector<std::vector<double>> random_stochastic(qtest::Gen& g, std::size_t ny, std::size_t nx) {
  std::vector<std::vector<double>> w(ny, std::vector<double>(nx));
  for (std::size_t x = 0; x < nx; ++x) {
    const auto col = qtest::simplex_point(g, ny, 0.3);
    for (std::size_t y = 0; y < ny; ++y) w[y][x] = col[y];
  }
  return w;
}

}  // namespace

TEST_CASE("equal channels give zero in every mode") {
  qtest::Gen g(300);
  const PositiveMapRep e = qtest::channel(g, 2, 2);
  for (const auto& a : {RenyiOrder::finite(0.7), RenyiOrder::one(), RenyiOrder::finite(2.0), RenyiOrder::infinity()}) {
    CHECK(std::abs(channel_divergence(e, e, a, DivergenceKind::Sandwiched, small_budget(1)).value_bits) <= 1e-9);
    CHECK(std::abs(stabilized_channel_divergence(e, e, a, DivergenceKind::Sandwiched, small_budget(1, 2, 40)).value_bits) <= 1e-9);
    CHECK(std::abs(amortized_divergence(e, e, a, DivergenceKind::Sandwiched, small_budget(1, 2, 40)).value_bits) <= 1e-9);
  }
  const PositiveMapRep u = PositiveMapRep::unitary(qtest::unitary(g, 2));
  CHECK(std::abs(stabilized_channel_divergence(u, u, RenyiOrder::finite(2), DivergenceKind::Geometric,
                                               small_budget(2, 2, 40)).value_bits) <= 1e-9);
}

TEST_CASE("identity versus depolarizing at order infinity is one bit") {
  const PositiveMapRep id = PositiveMapRep::identity(2);
  const PositiveMapRep dep = PositiveMapRep::fully_depolarizing(2);
  // Witness-grid oracle: D_inf(psi || I/2) over a grid of pure qubit states.
  double grid = -qtest::kInf;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j < 80; ++j) {
      const double th = M_PI * i / 40, ph = M_PI * j / 40;
      Eigen::Vector2cd psi(std::cos(th / 2), std::polar(std::sin(th / 2), ph));
      grid = std::max(grid, sandwiched(DensityOperator::pure(psi), DensityOperator::maximally_mixed(2),
                                       RenyiOrder::infinity()).value);
    }
  CHECK(grid == doctest::Approx(1.0).epsilon(1e-9));
  const ChannelDivEstimate est = channel_divergence(id, dep, RenyiOrder::infinity(), DivergenceKind::Sandwiched);
  CHECK(std::abs(est.value_bits - grid) <= 1e-3);
  CHECK(std::abs(reevaluate(est, id, dep) - est.value_bits) <= 1e-8);
}

TEST_CASE("classical channel embedding matches the simplex grid") {
  qtest::Gen g(301);
  for (int t = 0; t < 6; ++t) {
    const std::size_t nx = 2 + g.index(2), ny = 2 + g.index(2);
    const auto we = random_stochastic(g, ny, nx);
    const auto wf = random_stochastic(g, ny, nx);
    for (double a : {0.7, 2.0}) {
      const double oracle = simplex_grid(we, wf, a);
      const ChannelDivEstimate est = channel_divergence(PositiveMapRep::classical(we), PositiveMapRep::classical(wf),
                                                        RenyiOrder::finite(a), DivergenceKind::Sandwiched,
                                                        small_budget(static_cast<std::uint64_t>(t), 8, 200));
      CHECK(std::abs(est.value_bits - oracle) <= 2e-3);
    }
  }
}

TEST_CASE("stabilized estimate dominates the plain one") {
  const PositiveMapRep id = PositiveMapRep::identity(2);
  const PositiveMapRep dep = PositiveMapRep::fully_depolarizing(2);
  const RenyiOrder two = RenyiOrder::finite(2.0);
  const ChannelDivEstimate plain = channel_divergence(id, dep, two, DivergenceKind::Sandwiched, small_budget(3));
  const ChannelDivEstimate stab = stabilized_channel_divergence(id, dep, two, DivergenceKind::Sandwiched, small_budget(3));
  CHECK(stab.value_bits >= plain.value_bits - 1e-9);
  // The maximally entangled input gives D2(Phi || I/4) = 2 bits.
  CHECK(stab.value_bits >= 2.0 - 1e-9);
  CHECK(stab.witness.dim() == 4);

  qtest::Gen g(302);
  for (int t = 0; t < 5; ++t) {
    const PositiveMapRep e = qtest::channel(g, 2, 2), f = qtest::channel(g, 2, 4);
    const ChannelDivEstimate p = channel_divergence(e, f, two, DivergenceKind::Sandwiched, small_budget(4));
    ChannelDivOptions seeded = small_budget(4, 2, 60);
    seeded.seeds = {p.witness};
    const ChannelDivEstimate s = stabilized_channel_divergence(e, f, two, DivergenceKind::Sandwiched, seeded);
    CHECK(s.value_bits >= p.value_bits - 1e-9);
    ChannelDivOptions aseeded = small_budget(4, 2, 60);
    aseeded.seeds = {s.witness};
    const ChannelDivEstimate am = amortized_divergence(e, f, two, DivergenceKind::Sandwiched, aseeded);
    CHECK(am.value_bits >= s.value_bits - 1e-9);
    REQUIRE(am.witness_sigma.has_value());
    CHECK(gap(reevaluate(am, e, f), am.value_bits) <= 1e-8);
    CHECK(gap(reevaluate(s, e, f), s.value_bits) <= 1e-8);
  }
}

TEST_CASE("estimates are self-certifying") {
  qtest::Gen g(303);
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(g.index(2));
    const PositiveMapRep e = qtest::channel(g, d, 2), f = qtest::channel(g, d, 3);
    for (auto kind : {DivergenceKind::Sandwiched, DivergenceKind::Geometric}) {
      const RenyiOrder a = kind == DivergenceKind::Sandwiched ? RenyiOrder::infinity() : RenyiOrder::finite(1.5);
      const ChannelDivEstimate est = channel_divergence(e, f, a, kind, small_budget(5 + t, 3, 80));
      CHECK(gap(reevaluate(est, e, f), est.value_bits) <= 1e-8);
      CHECK(est.restarts_used == 3);
    }
  }
}

TEST_CASE("more restarts never lower the estimate") {
  qtest::Gen g(304);
  for (int t = 0; t < 5; ++t) {
    const PositiveMapRep e = qtest::channel(g, 2, 2), f = qtest::channel(g, 2, 2);
    const double few = channel_divergence(e, f, RenyiOrder::finite(2), DivergenceKind::Sandwiched, small_budget(9, 4)).value_bits;
    const double many = channel_divergence(e, f, RenyiOrder::finite(2), DivergenceKind::Sandwiched, small_budget(9, 8)).value_bits;
    CHECK(many >= few);
  }
}

TEST_CASE("order monotonicity transfers on a shared candidate") {
  qtest::Gen g(305);
  for (int t = 0; t < 5; ++t) {
    const PositiveMapRep e = qtest::channel(g, 2, 2), f = qtest::channel(g, 2, 2);
    const ChannelDivEstimate lo = channel_divergence(e, f, RenyiOrder::finite(1.5), DivergenceKind::Sandwiched, small_budget(10));
    ChannelDivOptions seeded = small_budget(10);
    seeded.seeds = {lo.witness};
    const ChannelDivEstimate hi = channel_divergence(e, f, RenyiOrder::finite(3.0), DivergenceKind::Sandwiched, seeded);
    CHECK(hi.value_bits >= lo.value_bits - 1e-8);
  }
}

TEST_CASE("regularized sequence") {
  qtest::Gen g(306);
  const PositiveMapRep e = qtest::channel(g, 2, 2);
  const auto zero = regularized_sequence(e, e, RenyiOrder::finite(2), DivergenceKind::Sandwiched, 2, small_budget(1, 2, 40));
  for (const auto& term : zero) CHECK(std::abs(term.per_copy_bits) <= 1e-9);

  const PositiveMapRep id = PositiveMapRep::identity(2);
  const PositiveMapRep dep = PositiveMapRep::fully_depolarizing(2);
  const ChannelDivOptions opts = small_budget(7, 4, 100);
  const auto seq = regularized_sequence(id, dep, RenyiOrder::infinity(), DivergenceKind::Sandwiched, 2, opts);
  REQUIRE(seq.size() == 2);
  const double plain = channel_divergence(id, dep, RenyiOrder::infinity(), DivergenceKind::Sandwiched, opts).value_bits;
  CHECK(seq[0].per_copy_bits == doctest::Approx(plain).epsilon(1e-12));
  CHECK(seq[1].per_copy_bits >= seq[0].per_copy_bits / 2 - 1e-8);
  CHECK(seq[1].per_copy_bits >= seq[0].per_copy_bits - 1e-8);
  CHECK(seq[1].estimate.witness.dim() == 4);

  try {
    regularized_sequence(id, dep, RenyiOrder::finite(2), DivergenceKind::Sandwiched, 7, opts);
    FAIL("dimension guard did not fire");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DimensionTooLarge);
  }
}

TEST_CASE("unital reference bound") {
  qtest::Gen g(307);
  const PositiveMapRep e = qtest::unital_channel(g, 2, 3);
  const ChannelDivOptions opts = small_budget(8, 3, 60);
  CHECK(std::abs(unital_upper_ref(e, RenyiOrder::finite(2), {e}, opts).value) <= 1e-9);
  const DivValue dep = unital_upper_ref(e, RenyiOrder::finite(2), {PositiveMapRep::fully_depolarizing(2)}, opts);
  CHECK(std::isfinite(dep.value));
  CHECK(dep.value <= 1.0 + 1e-9);
  const PositiveMapRep other = qtest::unital_channel(g, 2, 2);
  const double single = channel_divergence(e, other, RenyiOrder::finite(2), DivergenceKind::Sandwiched, opts).value_bits;
  CHECK(unital_upper_ref(e, RenyiOrder::finite(2), {other}, opts).value == doctest::Approx(single).epsilon(1e-12));
  try {
    unital_upper_ref(e, RenyiOrder::finite(2), {qtest::channel(g, 2, 2)}, opts);
    FAIL("non-unital candidate accepted");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NonUnitalCandidate);
  }
}

TEST_CASE("dimension checks and transpose maps") {
  qtest::Gen g(308);
  const PositiveMapRep e2 = qtest::channel(g, 2, 2), e3 = qtest::channel(g, 3, 2);
  CHECK_THROWS_AS(channel_divergence(e2, e3, RenyiOrder::finite(2), DivergenceKind::Sandwiched), Error);
  const PositiveMapRep t = e2.with_pre_transpose(true);
  CHECK_NOTHROW(channel_divergence(t, e2, RenyiOrder::finite(2), DivergenceKind::Sandwiched, small_budget(1, 1, 10)));
  CHECK_THROWS_AS(stabilized_channel_divergence(t, e2, RenyiOrder::finite(2), DivergenceKind::Sandwiched), Error);
}
