#include "qchain/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

#include "qchain/random.hpp"

namespace qchain {

namespace {

struct Task {
  std::size_t check_index;
  MapFamily family;
  std::size_t dim;
  std::size_t order_index;  // orders.size() for order-free checks
  std::size_t trial;
};

bool uses_maps(const std::string& check) {
  return check != "reverse_test" && check != "pinching_inequality";
}

bool order_free(const std::string& check) { return check == "pinching_inequality"; }

// The transpose family only enters checks stated for positive maps.
bool accepts_family(const std::string& check, MapFamily f) {
  if (f == MapFamily::Cptp) return true;
  return uses_maps(check) && check != "unital_entropy";
}

PositiveMapRep draw_map(std::size_t dim, MapFamily family, std::uint64_t seed) {
  // Mostly environments of size >= dim so outputs are generically full rank; one draw
  // in four takes a small environment and exercises the support conventions.
  const std::uint64_t r = mix64(seed ^ 0x5eedULL);
  const std::size_t d_env = (r % 4 == 0) ? 1 + static_cast<std::size_t>((r >> 8) % dim) : dim + (r >> 8) % 2;
  PositiveMapRep e = random_channel(dim, dim, d_env, seed);
  return family == MapFamily::TransposePositive ? e.with_pre_transpose(true) : e;
}

CheckResult run_one(const std::string& check, MapFamily family, std::size_t dim, const RenyiOrder& order,
                    std::uint64_t seed, const CampaignConfig& config) {
  CheckOptions opts;
  opts.tol = config.tol;
  opts.seed = seed;
  const DensityOperator sigma = random_full_rank_state(dim, substream(seed, {1}));
  const std::size_t rank = 1 + static_cast<std::size_t>(mix64(substream(seed, {2})) % dim);
  const DensityOperator rho = random_state(dim, rank, substream(seed, {3}));

  if (check == "pinching_inequality") return check_pinching_inequality(rho, sigma, opts);
  if (check == "reverse_test") return check_reverse_test(rho, sigma, order, opts);
  if (check == "unital_entropy") {
    const std::size_t ne = 1 + static_cast<std::size_t>(mix64(substream(seed, {4})) % 3);
    const std::size_t nf = 1 + static_cast<std::size_t>(mix64(substream(seed, {5})) % 3);
    const PositiveMapRep e = random_unital_channel(dim, ne, substream(seed, {6}));
    const PositiveMapRep f = random_unital_channel(dim, nf, substream(seed, {7}));
    return check_unital_entropy(e, f, rho, order, opts);
  }

  const PositiveMapRep e = draw_map(dim, family, substream(seed, {4}));
  const PositiveMapRep f = draw_map(dim, family, substream(seed, {5}));
  if (check == "pinching_lemma") return check_pinching_lemma(e, f, rho, sigma, order, opts);
  if (check == "meta_chain_sandwiched") {
    return check_meta_chain(e, f, rho, sigma, order, DivergenceKind::Sandwiched, opts);
  }
  if (check == "geometric_chain") return check_geometric_chain(e, f, rho, sigma, order, opts);
  if (check == "sandwiched_chain") return check_sandwiched_chain(e, f, rho, sigma, order, opts);
  if (check == "regularized_chain") {
    return check_regularized_chain(e, f, rho, sigma, order, config.regularized_n, opts);
  }
  if (check == "preprocessing_chain") {
    const Matrix basis = random_unitary(dim, substream(seed, {8}));
    return check_preprocessing_chain(e, f, rho, sigma, order, basis, DivergenceKind::Sandwiched, opts);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown check '" + check + "'");
}

RenyiOrder order_from_json(const Json& v) {
  if (v.is_string()) return RenyiOrder::parse(v.get<std::string>());
  if (v.is_number()) {
    const double a = v.get<double>();
    if (a == 1.0) return RenyiOrder::one();
    if (std::isinf(a)) return RenyiOrder::infinity();
    return RenyiOrder::finite(a);
  }
  throw Error(ErrorCode::MalformedInput, "campaign config: orders must be numbers or strings");
}

Json order_to_json(const RenyiOrder& o) {
  if (o.is_infinite()) return "inf";
  return o.value();
}

std::size_t positive_count(const Json& v, const char* key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorCode::MalformedInput, std::string("campaign config: '") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

std::string_view to_string(MapFamily f) { return f == MapFamily::Cptp ? "cptp" : "transpose_positive"; }

MapFamily parse_map_family(std::string_view text) {
  if (text == "cptp") return MapFamily::Cptp;
  if (text == "transpose_positive" || text == "transpose") return MapFamily::TransposePositive;
  throw Error(ErrorCode::InvalidArgument, "unknown map family '" + std::string(text) + "'");
}

const std::vector<std::string>& campaign_check_names() {
  static const std::vector<std::string> names{
      "pinching_inequality", "reverse_test",      "pinching_lemma",    "meta_chain_sandwiched",
      "geometric_chain",     "sandwiched_chain",  "regularized_chain", "unital_entropy",
      "preprocessing_chain"};
  return names;
}

bool check_accepts_order(const std::string& check, const RenyiOrder& order) {
  const double inf = std::numeric_limits<double>::infinity();
  if (check == "pinching_inequality") return true;
  if (check == "pinching_lemma") return !order.is_one();
  if (check == "meta_chain_sandwiched" || check == "preprocessing_chain") return order.within(0.5, inf);
  if (check == "geometric_chain" || check == "reverse_test") return order.within(0.0, 2.0);
  if (check == "sandwiched_chain" || check == "regularized_chain") return order.value() > 1.0;
  if (check == "unital_entropy") return order.value() >= 1.0;
  return false;
}

CampaignConfig campaign_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedInput, "campaign config must be a JSON object");
  static const std::set<std::string> known{"checks", "trials", "dims",          "orders", "map_families",
                                           "map_family", "rng_seed", "tol",  "regularized_n", "threads"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::MalformedInput, "campaign config: unknown field '" + key + "'");
  }
  CampaignConfig c;
  if (j.contains("checks")) {
    c.checks.clear();
    for (const auto& v : j.at("checks")) {
      if (!v.is_string()) throw Error(ErrorCode::MalformedInput, "campaign config: checks must be strings");
      const std::string name = v.get<std::string>();
      const auto& all = campaign_check_names();
      if (std::find(all.begin(), all.end(), name) == all.end()) {
        throw Error(ErrorCode::InvalidArgument, "campaign config: unknown check '" + name + "'");
      }
      c.checks.push_back(name);
    }
  }
  if (j.contains("trials")) c.trials = positive_count(j.at("trials"), "trials");
  if (j.contains("dims")) {
    c.dims.clear();
    for (const auto& v : j.at("dims")) {
      const std::size_t d = positive_count(v, "dims");
      if (d < 2 || d > 8) throw Error(ErrorCode::InvalidArgument, "campaign config: dims must lie in [2, 8]");
      c.dims.push_back(d);
    }
  }
  if (j.contains("orders")) {
    c.orders.clear();
    for (const auto& v : j.at("orders")) c.orders.push_back(order_from_json(v));
  }
  if (j.contains("map_families") && j.contains("map_family")) {
    throw Error(ErrorCode::MalformedInput, "campaign config: give map_family or map_families, not both");
  }
  const char* fam_key = j.contains("map_family") ? "map_family" : "map_families";
  if (j.contains(fam_key)) {
    c.map_families.clear();
    // a single string is accepted as a one-element list
    const Json fams = j.at(fam_key).is_string() ? Json::array({j.at(fam_key)}) : j.at(fam_key);
    for (const auto& v : fams) {
      if (!v.is_string()) throw Error(ErrorCode::MalformedInput, "campaign config: map_families must be strings");
      c.map_families.push_back(parse_map_family(v.get<std::string>()));
    }
  }
  if (j.contains("rng_seed")) {
    if (!j.at("rng_seed").is_number_unsigned() && !j.at("rng_seed").is_number_integer()) {
      throw Error(ErrorCode::MalformedInput, "campaign config: rng_seed must be an unsigned integer");
    }
    c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  }
  if (j.contains("tol")) {
    if (!j.at("tol").is_number() || !(j.at("tol").get<double>() > 0.0)) {
      throw Error(ErrorCode::MalformedInput, "campaign config: tol must be a positive number");
    }
    c.tol = j.at("tol").get<double>();
  }
  if (j.contains("regularized_n")) {
    c.regularized_n = positive_count(j.at("regularized_n"), "regularized_n");
    if (c.regularized_n < 1) throw Error(ErrorCode::InvalidArgument, "campaign config: regularized_n must be >= 1");
  }
  if (j.contains("threads")) c.threads = positive_count(j.at("threads"), "threads");
  return c;
}

Json campaign_config_to_json(const CampaignConfig& c) {
  Json orders = Json::array();
  for (const auto& o : c.orders) orders.push_back(order_to_json(o));
  Json families = Json::array();
  for (auto f : c.map_families) families.push_back(std::string(to_string(f)));
  return Json{{"checks", c.checks},   {"trials", c.trials},          {"dims", c.dims},
              {"orders", orders},     {"map_families", families},    {"rng_seed", c.rng_seed},
              {"tol", c.tol},         {"regularized_n", c.regularized_n}};
}

bool CampaignReport::all_pass() const {
  return std::all_of(summaries.begin(), summaries.end(),
                     [](const CheckSummary& s) { return s.passed == s.trials; });
}

std::size_t resolve_thread_count(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QCHAIN_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CampaignReport run_campaign(const CampaignConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Task> tasks;
  std::vector<std::string> labels;  // per task, check name with family suffix
  for (std::size_t ci = 0; ci < config.checks.size(); ++ci) {
    const std::string& check = config.checks[ci];
    for (MapFamily family : config.map_families) {
      if (!accepts_family(check, family)) continue;
      // Checks without maps run once, under whichever family comes first.
      if (!uses_maps(check) && family != config.map_families.front()) continue;
      for (std::size_t dim : config.dims) {
        const std::size_t n_orders = order_free(check) ? 1 : config.orders.size();
        for (std::size_t oi = 0; oi < n_orders; ++oi) {
          if (!order_free(check) && !check_accepts_order(check, config.orders[oi])) continue;
          for (std::size_t t = 0; t < config.trials; ++t) {
            tasks.push_back({ci, family, dim, order_free(check) ? config.orders.size() : oi, t});
          }
        }
      }
    }
  }

  CampaignReport report;
  report.rows.resize(tasks.size());
  report.threads_used = std::min<std::size_t>(resolve_thread_count(config.threads),
                                              std::max<std::size_t>(1, tasks.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      const Task& t = tasks[i];
      const std::string& check = config.checks[t.check_index];
      CampaignRow& row = report.rows[i];
      row.check = check;
      if (uses_maps(check) && t.family == MapFamily::TransposePositive) row.check += ":transpose";
      row.dim = t.dim;
      row.trial = t.trial;
      const bool free = t.order_index == config.orders.size();
      const RenyiOrder order = free ? RenyiOrder::one() : config.orders[t.order_index];
      row.alpha = free ? "-" : order.to_string();
      row.seed = substream(config.rng_seed, {static_cast<std::uint64_t>(t.check_index),
                                             static_cast<std::uint64_t>(t.family), t.dim, t.order_index, t.trial});
      try {
        const CheckResult r = run_one(check, t.family, t.dim, order, row.seed, config);
        row.lhs_bits = r.lhs_bits;
        row.rhs_bits = r.rhs_bits;
        row.slack = r.slack;
        row.pass = r.pass;
      } catch (const std::exception& e) {
        row.slack = std::numeric_limits<double>::quiet_NaN();
        row.pass = false;
        row.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < report.threads_used; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const CampaignRow& row = report.rows[i];
    auto it = std::find_if(report.summaries.begin(), report.summaries.end(),
                           [&](const CheckSummary& s) { return s.check == row.check; });
    if (it == report.summaries.end()) {
      report.summaries.push_back({row.check, 0, 0, std::numeric_limits<double>::infinity(), {}});
      it = std::prev(report.summaries.end());
    }
    ++it->trials;
    if (row.pass) {
      ++it->passed;
    } else {
      it->failing_rows.push_back(i);
    }
    if (std::isnan(row.slack) || row.slack < it->worst_slack) it->worst_slack = row.slack;
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string campaign_csv(const CampaignReport& report) {
  std::ostringstream out;
  out << "check,dim,alpha,trial,lhs_bits,rhs_bits,slack,pass\n";
  for (const auto& r : report.rows) {
    out << r.check << ',' << r.dim << ',' << r.alpha << ',' << r.trial << ',' << format_scalar(r.lhs_bits) << ','
        << format_scalar(r.rhs_bits) << ',' << format_scalar(r.slack) << ',' << (r.pass ? 1 : 0) << '\n';
  }
  return out.str();
}

Json campaign_json(const CampaignReport& report, const CampaignConfig& config) {
  Json checks = Json::array();
  for (const auto& s : report.summaries) {
    Json failing = Json::array();
    for (std::size_t i : s.failing_rows) {
      const CampaignRow& r = report.rows[i];
      Json f{{"seed", r.seed}, {"dim", r.dim}, {"alpha", r.alpha}, {"trial", r.trial}, {"slack", scalar_json(r.slack)}};
      if (!r.error.empty()) f["error"] = r.error;
      failing.push_back(std::move(f));
    }
    checks.push_back(Json{{"check", s.check},
                          {"trials", s.trials},
                          {"passed", s.passed},
                          {"failed", s.trials - s.passed},
                          {"worst_slack", s.trials ? scalar_json(s.worst_slack) : Json(nullptr)},
                          {"failing", std::move(failing)}});
  }
  return Json{{"config", campaign_config_to_json(config)},
              {"checks", std::move(checks)},
              {"total_trials", report.rows.size()},
              {"all_pass", report.all_pass()},
              {"threads", report.threads_used},
              {"runtime_seconds", scalar_json(report.runtime_seconds)}};
}

}  // namespace qchain
