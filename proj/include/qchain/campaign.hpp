#pragma once

// Randomized campaigns over the verify checks. Every trial draws its instance from a
// substream keyed by (check, family, dim, order, trial), so reports do not depend on
// the number of worker threads.

#include <cstdint>
#include <string>
#include <vector>

#include "qchain/json_io.hpp"
#include "qchain/verify.hpp"

namespace qchain {

enum class MapFamily { Cptp, TransposePositive };

std::string_view to_string(MapFamily f);
MapFamily parse_map_family(std::string_view text);

/// Check names understood by the campaign runner.
const std::vector<std::string>& campaign_check_names();

struct CampaignConfig {
  std::vector<std::string> checks = campaign_check_names();
  std::size_t trials = 200;
  std::vector<std::size_t> dims{2, 3};
  std::vector<RenyiOrder> orders{RenyiOrder::finite(0.6), RenyiOrder::one(),      RenyiOrder::finite(1.5),
                                 RenyiOrder::finite(2.0), RenyiOrder::finite(4.0), RenyiOrder::infinity()};
  std::vector<MapFamily> map_families{MapFamily::Cptp, MapFamily::TransposePositive};
  std::uint64_t rng_seed = 20240611;
  double tol = kDefaultCheckTol;
  std::size_t regularized_n = 2;
  std::size_t threads = 0;  // 0: QCHAIN_THREADS, else hardware concurrency
};

/// Reads a config object. Missing fields keep their defaults; unknown fields,
/// unknown check names and bad values raise MalformedInput or InvalidArgument.
CampaignConfig campaign_config_from_json(const Json& j);
Json campaign_config_to_json(const CampaignConfig& c);

/// Whether `check` is asserted at `order`; orders outside are skipped by campaigns.
bool check_accepts_order(const std::string& check, const RenyiOrder& order);

struct CampaignRow {
  std::string check;  // with ":transpose" suffix for the transpose-positive family
  std::size_t dim = 0;
  std::string alpha;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double lhs_bits = 0.0;
  double rhs_bits = 0.0;
  double slack = 0.0;
  bool pass = false;
  std::string error;  // set when the check threw
};

struct CheckSummary {
  std::string check;
  std::size_t trials = 0;
  std::size_t passed = 0;
  double worst_slack = 0.0;
  std::vector<std::size_t> failing_rows;  // indices into CampaignReport::rows
};

struct CampaignReport {
  std::vector<CampaignRow> rows;
  std::vector<CheckSummary> summaries;
  double runtime_seconds = 0.0;
  std::size_t threads_used = 1;

  bool all_pass() const;
};

/// QCHAIN_THREADS if set and positive, else hardware concurrency (at least 1).
std::size_t resolve_thread_count(std::size_t requested = 0);

CampaignReport run_campaign(const CampaignConfig& config);

/// One line per trial: check,dim,alpha,trial,lhs_bits,rhs_bits,slack,pass.
std::string campaign_csv(const CampaignReport& report);
Json campaign_json(const CampaignReport& report, const CampaignConfig& config);

}  // namespace qchain
