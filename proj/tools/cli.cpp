#include "cli.hpp"

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qchain/campaign.hpp"
#include "qchain/json_io.hpp"
#include "qchain/random.hpp"
#include "qchain/reverse_test.hpp"
#include "qchain/verify.hpp"

namespace qchain::cli {

namespace {

struct DivArgs {
  std::string kind = "sandwiched";
  std::string alpha;
  std::string rho, sigma, p, q;
  std::size_t restarts = 8;
  std::size_t refine_iters = 400;
  std::uint64_t seed = 0;
};

struct EntropyArgs {
  std::string alpha;
  std::string rho, p;
};

struct PairArgs {
  std::string rho, sigma;
  std::vector<std::string> alphas;
};

struct ChannelArgs {
  std::string e, f;
  std::string alpha;
  std::string kind = "sandwiched";
  std::string mode = "plain";
  std::size_t restarts = 32;
  std::size_t refine_iters = 200;
  std::uint64_t seed = 0;
};

struct VerifyArgs {
  std::string check;
  std::string rho, sigma, e, f, basis;
  std::string alpha = "2";
  std::string kind = "sandwiched";
  std::size_t n = 2;
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  double tol = kDefaultCheckTol;
  bool exploration = false;
  std::size_t statement_restarts = 0;
  std::size_t statement_refine_iters = 0;
};

struct CampaignArgs {
  std::string config;
  std::vector<std::string> outs;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
};

struct ExploreArgs {
  std::string rho, sigma, e, f;
  std::string alpha = "2";
  std::size_t n_max = 2;
  std::size_t restarts = 8;
  std::size_t refine_iters = 100;
  std::uint64_t seed = 0;
};

Json diagnostics_json(const DivDiagnostics& d) {
  Json j{{"support_violation", d.support_violation},
         {"zero_overlap", d.zero_overlap},
         {"outside_operational_range", d.outside_operational_range}};
  if (d.quasi_value) j["quasi_value"] = scalar_json(*d.quasi_value);
  return j;
}

Json div_json(const DivValue& v) {
  return Json{{"value_bits", scalar_json(v.value)}, {"diagnostics", diagnostics_json(v.diagnostics)}};
}

Distribution inline_distribution(const std::string& text) {
  std::string body = text;
  if (body.find('[') == std::string::npos) body = "[" + body + "]";
  return distribution_from_json(parse_json_text(body, "inline vector"));
}

DensityOperator load_state(const std::string& path) { return state_from_json(read_json_file(path)); }
PositiveMapRep load_map(const std::string& path) { return channel_from_json(read_json_file(path)); }

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

Json run_div(const DivArgs& a) {
  const RenyiOrder order = RenyiOrder::parse(a.alpha);
  if (a.kind == "classical") {
    if (a.p.empty() || a.q.empty()) usage("div --kind classical needs --p and --q");
    return div_json(classical_renyi(inline_distribution(a.p), inline_distribution(a.q), order));
  }
  if (a.rho.empty() || a.sigma.empty()) usage("div --kind " + a.kind + " needs --rho and --sigma");
  const DensityOperator rho = load_state(a.rho);
  const DensityOperator sigma = load_state(a.sigma);
  if (a.kind == "measured") {
    const MeasuredResult m = measured(rho, sigma, order, {a.restarts, a.refine_iters, a.seed});
    Json j = div_json(m.value);
    j["lower_bound"] = true;
    j["basis"] = matrix_to_json(m.basis);
    return j;
  }
  return div_json(divergence(parse_divergence_kind(a.kind), rho, sigma, order));
}

Json run_entropy(const EntropyArgs& a) {
  const RenyiOrder order = RenyiOrder::parse(a.alpha);
  if (!a.p.empty()) return Json{{"entropy_bits", scalar_json(renyi_entropy(inline_distribution(a.p), order))}};
  if (a.rho.empty()) usage("entropy needs --rho or --p");
  return Json{{"entropy_bits", scalar_json(renyi_entropy(load_state(a.rho), order))}};
}

Json run_pinch(const PairArgs& a) {
  const DensityOperator rho = load_state(a.rho);
  const DensityOperator sigma = load_state(a.sigma);
  const SpectrumInfo spec = spectrum(sigma);
  Json values = Json::array();
  for (double v : spec.distinct_values) values.push_back(scalar_json(v));
  return Json{{"state", state_to_json(pinch(sigma, rho))},
              {"spec_count", spec.count()},
              {"spectrum", std::move(values)}};
}

Json run_matsumoto(const PairArgs& a) {
  const DensityOperator rho = load_state(a.rho);
  const DensityOperator sigma = load_state(a.sigma);
  std::vector<RenyiOrder> orders;
  if (a.alphas.empty()) {
    orders = {RenyiOrder::finite(0.5), RenyiOrder::one(), RenyiOrder::finite(1.5), RenyiOrder::finite(2.0)};
  } else {
    for (const auto& s : a.alphas) orders.push_back(RenyiOrder::parse(s));
  }
  const ReverseTest rt = build_reverse_test(rho, sigma);
  const ReverseTestReport rep = verify_reverse_test(rt, rho, sigma, orders);
  Json lambdas = Json::array();
  for (double l : rt.lambdas) lambdas.push_back(scalar_json(l));
  Json gammas = Json::array();
  for (const auto& g : rt.gamma_states) gammas.push_back(state_to_json(g));
  Json gaps = Json::array();
  for (const auto& g : rep.gaps) {
    gaps.push_back(Json{{"alpha", g.order.to_string()},
                        {"classical_bits", scalar_json(g.classical_bits)},
                        {"geometric_bits", scalar_json(g.geometric_bits)},
                        {"gap", scalar_json(g.gap)}});
  }
  return Json{{"lambdas", std::move(lambdas)},
              {"P", distribution_to_json(rt.p)},
              {"Q", distribution_to_json(rt.q)},
              {"gamma_states", std::move(gammas)},
              {"report",
               {{"gamma_p_error", scalar_json(rep.gamma_p_error)},
                {"gamma_q_error", scalar_json(rep.gamma_q_error)},
                {"gaps", std::move(gaps)},
                {"pass", rep.pass}}}};
}

Json run_channel_div(const ChannelArgs& a) {
  const PositiveMapRep e = load_map(a.e);
  const PositiveMapRep f = load_map(a.f);
  const RenyiOrder order = RenyiOrder::parse(a.alpha);
  const DivergenceKind kind = parse_divergence_kind(a.kind);
  const ChannelMode mode = parse_channel_mode(a.mode);
  ChannelDivOptions opts;
  opts.restarts = a.restarts;
  opts.refine_iters = a.refine_iters;
  opts.rng_seed = a.seed;
  const ChannelDivEstimate est = mode == ChannelMode::Plain        ? channel_divergence(e, f, order, kind, opts)
                                 : mode == ChannelMode::Stabilized ? stabilized_channel_divergence(e, f, order, kind, opts)
                                                                   : amortized_divergence(e, f, order, kind, opts);
  Json j{{"value_bits", scalar_json(est.value_bits)},
         {"lower_bound", true},
         {"mode", std::string(to_string(est.mode))},
         {"alpha", est.order.to_string()},
         {"kind", std::string(to_string(est.kind))},
         {"restarts_used", est.restarts_used},
         {"witness", state_to_json(est.witness)}};
  if (est.witness_sigma) j["witness_sigma"] = state_to_json(*est.witness_sigma);
  return j;
}

Json check_json(const CheckResult& r) {
  Json details = Json::object();
  for (const auto& t : r.details) details[t.name] = scalar_json(t.value);
  return Json{{"check", r.name},
              {"lhs_bits", scalar_json(r.lhs_bits)},
              {"rhs_bits", scalar_json(r.rhs_bits)},
              {"slack", scalar_json(r.slack)},
              {"tol", r.tol},
              {"pass", r.pass},
              {"gated", r.gated},
              {"instance", {{"seed", r.digest.seed}, {"dim", r.digest.dim}, {"alpha", r.digest.order}}},
              {"details", std::move(details)}};
}

CheckResult run_verify(const VerifyArgs& a) {
  const std::size_t dim = a.dim;
  auto state_or = [&](const std::string& path, std::uint64_t tag, bool full_rank) {
    if (!path.empty()) return load_state(path);
    return full_rank ? random_full_rank_state(dim, substream(a.seed, {tag}))
                     : random_state(dim, dim, substream(a.seed, {tag}));
  };
  auto map_or = [&](const std::string& path, std::uint64_t tag, bool unital) {
    if (!path.empty()) return load_map(path);
    return unital ? random_unital_channel(dim, 2, substream(a.seed, {tag}))
                  : random_channel(dim, dim, 2, substream(a.seed, {tag}));
  };
  CheckOptions opts;
  opts.tol = a.tol;
  opts.exploration = a.exploration;
  opts.statement_restarts = a.statement_restarts;
  opts.statement_refine_iters = a.statement_refine_iters;
  opts.seed = a.seed;
  const RenyiOrder order = RenyiOrder::parse(a.alpha);
  const DensityOperator rho = state_or(a.rho, 3, false);
  const DensityOperator sigma = state_or(a.sigma, 1, true);

  if (a.check == "pinching_inequality") return check_pinching_inequality(rho, sigma, opts);
  if (a.check == "reverse_test") return check_reverse_test(rho, sigma, order, opts);
  const bool unital = a.check == "unital_entropy";
  const PositiveMapRep e = map_or(a.e, 4, unital);
  const PositiveMapRep f = map_or(a.f, 5, unital);
  if (a.check == "unital_entropy") return check_unital_entropy(e, f, rho, order, opts);
  if (a.check == "pinching_lemma") return check_pinching_lemma(e, f, rho, sigma, order, opts);
  if (a.check == "meta_chain") return check_meta_chain(e, f, rho, sigma, order, parse_divergence_kind(a.kind), opts);
  if (a.check == "meta_chain_sandwiched") {
    return check_meta_chain(e, f, rho, sigma, order, DivergenceKind::Sandwiched, opts);
  }
  if (a.check == "geometric_chain") return check_geometric_chain(e, f, rho, sigma, order, opts);
  if (a.check == "sandwiched_chain") return check_sandwiched_chain(e, f, rho, sigma, order, opts);
  if (a.check == "regularized_chain") return check_regularized_chain(e, f, rho, sigma, order, a.n, opts);
  if (a.check == "preprocessing_chain") {
    const Matrix basis = a.basis.empty() ? random_unitary(rho.dim(), substream(a.seed, {8}))
                                         : matrix_from_json(read_json_file(a.basis));
    return check_preprocessing_chain(e, f, rho, sigma, order, basis, parse_divergence_kind(a.kind), opts);
  }
  usage("unknown check '" + a.check + "'");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << text;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int run_campaign_cmd(const CampaignArgs& a, std::ostream& out) {
  CampaignConfig config = a.config.empty() ? CampaignConfig{} : campaign_config_from_json(read_json_file(a.config));
  if (a.trials) config.trials = *a.trials;
  if (a.seed) config.rng_seed = *a.seed;
  if (a.threads) config.threads = a.threads;
  for (const auto& path : a.outs) {
    if (!ends_with(path, ".csv") && !ends_with(path, ".json")) usage("--out must end in .csv or .json: " + path);
  }
  const CampaignReport report = run_campaign(config);
  const Json summary = campaign_json(report, config);
  for (const auto& path : a.outs) {
    write_file(path, ends_with(path, ".csv") ? campaign_csv(report) : summary.dump(2) + "\n");
  }
  Json brief = summary;
  brief.erase("config");
  out << brief.dump(2) << "\n";
  return report.all_pass() ? kExitOk : kExitCheckFailed;
}

Json run_explore(const ExploreArgs& a) {
  ChannelDivOptions opts;
  opts.restarts = a.restarts;
  opts.refine_iters = a.refine_iters;
  opts.rng_seed = a.seed;
  const auto rows = explore_preprocessing_conjecture(load_map(a.e), load_map(a.f), load_state(a.rho),
                                                     load_state(a.sigma), RenyiOrder::parse(a.alpha), a.n_max, opts);
  Json j = Json::array();
  for (const auto& r : rows) {
    j.push_back(Json{{"n", r.n},
                     {"lhs_per_copy", scalar_json(r.lhs_per_copy)},
                     {"rhs", scalar_json(r.rhs)},
                     {"target", scalar_json(r.target)},
                     {"gap", scalar_json(r.gap)}});
  }
  return Json{{"rows", std::move(j)}, {"note", "exploration only; no pass/fail"}};
}

void error_json(std::ostream& err, std::string_view code, const std::string& message) {
  err << Json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qchain: Renyi divergences, reverse tests, channel divergences and chain-rule checks", "qchain"};
  app.require_subcommand(1);

  DivArgs div;
  auto* div_cmd = app.add_subcommand("div", "Classical or quantum Renyi divergence");
  div_cmd->add_option("--kind", div.kind, "classical|sandwiched|geometric|measured")
      ->check(CLI::IsMember({"classical", "sandwiched", "geometric", "measured"}));
  div_cmd->add_option("--alpha", div.alpha, "order: decimal, 1 or inf")->required();
  div_cmd->add_option("--rho", div.rho)->check(CLI::ExistingFile);
  div_cmd->add_option("--sigma", div.sigma)->check(CLI::ExistingFile);
  div_cmd->add_option("--p", div.p, "inline vector, e.g. [0.75,0.25]");
  div_cmd->add_option("--q", div.q);
  div_cmd->add_option("--restarts", div.restarts);
  div_cmd->add_option("--refine-iters", div.refine_iters);
  div_cmd->add_option("--seed", div.seed);

  EntropyArgs ent;
  auto* ent_cmd = app.add_subcommand("entropy", "Renyi entropy of a state or distribution");
  ent_cmd->add_option("--alpha", ent.alpha)->required();
  ent_cmd->add_option("--rho", ent.rho)->check(CLI::ExistingFile);
  ent_cmd->add_option("--p", ent.p);

  PairArgs pin;
  auto* pin_cmd = app.add_subcommand("pinch", "Pinch rho with respect to sigma");
  pin_cmd->add_option("--rho", pin.rho)->required()->check(CLI::ExistingFile);
  pin_cmd->add_option("--sigma", pin.sigma)->required()->check(CLI::ExistingFile);

  PairArgs mat;
  auto* mat_cmd = app.add_subcommand("matsumoto", "Optimal reverse test and its verification");
  mat_cmd->add_option("--rho", mat.rho)->required()->check(CLI::ExistingFile);
  mat_cmd->add_option("--sigma", mat.sigma)->required()->check(CLI::ExistingFile);
  mat_cmd->add_option("--alpha", mat.alphas, "orders to verify (repeatable)");

  ChannelArgs ch;
  auto* ch_cmd = app.add_subcommand("channel-div", "Channel divergence lower bound with witness");
  ch_cmd->add_option("--e", ch.e)->required()->check(CLI::ExistingFile);
  ch_cmd->add_option("--f", ch.f)->required()->check(CLI::ExistingFile);
  ch_cmd->add_option("--alpha", ch.alpha)->required();
  ch_cmd->add_option("--kind", ch.kind)->check(CLI::IsMember({"sandwiched", "geometric"}));
  ch_cmd->add_option("--mode", ch.mode)->check(CLI::IsMember({"plain", "stab", "stabilized", "amortized"}));
  ch_cmd->add_option("--restarts", ch.restarts);
  ch_cmd->add_option("--refine-iters", ch.refine_iters);
  ch_cmd->add_option("--seed", ch.seed);

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand("verify", "Run one chain-rule check on a file or seeded random instance");
  ver_cmd->add_option("check", ver.check)->required();
  ver_cmd->add_option("--rho", ver.rho)->check(CLI::ExistingFile);
  ver_cmd->add_option("--sigma", ver.sigma)->check(CLI::ExistingFile);
  ver_cmd->add_option("--e", ver.e)->check(CLI::ExistingFile);
  ver_cmd->add_option("--f", ver.f)->check(CLI::ExistingFile);
  ver_cmd->add_option("--basis", ver.basis, "matrix JSON with orthonormal columns")->check(CLI::ExistingFile);
  ver_cmd->add_option("--alpha", ver.alpha);
  ver_cmd->add_option("--kind", ver.kind)->check(CLI::IsMember({"sandwiched", "geometric"}));
  ver_cmd->add_option("--n", ver.n, "tensor power for regularized_chain");
  ver_cmd->add_option("--dim", ver.dim, "dimension of generated instances")->check(CLI::Range(2, 8));
  ver_cmd->add_option("--seed", ver.seed);
  ver_cmd->add_option("--tol", ver.tol);
  ver_cmd->add_flag("--exploration", ver.exploration);
  ver_cmd->add_option("--statement-restarts", ver.statement_restarts);
  ver_cmd->add_option("--statement-refine-iters", ver.statement_refine_iters);

  CampaignArgs camp;
  auto* camp_cmd = app.add_subcommand("campaign", "Randomized campaign over all checks");
  camp_cmd->add_option("--config", camp.config)->check(CLI::ExistingFile);
  camp_cmd->add_option("--out", camp.outs, "report path, .csv or .json (repeatable)");
  camp_cmd->add_option("--trials", camp.trials);
  camp_cmd->add_option("--seed", camp.seed);
  camp_cmd->add_option("--threads", camp.threads);

  ExploreArgs exp;
  auto* exp_cmd = app.add_subcommand("explore-conjecture", "Both sides of the preprocessing conjecture (no pass/fail)");
  exp_cmd->add_option("--rho", exp.rho)->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--sigma", exp.sigma)->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--e", exp.e)->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--f", exp.f)->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--alpha", exp.alpha);
  exp_cmd->add_option("--n-max", exp.n_max)->check(CLI::Range(1, 3));
  exp_cmd->add_option("--restarts", exp.restarts);
  exp_cmd->add_option("--refine-iters", exp.refine_iters);
  exp_cmd->add_option("--seed", exp.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_json(err, "Usage", e.what());
    return kExitUsage;
  }

  try {
    Json result;
    if (*div_cmd) {
      result = run_div(div);
    } else if (*ent_cmd) {
      result = run_entropy(ent);
    } else if (*pin_cmd) {
      result = run_pinch(pin);
    } else if (*mat_cmd) {
      result = run_matsumoto(mat);
      out << result.dump(2) << "\n";
      return result["report"]["pass"].get<bool>() ? kExitOk : kExitCheckFailed;
    } else if (*ch_cmd) {
      result = run_channel_div(ch);
    } else if (*ver_cmd) {
      const CheckResult r = run_verify(ver);
      out << check_json(r).dump(2) << "\n";
      return (!r.gated || r.pass) ? kExitOk : kExitCheckFailed;
    } else if (*camp_cmd) {
      return run_campaign_cmd(camp, out);
    } else if (*exp_cmd) {
      result = run_explore(exp);
    }
    out << result.dump(2) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    error_json(err, to_string(e.code()), e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    error_json(err, "InternalError", e.what());
    return kExitUsage;
  }
}

}  // namespace qchain::cli
