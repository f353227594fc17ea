#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "qchain/json_io.hpp"

using namespace qchain;

namespace {

struct Run {
  int code;
  std::string out, err;
  Json json() const { return parse_json_text(out, "stdout"); }
  Json error() const { return parse_json_text(err, "stderr"); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qchain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(QCHAIN_SOURCE_DIR) + "/data/" + name; }

}  // namespace

TEST_CASE("div on shipped states") {
  const Run r = run({"div", "--kind", "sandwiched", "--alpha", "2", "--rho", data("plus.json"), "--sigma", data("mixed.json")});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.json().at("value_bits").get<double>() == 1.0);
  const Run g = run({"div", "--kind", "geometric", "--alpha", "2", "--rho", data("plus.json"), "--sigma", data("mixed.json")});
  CHECK(g.json().at("value_bits").get<double>() == 1.0);
  const Run m = run({"div", "--kind", "measured", "--alpha", "2", "--rho", data("plus.json"), "--sigma", data("mixed.json")});
  REQUIRE(m.code == cli::kExitOk);
  CHECK(m.json().at("value_bits").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m.json().contains("basis"));
}

TEST_CASE("div on inline distributions") {
  const Run r = run({"div", "--kind", "classical", "--alpha", "1", "--p", "[0.75,0.25]", "--q", "[0.5,0.5]"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.json().at("value_bits").get<double>() == doctest::Approx(0.18872187554).epsilon(1e-10));
  const Run inf = run({"div", "--kind", "classical", "--alpha", "inf", "--p", "0.75,0.25", "--q", "0.5,0.5"});
  CHECK(inf.json().at("value_bits").get<double>() == doctest::Approx(std::log2(1.5)).epsilon(1e-12));
  const Run off = run({"div", "--kind", "classical", "--alpha", "2", "--p", "[1,0]", "--q", "[0,1]"});
  CHECK(off.json().at("value_bits") == Json("inf"));
}

TEST_CASE("entropy, pinch and matsumoto") {
  const Run e = run({"entropy", "--alpha", "2", "--p", "[0.5,0.5]"});
  CHECK(e.json().at("entropy_bits").get<double>() == doctest::Approx(1.0));
  const Run p = run({"pinch", "--rho", data("plus.json"), "--sigma", data("diag73.json")});
  REQUIRE(p.code == cli::kExitOk);
  CHECK(p.json().at("spec_count").get<int>() == 2);
  const Run m = run({"matsumoto", "--rho", data("plus.json"), "--sigma", data("mixed.json")});
  REQUIRE(m.code == cli::kExitOk);
  CHECK(m.json().at("P").size() == 2);
  CHECK(m.json().at("report").at("pass").get<bool>());
}

TEST_CASE("channel-div") {
  const Run r = run({"channel-div", "--e", data("identity_channel.json"), "--f", data("depolarizing_channel.json"),
                     "--alpha", "inf", "--restarts", "4", "--refine-iters", "100"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(std::abs(r.json().at("value_bits").get<double>() - 1.0) <= 1e-3);
  CHECK(r.json().contains("witness"));
  const Run s = run({"channel-div", "--e", data("identity_channel.json"), "--f", data("depolarizing_channel.json"),
                     "--alpha", "2", "--mode", "stabilized", "--restarts", "2", "--refine-iters", "40"});
  CHECK(s.json().at("value_bits").get<double>() >= 2.0 - 1e-9);
}

TEST_CASE("verify exit codes") {
  const Run ok = run({"verify", "pinching_lemma", "--alpha", "2", "--seed", "3"});
  CHECK(ok.code == cli::kExitOk);
  CHECK(ok.json().at("pass").get<bool>());
  const Run files = run({"verify", "sandwiched_chain", "--alpha", "4", "--rho", data("plus.json"), "--sigma",
                         data("diag73.json"), "--e", data("identity_channel.json"), "--f",
                         data("depolarizing_channel.json")});
  CHECK(files.code == cli::kExitOk);
  // Outside the asserted range: refused without --exploration, ungated with it.
  const Run refused = run({"verify", "sandwiched_chain", "--alpha", "0.9"});
  CHECK(refused.code == cli::kExitUsage);
  CHECK(refused.error().at("error") == Json("OrderOutOfRange"));
  const Run explored = run({"verify", "sandwiched_chain", "--alpha", "0.9", "--exploration"});
  CHECK(explored.code == cli::kExitOk);
  CHECK_FALSE(explored.json().at("gated").get<bool>());
  // An impossible tolerance makes a strict check fail with exit 1.
  const Run strict = run({"verify", "meta_chain", "--kind", "sandwiched", "--alpha", "2", "--rho", data("plus.json"),
                          "--sigma", data("mixed.json"), "--e", data("identity_channel.json"), "--f",
                          data("identity_channel.json"), "--tol", "-0.5"});
  CHECK(strict.code == cli::kExitCheckFailed);
  // Reset channel |0><0|, |0><1| is not unital.
  const std::string reset = (std::filesystem::temp_directory_path() / "qchain_reset.json").string();
  std::ofstream(reset) << R"({"kraus":[{"rows":2,"cols":2,"re":[[1,0],[0,0]]},{"rows":2,"cols":2,"re":[[0,1],[0,0]]}]})";
  const Run unital = run({"verify", "unital_entropy", "--alpha", "2", "--f", reset});
  CHECK(unital.code == cli::kExitUsage);
  CHECK(unital.error().at("error") == Json("NonUnitalCandidate"));
  std::filesystem::remove(reset);
}

TEST_CASE("usage errors go to stderr as JSON") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"no-such-command"},
           {"div", "--kind", "classical"},
           {"div", "--kind", "classical", "--alpha", "abc", "--p", "[1]", "--q", "[1]"},
           {"div", "--kind", "sandwiched", "--alpha", "2", "--rho", "/nonexistent.json", "--sigma", data("mixed.json")},
           {"verify", "no_such_check"},
           {"div", "--kind", "classical", "--alpha", "1", "--p", "[0.5,0.6]", "--q", "[0.5,0.5]"}}) {
    const Run r = run(args);
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.out.empty());
    CHECK(r.error().contains("error"));
    CHECK(r.error().contains("message"));
  }
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("stdout is deterministic") {
  const std::vector<std::string> args{"channel-div", "--e", data("identity_channel.json"), "--f",
                                      data("depolarizing_channel.json"), "--alpha", "1.5", "--restarts", "3",
                                      "--refine-iters", "30", "--seed", "9"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> v{"verify", "meta_chain", "--alpha", "2", "--seed", "11", "--statement-restarts", "2"};
  CHECK(run(v).out == run(v).out);
}

TEST_CASE("campaign writes csv and json") {
  const auto dir = std::filesystem::temp_directory_path() / "qchain_cli_test";
  std::filesystem::create_directories(dir);
  const std::string cfg = (dir / "cfg.json").string();
  std::ofstream(cfg) << R"({"checks":["pinching_lemma","sandwiched_chain"],"trials":3,"dims":[2],"orders":[2,"inf"]})";
  const std::string csv = (dir / "out.csv").string(), js = (dir / "out.json").string();
  const Run r = run({"campaign", "--config", cfg, "--out", csv, "--out", js, "--threads", "2"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.json().at("all_pass").get<bool>());
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "check,dim,alpha,trial,lhs_bits,rhs_bits,slack,pass");
  CHECK(read_json_file(js).at("total_trials").get<int>() == r.json().at("total_trials").get<int>());
  std::ofstream(cfg) << R"({"trials":3,"unknown":1})";
  CHECK(run({"campaign", "--config", cfg}).code == cli::kExitUsage);
  std::filesystem::remove_all(dir);
}
