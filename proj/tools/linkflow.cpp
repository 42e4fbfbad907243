// linkflow: command-line front end.
//
//   linkflow correct <network.json> [--format table|json] [--output FILE] ...
//   linkflow recoverability <network.json> --subset 6,16 ...
//   linkflow generate --seed 1 --output net.json --truth truth.json ...
//   linkflow validate --report report.json --truth truth.json [--subset 6]
//
// Exit status: 0 success, 1 usage or other failure, 2 no base set inside the
// monitored links, 3 malformed input, 4 degenerate subset (Z_S = 0).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linkflow/linkflow.hpp"

#ifndef LINKFLOW_FIXTURE_DIR
#define LINKFLOW_FIXTURE_DIR "fixtures"
#endif

namespace {

using namespace linkflow;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitNoBaseSet = 2;
constexpr int kExitInput = 3;
constexpr int kExitDegenerateSubset = 4;

namespace fs = std::filesystem;

// "fixtures/i405" works from any directory and with or without ".json".
std::string resolve_input(const std::string& arg) {
  std::vector<fs::path> tries{arg, arg + ".json"};
  const std::string prefix = "fixtures/";
  if (arg.rfind(prefix, 0) == 0) {
    const fs::path bundled = fs::path(LINKFLOW_FIXTURE_DIR) / arg.substr(prefix.size());
    tries.push_back(bundled);
    tries.push_back(bundled.string() + ".json");
  }
  for (const auto& p : tries) {
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) return p.string();
  }
  throw Error(Errc::InvalidArgument, "cannot open '" + arg + "'");
}

std::vector<std::string> split_ids(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write '" + path + "'");
  out << text;
}

OracleMode oracle_mode(const std::string& s) {
  if (s == "always") return OracleMode::Always;
  if (s == "never") return OracleMode::Never;
  return OracleMode::Auto;
}

struct CorrectArgs {
  std::string input;
  double delta = AdmmConfig{}.delta;
  std::size_t max_iters = AdmmConfig{}.max_iters;
  double tol = AdmmConfig{}.primal_tol;
  bool round = true;
  bool oracle = false;
  bool tie_check = false;
  bool adaptive = false;
  std::string output;
  std::string format = "table";
};

int run_correct(const CorrectArgs& a) {
  const NetworkDocument doc = load_network_file(resolve_input(a.input));
  CorrectionOptions opt;
  opt.admm.delta = a.delta;
  opt.admm.max_iters = a.max_iters;
  opt.admm.primal_tol = a.tol;
  opt.admm.dual_tol = a.tol;
  opt.admm.adaptive = a.adaptive;
  opt.round = a.round;
  opt.solver = a.oracle ? L1Solver::Exact : L1Solver::Admm;
  opt.tie_check = a.tie_check;
  const CorrectionResult res = correct_flows(doc.network, doc.monitored, doc.observation, opt);
  if (!res.converged) {
    std::cerr << "warning: ADMM stopped after " << res.iterations
              << " iterations without meeting the tolerance; reporting the best iterate\n";
  }
  if (res.possibly_nonunique) {
    std::cerr << "note: the l1 minimizer is not unique; the estimate is one point of the optimal face\n";
  }
  emit(a.format == "table" ? correction_to_table(doc, res) : correction_to_json(doc, res).dump(2) + "\n",
       a.output);
  return kExitOk;
}

struct RecArgs {
  std::string input;
  std::string subset;
  int restarts = InversePowerConfig{}.restarts;
  std::string oracle = "auto";
  std::size_t lambda_limit = CertifyConfig{}.lambda_limit;
  std::uint64_t seed = InversePowerConfig{}.seed;
  std::string format = "text";
  std::string output;
};

int run_recoverability(const RecArgs& a) {
  const NetworkDocument doc = load_network_file(resolve_input(a.input));
  std::vector<Index> subset;
  for (const auto& id : split_ids(a.subset)) {
    const auto j = doc.network.link_index(id);
    if (!j) throw Error(Errc::InvalidArgument, "unknown link '" + id + "' in --subset");
    subset.push_back(*j);
  }
  CertifyConfig cfg;
  cfg.inverse_power.restarts = a.restarts;
  cfg.inverse_power.seed = a.seed;
  cfg.oracle = oracle_mode(a.oracle);
  cfg.lambda_limit = a.lambda_limit;
  const RecoverabilityReport rep = certify(doc.network, doc.monitored, subset, cfg);
  emit(a.format == "json" ? recoverability_to_json(doc.network, rep).dump(2) + "\n"
                          : recoverability_to_text(doc.network, rep),
       a.output);
  if (rep.degenerate) {
    std::cerr << "DegenerateSubset: every kernel direction vanishes on the subset (Rec = inf)\n";
    return kExitDegenerateSubset;
  }
  return kExitOk;
}

struct GenerateArgs {
  SyntheticSpec spec;
  std::string output;
  std::string truth;
};

int run_generate(const GenerateArgs& a) {
  const SyntheticInstance inst = generate_instance(a.spec);
  emit(serialize_network(inst.document), a.output);
  if (!a.truth.empty()) emit(serialize_truth(inst), a.truth);
  return kExitOk;
}

struct ValidateArgs {
  std::string report;
  std::string truth;
  std::string subset;
  std::string format = "text";
  std::string output;
};

int run_validate(const ValidateArgs& a) {
  const Json report = detail::parse_json(detail::read_file(resolve_input(a.report)));
  const auto truth = load_ground_truth(detail::read_file(resolve_input(a.truth)));
  std::optional<std::vector<std::string>> subset;
  if (!a.subset.empty()) subset = split_ids(a.subset);
  const Score s = score_report(report, truth, subset);
  emit(a.format == "json" ? score_to_json(s).dump(2) + "\n" : score_to_text(s), a.output);
  if (s.bound && s.bound->holds && !*s.bound->holds) return kExitFailure;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traffic count correction under flow conservation"};
  app.require_subcommand(1);

  CorrectArgs ca;
  auto* correct = app.add_subcommand("correct", "Correct observed link counts by l1 fitting");
  correct->add_option("input", ca.input, "Network/observation file")->required();
  correct->add_option("--delta", ca.delta, "ADMM penalty parameter")->check(CLI::PositiveNumber);
  correct->add_option("--max-iters", ca.max_iters, "ADMM iteration cap")->check(CLI::PositiveNumber);
  correct->add_option("--tol", ca.tol, "ADMM relative stopping tolerance")->check(CLI::PositiveNumber);
  correct->add_flag("--round,!--no-round", ca.round, "Round estimates to integers (default on)");
  correct->add_flag("--oracle", ca.oracle, "Solve the l1 problem exactly by linear programming");
  correct->add_flag("--tie-check", ca.tie_check, "Check whether the l1 minimizer is unique");
  correct->add_flag("--adaptive-delta", ca.adaptive,
                    "Balance ADMM residuals by adjusting delta (faster with very large errors)");
  correct->add_option("--output,-o", ca.output, "Write the report here instead of stdout");
  correct->add_option("--format", ca.format, "Report format")
      ->check(CLI::IsMember({"table", "json", "machine"}));

  RecArgs ra;
  auto* rec = app.add_subcommand("recoverability", "Compute Rec(S) and the error-bound constant");
  rec->add_option("input", ra.input, "Network file")->required();
  rec->add_option("--subset,-s", ra.subset, "Comma-separated link ids of the suspect subset")->required();
  rec->add_option("--restarts", ra.restarts, "Inverse power restarts")->check(CLI::PositiveNumber);
  rec->add_option("--oracle", ra.oracle, "Exact LP oracle: auto (small subsets), always, never")
      ->check(CLI::IsMember({"auto", "always", "never"}));
  rec->add_option("--lambda-limit", ra.lambda_limit, "Cap on base sets enumerated for lambda")
      ->check(CLI::PositiveNumber);
  rec->add_option("--seed", ra.seed, "Seed for random restarts");
  rec->add_option("--format", ra.format, "Report format")->check(CLI::IsMember({"text", "json", "machine"}));
  rec->add_option("--output,-o", ra.output, "Write the report here instead of stdout");

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Generate a synthetic corrupted instance");
  gen->add_option("--nodes", ga.spec.node_count, "Number of nodes");
  gen->add_option("--links", ga.spec.link_count, "Number of links");
  gen->add_option("--monitored-fraction", ga.spec.monitored_fraction, "Fraction of links monitored");
  gen->add_option("--corrupt", ga.spec.corrupt_count, "Number of grossly miscounted links");
  gen->add_option("--corruption-min", ga.spec.corruption_min, "Smallest gross error");
  gen->add_option("--corruption-max", ga.spec.corruption_max, "Largest gross error");
  gen->add_option("--noise", ga.spec.noise_sigma, "Gaussian noise sigma on other links");
  gen->add_option("--seed", ga.spec.seed, "Random seed");
  gen->add_option("--output,-o", ga.output, "Network file (default stdout)");
  gen->add_option("--truth", ga.truth, "Ground-truth sidecar file");

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "Score a correction report against ground truth");
  val->add_option("--report", va.report, "Machine-readable correction report")->required();
  val->add_option("--truth", va.truth, "Ground-truth sidecar or network file with ground_truth")->required();
  val->add_option("--subset,-s", va.subset, "Declared corrupted subset for the error bound check");
  val->add_option("--format", va.format, "Output format")->check(CLI::IsMember({"text", "json", "machine"}));
  val->add_option("--output,-o", va.output, "Write the score here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (ca.format == "machine") ca.format = "json";
    if (ra.format == "machine") ra.format = "json";
    if (va.format == "machine") va.format = "json";
    if (*correct) return run_correct(ca);
    if (*rec) return run_recoverability(ra);
    if (*gen) return run_generate(ga);
    if (*val) return run_validate(va);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == Errc::NoBaseSet) return kExitNoBaseSet;
    if (e.code() == Errc::DegenerateSubset) return kExitDegenerateSubset;
    if (e.is_input_error()) return kExitInput;
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
