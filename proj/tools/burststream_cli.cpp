#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "burststream/experiments.hpp"
#include "burststream/gaussian_stream.hpp"
#include "burststream/rates.hpp"
#include "burststream/sw_binning.hpp"
#include "burststream/transforms.hpp"
#include "json.hpp"

using namespace bst;
using nlohmann::json;

namespace {

constexpr int kExitInvariant = 2;
constexpr int kExitInput = 3;

struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json load_json(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void emit(const std::string &text, const std::string &path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

void write_artifact(const std::string &dir, const std::string &name, const json &j) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write artifact " + name);
  out << j.dump(2) << "\n";
}

struct ChainArgs {
  std::optional<double> eps;
  std::string chain_path;

  void add(CLI::App *c) {
    auto *e = c->add_option("--eps", eps, "binary symmetric chain crossover");
    auto *p = c->add_option("--chain", chain_path, "chain JSON file {\"P\": [[...]]}");
    e->excludes(p);
  }
  bool given() const { return eps || !chain_path.empty(); }
  FiniteMarkovChain get() const {
    if (eps) return FiniteMarkovChain::binary_symmetric(*eps);
    if (!chain_path.empty()) return FiniteMarkovChain::from_json(load_json(chain_path));
    throw std::invalid_argument("a chain is required (--eps or --chain)");
  }
};

// ---- rates

struct RatesArgs {
  ChainArgs chain;
  std::vector<double> d;
  std::vector<size_t> N;
  size_t B = 1, W = 0;
  std::optional<size_t> T;
  std::string sweep, out;
};

int cmd_rates(const RatesArgs &a) {
  const int sources = int(a.chain.given()) + int(!a.d.empty()) + int(!a.N.empty());
  if (sources != 1) throw std::invalid_argument("give exactly one of --eps/--chain, --d, --N");

  std::vector<std::pair<size_t, size_t>> grid;
  if (a.sweep.empty()) {
    grid.push_back({a.B, a.W});
  } else {
    std::smatch m;
    static const std::regex re(R"(^([BW])=(\d+)\.\.(\d+)$)");
    if (!std::regex_match(a.sweep, m, re)) throw std::invalid_argument("--sweep expects B=a..b or W=a..b");
    const size_t lo = std::stoul(m[2]), hi = std::stoul(m[3]);
    if (lo > hi) throw std::invalid_argument("--sweep range is empty");
    for (size_t v = lo; v <= hi; ++v) grid.push_back(m[1] == "W" ? std::pair{a.B, v} : std::pair{v, a.W});
  }

  std::ostringstream os;
  os << "scheme,B,W,rate\n";
  auto row = [&](const std::string &s, size_t B, size_t W, double r) {
    os << s << "," << B << "," << W << "," << num(r) << "\n";
  };
  if (a.chain.given()) {
    const FiniteMarkovChain chain = a.chain.get();
    const bool sym = is_symmetric(chain);
    for (auto [B, W] : grid) {
      const RateReport rep = rate_report(chain, {B, W});
      row("r_plus", B, W, rep.r_plus);
      row("r_minus", B, W, rep.r_minus);
      if (sym) row("r_symmetric", B, W, r_symmetric_memoryless(chain, {B, W}));
      if (a.T) {
        if (B == 0) throw std::invalid_argument("delay rate needs B >= 1");
        row("r_delay_T" + std::to_string(*a.T), B, W, r_delay(chain, B, *a.T));
      }
    }
  } else if (!a.d.empty()) {
    for (auto [B, W] : grid) {
      const BaselineRates b = baseline_rates(a.d, B, W);
      row("gaussian", B, W, gaussian_rate(a.d, B, W));
      row("r_si", B, W, b.r_si);
      row("r_wz", B, W, b.r_wz);
      row("r_fec", B, W, b.r_fec);
    }
  } else {
    for (auto [B, W] : grid) row("diagonal", B, W, diagonal_rate(a.N, B, W));
  }
  emit(os.str(), a.out);
  return 0;
}

// ---- simulate-det

struct DetArgs {
  std::vector<size_t> N;
  std::string spec_path, semidet_path, pattern_path, artifacts, out;
  std::optional<size_t> N0, Nd;
  size_t B = 1, W = 1, n = 256, delta = 8, T = 64, trials = 1;
  uint64_t seed = 1;
};

int cmd_simulate_det(const DetArgs &a) {
  const int sources = int(!a.N.empty()) + int(!a.spec_path.empty()) + int(!a.semidet_path.empty()) + int(a.N0.has_value());
  if (sources != 1) throw std::invalid_argument("give exactly one of --N, --spec, --semidet, --N0/--Nd");
  if (a.N0 && !a.Nd) throw std::invalid_argument("--N0 needs --Nd");
  std::optional<ErasurePattern> custom;
  if (!a.pattern_path.empty()) custom = ErasurePattern::from_json(load_json(a.pattern_path));
  const size_t T = custom ? custom->T : a.T;
  if (!custom && T < a.B + a.W + 2) throw std::invalid_argument("horizon too short for one burst");

  Rng rng(derive_seed(a.seed, 0));
  std::optional<SemiDetSpec> sd;
  std::optional<PipelineResult> pipe;
  DiagonalSourceSpec spec;
  if (!a.N.empty()) {
    spec = DiagonalSourceSpec::random(a.N, rng);
  } else if (!a.spec_path.empty()) {
    spec = DiagonalSourceSpec::from_json(load_json(a.spec_path));
  } else {
    sd = a.N0 ? SemiDetSpec::random(*a.N0, *a.Nd, rng) : SemiDetSpec::from_json(load_json(a.semidet_path));
    pipe = semidet_to_diagonal(*sd);
    spec = pipe->spec;
  }
  const NormalizedSpec ns = normalize_K(spec, a.B, a.W);
  const ProspicientCodec codec(ns.spec, a.B, a.W, make_bincode(ns.spec, a.B, a.W, a.n, a.delta, derive_seed(a.seed, 1)));

  write_artifact(a.artifacts, "spec.json", spec.to_json());
  write_artifact(a.artifacts, "normalized_spec.json", ns.spec.to_json());
  write_artifact(a.artifacts, "bincode.json", codec.code().to_json());
  if (sd) {
    write_artifact(a.artifacts, "semidet.json", sd->to_json());
    write_artifact(a.artifacts, "map.json", pipe->map.to_json());
  }

  struct Case {
    size_t j, len;
    ErasurePattern pat;
  };
  std::vector<Case> cases;
  if (custom) {
    const auto bursts = custom->bursts();
    cases.push_back({bursts.empty() ? 0 : bursts[0].first, bursts.empty() ? 0 : bursts[0].second, *custom});
  } else {
    cases.push_back({0, 0, ErasurePattern{T, {}}});
    for (size_t len = 1; len <= a.B; ++len)
      for (size_t j = 0; j + len + a.W < T; ++j) cases.push_back({j, len, single_burst(j, len, T)});
  }
  const size_t total = cases.size() * a.trials;
  std::vector<DetTrialResult> res(total);
#pragma omp parallel for schedule(dynamic)
  for (size_t k = 0; k < total; ++k) {
    const ErasurePattern &pat = cases[k / a.trials].pat;
    const uint64_t s = derive_seed(a.seed, 2, k);
    res[k] = sd ? run_semidet_trial(codec, ns, pipe->map, *sd, T, pat, s) : run_diagonal_trial(codec, ns, T, pat, s);
  }

  std::ostringstream os;
  os << "burst_start,burst_len,trials,failures,mismatches,pattern_violations\n";
  size_t bad = 0;
  for (size_t ci = 0; ci < cases.size(); ++ci) {
    size_t fail = 0, mis = 0, pv = 0;
    for (size_t t = 0; t < a.trials; ++t) {
      const DetTrialResult &r = res[ci * a.trials + t];
      fail += r.failed();
      mis += r.mismatches;
      pv += r.pattern_violation;
    }
    bad += mis + pv;
    os << cases[ci].j << "," << cases[ci].len << "," << a.trials << "," << fail << "," << mis << "," << pv << "\n";
  }
  emit(os.str(), a.out);
  if (bad) throw InvariantViolation("wrongly recovered symbols or pattern violations");
  return 0;
}

// ---- simulate-gaussian

struct GaussArgs {
  std::vector<double> d;
  size_t B = 1, W = 0, n = 1000, T = 10, delta = 24, segment_bits = 512;
  std::optional<size_t> burst, burst_len;
  uint64_t seed = 1;
  std::string out;
};

int cmd_simulate_gaussian(const GaussArgs &a) {
  GaussianConfig c;
  c.d = a.d;
  c.B = a.B;
  c.W = a.W;
  c.n = a.n;
  c.T = a.T;
  c.burst_start = a.burst;
  c.burst_len = a.burst_len;
  c.seed = a.seed;
  c.delta = a.delta;
  c.segment_bits = a.segment_bits;
  validate_distortion(c.d);
  const GaussianReport r = gaussian_pipeline(c);
  std::ostringstream os;
  os << "time,lag,mse,target,met\n";
  for (const auto &l : r.lags)
    os << l.time << "," << l.lag << "," << num(l.mse) << "," << num(l.target) << "," << (l.met ? 1 : 0) << "\n";
  emit(os.str(), a.out);
  std::cerr << "rate " << num(r.gaussian_rate) << " wire " << num(r.wire_rate) << " alpha 1/" << r.alpha.m
            << " segments " << r.segments << " failures " << r.failures << "\n";
  if (r.pattern_violation || !r.delivery_exact) throw InvariantViolation("layer delivery differs from M_i");
  return 0;
}

// ---- transform

struct TransformArgs {
  std::string semidet_path, out;
  std::optional<size_t> N0, Nd;
  size_t check_symbols = 1000;
  uint64_t seed = 1;
};

int cmd_transform(const TransformArgs &a) {
  if (a.semidet_path.empty() == !(a.N0 && a.Nd)) throw std::invalid_argument("give --semidet or --N0 with --Nd");
  Rng rng(derive_seed(a.seed, 0));
  const SemiDetSpec sd = a.semidet_path.empty() ? SemiDetSpec::random(*a.N0, *a.Nd, rng)
                                                 : SemiDetSpec::from_json(load_json(a.semidet_path));
  sd.validate();
  json out;
  out["input"] = sd.to_json();
  bool ok = true;
  if (rank(sd.A) == sd.Nd) {
    const Case1Result c1 = case1_transform(sd);
    const bool verified = sd.A * c1.X == sd.B;
    ok = ok && verified;
    out["case1"] = {{"X", to_json(c1.X)}, {"A_X_equals_B", verified}, {"spec", c1.spec.to_json()},
                    {"map", c1.map.to_json()}};
  } else {
    out["case1"] = nullptr;
  }
  const PipelineResult p = semidet_to_diagonal(sd);
  out["pipeline"] = {{"map", p.map.to_json()}, {"upper_triangular", p.tri.to_json()}, {"spec", p.spec.to_json()}};
  if (a.check_symbols) {
    const StreamTrace tr = gen_semidet(sd, 1, a.check_symbols, derive_seed(a.seed, 1));
    const MappedTrace mt = apply_map(p.map, tr);
    const bool roundtrip = invert_map(p.map, mt).sym == tr.sym;
    const bool structure = validate_diagonal_trace(p.spec, mt.trace);
    ok = ok && roundtrip && structure;
    out["check"] = {{"symbols", a.check_symbols}, {"roundtrip", roundtrip}, {"structure", structure}};
  }
  emit(out.dump(2) + "\n", a.out);
  if (!ok) throw InvariantViolation("transform check failed");
  return 0;
}

// ---- oracle / sweep

struct OracleArgs {
  ChainArgs chain;
  size_t B = 1, W = 0, n = 12, trials = 2000;
  std::optional<size_t> T;
  std::optional<double> rate;
  std::vector<double> rates, offsets;
  uint64_t seed = 1;
  std::string out;
};

void oracle_rows(std::ostream &os, const SwExperimentResult &r, double thr, double thr_d, double rate) {
  auto row = [&](const char *mode, double threshold, const SwModeStats &s) {
    os << mode << "," << num(threshold) << "," << num(rate) << "," << s.trials << "," << s.errors << "," << s.ties
       << "," << num(s.error_rate()) << "\n";
  };
  row("steady", thr, r.steady);
  row("post_burst", thr, r.post_burst);
  if (r.delayed) row("delayed", thr_d, *r.delayed);
}

const char *kOracleHeader = "mode,threshold,rate,trials,errors,ties,error_rate\n";

int cmd_oracle(const OracleArgs &a) {
  const FiniteMarkovChain chain = a.chain.get();
  const double thr = r_plus(chain, {a.B, a.W});
  const double thr_d = a.T ? r_delay(chain, a.B, *a.T) : 0.0;
  const double rate = a.rate.value_or(a.T ? thr_d : thr);
  std::ostringstream os;
  os << kOracleHeader;
  oracle_rows(os, streaming_sw_experiment(chain, a.B, a.W, a.T, rate, a.n, a.trials, a.seed), thr, thr_d, rate);
  emit(os.str(), a.out);
  return 0;
}

int cmd_sweep(const OracleArgs &a) {
  if (a.rates.empty() == a.offsets.empty()) throw std::invalid_argument("give exactly one of --rates, --offsets");
  const FiniteMarkovChain chain = a.chain.get();
  const double thr = r_plus(chain, {a.B, a.W});
  const double thr_d = a.T ? r_delay(chain, a.B, *a.T) : 0.0;
  std::vector<double> grid = a.rates;
  for (double o : a.offsets) grid.push_back((a.T ? thr_d : thr) + o);
  std::ostringstream os;
  os << kOracleHeader;
  for (size_t i = 0; i < grid.size(); ++i)
    oracle_rows(os, streaming_sw_experiment(chain, a.B, a.W, a.T, grid[i], a.n, a.trials, derive_seed(a.seed, i)),
                thr, thr_d, grid[i]);
  emit(os.str(), a.out);
  return 0;
}

const std::vector<std::string> kCommands{"rates", "simulate-det", "simulate-gaussian", "transform", "oracle", "sweep"};

// Flat JSON keys become "--key value" arguments placed right after the
// subcommand, so flags given on the command line take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + long(i));
      break;
    }
  }
  if (path.empty()) return args;
  const json cfg = load_json(path);
  if (!cfg.is_object()) throw std::invalid_argument("config must be a JSON object");

  size_t pos = 0;
  while (pos < args.size() && std::find(kCommands.begin(), kCommands.end(), args[pos]) == kCommands.end()) ++pos;
  if (pos == args.size()) {
    if (!cfg.contains("command")) throw std::invalid_argument("no subcommand on the command line or in the config");
    args.push_back(cfg.at("command").get<std::string>());
  }
  pos = std::min(pos, args.size() - 1);

  std::vector<std::string> extra;
  for (const auto &[key, v] : cfg.items()) {
    if (key == "command") continue;
    if (key == "jobs") {
      extra.insert(extra.begin(), {"--jobs", v.dump()});
      continue;
    }
    if (v.is_boolean()) {
      if (v.get<bool>()) extra.push_back("--" + key);
      continue;
    }
    std::string val;
    if (v.is_array()) {
      for (size_t i = 0; i < v.size(); ++i) val += (i ? "," : "") + (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
    } else {
      val = v.is_string() ? v.get<std::string>() : v.dump();
    }
    extra.push_back("--" + key);
    extra.push_back(val);
  }
  // --jobs belongs to the top-level app.
  std::vector<std::string> out(args.begin(), args.begin() + long(pos));
  auto it = extra.begin();
  if (it != extra.end() && *it == "--jobs") {
    out.insert(out.end(), it, it + 2);
    it += 2;
  }
  out.push_back(args[pos]);
  out.insert(out.end(), it, extra.end());
  out.insert(out.end(), args.begin() + long(pos) + 1, args.end());
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"burst-erasure streaming codes: rate calculators and simulators"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  int jobs = 0;
  app.add_option("--config", config_path, "JSON file of option values");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::NonNegativeNumber);

  RatesArgs ra;
  auto *rates = app.add_subcommand("rates", "rate calculators");
  ra.chain.add(rates);
  rates->add_option("--d", ra.d, "Gaussian distortion vector")->delimiter(',');
  rates->add_option("--N", ra.N, "diagonal source widths N_0..N_K")->delimiter(',');
  rates->add_option("--B", ra.B);
  rates->add_option("--W", ra.W);
  rates->add_option("--T", ra.T, "decoding delay for the delay-constrained rate");
  rates->add_option("--sweep", ra.sweep, "W=a..b or B=a..b");
  rates->add_option("--csv-out", ra.out);

  DetArgs da;
  auto *det = app.add_subcommand("simulate-det", "deterministic-source streaming over every burst position");
  det->add_option("--N", da.N, "random diagonal source with these widths")->delimiter(',');
  det->add_option("--spec", da.spec_path, "diagonal source JSON");
  det->add_option("--semidet", da.semidet_path, "semi-deterministic source JSON");
  det->add_option("--N0", da.N0, "random semi-deterministic source, innovation width");
  det->add_option("--Nd", da.Nd, "random semi-deterministic source, state width");
  det->add_option("--B", da.B);
  det->add_option("--W", da.W);
  det->add_option("--n", da.n, "spatial copies")->check(CLI::PositiveNumber);
  det->add_option("--delta", da.delta, "slack bits per packet");
  det->add_option("--T", da.T, "horizon");
  det->add_option("--pattern", da.pattern_path, "erasure pattern JSON {\"T\": .., \"erased\": [..]} instead of the sweep");
  det->add_option("--trials", da.trials, "trials per burst position")->check(CLI::PositiveNumber);
  det->add_option("--seed", da.seed);
  det->add_option("--artifacts", da.artifacts, "directory for spec and code JSON");
  det->add_option("--csv-out", da.out);

  GaussArgs ga;
  auto *gauss = app.add_subcommand("simulate-gaussian", "layered Gaussian streaming");
  gauss->add_option("--d", ga.d, "distortion vector")->delimiter(',')->required();
  gauss->add_option("--B", ga.B);
  gauss->add_option("--W", ga.W);
  gauss->add_option("--n", ga.n, "samples per time")->check(CLI::PositiveNumber);
  gauss->add_option("--T", ga.T, "horizon")->check(CLI::PositiveNumber);
  gauss->add_option("--burst", ga.burst, "burst start");
  gauss->add_option("--burst-len", ga.burst_len, "burst length, default B");
  gauss->add_option("--delta", ga.delta);
  gauss->add_option("--segment-bits", ga.segment_bits)->check(CLI::PositiveNumber);
  gauss->add_option("--seed", ga.seed);
  gauss->add_option("--csv-out", ga.out);

  TransformArgs ta;
  auto *tf = app.add_subcommand("transform", "semi-deterministic to diagonal source transform");
  tf->add_option("--semidet", ta.semidet_path, "semi-deterministic source JSON");
  tf->add_option("--N0", ta.N0);
  tf->add_option("--Nd", ta.Nd);
  tf->add_option("--check-symbols", ta.check_symbols, "roundtrip check length, 0 to skip");
  tf->add_option("--seed", ta.seed);
  tf->add_option("--json-out", ta.out);

  OracleArgs oa;
  auto *orc = app.add_subcommand("oracle", "binning experiment at one rate");
  auto *sw = app.add_subcommand("sweep", "binning experiment over a rate grid");
  OracleArgs sa;
  for (auto [cmd, args] : {std::pair{orc, &oa}, std::pair{sw, &sa}}) {
    args->chain.add(cmd);
    cmd->add_option("--B", args->B);
    cmd->add_option("--W", args->W);
    cmd->add_option("--T", args->T, "decoding delay");
    cmd->add_option("--n", args->n, "block length")->check(CLI::PositiveNumber);
    cmd->add_option("--trials", args->trials)->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args->seed);
    cmd->add_option("--csv-out", args->out);
  }
  orc->add_option("--rate", oa.rate, "bits per symbol, default the threshold");
  sw->add_option("--rates", sa.rates, "absolute rates")->delimiter(',');
  sw->add_option("--offsets", sa.offsets, "rates relative to the threshold")->delimiter(',');

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  if (jobs > 0) omp_set_num_threads(jobs);
  try {
    if (*rates) return cmd_rates(ra);
    if (*det) return cmd_simulate_det(da);
    if (*gauss) return cmd_simulate_gaussian(ga);
    if (*tf) return cmd_transform(ta);
    if (*orc) return cmd_oracle(oa);
    if (*sw) return cmd_sweep(sa);
  } catch (const InvariantViolation &e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const PatternViolation &e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const ImpossibleBin &e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument &e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error &e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::length_error &e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::out_of_range &e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception &e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception &e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  }
  return 0;
}
