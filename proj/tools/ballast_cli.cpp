// ballast command-line harness: seeded, reproducible balls-into-bins
// experiments with CSV series and JSON summaries.
//
// Determinism contract: with a fixed configuration and seed, stdout and all
// output files are byte-identical across runs and thread counts.  Timing is
// reported on stderr only.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ballast/analysis.hpp"
#include "ballast/common.hpp"
#include "ballast/experiment.hpp"
#include "ballast/graphs.hpp"
#include "ballast/potentials.hpp"
#include "ballast/processes.hpp"
#include "ballast/rng.hpp"

using nlohmann::json;

namespace {

constexpr std::uint64_t kGraphSeedSalt = 0x6772617068ULL;  // "graph"

struct ProcessOpts {
  std::string name = "two-choice";
  std::uint32_t d = 2;
  double beta = 0.5;
  std::uint32_t k = 1;
  std::vector<double> deltas;
  std::vector<std::int64_t> thresholds;
  bool thresholds_relative = false;
  std::string graph_file;
  std::uint32_t degree = 0;
  double delta_scale = 0.5;
  std::string log_base = "e";
};

void add_process_flags(CLI::App* sub, ProcessOpts& o) {
  sub->add_option("--process", o.name,
                  "Process: one-choice, two-choice, d-choice, one-plus-beta, quantile, "
                  "threshold, thinning, graphical")
      ->capture_default_str();
  sub->add_option("--d", o.d, "Samples per ball for d-choice")->capture_default_str();
  sub->add_option("--beta", o.beta, "Mixing weight for one-plus-beta")->capture_default_str();
  sub->add_option("--k", o.k, "Number of uniform quantile cuts (quantile process / potentials)")
      ->capture_default_str();
  sub->add_option("--delta", o.deltas,
                  "Explicit quantile fractions in (0,1), ascending for quantile, "
                  "non-increasing acceptance fractions for thinning")
      ->delimiter(',');
  sub->add_option("--thresholds", o.thresholds,
                  "Strictly decreasing load thresholds for the threshold process")
      ->delimiter(',');
  sub->add_flag("--thresholds-relative", o.thresholds_relative,
                "Interpret thresholds as offsets added to floor(t/n)");
  sub->add_option("--graph-file", o.graph_file,
                  "Graph file for the graphical process (line 1: n d; then one 'u v' per edge)");
  sub->add_option("--degree", o.degree,
                  "Generate the graphical process graph: 2=cycle, n-1=complete, else "
                  "seeded random regular");
  sub->add_option("--delta-scale", o.delta_scale,
                  "Exponent scale of the uniform quantile grid")
      ->capture_default_str();
  sub->add_option("--log-base", o.log_base, "Logarithm base for grids and potentials")
      ->check(CLI::IsMember({"e", "2"}))
      ->capture_default_str();
}

std::vector<std::uint32_t> cuts_from_fractions(const std::vector<double>& fractions,
                                               std::uint32_t n) {
  std::vector<std::uint32_t> cuts;
  cuts.reserve(fractions.size());
  for (double f : fractions) {
    if (!(f > 0.0 && f < 1.0)) {
      throw std::invalid_argument("--delta fractions must lie strictly in (0, 1)");
    }
    auto c = static_cast<std::int64_t>(std::llround(f * n));
    c = std::max<std::int64_t>(1, std::min<std::int64_t>(n - 1, c));
    cuts.push_back(static_cast<std::uint32_t>(c));
  }
  return cuts;
}

ballast::ProcessSpec build_process(const ProcessOpts& o, std::uint32_t n, std::uint64_t seed) {
  const auto base = ballast::log_base_from_string(o.log_base);
  if (o.name == "one-choice") return ballast::OneChoice{};
  if (o.name == "two-choice") return ballast::DChoice{2};
  if (o.name == "d-choice") return ballast::DChoice{o.d};
  if (o.name == "one-plus-beta") return ballast::OnePlusBeta{o.beta};
  if (o.name == "quantile") {
    if (!o.deltas.empty()) return ballast::Quantile{cuts_from_fractions(o.deltas, n)};
    return ballast::Quantile{ballast::make_uniform_quantiles(n, o.k, base, o.delta_scale)};
  }
  if (o.name == "threshold") {
    if (o.thresholds.empty()) {
      throw std::invalid_argument("process 'threshold' requires --thresholds");
    }
    return ballast::Threshold{o.thresholds, o.thresholds_relative};
  }
  if (o.name == "thinning") {
    if (o.deltas.empty()) {
      throw std::invalid_argument("process 'thinning' requires --delta acceptance fractions");
    }
    return ballast::Thinning{cuts_from_fractions(o.deltas, n)};
  }
  if (o.name == "graphical") {
    std::shared_ptr<ballast::RegularGraph> g;
    if (!o.graph_file.empty()) {
      g = std::make_shared<ballast::RegularGraph>(ballast::load_graph(o.graph_file));
    } else if (o.degree > 0) {
      if (o.degree == 2) {
        g = std::make_shared<ballast::RegularGraph>(ballast::make_cycle(n));
      } else if (o.degree == n - 1) {
        g = std::make_shared<ballast::RegularGraph>(ballast::make_complete(n));
      } else {
        g = std::make_shared<ballast::RegularGraph>(ballast::make_random_regular(
            n, o.degree, ballast::rep_seed(seed ^ kGraphSeedSalt, o.degree)));
      }
    } else {
      throw std::invalid_argument("process 'graphical' requires --graph-file or --degree");
    }
    return ballast::Graphical{std::move(g)};
  }
  throw std::invalid_argument("unknown process '" + o.name + "'");
}

struct OutputOpts {
  std::string out;            // basename for <out>.csv and <out>.json
  std::string format = "csv"; // what goes to stdout
};

void add_output_flags(CLI::App* sub, OutputOpts& o) {
  sub->add_option("--out", o.out, "Basename: writes <out>.csv and <out>.json");
  sub->add_option("--format", o.format, "Stdout format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void emit(const OutputOpts& o, const std::string& csv, const json& summary,
          const std::string& text = "") {
  if (o.format == "csv") {
    std::cout << (text.empty() ? csv : text);
  } else {
    std::cout << summary.dump(2) << '\n';
  }
  if (!o.out.empty()) {
    write_file(o.out + ".csv", csv);
    write_file(o.out + ".json", summary.dump(2) + "\n");
  }
}

json histogram_json(const ballast::GapDistribution& dist) {
  json h = json::array();
  for (const auto& [gap, count] : dist.histogram) h.push_back({gap, count});
  return h;
}

json dist_json(const ballast::GapDistribution& dist) {
  return json{{"mean", dist.mean},
              {"min", dist.min},
              {"max", dist.max},
              {"repetitions", dist.repetitions},
              {"histogram", histogram_json(dist)}};
}

class Stopwatch {
 public:
  explicit Stopwatch(std::string label) : label_(std::move(label)), start_(clock::now()) {}
  ~Stopwatch() {
    const double s = std::chrono::duration<double>(clock::now() - start_).count();
    std::cerr << label_ << ": " << std::fixed << std::setprecision(2) << s << " s\n";
  }

 private:
  using clock = std::chrono::steady_clock;
  std::string label_;
  clock::time_point start_;
};

std::uint32_t default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const ProcessOpts& po, std::uint32_t n, std::uint64_t m,
                 const std::string& m_rule, bool m_given, bool rule_given, std::uint32_t reps,
                 std::uint64_t seed, std::uint32_t threads, std::uint64_t checkpoint_every,
                 const std::vector<std::string>& potential_labels, const OutputOpts& oo) {
  Stopwatch watch("simulate");
  auto rule = ballast::m_rule_from_string(m_given && !rule_given ? "fixed" : m_rule);
  const std::uint64_t balls = ballast::resolve_m(rule, n, m);
  const auto spec = build_process(po, n, seed);

  const auto base = ballast::log_base_from_string(po.log_base);
  std::vector<ballast::PotentialSpec> potentials;
  for (const auto& label : potential_labels) {
    potentials.push_back(ballast::parse_potential(label, po.k, base));
  }

  const auto runs =
      ballast::simulate_reps(spec, n, balls, reps, seed, threads, checkpoint_every, potentials);

  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "rep,seed,final_gap";
  // Series columns only when checkpoints or potentials were asked for; the
  // final gap is already its own column.
  const bool with_series = checkpoint_every > 0 || !potentials.empty();
  static const std::vector<std::uint64_t> kNoTimes;
  const auto& times =
      with_series && !runs.empty() ? runs.front().checkpoint_times : kNoTimes;
  for (auto t : times) csv << ",gap_t" << t;
  for (const auto& p : potentials) {
    for (auto t : times) csv << "," << ballast::label_of(p) << "_t" << t;
  }
  csv << "\n";
  ballast::GapDistribution dist;
  dist.config_echo = ballast::describe(spec);
  for (std::uint32_t r = 0; r < runs.size(); ++r) {
    const auto& res = runs[r];
    csv << r << "," << res.seed << "," << res.final_gap;
    if (with_series) {
      for (double g : res.gap_series) csv << "," << g;
      for (const auto& series : res.observable_series) {
        for (double v : series) csv << "," << v;
      }
    }
    csv << "\n";
    dist.gaps.push_back(res.final_gap);
  }
  dist.repetitions = reps;
  {  // summary statistics over final gaps
    double sum = 0.0;
    for (double g : dist.gaps) {
      sum += g;
      dist.histogram[g] += 1;
    }
    if (!dist.gaps.empty()) {
      const auto [lo, hi] = std::minmax_element(dist.gaps.begin(), dist.gaps.end());
      dist.min = *lo;
      dist.max = *hi;
      dist.mean = sum / static_cast<double>(dist.gaps.size());
    }
  }

  json summary{{"tool", "ballast"},
               {"version", ballast::kVersion},
               {"command", "simulate"},
               {"process", ballast::describe(spec)},
               {"n", n},
               {"m", balls},
               {"m_rule", ballast::to_string(rule)},
               {"reps", reps},
               {"seed", seed},
               {"checkpoint_every", checkpoint_every},
               {"gap", dist_json(dist)}};
  if (!potentials.empty()) {
    json labels = json::array();
    for (const auto& p : potentials) labels.push_back(ballast::label_of(p));
    summary["potentials"] = labels;
  }
  emit(oo, csv.str(), summary);
  return 0;
}

int cmd_gap_table(const std::vector<std::uint32_t>& ns, std::vector<std::string> names,
                  double delta_scale, const std::string& log_base, std::uint64_t m,
                  const std::string& m_rule, bool m_given, bool rule_given, std::uint32_t reps,
                  std::uint64_t seed, std::uint32_t threads, const OutputOpts& oo) {
  Stopwatch watch("gap-table");
  const auto base = ballast::log_base_from_string(log_base);
  auto rule = ballast::m_rule_from_string(m_given && !rule_given ? "fixed" : m_rule);

  auto reference = ballast::reference_processes(delta_scale, base);
  reference.push_back(
      {"one-choice", [](std::uint32_t) { return ballast::ProcessSpec{ballast::OneChoice{}}; }});
  std::vector<ballast::NamedProcess> selected;
  if (names.empty()) {
    selected.assign(reference.begin(), reference.end() - 1);  // reference table order
  } else {
    for (const auto& name : names) {
      bool found = false;
      for (const auto& ref : reference) {
        if (ref.label == name) {
          selected.push_back(ref);
          found = true;
          break;
        }
      }
      if (!found) {
        throw std::invalid_argument("gap-table: unknown process label '" + name +
                                    "' (use one-plus-beta(0.5), quantile-k1..k4, two-choice, "
                                    "one-choice)");
      }
    }
  }

  const auto rows = ballast::gap_table(ns, selected, rule, m, reps, seed, threads);

  std::ostringstream csv;
  csv << std::setprecision(17) << "n,process,m,reps,mean,min,max,histogram\n";
  std::ostringstream text;
  text << std::left << std::setw(8) << "n" << std::setw(22) << "process" << std::setw(12) << "m"
       << std::setw(10) << "mean" << std::setw(8) << "min" << std::setw(8) << "max"
       << "histogram\n";
  json jrows = json::array();
  for (const auto& row : rows) {
    std::ostringstream hist;
    for (const auto& [gap, count] : row.dist.histogram) {
      if (hist.tellp() > 0) hist << " ";
      hist << std::setprecision(6) << gap << ":" << count;
    }
    csv << row.n << "," << row.label << "," << row.m << "," << row.dist.repetitions << ","
        << row.dist.mean << "," << row.dist.min << "," << row.dist.max << "," << hist.str()
        << "\n";
    text << std::left << std::setw(8) << row.n << std::setw(22) << row.label << std::setw(12)
         << row.m << std::setw(10) << std::setprecision(4) << row.dist.mean << std::setw(8)
         << row.dist.min << std::setw(8) << row.dist.max << hist.str() << "\n";
    jrows.push_back({{"n", row.n},
                     {"process", row.label},
                     {"m", row.m},
                     {"gap", dist_json(row.dist)}});
  }
  json summary{{"tool", "ballast"},       {"version", ballast::kVersion},
               {"command", "gap-table"},  {"m_rule", ballast::to_string(rule)},
               {"reps", reps},            {"seed", seed},
               {"delta_scale", delta_scale}, {"log_base", log_base},
               {"rows", jrows}};
  emit(oo, csv.str(), summary, text.str());
  return 0;
}

int cmd_potentials(const ProcessOpts& po, std::uint32_t n, std::uint64_t m,
                   const std::string& m_rule, bool m_given, bool rule_given, std::uint32_t reps,
                   std::uint64_t seed, std::uint32_t threads, std::uint64_t checkpoint_every,
                   std::vector<std::string> potential_labels, const OutputOpts& oo) {
  Stopwatch watch("potentials");
  if (potential_labels.empty()) potential_labels = {"phi0", "gamma"};
  auto rule = ballast::m_rule_from_string(m_given && !rule_given ? "fixed" : m_rule);
  const std::uint64_t balls = ballast::resolve_m(rule, n, m);
  if (checkpoint_every == 0) checkpoint_every = n;
  const auto spec = build_process(po, n, seed);
  const auto base = ballast::log_base_from_string(po.log_base);
  std::vector<ballast::PotentialSpec> potentials;
  for (const auto& label : potential_labels) {
    potentials.push_back(ballast::parse_potential(label, po.k, base));
  }
  const auto runs =
      ballast::simulate_reps(spec, n, balls, reps, seed, threads, checkpoint_every, potentials);

  std::ostringstream csv;
  csv << std::setprecision(17) << "rep,t,gap";
  for (const auto& p : potentials) csv << "," << ballast::label_of(p);
  csv << "\n";
  for (std::uint32_t r = 0; r < runs.size(); ++r) {
    const auto& res = runs[r];
    for (std::size_t i = 0; i < res.checkpoint_times.size(); ++i) {
      csv << r << "," << res.checkpoint_times[i] << "," << res.gap_series[i];
      for (const auto& series : res.observable_series) csv << "," << series[i];
      csv << "\n";
    }
  }
  json labels = json::array();
  for (const auto& p : potentials) labels.push_back(ballast::label_of(p));
  json summary{{"tool", "ballast"},
               {"version", ballast::kVersion},
               {"command", "potentials"},
               {"process", ballast::describe(spec)},
               {"n", n},
               {"m", balls},
               {"reps", reps},
               {"seed", seed},
               {"checkpoint_every", checkpoint_every},
               {"potentials", labels}};
  emit(oo, csv.str(), summary);
  return 0;
}

int cmd_lower_bound(const std::vector<std::uint32_t>& ns, double delta, const std::string& regime,
                    std::uint32_t reps, std::uint64_t seed, std::uint32_t threads,
                    const OutputOpts& oo) {
  Stopwatch watch("lower-bound");
  const auto rule = ballast::m_rule_from_string(regime);
  std::ostringstream csv;
  csv << std::setprecision(17) << "n,m,regime,delta,threshold,reps,exceed,fraction,mean_gap\n";
  std::ostringstream text;
  text << std::left << std::setw(9) << "n" << std::setw(12) << "m" << std::setw(8) << "regime"
       << std::setw(12) << "threshold" << std::setw(10) << "exceed" << std::setw(10) << "fraction"
       << "mean_gap\n";
  json jrows = json::array();
  std::uint64_t index = 0;
  for (std::uint32_t n : ns) {
    const auto row = ballast::lower_bound_row(n, delta, rule, reps,
                                              ballast::rep_seed(seed, (index + 1) << 32), threads);
    csv << row.n << "," << row.m << "," << regime << "," << delta << "," << row.threshold << ","
        << row.repetitions << "," << row.exceed_count << "," << row.fraction << ","
        << row.mean_gap << "\n";
    text << std::left << std::setw(9) << row.n << std::setw(12) << row.m << std::setw(8) << regime
         << std::setw(12) << std::setprecision(6) << row.threshold << std::setw(10)
         << row.exceed_count << std::setw(10) << row.fraction << row.mean_gap << "\n";
    jrows.push_back({{"n", row.n},
                     {"m", row.m},
                     {"threshold", row.threshold},
                     {"reps", row.repetitions},
                     {"exceed", row.exceed_count},
                     {"fraction", row.fraction},
                     {"mean_gap", row.mean_gap}});
    ++index;
  }
  json summary{{"tool", "ballast"},        {"version", ballast::kVersion},
               {"command", "lower-bound"}, {"regime", regime},
               {"delta", delta},           {"reps", reps},
               {"seed", seed},             {"rows", jrows}};
  emit(oo, csv.str(), summary, text.str());
  return 0;
}

int cmd_graphical(std::uint32_t n, std::vector<std::uint32_t> degrees, std::uint64_t m,
                  const std::string& m_rule, bool m_given, bool rule_given, std::uint32_t reps,
                  std::uint64_t seed, std::uint32_t threads, const OutputOpts& oo) {
  Stopwatch watch("graphical");
  auto rule = ballast::m_rule_from_string(m_given && !rule_given ? "fixed" : m_rule);
  if (degrees.empty()) degrees = {2, 4, 16, 64, n - 1};
  const auto rows = ballast::graphical_sweep(n, degrees, rule, m, reps, seed, threads);

  std::ostringstream csv;
  csv << std::setprecision(17) << "n,degree,kind,lambda,m,reps,mean,min,max\n";
  std::ostringstream text;
  text << std::left << std::setw(8) << "degree" << std::setw(18) << "kind" << std::setw(12)
       << "lambda" << std::setw(12) << "m" << std::setw(10) << "mean" << std::setw(8) << "min"
       << "max\n";
  json jrows = json::array();
  for (const auto& row : rows) {
    csv << n << "," << row.degree << "," << row.kind << "," << row.lambda << "," << row.m << ","
        << row.dist.repetitions << "," << row.dist.mean << "," << row.dist.min << ","
        << row.dist.max << "\n";
    text << std::left << std::setw(8) << row.degree << std::setw(18) << row.kind << std::setw(12)
         << std::setprecision(4) << row.lambda << std::setw(12) << row.m << std::setw(10)
         << row.dist.mean << std::setw(8) << row.dist.min << row.dist.max << "\n";
    jrows.push_back({{"degree", row.degree},
                     {"kind", row.kind},
                     {"lambda", row.lambda},
                     {"m", row.m},
                     {"gap", dist_json(row.dist)}});
  }
  json summary{{"tool", "ballast"},      {"version", ballast::kVersion},
               {"command", "graphical"}, {"n", n},
               {"m_rule", ballast::to_string(rule)},  // m defaults to 1000n, recorded here
               {"reps", reps},           {"seed", seed},
               {"rows", jrows}};
  emit(oo, csv.str(), summary, text.str());
  return 0;
}

int cmd_verify(bool inject_fault) {
  Stopwatch watch("verify");
  const auto checks = ballast::run_verify(inject_fault);
  bool all_pass = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) std::cout << " — " << c.detail;
    std::cout << "\n";
    all_pass = all_pass && c.pass;
  }
  std::cout << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ballast — a laboratory for balanced allocations with binary queries"};
  app.set_version_flag("--version", std::string("ballast ") + ballast::kVersion);
  app.require_subcommand(1);
  app.footer(
      "Determinism: identical configuration and seed give byte-identical stdout/files.\n"
      "Seeds: repetition r uses an independent stream derived from (seed, r); the\n"
      "environment variable BALLAST_SEED supplies the default seed.\n"
      "\n"
      "CSV schemas:\n"
      "  simulate:    rep,seed,final_gap[,gap_t<T>...][,<potential>_t<T>...]\n"
      "  potentials:  rep,t,gap[,<potential>...]\n"
      "  gap-table:   n,process,m,reps,mean,min,max,histogram\n"
      "  lower-bound: n,m,regime,delta,threshold,reps,exceed,fraction,mean_gap\n"
      "  graphical:   n,degree,kind,lambda,m,reps,mean,min,max\n"
      "  histogram entries are space-separated gap:count pairs.\n"
      "\n"
      "Graph files: first line 'n d', then one '<u> <v>' edge per line, 0-indexed,\n"
      "simple and d-regular.");

  int rc = 0;

  // simulate ----------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Run repetitions of one process, report gaps");
  ProcessOpts sim_po;
  OutputOpts sim_oo;
  std::uint32_t sim_n = 1000, sim_reps = 1, sim_threads = default_threads();
  std::uint64_t sim_m = 0, sim_seed = 1, sim_every = 0;
  std::string sim_rule = "1000n";
  std::vector<std::string> sim_potentials;
  add_process_flags(sim, sim_po);
  add_output_flags(sim, sim_oo);
  sim->add_option("--n", sim_n, "Number of bins")->capture_default_str();
  sim->add_option("--m", sim_m, "Number of balls (implies --m-rule fixed)");
  sim->add_option("--m-rule", sim_rule, "fixed, 1000n, logsq, sqrt")->capture_default_str();
  sim->add_option("--reps", sim_reps, "Repetitions")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Base seed")->envname("BALLAST_SEED")->capture_default_str();
  sim->add_option("--threads", sim_threads, "Worker threads")->capture_default_str();
  sim->add_option("--checkpoint-every", sim_every, "Record gap every this many balls");
  sim->add_option("--potentials", sim_potentials, "Potential labels (phi<j>, psi<j>, gamma)")
      ->delimiter(',');
  sim->callback([&] {
    rc = cmd_simulate(sim_po, sim_n, sim_m, sim_rule, sim->count("--m") > 0,
                      sim->count("--m-rule") > 0, sim_reps, sim_seed, sim_threads, sim_every,
                      sim_potentials, sim_oo);
  });

  // gap-table ---------------------------------------------------------------
  auto* tab = app.add_subcommand("gap-table", "Reference gap table across n and processes");
  OutputOpts tab_oo;
  std::vector<std::uint32_t> tab_ns{1000, 10000};
  std::vector<std::string> tab_names;
  double tab_scale = 1.0;
  std::string tab_base = "e", tab_rule = "1000n";
  std::uint64_t tab_m = 0, tab_seed = 1;
  std::uint32_t tab_reps = 100, tab_threads = default_threads();
  add_output_flags(tab, tab_oo);
  tab->add_option("--n", tab_ns, "Bin counts")->delimiter(',')->capture_default_str();
  tab->add_option("--process", tab_names,
                  "Row labels (default: one-plus-beta(0.5), quantile-k1..k4, two-choice)")
      ->delimiter(',');
  tab->add_option("--delta-scale", tab_scale,
                  "Exponent scale of the uniform quantile grid rows")
      ->capture_default_str();
  tab->add_option("--log-base", tab_base, "Logarithm base for the grid")
      ->check(CLI::IsMember({"e", "2"}))
      ->capture_default_str();
  tab->add_option("--m", tab_m, "Number of balls (implies --m-rule fixed)");
  tab->add_option("--m-rule", tab_rule, "fixed, 1000n, logsq, sqrt")->capture_default_str();
  tab->add_option("--reps", tab_reps, "Repetitions per row")->capture_default_str();
  tab->add_option("--seed", tab_seed, "Base seed")->envname("BALLAST_SEED")->capture_default_str();
  tab->add_option("--threads", tab_threads, "Worker threads")->capture_default_str();
  tab->callback([&] {
    rc = cmd_gap_table(tab_ns, tab_names, tab_scale, tab_base, tab_m, tab_rule,
                       tab->count("--m") > 0, tab->count("--m-rule") > 0, tab_reps, tab_seed,
                       tab_threads, tab_oo);
  });

  // potentials --------------------------------------------------------------
  auto* pot = app.add_subcommand("potentials", "Potential-function series along a run");
  ProcessOpts pot_po;
  pot_po.name = "quantile";
  OutputOpts pot_oo;
  std::uint32_t pot_n = 1000, pot_reps = 1, pot_threads = default_threads();
  std::uint64_t pot_m = 0, pot_seed = 1, pot_every = 0;
  std::string pot_rule = "1000n";
  std::vector<std::string> pot_labels;
  add_process_flags(pot, pot_po);
  add_output_flags(pot, pot_oo);
  pot->add_option("--n", pot_n, "Number of bins")->capture_default_str();
  pot->add_option("--m", pot_m, "Number of balls (implies --m-rule fixed)");
  pot->add_option("--m-rule", pot_rule, "fixed, 1000n, logsq, sqrt")->capture_default_str();
  pot->add_option("--reps", pot_reps, "Repetitions")->capture_default_str();
  pot->add_option("--seed", pot_seed, "Base seed")->envname("BALLAST_SEED")->capture_default_str();
  pot->add_option("--threads", pot_threads, "Worker threads")->capture_default_str();
  pot->add_option("--checkpoint-every", pot_every, "Checkpoint stride (default n)");
  pot->add_option("--potentials", pot_labels, "Potential labels (default phi0,gamma)")
      ->delimiter(',');
  pot->callback([&] {
    rc = cmd_potentials(pot_po, pot_n, pot_m, pot_rule, pot->count("--m") > 0,
                        pot->count("--m-rule") > 0, pot_reps, pot_seed, pot_threads, pot_every,
                        pot_labels, pot_oo);
  });

  // lower-bound -------------------------------------------------------------
  auto* low = app.add_subcommand("lower-bound", "Uniform quantile gap lower-bound regimes");
  OutputOpts low_oo;
  std::vector<std::uint32_t> low_ns{10000};
  double low_delta = 0.5;
  std::string low_regime = "logsq";
  std::uint32_t low_reps = 100, low_threads = default_threads();
  std::uint64_t low_seed = 1;
  add_output_flags(low, low_oo);
  low->add_option("--n", low_ns, "Bin counts")->delimiter(',')->capture_default_str();
  low->add_option("--delta", low_delta, "Time-invariant quantile fraction")->capture_default_str();
  low->add_option("--regime", low_regime, "logsq (m = n ln^2 n) or sqrt (m = n sqrt(ln n)/10)")
      ->check(CLI::IsMember({"logsq", "sqrt"}))
      ->capture_default_str();
  low->add_option("--reps", low_reps, "Repetitions per n")->capture_default_str();
  low->add_option("--seed", low_seed, "Base seed")->envname("BALLAST_SEED")->capture_default_str();
  low->add_option("--threads", low_threads, "Worker threads")->capture_default_str();
  low->callback([&] {
    rc = cmd_lower_bound(low_ns, low_delta, low_regime, low_reps, low_seed, low_threads, low_oo);
  });

  // graphical ---------------------------------------------------------------
  auto* gra = app.add_subcommand("graphical", "Graphical allocation across graph degrees");
  OutputOpts gra_oo;
  std::uint32_t gra_n = 1000, gra_reps = 20, gra_threads = default_threads();
  std::vector<std::uint32_t> gra_degrees;
  std::uint64_t gra_m = 0, gra_seed = 1;
  std::string gra_rule = "1000n";
  add_output_flags(gra, gra_oo);
  gra->add_option("--n", gra_n, "Number of vertices/bins")->capture_default_str();
  gra->add_option("--degree", gra_degrees, "Degrees (default 2,4,16,64,n-1)")->delimiter(',');
  gra->add_option("--m", gra_m, "Number of balls (implies --m-rule fixed)");
  gra->add_option("--m-rule", gra_rule, "fixed, 1000n, logsq, sqrt")->capture_default_str();
  gra->add_option("--reps", gra_reps, "Repetitions per degree")->capture_default_str();
  gra->add_option("--seed", gra_seed, "Base seed")->envname("BALLAST_SEED")->capture_default_str();
  gra->add_option("--threads", gra_threads, "Worker threads")->capture_default_str();
  gra->callback([&] {
    rc = cmd_graphical(gra_n, gra_degrees, gra_m, gra_rule, gra->count("--m") > 0,
                       gra->count("--m-rule") > 0, gra_reps, gra_seed, gra_threads, gra_oo);
  });

  // verify ------------------------------------------------------------------
  auto* ver = app.add_subcommand("verify", "Exact identity / oracle self-checks");
  bool ver_fault = false;
  ver->add_flag("--inject-fault", ver_fault,
                "Deliberately perturb one vector so the matching check fails (negative control)");
  ver->callback([&] { rc = cmd_verify(ver_fault); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "ballast: error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
