#include "cli.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "bap/errors.h"
#include "bap/exact.h"
#include "bap/generator.h"
#include "bap/heuristics.h"
#include "bap/instance_io.h"
#include "bap/metrics.h"
#include "bap/milp.h"
#include "bap/random.h"
#include "bap/simulator.h"
#include "svg_plot.h"
#include "table.h"

#ifndef BAP_VERSION
#define BAP_VERSION "unknown"
#endif

namespace bap::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Globals {
  std::uint64_t seed = 1;
  int jobs = 1;
  double budget = 600.0;
  std::string output_dir = "bap_out";
  std::string format = "csv";
  bool seed_given = false;
  bool budget_given = false;
};

std::string Decimal(const Ratio& r) { return fmt::format("{:.8f}", ToDouble(r)); }
std::string Seconds(double s) { return fmt::format("{:.4f}", s); }
std::string LdName(int lead_day) { return fmt::format("LD{}", -lead_day); }

// Lead days are accepted as "11" or "-11"; both mean LD11.
int LeadDayArg(int v) { return v > 0 ? -v : v; }

std::string UtcNow() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json ParseJson(const std::string& text) { return json::parse(text); }

// Collects the outputs of one command and writes manifest.json last.
class Run {
 public:
  Run(std::string command, const std::vector<std::string>& args,
      const Globals& globals)
      : command_(std::move(command)),
        args_(args),
        globals_(globals),
        started_(UtcNow()) {
    std::error_code ec;
    fs::create_directories(globals_.output_dir, ec);
    if (ec) {
      throw IoError("cannot create output directory " + globals_.output_dir +
                    ": " + ec.message());
    }
  }

  TableFormat format() const { return TableFormatFromName(globals_.format); }
  json& config() { return config_; }
  json& seeds() { return seeds_; }

  std::string PathOf(const std::string& name) const {
    return (fs::path(globals_.output_dir) / name).string();
  }

  void Write(const std::string& name, const std::string& content) {
    WriteTextFileAtomic(PathOf(name), content);
    outputs_.push_back(name);
  }

  // Outside the output directory, e.g. an explicit --out path.
  void WriteExternal(const std::string& path, const std::string& content) {
    WriteTextFileAtomic(path, content);
    outputs_.push_back(path);
  }
  void RecordExternal(const std::string& path) { outputs_.push_back(path); }

  std::string WriteTable(const std::string& stem, const Table& table) {
    const std::string name = stem + TableExtension(format());
    Write(name, Render(table, format()));
    return name;
  }

  void Finish(std::ostream& out) {
    json manifest;
    manifest["command"] = command_;
    manifest["argv"] = args_;
    manifest["globals"] = {{"seed", globals_.seed},
                           {"jobs", globals_.jobs},
                           {"budget_seconds", globals_.budget},
                           {"output_dir", globals_.output_dir},
                           {"format", globals_.format}};
    manifest["config"] = config_;
    json seeds = {{"master", globals_.seed},
                  {"derivation",
                   "DeriveSeed(master, tag, index) = "
                   "Mix64(Mix64(master ^ fnv1a64(tag)) + index)"}};
    for (const auto& [k, v] : seeds_.items()) seeds[k] = v;
    manifest["seeds"] = seeds;
    manifest["versions"] = {
        {"bap", BAP_VERSION},
        {"compiler", __VERSION__},
        {"boost", BOOST_LIB_VERSION},
        {"fmt", FMT_VERSION},
        {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                      NLOHMANN_JSON_VERSION_MINOR,
                                      NLOHMANN_JSON_VERSION_PATCH)},
        {"cli11", CLI11_VERSION}};
    manifest["started_utc"] = started_;
    manifest["finished_utc"] = UtcNow();
    manifest["outputs"] = outputs_;
    WriteTextFileAtomic(PathOf("manifest.json"), manifest.dump(2) + "\n");
    out << fmt::format("wrote {} file(s) and manifest.json to {}\n",
                       outputs_.size(), globals_.output_dir);
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  Globals globals_;
  std::string started_;
  json config_ = json::object();
  json seeds_ = json::object();
  std::vector<std::string> outputs_;
};

// "10:1=1000" -> from LD10 on, F1 holds 1000 orders.
void ParseOverride(const std::string& text, CapacityOverrides& overrides) {
  const auto colon = text.find(':');
  const auto eq = text.find('=');
  if (colon == std::string::npos || eq == std::string::npos || eq < colon) {
    throw InvalidConfig("capacity override '" + text +
                        "' is not of the form LD:FACTORY=CAPACITY");
  }
  try {
    std::size_t used = 0;
    const std::string ld_s = text.substr(0, colon);
    const std::string f_s = text.substr(colon + 1, eq - colon - 1);
    const std::string c_s = text.substr(eq + 1);
    const int ld = std::stoi(ld_s, &used);
    if (used != ld_s.size()) throw std::invalid_argument(ld_s);
    const int factory = std::stoi(f_s, &used);
    if (used != f_s.size()) throw std::invalid_argument(f_s);
    const std::int64_t cap = std::stoll(c_s, &used);
    if (used != c_s.size()) throw std::invalid_argument(c_s);
    overrides[LeadDayArg(ld)][factory] = cap;
  } catch (const std::logic_error&) {
    throw InvalidConfig("capacity override '" + text + "' has a bad number");
  }
}

json OverridesJson(const CapacityOverrides& overrides) {
  json out = json::object();
  for (const auto& [ld, caps] : overrides) {
    json entry = json::object();
    for (const auto& [f, c] : caps) entry[std::to_string(f)] = c;
    out[std::to_string(ld)] = entry;
  }
  return out;
}

// ---------------------------------------------------------------- inputs

struct DayInputOptions {
  std::string instance;
  std::optional<int> lead_day;
  std::string prev_instance;
  std::optional<int> prev_lead_day;
  std::string prev_allocation;
};

struct DayInputs {
  DaySnapshot day;
  DaySnapshot prev_day;
  Allocation prev_allocation;
  bool prev_allocation_is_greedy = false;
  RecipeSiteMatrix prev;
};

void AddDayInputOptions(CLI::App* cmd, DayInputOptions& o) {
  cmd->add_option("--instance", o.instance,
                  "Instance JSON (one day or an array of days)")
      ->required();
  cmd->add_option("--lead-day", o.lead_day,
                  "Day to use when the file holds several (default: last)");
  cmd->add_option("--prev-instance", o.prev_instance,
                  "Previous day's instance (default: same file)");
  cmd->add_option("--prev-lead-day", o.prev_lead_day,
                  "Previous lead day (default: the day before)");
  cmd->add_option("--prev-allocation", o.prev_allocation,
                  "Previous day's allocation JSON (default: greedy)");
}

DaySnapshot PickDay(const std::vector<DaySnapshot>& days,
                    std::optional<int> lead_day, const std::string& path) {
  if (days.empty()) throw InvalidInstance(path + " holds no instance");
  if (!lead_day) return days.back();
  for (const DaySnapshot& d : days) {
    if (d.lead_day == *lead_day) return d;
  }
  throw InvalidConfig(path + " has no " + LdName(*lead_day));
}

DayInputs LoadDayInputs(const DayInputOptions& o) {
  DayInputs in;
  const std::vector<DaySnapshot> days =
      HorizonFromJson(ReadTextFile(o.instance));
  std::optional<int> ld;
  if (o.lead_day) ld = LeadDayArg(*o.lead_day);
  in.day = PickDay(days, ld, o.instance);

  const int prev_ld =
      o.prev_lead_day ? LeadDayArg(*o.prev_lead_day) : in.day.lead_day - 1;
  if (o.prev_instance.empty()) {
    in.prev_day = PickDay(days, prev_ld, o.instance);
  } else {
    const std::vector<DaySnapshot> prev_days =
        HorizonFromJson(ReadTextFile(o.prev_instance));
    std::optional<int> pick;
    if (prev_days.size() > 1 || o.prev_lead_day) pick = prev_ld;
    in.prev_day = PickDay(prev_days, pick, o.prev_instance);
  }
  if (in.prev_day.n_recipes != in.day.n_recipes ||
      in.prev_day.n_factories != in.day.n_factories) {
    throw InvalidInstance("previous instance has a different shape");
  }

  if (o.prev_allocation.empty()) {
    in.prev_allocation = GreedyConstruct(in.prev_day);
    in.prev_allocation_is_greedy = true;
  } else {
    in.prev_allocation = AllocationFromJson(ReadTextFile(o.prev_allocation));
    const ValidationReport report =
        ValidateAllocation(in.prev_day, in.prev_allocation);
    if (!report.ok()) {
      throw InvalidConfig("previous allocation is not valid for " +
                          LdName(in.prev_day.lead_day) + ": " +
                          report.Summary());
    }
  }
  in.prev = BuildRecipeSiteMatrix(in.prev_day, in.prev_allocation);
  return in;
}

json DayInputsJson(const DayInputOptions& o, const DayInputs& in) {
  return {{"instance", o.instance},
          {"lead_day", in.day.lead_day},
          {"instance_digest", SnapshotDigest(in.day)},
          {"prev_instance", o.prev_instance.empty() ? o.instance
                                                    : o.prev_instance},
          {"prev_lead_day", in.prev_day.lead_day},
          {"prev_instance_digest", SnapshotDigest(in.prev_day)},
          {"prev_allocation",
           in.prev_allocation_is_greedy ? "greedy" : o.prev_allocation}};
}

// ---------------------------------------------------------------- solving

const std::vector<std::string> kSolverNames = {"greedy", "itps",     "tabu",
                                               "exact",  "id_based", "brute"};

struct SolverSettings {
  std::string solver = "exact";
  double budget_seconds = 600.0;
  std::uint64_t seed = 1;
  ItpsParams itps;
  TabuParams tabu;
  std::optional<Allocation> warm_start;
};

SolveResult Wrap(const DaySnapshot& day, const RecipeSiteMatrix& prev,
                 Allocation allocation,
                 std::chrono::steady_clock::time_point start) {
  SolveResult r;
  r.allocation = std::move(allocation);
  FinalizeObjectives(day, prev, r);
  r.elapsed_seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return r;
}

SolveResult SolveWith(const SolverSettings& s, const DayInputs& in) {
  const auto start = std::chrono::steady_clock::now();
  const DaySnapshot& day = in.day;
  const std::uint64_t seed = DeriveSeed(s.seed, "solve", -day.lead_day);
  if (s.solver == "greedy") {
    return Wrap(day, in.prev, GreedyConstruct(day), start);
  }
  if (s.solver == "id_based") {
    return Wrap(day, in.prev,
                IdBasedAllocate(day, in.prev_allocation, in.prev_day), start);
  }
  if (s.solver == "itps" || s.solver == "tabu") {
    const Allocation init = s.warm_start ? *s.warm_start : GreedyConstruct(day);
    SolveResult r;
    if (s.solver == "itps") {
      ItpsParams p = s.itps;
      p.seed = seed;
      r = ItpsImprove(day, init, in.prev, p);
    } else {
      TabuParams p = s.tabu;
      p.seed = seed;
      r = TabuImprove(day, init, in.prev, p);
    }
    r.elapsed_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return r;
  }
  if (s.solver == "exact") {
    ExactOptions options;
    options.budget_seconds = s.budget_seconds;
    options.warm_start =
        s.warm_start ? *s.warm_start
                     : IdBasedAllocate(day, in.prev_allocation, in.prev_day);
    options.id_hint = in.prev_allocation;
    options.warm_tabu = s.tabu;
    options.warm_tabu.seed = seed;
    return ExactSolve(day, in.prev, options);
  }
  if (s.solver == "brute") return BruteForceOracle(day, in.prev);
  throw InvalidConfig("unknown solver '" + s.solver + "'");
}

Table MetricsTable() {
  return {{"lead_day", "wmape_site", "wmape_global", "gap", "solver",
           "elapsed_seconds"},
          {}};
}

void AddMetricsRow(Table& t, int lead_day, const WmapePair& pair,
                   const std::string& solver, double elapsed) {
  t.rows.push_back({std::to_string(lead_day), Decimal(pair.site),
                    Decimal(pair.global), Decimal(OptimalityGap(pair)), solver,
                    Seconds(elapsed)});
}

WmapePair PairOf(const SolveResult& r) {
  return {r.objective_site, r.objective_global, r.denominator};
}

// ---------------------------------------------------------------- plots

LineChart ChartFromTable(const Table& table, const std::string& title,
                         const std::string& y_label) {
  const int ld = table.ColumnIndex("lead_day");
  const int site = table.ColumnIndex("wmape_site");
  const int global = table.ColumnIndex("wmape_global");
  int solver = -1;
  try {
    solver = table.ColumnIndex("solver");
  } catch (const std::out_of_range&) {
  }
  std::vector<std::string> names;
  std::map<std::string, std::pair<PlotSeries, PlotSeries>> by_solver;
  for (const auto& row : table.rows) {
    const std::string name = solver >= 0 ? row[solver] : "series";
    auto [it, inserted] = by_solver.try_emplace(name);
    if (inserted) {
      names.push_back(name);
      it->second.first.label = name + " site";
      it->second.second.label = name + " global";
      it->second.second.dashed = true;
    }
    try {
      const double x = std::stod(row[ld]);
      it->second.first.x.push_back(x);
      it->second.first.y.push_back(std::stod(row[site]));
      it->second.second.x.push_back(x);
      it->second.second.y.push_back(std::stod(row[global]));
    } catch (const std::logic_error&) {
      throw InvalidConfig("plot input has a non-numeric cell");
    }
  }
  LineChart chart;
  chart.title = title;
  chart.x_label = "lead day";
  chart.y_label = y_label;
  for (const std::string& name : names) {
    chart.series.push_back(by_solver[name].first);
    chart.series.push_back(by_solver[name].second);
  }
  return chart;
}

Table ReadTableFile(const std::string& path) {
  const std::string text = ReadTextFile(path);
  return fs::path(path).extension() == ".json" ? TableFromJson(text)
                                               : TableFromCsv(text);
}

// ---------------------------------------------------------------- commands

struct GenerateOptions {
  std::string config;
  std::optional<std::int64_t> orders;
  int days = 1;
  int first_lead_day = 18;
  std::vector<std::string> overrides;
};

int CmdGenerate(const GenerateOptions& o, const Globals& g,
                const std::vector<std::string>& args, std::ostream& out) {
  GeneratorConfig config;
  if (!o.config.empty()) {
    config = GeneratorConfigFromJson(ReadTextFile(o.config));
  }
  if (o.orders) config.total_orders = *o.orders;
  if (g.seed_given) config.seed = g.seed;
  config.Validate();
  if (o.days < 1) throw InvalidConfig("--days must be at least 1");
  CapacityOverrides overrides;
  for (const std::string& s : o.overrides) ParseOverride(s, overrides);
  for (const auto& [ld, caps] : overrides) {
    for (const auto& [factory, cap] : caps) {
      if (factory < 1 || factory >= config.n_factories()) {
        throw InvalidConfig("capacity override names F" +
                            std::to_string(factory) +
                            ", which is not a bounded factory");
      }
    }
  }

  Run run("generate", args, g);
  run.config() = {{"generator", ParseJson(GeneratorConfigToJson(config))},
                  {"days", o.days},
                  {"first_lead_day", -LeadDayArg(o.first_lead_day)},
                  {"capacity_overrides", OverridesJson(overrides)}};
  run.seeds()["generator"] = config.seed;
  const int first = LeadDayArg(o.first_lead_day);
  DaySnapshot day;
  for (int k = 0; k < o.days; ++k) {
    const int ld = first + k;
    day = k == 0 ? GenerateDay(config, ld, overrides)
                 : EvolveDay(day, config, ld, overrides);
    run.Write("instance_" + LdName(ld) + ".json", SnapshotToJson(day) + "\n");
  }
  run.Finish(out);
  return kExitOk;
}

struct SolveOptions {
  DayInputOptions inputs;
  std::string solver = "exact";
  std::string warm_start;
  std::optional<std::int64_t> itps_iterations;
  std::optional<std::int64_t> tabu_iterations;
};

void ApplyIterationOverrides(std::optional<std::int64_t> itps,
                             std::optional<std::int64_t> tabu,
                             SolverSettings& s) {
  if (itps) s.itps.iterations = *itps;
  if (tabu) s.tabu.iterations = *tabu;
  if (s.itps.iterations <= 0) {
    throw InvalidConfig("ITPS iterations must be positive");
  }
  s.tabu.Validate();
}

int CmdSolve(const SolveOptions& o, const Globals& g,
             const std::vector<std::string>& args, std::ostream& out) {
  SolverSettings s;
  s.solver = o.solver;
  s.budget_seconds = g.budget;
  s.seed = g.seed;
  ApplyIterationOverrides(o.itps_iterations, o.tabu_iterations, s);
  const DayInputs in = LoadDayInputs(o.inputs);
  if (!o.warm_start.empty()) {
    Allocation warm = AllocationFromJson(ReadTextFile(o.warm_start));
    const ValidationReport report = ValidateAllocation(in.day, warm);
    if (!report.ok()) {
      throw InvalidConfig("warm start is not valid: " + report.Summary());
    }
    s.warm_start = std::move(warm);
  }

  Run run("solve", args, g);
  run.config() = DayInputsJson(o.inputs, in);
  run.config()["solver"] = s.solver;
  run.config()["budget_seconds"] = s.budget_seconds;
  run.config()["warm_start"] = o.warm_start;
  run.config()["itps"] = {{"iterations", s.itps.iterations}};
  run.config()["tabu"] = {{"iterations", s.tabu.iterations},
                          {"tenure", s.tabu.tenure},
                          {"candidate_pool", s.tabu.candidate_pool},
                          {"diversify_prob", s.tabu.diversify_prob}};
  run.seeds()["solve"] = DeriveSeed(g.seed, "solve", -in.day.lead_day);

  const SolveResult r = SolveWith(s, in);
  const std::string ld = LdName(in.day.lead_day);
  run.Write("allocation_" + ld + ".json", AllocationToJson(r.allocation) + "\n");
  run.Write("result_" + ld + ".json", SolveResultToJson(r, s.solver) + "\n");
  Table metrics = MetricsTable();
  AddMetricsRow(metrics, in.day.lead_day, PairOf(r), s.solver,
                r.elapsed_seconds);
  run.WriteTable("metrics", metrics);
  out << fmt::format("{} {}: wmape_site {} wmape_global {} status {}\n", ld,
                     s.solver, Decimal(r.objective_site),
                     Decimal(r.objective_global), StatusName(r.status));
  run.Finish(out);
  return kExitOk;
}

struct BenchmarkOptions {
  std::vector<std::int64_t> orders_list = {10000, 20000, 30000, 40000, 50000};
  std::vector<std::string> solvers = {"greedy", "itps", "tabu", "exact"};
  int repeats = 1;
  std::string config;
  std::optional<std::int64_t> itps_iterations;
  std::optional<std::int64_t> tabu_iterations;
};

struct BenchCell {
  std::int64_t quantity = 0;
  std::string solver;
  int repeat = 0;
  std::uint64_t seed = 0;
};

struct BenchOutcome {
  bool ok = false;
  std::string error;
  WmapePair pair;
  Ratio improvement{0};
  double elapsed = 0.0;
  std::string status;
};

// Benchmark instance: LD11 solved against a greedy LD12.
BenchOutcome RunBenchCell(const BenchCell& cell, const GeneratorConfig& base,
                          const SolverSettings& base_settings) {
  BenchOutcome outcome;
  try {
    GeneratorConfig config = base;
    config.total_orders = cell.quantity;
    config.seed = cell.seed;
    DayInputs in;
    in.prev_day = GenerateDay(config, -12);
    in.day = EvolveDay(in.prev_day, config, -11);
    in.prev_allocation = GreedyConstruct(in.prev_day);
    in.prev_allocation_is_greedy = true;
    in.prev = BuildRecipeSiteMatrix(in.prev_day, in.prev_allocation);
    const Ratio greedy_site = WmapeSite(
        in.prev, BuildRecipeSiteMatrix(in.day, GreedyConstruct(in.day)));
    SolverSettings s = base_settings;
    s.solver = cell.solver;
    s.seed = cell.seed;
    const SolveResult r = SolveWith(s, in);
    outcome.pair = PairOf(r);
    outcome.improvement =
        greedy_site.numerator() == 0
            ? Ratio(0)
            : ImprovementPercent(greedy_site, r.objective_site);
    outcome.elapsed = r.elapsed_seconds;
    outcome.status = StatusName(r.status);
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.error = e.what();
    outcome.status = "error";
  }
  return outcome;
}

int CmdBenchmark(const BenchmarkOptions& o, const Globals& g,
                 const std::vector<std::string>& args, std::ostream& out) {
  GeneratorConfig base;
  if (!o.config.empty()) base = GeneratorConfigFromJson(ReadTextFile(o.config));
  if (o.orders_list.empty()) throw InvalidConfig("--orders-list is empty");
  for (std::int64_t q : o.orders_list) {
    if (q <= 0) throw InvalidConfig("order quantities must be positive");
  }
  if (o.repeats < 1) throw InvalidConfig("--repeats must be at least 1");
  for (const std::string& s : o.solvers) {
    if (std::find(kSolverNames.begin(), kSolverNames.end(), s) ==
        kSolverNames.end()) {
      throw InvalidConfig("unknown solver '" + s + "'");
    }
  }
  SolverSettings settings;
  settings.budget_seconds = g.budget;
  ApplyIterationOverrides(o.itps_iterations, o.tabu_iterations, settings);

  std::vector<BenchCell> cells;
  for (std::int64_t q : o.orders_list) {
    for (int r = 0; r < o.repeats; ++r) {
      for (const std::string& s : o.solvers) {
        cells.push_back({q, s, r, DeriveSeed(g.seed, "repeat", r)});
      }
    }
  }

  Run run("benchmark", args, g);
  run.config() = {
      {"orders_list", o.orders_list},
      {"solvers", o.solvers},
      {"repeats", o.repeats},
      {"generator", ParseJson(GeneratorConfigToJson(base))},
      {"budget_seconds", settings.budget_seconds},
      {"itps", {{"iterations", settings.itps.iterations}}},
      {"tabu", {{"iterations", settings.tabu.iterations},
                {"tenure", settings.tabu.tenure},
                {"candidate_pool", settings.tabu.candidate_pool},
                {"diversify_prob", settings.tabu.diversify_prob}}},
      {"instance", "LD11 against greedy LD12"}};
  json repeat_seeds = json::array();
  for (int r = 0; r < o.repeats; ++r) {
    repeat_seeds.push_back(DeriveSeed(g.seed, "repeat", r));
  }
  run.seeds()["repeats"] = repeat_seeds;

  std::vector<BenchOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      outcomes[k] = RunBenchCell(cells[k], base, settings);
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(g.jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> threads;
  for (int t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  Table detail{{"quantity", "solver", "repeat", "seed", "wmape_site",
                "wmape_global", "gap", "improvement_pct", "elapsed_seconds",
                "status", "error"},
               {}};
  struct Sum {
    int runs = 0;
    int failures = 0;
    double site = 0, global = 0, gap = 0, improvement = 0, elapsed = 0;
  };
  std::vector<std::pair<std::int64_t, std::string>> keys;
  std::map<std::pair<std::int64_t, std::string>, Sum> sums;
  int failures = 0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const BenchCell& c = cells[k];
    const BenchOutcome& r = outcomes[k];
    const auto key = std::make_pair(c.quantity, c.solver);
    if (!sums.count(key)) keys.push_back(key);
    Sum& sum = sums[key];
    sum.runs++;
    if (!r.ok) {
      sum.failures++;
      failures++;
      detail.rows.push_back({std::to_string(c.quantity), c.solver,
                             std::to_string(c.repeat), std::to_string(c.seed),
                             "", "", "", "", "", r.status, r.error});
      continue;
    }
    sum.site += ToDouble(r.pair.site);
    sum.global += ToDouble(r.pair.global);
    sum.gap += ToDouble(OptimalityGap(r.pair));
    sum.improvement += ToDouble(r.improvement);
    sum.elapsed += r.elapsed;
    detail.rows.push_back(
        {std::to_string(c.quantity), c.solver, std::to_string(c.repeat),
         std::to_string(c.seed), Decimal(r.pair.site), Decimal(r.pair.global),
         Decimal(OptimalityGap(r.pair)),
         fmt::format("{:.4f}", ToDouble(r.improvement)), Seconds(r.elapsed),
         r.status, ""});
  }
  Table summary{{"quantity", "solver", "runs", "failures", "mean_wmape_site",
                 "mean_wmape_global", "mean_gap", "mean_improvement_pct",
                 "mean_elapsed_seconds"},
                {}};
  for (const auto& key : keys) {
    const Sum& s = sums[key];
    const int ok = s.runs - s.failures;
    auto mean = [&](double v, const char* f) {
      return ok ? fmt::format(fmt::runtime(f), v / ok) : std::string();
    };
    summary.rows.push_back(
        {std::to_string(key.first), key.second, std::to_string(s.runs),
         std::to_string(s.failures), mean(s.site, "{:.8f}"),
         mean(s.global, "{:.8f}"), mean(s.gap, "{:.8f}"),
         mean(s.improvement, "{:.4f}"), mean(s.elapsed, "{:.4f}")});
  }
  run.WriteTable("benchmark", detail);
  run.WriteTable("benchmark_summary", summary);
  out << ToCsv(summary);
  if (failures) out << fmt::format("{} cell(s) failed\n", failures);
  run.Finish(out);
  return kExitOk;
}

struct SimulateOptions {
  std::string scenario;
  std::string preset;
  std::vector<std::string> solvers;
  std::optional<std::int64_t> orders;
  bool no_plots = false;
};

ScenarioConfig PresetScenario(const std::string& name) {
  ScenarioConfig config;
  if (name == "fixed") return config;
  if (name == "shock") {
    config.generator.capacity_fractions = {0.30, 0.50};
    config.capacity_overrides[-10][1] = 1000;
    return config;
  }
  if (name == "churn") {
    config.churn = ChurnConfig{};
    return config;
  }
  throw InvalidConfig("unknown preset '" + name + "'");
}

int CmdSimulate(const SimulateOptions& o, const Globals& g,
                const std::vector<std::string>& args, std::ostream& out) {
  if (o.scenario.empty() == o.preset.empty()) {
    throw InvalidConfig("give exactly one of --scenario and --preset");
  }
  ScenarioConfig config = o.scenario.empty()
                              ? PresetScenario(o.preset)
                              : ScenarioConfigFromJson(ReadTextFile(o.scenario));
  if (g.seed_given) config.generator.seed = g.seed;
  if (g.budget_given) config.budget_seconds = g.budget;
  if (o.orders) config.generator.total_orders = *o.orders;
  std::vector<SolverKind> solvers;
  for (const std::string& s : o.solvers) solvers.push_back(SolverFromName(s));
  if (solvers.empty()) solvers.push_back(config.solver);
  config.solver = solvers.front();
  config.Validate();

  Run run("simulate", args, g);
  run.config() = ParseJson(ScenarioConfigToJson(config));
  run.config()["solvers"] = json::array();
  for (SolverKind k : solvers) run.config()["solvers"].push_back(SolverName(k));
  run.seeds()["generator"] = config.generator.seed;

  Table daily{{"lead_day", "solver", "wmape_site", "wmape_global", "gap",
               "real_fraction", "elapsed_seconds", "status"},
              {}};
  Table retro{{"lead_day", "solver", "wmape_site", "wmape_global"}, {}};
  Table summary{{"solver", "area_site", "area_global", "area_site_fraction",
                 "area_global_fraction"},
                {}};
  for (SolverKind kind : solvers) {
    ScenarioConfig c = config;
    c.solver = kind;
    const HorizonResult h = RunHorizon(c);
    for (const DayRecord& d : h.days) {
      daily.rows.push_back(
          {std::to_string(d.lead_day), SolverName(kind),
           Decimal(d.vs_previous.site), Decimal(d.vs_previous.global),
           Decimal(OptimalityGap(d.vs_previous)),
           fmt::format("{:.4f}", d.real_fraction), Seconds(d.elapsed_seconds),
           StatusName(d.status)});
    }
    for (const CurvePoint& p : h.retrospective) {
      retro.rows.push_back({std::to_string(p.lead_day), SolverName(kind),
                            Decimal(p.site), Decimal(p.global)});
    }
    if (!h.retrospective.empty()) {
      summary.rows.push_back({SolverName(kind), Decimal(h.area_site),
                              Decimal(h.area_global),
                              ToFractionString(h.area_site),
                              ToFractionString(h.area_global)});
    }
    out << fmt::format("{}: {} day(s) simulated\n", SolverName(kind),
                       h.days.size());
  }
  run.WriteTable("daily", daily);
  if (!retro.rows.empty()) {
    run.WriteTable("retrospective", retro);
    run.WriteTable("summary", summary);
  }
  if (!o.no_plots) {
    run.Write("daily.svg",
              RenderSvg(ChartFromTable(daily, "WMAPE against the previous day",
                                       "WMAPE")));
    if (!retro.rows.empty()) {
      run.Write("retrospective.svg",
                RenderSvg(ChartFromTable(retro, "WMAPE against LD3", "WMAPE")));
    }
  }
  run.Finish(out);
  return kExitOk;
}

struct ExportOptions {
  DayInputOptions inputs;
  std::string out;
};

int CmdExportMilp(const ExportOptions& o, const Globals& g,
                  const std::vector<std::string>& args, std::ostream& out) {
  const DayInputs in = LoadDayInputs(o.inputs);
  Run run("export-milp", args, g);
  run.config() = DayInputsJson(o.inputs, in);
  const std::string path =
      o.out.empty() ? run.PathOf("model_" + LdName(in.day.lead_day) + ".mps")
                    : o.out;
  const MilpCounts counts = ExportMilp(in.day, in.prev, path);
  run.RecordExternal(path);
  run.config()["counts"] = {{"classes", counts.classes},
                            {"integer_columns", counts.integer_columns},
                            {"continuous_columns", counts.continuous_columns},
                            {"constraints", counts.constraints}};
  run.config()["objective_denominator"] = TotalRecipeUnits(in.day);
  out << fmt::format(
      "{}: {} integer and {} continuous columns, {} constraints\n", path,
      counts.integer_columns, counts.continuous_columns, counts.constraints);
  run.Finish(out);
  return kExitOk;
}

struct PlotOptions {
  std::string input;
  std::string out;
  std::string title = "WMAPE";
};

int CmdPlot(const PlotOptions& o, const Globals& g,
            const std::vector<std::string>& args, std::ostream& out) {
  const Table table = ReadTableFile(o.input);
  LineChart chart;
  try {
    chart = ChartFromTable(table, o.title, "WMAPE");
  } catch (const std::out_of_range& e) {
    throw InvalidConfig(o.input + ": " + e.what());
  }
  Run run("plot", args, g);
  run.config() = {{"input", o.input}, {"title", o.title}};
  const std::string svg = RenderSvg(chart);
  if (o.out.empty()) {
    run.Write(fs::path(o.input).stem().string() + ".svg", svg);
  } else {
    run.WriteExternal(o.out, svg);
  }
  run.Finish(out);
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Box allocation: generate, solve and simulate order books",
               "bap"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
    g.output_dir = env;
  }
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Concurrent benchmark cells")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();
  app.add_option("--budget", g.budget, "Exact solver budget in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--output-dir", g.output_dir,
                 std::string("Output directory (env ") + kOutputDirEnv + ")")
      ->capture_default_str();
  app.add_option("--format", g.format, "Tabular output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  GenerateOptions gen;
  CLI::App* generate = app.add_subcommand("generate", "Write instance files");
  generate->add_option("--config", gen.config, "Generator config JSON");
  generate->add_option("--orders", gen.orders, "Total orders per day");
  generate->add_option("--days", gen.days, "Number of consecutive days")
      ->capture_default_str();
  generate->add_option("--first-lead-day", gen.first_lead_day,
                       "Lead day of the first instance")
      ->capture_default_str();
  generate->add_option("--override", gen.overrides,
                       "Capacity override LD:FACTORY=CAPACITY");

  SolveOptions sol;
  CLI::App* solve = app.add_subcommand("solve", "Allocate one day");
  AddDayInputOptions(solve, sol.inputs);
  solve->add_option("--solver", sol.solver)
      ->check(CLI::IsMember(kSolverNames))
      ->capture_default_str();
  solve->add_option("--warm-start", sol.warm_start,
                    "Initial allocation JSON for itps, tabu or exact");
  solve->add_option("--itps-iterations", sol.itps_iterations);
  solve->add_option("--tabu-iterations", sol.tabu_iterations);

  BenchmarkOptions bench;
  CLI::App* benchmark =
      app.add_subcommand("benchmark", "Compare solvers across order volumes");
  benchmark->add_option("--orders-list", bench.orders_list)
      ->delimiter(',')
      ->capture_default_str();
  benchmark->add_option("--solvers", bench.solvers)
      ->delimiter(',')
      ->capture_default_str();
  benchmark->add_option("--repeats", bench.repeats)->capture_default_str();
  benchmark->add_option("--config", bench.config, "Generator config JSON");
  benchmark->add_option("--itps-iterations", bench.itps_iterations);
  benchmark->add_option("--tabu-iterations", bench.tabu_iterations);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a lead-day horizon");
  simulate->add_option("--scenario", sim.scenario, "Scenario config JSON");
  simulate->add_option("--preset", sim.preset)
      ->check(CLI::IsMember({"fixed", "shock", "churn"}));
  simulate->add_option("--solvers", sim.solvers,
                       "Solvers to run (default: the scenario's)")
      ->delimiter(',');
  simulate->add_option("--orders", sim.orders, "Override total orders");
  simulate->add_flag("--no-plots", sim.no_plots);

  ExportOptions exp;
  CLI::App* export_milp =
      app.add_subcommand("export-milp", "Write the day's model as MPS");
  AddDayInputOptions(export_milp, exp.inputs);
  export_milp->add_option("--out", exp.out, "MPS path");

  PlotOptions plt;
  CLI::App* plot = app.add_subcommand("plot", "Render a metrics table as SVG");
  plot->add_option("--input", plt.input, "CSV or JSON table")->required();
  plot->add_option("--out", plt.out, "SVG path");
  plot->add_option("--title", plt.title)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();  // help of the selected subcommand, if any
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  g.seed_given = app.count("--seed") > 0;
  g.budget_given = app.count("--budget") > 0;

  try {
    if (*generate) return CmdGenerate(gen, g, args, out);
    if (*solve) return CmdSolve(sol, g, args, out);
    if (*benchmark) return CmdBenchmark(bench, g, args, out);
    if (*simulate) return CmdSimulate(sim, g, args, out);
    if (*export_milp) return CmdExportMilp(exp, g, args, out);
    if (*plot) return CmdPlot(plt, g, args, out);
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace bap::cli
