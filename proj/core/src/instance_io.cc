#include "bap/instance_io.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bap {
namespace {

using nlohmann::json;

// Reports unknown keys so typos in config files do not pass silently.
template <typename Error>
void CheckKeys(const json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!obj.is_object()) throw Error(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw Error("unknown key '" + key + "' in " + where);
    }
  }
}

json Parse(const std::string& text, bool config) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    if (config) throw InvalidConfig(std::string("malformed JSON: ") + e.what());
    throw InvalidInstance(std::string("malformed JSON: ") + e.what());
  }
}

json SnapshotJson(const DaySnapshot& day) {
  json j;
  j["lead_day"] = day.lead_day;
  j["n_recipes"] = day.n_recipes;
  j["n_factories"] = day.n_factories;
  json caps = json::array();
  for (const auto& c : day.capacities.values()) {
    if (c) {
      caps.push_back(*c);
    } else {
      caps.push_back(nullptr);
    }
  }
  j["capacities"] = std::move(caps);
  json matrix = json::array();
  for (int i = 0; i < day.n_recipes; ++i) {
    json row = json::array();
    for (int f = 0; f < day.n_factories; ++f) {
      row.push_back(day.eligibility.EligibleIndex(i, f));
    }
    matrix.push_back(std::move(row));
  }
  j["eligibility_matrix"] = std::move(matrix);
  json orders = json::array();
  for (const Order& o : day.orders) {
    json recipes = json::array();
    for (RecipeId r : o.recipes) recipes.push_back(r.value);
    orders.push_back(
        {{"id", o.id}, {"recipes", std::move(recipes)}, {"is_real", o.is_real}});
  }
  j["orders"] = std::move(orders);
  return j;
}

GroupBounds BoundsFromJson(const json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw InvalidConfig("group bounds must list four [first, last] ranges");
  }
  GroupBounds bounds;
  for (std::size_t g = 0; g < 4; ++g) {
    const json& r = j[g];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() ||
        !r[1].is_number_integer()) {
      throw InvalidConfig("group bound must be [first, last]");
    }
    bounds[g] = {r[0].get<int>(), r[1].get<int>()};
  }
  return bounds;
}

DaySnapshot SnapshotFrom(const json& j) {
  CheckKeys<InvalidInstance>(
      j,
      {"lead_day", "n_recipes", "n_factories", "capacities",
       "eligibility_matrix", "eligibility_groups", "orders"},
      "instance");
  DaySnapshot day;
  try {
    day.lead_day = j.at("lead_day").get<int>();
    day.n_recipes = j.at("n_recipes").get<int>();
    day.n_factories = j.at("n_factories").get<int>();
    if (day.n_recipes <= 0) throw InvalidInstance("n_recipes must be positive");
    if (day.n_factories <= 0 || day.n_factories > kMaxFactories) {
      throw InvalidInstance("n_factories out of range");
    }
    std::vector<std::optional<std::int64_t>> caps;
    for (const json& c : j.at("capacities")) {
      if (c.is_null()) {
        caps.emplace_back();
      } else {
        caps.emplace_back(c.get<std::int64_t>());
      }
    }
    day.capacities = CapacityVector(std::move(caps));

    const bool has_matrix = j.contains("eligibility_matrix");
    const bool has_groups = j.contains("eligibility_groups");
    if (has_matrix == has_groups) {
      throw InvalidInstance(
          "give exactly one of eligibility_matrix and eligibility_groups");
    }
    if (has_matrix) {
      const json& rows = j.at("eligibility_matrix");
      if (!rows.is_array() ||
          rows.size() != static_cast<std::size_t>(day.n_recipes)) {
        throw InvalidInstance("eligibility_matrix needs one row per recipe");
      }
      day.eligibility = EligibilityTable(day.n_recipes, day.n_factories);
      for (int i = 0; i < day.n_recipes; ++i) {
        const json& row = rows[i];
        if (!row.is_array() ||
            row.size() != static_cast<std::size_t>(day.n_factories)) {
          throw InvalidInstance("eligibility row " + std::to_string(i + 1) +
                                " needs one entry per factory");
        }
        for (int f = 0; f < day.n_factories; ++f) {
          day.eligibility.Set(RecipeId{i + 1}, FactoryId{f + 1},
                              row[f].get<bool>());
        }
      }
    } else {
      const json& g = j.at("eligibility_groups");
      CheckKeys<InvalidInstance>(g, {"bounds"}, "eligibility_groups");
      try {
        day.eligibility = DeriveEligibility(BoundsFromJson(g.at("bounds")),
                                            day.n_recipes, day.n_factories);
      } catch (const InvalidConfig& e) {
        throw InvalidInstance(e.what());
      }
    }
    for (const json& o : j.at("orders")) {
      CheckKeys<InvalidInstance>(o, {"id", "recipes", "is_real"}, "order");
      Order order;
      order.id = o.at("id").get<OrderId>();
      for (const json& r : o.at("recipes")) {
        order.recipes.push_back(RecipeId{r.get<int>()});
      }
      order.is_real = o.value("is_real", false);
      day.orders.push_back(std::move(order));
    }
  } catch (const json::exception& e) {
    throw InvalidInstance(std::string("bad instance JSON: ") + e.what());
  }
  CheckSnapshot(day);
  return day;
}

json GeneratorJson(const GeneratorConfig& c) {
  json bounds = json::array();
  for (const RecipeRange& r : c.group_bounds) bounds.push_back({r.first, r.last});
  json schedule = json::object();
  for (const auto& [ld, f] : c.real_fraction_schedule) {
    schedule[std::to_string(ld)] = f;
  }
  return {{"total_orders", c.total_orders},
          {"n_recipes", c.n_recipes},
          {"group_bounds", bounds},
          {"class_mix", c.class_mix},
          {"capacity_fractions", c.capacity_fractions},
          {"recipes_per_order",
           {c.min_recipes_per_order, c.max_recipes_per_order}},
          {"distinct_recipes", c.distinct_recipes},
          {"real_fraction_schedule", schedule},
          {"seed", c.seed}};
}

int ParseIntKey(const std::string& key) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(key, &used);
    if (used == key.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidConfig("key '" + key + "' is not an integer");
}

GeneratorConfig GeneratorFrom(const json& j) {
  CheckKeys<InvalidConfig>(
      j,
      {"total_orders", "n_recipes", "group_bounds", "class_mix",
       "capacity_fractions", "recipes_per_order", "distinct_recipes",
       "real_fraction_schedule", "seed"},
      "generator config");
  GeneratorConfig c;
  try {
    if (j.contains("total_orders")) c.total_orders = j["total_orders"].get<std::int64_t>();
    if (j.contains("n_recipes")) c.n_recipes = j["n_recipes"].get<int>();
    if (j.contains("group_bounds")) c.group_bounds = BoundsFromJson(j["group_bounds"]);
    if (j.contains("class_mix")) {
      const json& mix = j["class_mix"];
      if (!mix.is_array() || mix.size() != kNumClasses) {
        throw InvalidConfig("class_mix needs four probabilities");
      }
      for (int k = 0; k < kNumClasses; ++k) c.class_mix[k] = mix[k].get<double>();
    }
    if (j.contains("capacity_fractions")) {
      c.capacity_fractions = j["capacity_fractions"].get<std::vector<double>>();
    }
    if (j.contains("recipes_per_order")) {
      const json& r = j["recipes_per_order"];
      if (!r.is_array() || r.size() != 2) {
        throw InvalidConfig("recipes_per_order must be [min, max]");
      }
      c.min_recipes_per_order = r[0].get<int>();
      c.max_recipes_per_order = r[1].get<int>();
    }
    if (j.contains("distinct_recipes")) {
      c.distinct_recipes = j["distinct_recipes"].get<bool>();
    }
    if (j.contains("real_fraction_schedule")) {
      c.real_fraction_schedule.clear();
      for (const auto& [key, value] : j["real_fraction_schedule"].items()) {
        c.real_fraction_schedule[ParseIntKey(key)] = value.get<double>();
      }
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("bad generator config: ") + e.what());
  }
  c.Validate();
  return c;
}

}  // namespace

std::string SnapshotToJson(const DaySnapshot& day, int indent) {
  return SnapshotJson(day).dump(indent);
}

DaySnapshot SnapshotFromJson(const std::string& text) {
  return SnapshotFrom(Parse(text, false));
}

std::string HorizonToJson(const std::vector<DaySnapshot>& days, int indent) {
  json arr = json::array();
  for (const DaySnapshot& d : days) arr.push_back(SnapshotJson(d));
  return arr.dump(indent);
}

std::vector<DaySnapshot> HorizonFromJson(const std::string& text) {
  const json j = Parse(text, false);
  std::vector<DaySnapshot> out;
  if (j.is_array()) {
    for (const json& d : j) out.push_back(SnapshotFrom(d));
  } else {
    out.push_back(SnapshotFrom(j));
  }
  return out;
}

std::string AllocationToJson(const Allocation& allocation, int indent) {
  json assignments = json::object();
  for (const auto& [id, f] : allocation.assignments) {
    assignments[std::to_string(id)] = f.value;
  }
  json j = {{"lead_day", allocation.lead_day}, {"assignments", assignments}};
  return j.dump(indent);
}

Allocation AllocationFromJson(const std::string& text) {
  const json j = Parse(text, false);
  CheckKeys<InvalidInstance>(j, {"lead_day", "assignments"}, "allocation");
  Allocation a;
  try {
    a.lead_day = j.at("lead_day").get<int>();
    for (const auto& [key, value] : j.at("assignments").items()) {
      std::size_t used = 0;
      OrderId id = 0;
      try {
        id = std::stoll(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != key.size()) {
        throw InvalidInstance("allocation key '" + key + "' is not an order id");
      }
      a.assignments[id] = FactoryId{value.get<int>()};
    }
  } catch (const json::exception& e) {
    throw InvalidInstance(std::string("bad allocation JSON: ") + e.what());
  }
  return a;
}

std::string SolveResultToJson(const SolveResult& r, const std::string& solver,
                              int indent) {
  json j;
  j["solver"] = solver;
  j["status"] = StatusName(r.status);
  j["lead_day"] = r.allocation.lead_day;
  j["denominator"] = r.denominator;
  j["wmape_site"] = {{"fraction", ToFractionString(r.objective_site)},
                     {"decimal", ToDouble(r.objective_site)}};
  j["wmape_global"] = {{"fraction", ToFractionString(r.objective_global)},
                       {"decimal", ToDouble(r.objective_global)}};
  const Ratio gap = r.objective_site - r.objective_global;
  j["gap"] = {{"fraction", ToFractionString(gap)}, {"decimal", ToDouble(gap)}};
  j["stats"] = {{"elapsed_seconds", r.elapsed_seconds},
                {"nodes_explored", r.nodes_explored},
                {"swaps_accepted", r.swaps_accepted},
                {"iterations", r.iterations}};
  if (r.lower_bound_numerator) {
    j["lower_bound_numerator"] = *r.lower_bound_numerator;
  } else {
    j["lower_bound_numerator"] = nullptr;
  }
  return j.dump(indent);
}

GeneratorConfig GeneratorConfigFromJson(const std::string& text) {
  return GeneratorFrom(Parse(text, true));
}

std::string GeneratorConfigToJson(const GeneratorConfig& config, int indent) {
  return GeneratorJson(config).dump(indent);
}

ScenarioConfig ScenarioConfigFromJson(const std::string& text) {
  const json j = Parse(text, true);
  CheckKeys<InvalidConfig>(j,
                           {"days", "solver", "capacity_overrides", "churn",
                            "generator", "budget_seconds", "itps", "tabu"},
                           "scenario config");
  ScenarioConfig c;
  try {
    if (j.contains("generator")) c.generator = GeneratorFrom(j["generator"]);
    if (j.contains("days")) {
      const json& d = j["days"];
      if (d.is_object()) {
        CheckKeys<InvalidConfig>(d, {"first", "last"}, "days");
        const int first = d.at("first").get<int>();
        const int last = d.at("last").get<int>();
        if (last < first) throw InvalidConfig("days.last precedes days.first");
        c.days.clear();
        for (int ld = first; ld <= last; ++ld) c.days.push_back(ld);
      } else {
        c.days = d.get<std::vector<int>>();
      }
    }
    if (j.contains("solver")) c.solver = SolverFromName(j["solver"].get<std::string>());
    if (j.contains("capacity_overrides")) {
      for (const auto& [ld, caps] : j["capacity_overrides"].items()) {
        auto& entry = c.capacity_overrides[ParseIntKey(ld)];
        for (const auto& [factory, cap] : caps.items()) {
          entry[ParseIntKey(factory)] = cap.get<std::int64_t>();
        }
      }
    }
    if (j.contains("churn") && !j["churn"].is_null()) {
      const json& ch = j["churn"];
      CheckKeys<InvalidConfig>(ch, {"delete_fraction", "modify_fraction"},
                               "churn");
      ChurnConfig churn;
      churn.delete_fraction = ch.value("delete_fraction", churn.delete_fraction);
      churn.modify_fraction = ch.value("modify_fraction", churn.modify_fraction);
      c.churn = churn;
    }
    if (j.contains("budget_seconds")) c.budget_seconds = j["budget_seconds"].get<double>();
    if (j.contains("itps")) {
      CheckKeys<InvalidConfig>(j["itps"], {"iterations"}, "itps");
      c.itps.iterations = j["itps"].value("iterations", c.itps.iterations);
    }
    if (j.contains("tabu")) {
      const json& t = j["tabu"];
      CheckKeys<InvalidConfig>(
          t, {"iterations", "tenure", "candidate_pool", "diversify_prob"},
          "tabu");
      c.tabu.iterations = t.value("iterations", c.tabu.iterations);
      c.tabu.tenure = t.value("tenure", c.tabu.tenure);
      c.tabu.candidate_pool = t.value("candidate_pool", c.tabu.candidate_pool);
      c.tabu.diversify_prob = t.value("diversify_prob", c.tabu.diversify_prob);
    }
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("bad scenario config: ") + e.what());
  }
  c.Validate();
  return c;
}

std::string ScenarioConfigToJson(const ScenarioConfig& c, int indent) {
  json overrides = json::object();
  for (const auto& [ld, caps] : c.capacity_overrides) {
    json entry = json::object();
    for (const auto& [factory, cap] : caps) entry[std::to_string(factory)] = cap;
    overrides[std::to_string(ld)] = entry;
  }
  json j = {{"days", c.days},
            {"solver", SolverName(c.solver)},
            {"capacity_overrides", overrides},
            {"generator", GeneratorJson(c.generator)},
            {"budget_seconds", c.budget_seconds},
            {"itps", {{"iterations", c.itps.iterations}}},
            {"tabu",
             {{"iterations", c.tabu.iterations},
              {"tenure", c.tabu.tenure},
              {"candidate_pool", c.tabu.candidate_pool},
              {"diversify_prob", c.tabu.diversify_prob}}}};
  if (c.churn) {
    j["churn"] = {{"delete_fraction", c.churn->delete_fraction},
                  {"modify_fraction", c.churn->modify_fraction}};
  } else {
    j["churn"] = nullptr;
  }
  return j.dump(indent);
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read of " + path + " failed");
  return ss.str();
}

void WriteTextFileAtomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path);
  }
}

}  // namespace bap
