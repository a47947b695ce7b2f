#include "coupled_levy/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "coupled_levy/error.hpp"
#include "coupled_levy/json_io.hpp"
#include "coupled_levy/levy.hpp"
#include "coupled_levy/oracle.hpp"

namespace coupled_levy {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<double> number_list(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_array() || v.empty()) {
    throw ConfigError(std::string("field '") + key + "' must be a nonempty array");
  }
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(std::string("field '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& name) {
  std::filesystem::path p(name);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return i;
  }
  throw ConfigError("results lack column '" + name + "'");
}

double cell_number(const std::vector<std::string>& row, std::size_t i) {
  double x = 0.0;
  if (i >= row.size() || !parse_number(row[i], x)) {
    throw ConfigError("results hold a non-numeric value where a number is expected");
  }
  return x;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string Table::to_csv() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string Table::to_json() const {
  ordered_json out = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < header.size() && i < r.size(); ++i) {
      double x = 0.0;
      if (parse_number(r[i], x)) {
        obj[header[i]] = x;
      } else {
        obj[header[i]] = r[i];
      }
    }
    out.push_back(std::move(obj));
  }
  return out.dump(2) + "\n";
}

std::string Table::render(const std::string& format) const {
  if (format == "csv") return to_csv();
  if (format == "json") return to_json();
  throw ConfigError("unknown format '" + format + "' (expected csv or json)");
}

Table parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        lines.push_back(std::move(row));
      }
      row.clear();
      cell.clear();
      any = false;
    } else {
      cell += ch;
      any = true;
    }
  }
  if (quoted) throw ConfigError("unterminated quoted CSV field");
  if (any || !cell.empty()) {
    row.push_back(std::move(cell));
    lines.push_back(std::move(row));
  }
  Table t;
  if (lines.empty()) return t;
  t.header = std::move(lines.front());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != t.header.size()) {
      throw ConfigError("CSV row " + std::to_string(i + 1) + " has the wrong number of fields");
    }
    t.rows.push_back(std::move(lines[i]));
  }
  return t;
}

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  try {
    ExperimentConfig c;
    if (!j.contains("distributions") || !j["distributions"].is_array() ||
        j["distributions"].empty()) {
      throw ConfigError("field 'distributions' must be a nonempty array");
    }
    std::size_t k = 0;
    for (const auto& e : j["distributions"]) {
      if (e.is_string()) {
        const auto path = resolve(base_dir, e.get<std::string>());
        c.distributions.push_back({path.stem().string(), load_distribution(path)});
      } else if (e.is_object() && e.contains("law")) {
        const std::string name = e.value("name", "law" + std::to_string(k));
        c.distributions.push_back({name, parse_distribution(e["law"].dump())});
      } else {
        const std::string name = e.value("name", e.value("family", "law" + std::to_string(k)));
        c.distributions.push_back({name, parse_distribution(e.dump())});
      }
      ++k;
    }
    if (!j.contains("couplings") || !j["couplings"].is_array() || j["couplings"].empty()) {
      throw ConfigError("field 'couplings' must be a nonempty array");
    }
    for (const auto& e : j["couplings"]) {
      if (!e.is_string()) throw ConfigError("couplings must be names");
      try {
        c.couplings.push_back(parse_coupling_kind(e.get<std::string>()));
      } catch (const std::exception& ex) {
        throw ConfigError(ex.what());
      }
    }
    if (!j.contains("costs") || !j["costs"].is_array() || j["costs"].empty()) {
      throw ConfigError("field 'costs' must be a nonempty array");
    }
    for (const auto& e : j["costs"]) {
      c.costs.push_back(e.is_string() ? load_cost(resolve(base_dir, e.get<std::string>()))
                                      : parse_cost(e.dump()));
    }
    c.separations = number_list(j, "separations");
    for (double a : c.separations) {
      if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("separations must be positive");
    }
    c.horizons = number_list(j, "horizons");
    for (double t : c.horizons) {
      if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("horizons must be positive");
    }
    c.rate = j.value("rate", 1.0);
    if (!(c.rate > 0.0) || !std::isfinite(c.rate)) throw ConfigError("rate must be positive");
    if (j.contains("replicas")) {
      const json& r = j["replicas"];
      if (!r.is_number_integer() || r.get<long long>() < 1) {
        throw ConfigError("replicas must be an integer >= 1");
      }
      c.replicas = r.get<std::size_t>();
    }
    if (j.contains("seed")) {
      if (!j["seed"].is_number_integer()) throw ConfigError("seed must be an integer");
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output")) c.output = resolve(base_dir, j["output"].get<std::string>());
    c.format = j.value("format", std::string("csv"));
    if (c.format != "csv" && c.format != "json") {
      throw ConfigError("format must be csv or json");
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid experiment config: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_text_file(path), path.parent_path());
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  if (config.replicas < 1) throw ConfigError("replicas must be >= 1");
  auto make_spec = [&](const NamedLaw& law, double a, double t) {
    return CompoundPoissonSpec{config.rate, law.law, 0.0, a, t};
  };
  for (const auto& law : config.distributions) {
    for (CouplingKind kind : config.couplings) {
      validate(make_spec(law, config.separations.front(), config.horizons.front()), kind);
    }
  }

  std::vector<ExperimentRow> rows;
  std::uint64_t cell = 0;
  for (const auto& law : config.distributions) {
    for (CouplingKind kind : config.couplings) {
      for (double a : config.separations) {
        for (double t : config.horizons) {
          const auto start = std::chrono::steady_clock::now();
          const auto estimates =
              estimate_costs(make_spec(law, a, t), kind, config.costs, config.replicas,
                             config.seed, cell);
          const double seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          for (std::size_t i = 0; i < config.costs.size(); ++i) {
            rows.push_back({law.name, kind, config.costs[i].name(), a, t, estimates[i],
                            config.seed, seconds});
          }
          ++cell;
        }
      }
    }
  }
  return rows;
}

Table results_table(const std::vector<ExperimentRow>& rows) {
  Table t;
  t.header = {"distribution", "coupling", "cost_form", "a", "t", "mean", "std_error",
              "replicas", "seed"};
  for (const auto& r : rows) {
    t.rows.push_back({r.distribution, to_string(r.coupling), r.cost_form, format_number(r.a),
                      format_number(r.t), format_number(r.estimate.mean),
                      format_number(r.estimate.std_error), std::to_string(r.estimate.n),
                      std::to_string(r.seed)});
  }
  return t;
}

Table timing_table(const std::vector<ExperimentRow>& rows) {
  Table t;
  t.header = {"distribution", "coupling", "cost_form", "a", "t", "wall_seconds"};
  for (const auto& r : rows) {
    t.rows.push_back({r.distribution, to_string(r.coupling), r.cost_form, format_number(r.a),
                      format_number(r.t), format_number(r.wall_seconds)});
  }
  return t;
}

int run(const ExperimentConfig& config) {
  try {
    const auto rows = run_experiment(config);
    const std::string text = results_table(rows).render(config.format);
    if (config.output.empty()) {
      std::cout << text;
      return 0;
    }
    std::ofstream out(config.output, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + config.output.string());
    out << text;
    auto timing_path = config.output;
    timing_path += ".timing.csv";
    std::ofstream timing(timing_path, std::ios::binary);
    if (!timing) throw ConfigError("cannot write " + timing_path.string());
    timing << timing_table(rows).to_csv();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return 3;
  }
}

std::string emit_plot_data(const Table& results, const std::string& kind) {
  if (kind != "cost_vs_t" && kind != "survival_vs_tv" && kind != "f_alpha") {
    throw ConfigError("unknown plot kind '" + kind +
                      "' (expected cost_vs_t, survival_vs_tv or f_alpha)");
  }
  ordered_json out = {{"kind", kind}, {"series", ordered_json::array()}};
  if (results.rows.empty()) return out.dump(2) + "\n";

  // Series keep first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, ordered_json> points;
  auto add = [&](const std::string& name, double x, double y, double err) {
    if (!points.count(name)) {
      order.push_back(name);
      points[name] = ordered_json::array();
    }
    points[name].push_back({x, y, err});
  };

  if (kind == "cost_vs_t") {
    const auto law = column(results, "distribution"), coupling = column(results, "coupling"),
               cost = column(results, "cost_form"), a = column(results, "a"),
               t = column(results, "t"), mean = column(results, "mean"),
               se = column(results, "std_error");
    for (const auto& r : results.rows) {
      add(r[law] + "/" + r[coupling] + "/" + r[cost] + "/a=" + r[a], cell_number(r, t),
          cell_number(r, mean), cell_number(r, se));
    }
  } else if (kind == "survival_vs_tv") {
    const auto t = column(results, "t"), surv = column(results, "survival"),
               se = column(results, "std_error"), tv = column(results, "tv");
    for (const auto& r : results.rows) {
      add("survival", cell_number(r, t), cell_number(r, surv), cell_number(r, se));
    }
    for (const auto& r : results.rows) add("tv", cell_number(r, t), cell_number(r, tv), 0.0);
  } else {
    const auto gamma = column(results, "gamma"), alpha = column(results, "alpha"),
               f = column(results, "f");
    for (const auto& r : results.rows) {
      add("gamma=" + r[gamma], cell_number(r, alpha), cell_number(r, f), 0.0);
    }
  }
  for (const auto& name : order) {
    out["series"].push_back({{"name", name}, {"points", points[name]}});
  }
  return out.dump(2) + "\n";
}

Table f_alpha_table(const std::vector<double>& gammas, std::size_t alpha_points) {
  if (alpha_points < 1) throw ConfigError("alpha grid needs at least one point");
  Table t;
  t.header = {"gamma", "alpha", "f", "preferred"};
  for (double g : gammas) {
    for (std::size_t i = 1; i <= alpha_points; ++i) {
      const double alpha = 2.0 * static_cast<double>(i) / static_cast<double>(alpha_points);
      const auto r = two_point_example(g, alpha);
      t.rows.push_back(
          {format_number(g), format_number(alpha), format_number(r.f_value), to_string(r.preferred)});
    }
  }
  return t;
}

}  // namespace coupled_levy
