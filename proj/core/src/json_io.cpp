#include "coupled_levy/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coupled_levy/error.hpp"

namespace coupled_levy {
namespace {

using nlohmann::json;

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string("field '") + key + "' must be finite");
  return x;
}

double number_or(const json& j, const char* key, double fallback) {
  return j.is_object() && j.contains(key) ? number(j, key) : fallback;
}

std::vector<double> numbers(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw ConfigError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(std::string("field '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

DensityFamily parse_family(const json& j) {
  const json& name_field = field(j, "family");
  require(name_field.is_string(), "field 'family' must be a string");
  const std::string name = name_field.get<std::string>();
  if (name == "uniform") {
    Uniform f{number(j, "lo"), number(j, "hi")};
    require(f.lo < f.hi, "uniform requires lo < hi");
    return f;
  }
  if (name == "triangular") {
    Triangular f{number(j, "lo"), number(j, "mode"), number(j, "hi")};
    require(f.lo <= f.mode && f.mode <= f.hi && f.lo < f.hi,
            "triangular requires lo <= mode <= hi and lo < hi");
    return f;
  }
  if (name == "laplace") {
    Laplace f{j.contains("loc") ? number(j, "loc") : number_or(j, "mu", 0.0),
              number_or(j, "scale", 1.0)};
    require(f.scale > 0.0, "laplace requires scale > 0");
    return f;
  }
  if (name == "exponential") {
    Exponential f{number_or(j, "rate", 1.0), number_or(j, "loc", 0.0)};
    require(f.rate > 0.0, "exponential requires rate > 0");
    return f;
  }
  if (name == "gaussian") {
    Gaussian f{number_or(j, "mu", 0.0), number_or(j, "sigma", 1.0)};
    require(f.sigma > 0.0, "gaussian requires sigma > 0");
    return f;
  }
  if (name == "tabulated") {
    auto grid = numbers(j, "grid");
    auto values = numbers(j, "values");
    require(grid.size() >= 2 && values.size() + 1 == grid.size(),
            "tabulated requires values.size() + 1 == grid.size() >= 2");
    return Tabulated(std::move(grid), std::move(values));
  }
  throw ConfigError("unknown family '" + name + "'");
}

std::vector<Atom> parse_atoms(const json& j) {
  const json& v = field(j, "atoms");
  require(v.is_array(), "field 'atoms' must be an array of [x, p] pairs");
  std::vector<Atom> atoms;
  for (const auto& e : v) {
    require(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(),
            "each atom must be a pair [x, p]");
    const Atom a{e[0].get<double>(), e[1].get<double>()};
    require(std::isfinite(a.x) && a.p > 0.0, "atoms need finite x and p > 0");
    atoms.push_back(a);
  }
  return atoms;
}

Distribution1D distribution_from(const json& j) {
  require(j.is_object(), "a law must be a JSON object");
  std::optional<Distribution1D> d;
  if (j.contains("atoms")) {
    auto atoms = parse_atoms(j);
    if (j.contains("density")) {
      const double w = number(j, "density_mass");
      require(w > 0.0 && w < 1.0, "density_mass must lie in (0,1)");
      d = Distribution1D::mixture(std::move(atoms), parse_family(field(j, "density")), w);
    } else {
      d = Distribution1D::from_atoms(std::move(atoms));
    }
  } else {
    d = Distribution1D::from_family(parse_family(j));
  }
  if (j.contains("shift")) d = shift(*d, number(j, "shift"));
  return *d;
}

ConcaveCost cost_from(const json& j) {
  const json& form_field = field(j, "form");
  require(form_field.is_string(), "field 'form' must be a string");
  const std::string form = form_field.get<std::string>();
  if (form == "power") {
    const double p = number(j, "p");
    require(p > 0.0 && p <= 1.0, "power cost requires 0 < p <= 1");
    return ConcaveCost::power(p);
  }
  if (form == "capped") {
    const double c = number(j, "c");
    require(c > 0.0, "capped cost requires c > 0");
    return ConcaveCost::capped(c);
  }
  if (form == "bounded_exp") return ConcaveCost::bounded_exp();
  if (form == "bands") {
    const json& v = field(j, "bands");
    require(v.is_array() && !v.empty(), "field 'bands' must be a nonempty array");
    std::vector<Band> bands;
    for (const auto& b : v) {
      const Band band{number(b, "lambda"), number(b, "c")};
      require(band.lambda > 0.0 && band.c > 0.0, "bands need lambda > 0 and c > 0");
      bands.push_back(band);
    }
    return ConcaveCost::bands(std::move(bands));
  }
  throw ConfigError("unknown cost form '" + form + "'");
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid document: ") + e.what());
  } catch (const std::logic_error& e) {
    // Constructor checks (mass, ordering) on values that passed the schema.
    throw ConfigError(std::string("invalid values: ") + e.what());
  }
}

json family_to_json(const DensityFamily& f) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return {{"family", "uniform"}, {"lo", v.lo}, {"hi", v.hi}};
        } else if constexpr (std::is_same_v<T, Triangular>) {
          return {{"family", "triangular"}, {"lo", v.lo}, {"mode", v.mode}, {"hi", v.hi}};
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return {{"family", "laplace"}, {"mu", v.mu}, {"scale", v.scale}};
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return {{"family", "exponential"}, {"rate", v.rate}, {"loc", v.loc}};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return {{"family", "gaussian"}, {"mu", v.mu}, {"sigma", v.sigma}};
        } else {
          std::vector<double> grid(v.grid().begin(), v.grid().end());
          for (double& g : grid) g += v.offset();
          return {{"family", "tabulated"},
                  {"grid", grid},
                  {"values", std::vector<double>(v.values().begin(), v.values().end())}};
        }
      },
      f);
}

json bound_to_json(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  return x;
}

json law_to_json(const Distribution1D& d) {
  json atoms = json::array();
  for (const Atom& a : d.atoms()) atoms.push_back({a.x, a.p});
  json pieces = json::array();
  for (const DensityPiece& p : d.pieces()) {
    json terms = json::array();
    for (const DensityTerm& t : p.terms) {
      terms.push_back({{"weight", t.weight}, {"density", family_to_json(t.family)}});
    }
    pieces.push_back({{"lo", bound_to_json(p.lo)},
                      {"hi", bound_to_json(p.hi)},
                      {"mass", p.mass()},
                      {"terms", terms}});
  }
  return {{"total_mass", d.total_mass()}, {"atoms", atoms}, {"pieces", pieces}};
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Distribution1D parse_distribution(const std::string& text) {
  return guarded([&] { return distribution_from(parse_text(text)); });
}

ConcaveCost parse_cost(const std::string& text) {
  return guarded([&] { return cost_from(parse_text(text)); });
}

CompoundPoissonSpec parse_levy_spec(const std::string& text) {
  return guarded([&] {
    const json j = parse_text(text);
    CompoundPoissonSpec spec{number(j, "rate"), distribution_from(field(j, "jump_law")),
                             number_or(j, "x0", 0.0), number_or(j, "y0", 0.0),
                             number_or(j, "horizon", 1.0)};
    require(spec.rate > 0.0, "rate must be positive");
    require(spec.horizon > 0.0, "horizon must be positive");
    return spec;
  });
}

ChainSpec parse_chain_spec(const std::string& text) {
  return guarded([&] {
    const json j = parse_text(text);
    const double steps = number(j, "steps");
    require(steps >= 0.0 && steps == std::floor(steps), "steps must be a nonnegative integer");
    ChainSpec spec{distribution_from(field(j, "jump_law")), number_or(j, "x0", 0.0),
                   number_or(j, "y0", 0.0), static_cast<std::size_t>(steps)};
    return spec;
  });
}

Distribution1D load_distribution(const std::filesystem::path& path) {
  return parse_distribution(read_text_file(path));
}
ConcaveCost load_cost(const std::filesystem::path& path) { return parse_cost(read_text_file(path)); }
CompoundPoissonSpec load_levy_spec(const std::filesystem::path& path) {
  return parse_levy_spec(read_text_file(path));
}
ChainSpec load_chain_spec(const std::filesystem::path& path) {
  return parse_chain_spec(read_text_file(path));
}

std::string distribution_to_json(const Distribution1D& d) { return law_to_json(d).dump(2); }

std::string decomposition_to_json(const HahnJordanDecomposition& dec) {
  json j = {{"p", dec.p}, {"zeta", dec.zeta}, {"nu1", law_to_json(dec.nu1)},
            {"nu2", law_to_json(dec.nu2)}};
  j["nu_star"] = dec.has_nu_star ? law_to_json(dec.nu_star) : json(nullptr);
  return j.dump(2);
}

}  // namespace coupled_levy
