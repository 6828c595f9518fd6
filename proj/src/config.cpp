#include "mixmi/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mixmi/errors.hpp"

namespace mixmi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

const Json& field(const Json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string(where) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

double number(const Json& j, const char* key, const char* where) {
  const auto& v = field(j, key, where);
  if (!v.is_number()) throw ConfigError(std::string(where) + ": '" + key + "' must be a number");
  return v.get<double>();
}

std::size_t count(const Json& j, const char* key, const char* where) {
  const auto& v = field(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string(where) + ": '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> numbers(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(where + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// Runs a constructor that validates with ContractViolation and rethrows as ConfigError.
template <class F>
auto guarded(const std::string& where, F&& make) {
  try {
    return make();
  } catch (const ContractViolation& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

const char* output_name(OutputKind k) {
  switch (k) {
    case OutputKind::EstimatesCsv:
      return "estimates_csv";
    case OutputKind::SummaryJson:
      return "summary_json";
    case OutputKind::HistCsv:
      return "hist_csv";
    case OutputKind::QqCsv:
      return "qq_csv";
  }
  return "";
}

OutputKind output_from_name(const std::string& s) {
  for (auto k : {OutputKind::EstimatesCsv, OutputKind::SummaryJson, OutputKind::HistCsv,
                 OutputKind::QqCsv}) {
    if (s == output_name(k)) return k;
  }
  throw ConfigError("unknown output kind '" + s + "'");
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) throw ConfigError(std::string("expected: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(*(last - 1)))) --last;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ConfigError(what + ": '" + text + "' is not a number");
  }
  return v;
}

}  // namespace

Json to_json(const ContinuousDensity& density) {
  return std::visit(overloaded{
                        [](const StudentT& t) {
                          return Json{{"type", "student_t"},
                                      {"df", t.df},
                                      {"loc", t.loc},
                                      {"scale", t.scale}};
                        },
                        [](const Pareto& p) {
                          return Json{{"type", "pareto"}, {"x_m", p.x_m}, {"alpha", p.alpha}};
                        },
                        [](const MultivariateT& t) {
                          const std::size_t d = t.dim();
                          Json shape = Json::array();
                          for (std::size_t r = 0; r < d; ++r) {
                            Json row = Json::array();
                            for (std::size_t c = 0; c < d; ++c) row.push_back(t.shape()[r * d + c]);
                            shape.push_back(row);
                          }
                          return Json{{"type", "mvt"},
                                      {"df", t.df()},
                                      {"loc", t.loc()},
                                      {"shape", shape}};
                        },
                    },
                    density.params());
}

Json to_json(const MixedPairModel& model) {
  Json conditionals = Json::array();
  for (const auto& c : model.conditionals()) conditionals.push_back(to_json(c));
  return Json{{"dim", model.dim()}, {"probs", model.probs()}, {"conditionals", conditionals}};
}

Json to_json(const Bandwidth& bandwidth) {
  return std::visit(overloaded{
                        [](const Bandwidth::Explicit& e) {
                          return Json{{"rule", "explicit"}, {"h", e.h}};
                        },
                        [](const Bandwidth::PowerRule& p) {
                          return Json{
                              {"rule", "power"}, {"exponent", p.exponent}, {"scale", p.scale}};
                        },
                    },
                    bandwidth.rule());
}

Json to_json(const ExperimentConfig& config) {
  Json j;
  if (!config.id.empty()) j["id"] = config.id;
  j["model"] = to_json(config.model);
  j["n"] = config.n;
  j["m_reps"] = config.m_reps;
  j["kernel"] = Json{{"type", "student_t"}, {"df", config.kernel.df()}};
  j["bandwidth"] = to_json(config.bandwidth);
  j["seed"] = config.seed;
  j["parallelism"] = config.parallelism == 0 ? Json("auto") : Json(config.parallelism);
  Json outputs = Json::array();
  for (auto k : config.outputs) outputs.push_back(output_name(k));
  j["outputs"] = outputs;
  if (config.hist_bins) j["hist_bins"] = *config.hist_bins;
  j["quadrature"] = Json{{"abs_tol", config.quadrature.abs_tol},
                         {"rel_tol", config.quadrature.rel_tol},
                         {"max_subdivisions", config.quadrature.max_subdivisions},
                         {"tail_map", config.quadrature.tail_map == TailMap::Rational ? "rational"
                                                                                      : "exp"}};
  if (config.expected) {
    const auto& e = *config.expected;
    j["expected"] = Json{{"mi", optional_number(e.mi)},
                         {"var_clt", optional_number(e.var_clt)},
                         {"asymptotic_sd", optional_number(e.asymptotic_sd)},
                         {"mean", optional_number(e.mean)},
                         {"sd", optional_number(e.sd)}};
  }
  return j;
}

Json to_json(const OracleResult& o) {
  const auto& e = o.quad_error;
  return Json{
      {"mi", o.mi},
      {"mi_kl", o.mi_kl},
      {"mi_3h", o.mi_3h},
      {"h_y", o.h_y},
      {"h_cond", o.h_cond},
      {"h_x", o.h_x},
      {"h_z", o.h_z},
      {"var_clt", o.var_clt},
      {"var_clt_direct", o.var_clt_direct},
      {"radial_reduction", o.radial},
      {"quad_error",
       Json{{"mi", e.mi},
            {"mi_kl", e.mi_kl},
            {"mi_3h", e.mi_3h},
            {"h_y", e.h_y},
            {"h_cond", e.h_cond},
            {"h_z", e.h_z},
            {"var_clt", e.var_clt},
            {"var_clt_direct", e.var_clt_direct}}},
  };
}

Json to_json(const EstimateResult& r) {
  return Json{{"mi_hat", r.mi_hat},     {"h_hat", r.h_hat},
              {"class_terms", r.class_terms}, {"p_hat", r.p_hat},
              {"n", r.n},               {"bandwidth_used", r.bandwidth_used}};
}

ContinuousDensity density_from_json(const Json& j, std::size_t dim) {
  const auto& type = field(j, "type", "conditional");
  if (!type.is_string()) throw ConfigError("conditional: 'type' must be a string");
  const auto t = type.get<std::string>();
  if (t == "student_t") {
    if (dim != 1) throw ConfigError("conditional: student_t requires dim 1");
    const double scale = j.contains("scale") ? number(j, "scale", "student_t") : 1.0;
    const double loc = j.contains("loc") ? number(j, "loc", "student_t") : 0.0;
    return guarded("student_t", [&] {
      return ContinuousDensity::student_t(number(j, "df", "student_t"), loc, scale);
    });
  }
  if (t == "pareto") {
    if (dim != 1) throw ConfigError("conditional: pareto requires dim 1");
    return guarded("pareto", [&] {
      return ContinuousDensity::pareto(number(j, "x_m", "pareto"), number(j, "alpha", "pareto"));
    });
  }
  if (t == "mvt") {
    std::vector<double> loc = j.contains("loc") ? numbers(j.at("loc"), "mvt: 'loc'")
                                                : std::vector<double>(dim, 0.0);
    if (loc.size() != dim) throw ConfigError("mvt: 'loc' must have dim entries");
    std::vector<double> shape;
    if (!j.contains("shape")) {
      shape.assign(dim * dim, 0.0);
      for (std::size_t i = 0; i < dim; ++i) shape[i * dim + i] = 1.0;
    } else {
      const auto& s = j.at("shape");
      if (!s.is_array() || s.size() != dim) throw ConfigError("mvt: 'shape' must be dim x dim");
      for (const auto& row : s) {
        const auto r = numbers(row, "mvt: 'shape' row");
        if (r.size() != dim) throw ConfigError("mvt: 'shape' must be dim x dim");
        shape.insert(shape.end(), r.begin(), r.end());
      }
    }
    return guarded("mvt", [&] {
      return ContinuousDensity::multivariate_t(number(j, "df", "mvt"), loc, shape);
    });
  }
  throw ConfigError("conditional: unknown type '" + t + "'");
}

MixedPairModel model_from_json(const Json& j) {
  const std::size_t dim = count(j, "dim", "model");
  if (dim < 1) throw ConfigError("model: 'dim' must be at least 1");
  const auto probs = numbers(field(j, "probs", "model"), "model: 'probs'");
  const auto& conds = field(j, "conditionals", "model");
  if (!conds.is_array()) throw ConfigError("model: 'conditionals' must be an array");
  std::vector<ContinuousDensity> densities;
  for (const auto& c : conds) densities.push_back(density_from_json(c, dim));
  return guarded("model", [&] { return MixedPairModel(probs, densities); });
}

Bandwidth bandwidth_from_json(const Json& j) {
  const auto& rule = field(j, "rule", "bandwidth");
  if (!rule.is_string()) throw ConfigError("bandwidth: 'rule' must be a string");
  const auto r = rule.get<std::string>();
  if (r == "explicit") {
    return guarded("bandwidth", [&] { return Bandwidth::fixed(number(j, "h", "bandwidth")); });
  }
  if (r == "power") {
    const double scale = j.contains("scale") ? number(j, "scale", "bandwidth") : 1.0;
    return guarded("bandwidth", [&] {
      return Bandwidth::power_rule(number(j, "exponent", "bandwidth"), scale);
    });
  }
  throw ConfigError("bandwidth: unknown rule '" + r + "'");
}

QuadratureSpec quadrature_from_json(const Json& j) {
  QuadratureSpec q;
  if (j.contains("abs_tol")) q.abs_tol = number(j, "abs_tol", "quadrature");
  if (j.contains("rel_tol")) q.rel_tol = number(j, "rel_tol", "quadrature");
  if (j.contains("max_subdivisions")) {
    q.max_subdivisions = static_cast<int>(count(j, "max_subdivisions", "quadrature"));
  }
  if (j.contains("tail_map")) {
    const auto s = j.at("tail_map").get<std::string>();
    if (s == "rational") {
      q.tail_map = TailMap::Rational;
    } else if (s == "exp") {
      q.tail_map = TailMap::Exp;
    } else {
      throw ConfigError("quadrature: unknown tail_map '" + s + "'");
    }
  }
  if (!(q.abs_tol > 0.0) || !(q.rel_tol > 0.0) || q.max_subdivisions < 1) {
    throw ConfigError("quadrature: tolerances and max_subdivisions must be positive");
  }
  return q;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  auto model = model_from_json(field(j, "model", "config"));
  const auto& kj = field(j, "kernel", "config");
  const auto ktype = field(kj, "type", "kernel");
  if (!ktype.is_string() || ktype.get<std::string>() != "student_t") {
    throw ConfigError("kernel: only type 'student_t' is supported");
  }
  auto kernel = guarded("kernel", [&] {
    return KernelSpec::student_t(number(kj, "df", "kernel"), model.dim());
  });
  auto bandwidth = bandwidth_from_json(field(j, "bandwidth", "config"));

  ExperimentConfig c{.id = j.contains("id") ? j.at("id").get<std::string>() : std::string(),
                     .model = std::move(model),
                     .n = count(j, "n", "config"),
                     .m_reps = count(j, "m_reps", "config"),
                     .kernel = kernel,
                     .bandwidth = bandwidth};
  if (c.n < 2) throw ConfigError("config: 'n' must be at least 2");
  if (c.m_reps < 1) throw ConfigError("config: 'm_reps' must be at least 1");
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_unsigned()) throw ConfigError("config: 'seed' must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("parallelism")) {
    const auto& p = j.at("parallelism");
    if (p.is_string() && p.get<std::string>() == "auto") {
      c.parallelism = 0;
    } else if (p.is_number_unsigned() && p.get<std::size_t>() >= 1) {
      c.parallelism = p.get<std::size_t>();
    } else {
      throw ConfigError("config: 'parallelism' must be \"auto\" or a positive integer");
    }
  }
  if (j.contains("outputs")) {
    c.outputs.clear();
    for (const auto& o : j.at("outputs")) {
      if (!o.is_string()) throw ConfigError("config: 'outputs' must be strings");
      c.outputs.push_back(output_from_name(o.get<std::string>()));
    }
  }
  if (j.contains("hist_bins")) {
    c.hist_bins = count(j, "hist_bins", "config");
    if (*c.hist_bins < 1) throw ConfigError("config: 'hist_bins' must be at least 1");
  }
  if (j.contains("quadrature")) c.quadrature = quadrature_from_json(j.at("quadrature"));
  if (j.contains("expected")) {
    const auto& e = j.at("expected");
    c.expected = ReferenceValues{read_optional(e, "mi"), read_optional(e, "var_clt"),
                                 read_optional(e, "asymptotic_sd"), read_optional(e, "mean"),
                                 read_optional(e, "sd")};
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Bandwidth parse_bandwidth_rule(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw ConfigError("empty bandwidth rule");
  return guarded("bandwidth", [&] {
    if (parts[0] == "power" && (parts.size() == 2 || parts.size() == 3)) {
      const double scale = parts.size() == 3 ? parse_double(parts[2], "bandwidth scale") : 1.0;
      return Bandwidth::power_rule(parse_double(parts[1], "bandwidth exponent"), scale);
    }
    if (parts[0] == "explicit" && parts.size() == 2) {
      return Bandwidth::fixed(parse_double(parts[1], "bandwidth"));
    }
    if (parts.size() == 1) return Bandwidth::fixed(parse_double(parts[0], "bandwidth"));
    throw ConfigError("bandwidth rule '" + text + "' is not power:E[:S], explicit:H or a number");
  });
}

KernelSpec parse_kernel_name(const std::string& text, std::size_t dim) {
  std::string df_text;
  if (text.rfind("t:", 0) == 0) {
    df_text = text.substr(2);
  } else if (text.size() > 1 && text[0] == 't') {
    df_text = text.substr(1);
  } else {
    throw ConfigError("kernel '" + text + "' is not of the form tNU");
  }
  return guarded("kernel",
                 [&] { return KernelSpec::student_t(parse_double(df_text, "kernel df"), dim); });
}

Sample read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path.string());
  Sample s;
  s.dim = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (first_row) {
      first_row = false;
      double probe = 0.0;
      const auto& c0 = cells.front();
      const auto first = c0.find_first_not_of(" \t");
      const bool numeric =
          first != std::string::npos &&
          std::from_chars(c0.data() + first, c0.data() + c0.size(), probe).ec == std::errc();
      if (!numeric) continue;  // header
    }
    if (cells.size() < 2) throw ConfigError(where + ": expected label and at least one coordinate");
    const std::size_t dim = cells.size() - 1;
    if (s.dim == 0) s.dim = dim;
    if (dim != s.dim) throw ConfigError(where + ": inconsistent number of columns");
    const double label = parse_double(cells[0], where + " label");
    if (label < 0 || label != std::floor(label)) {
      throw ConfigError(where + ": label must be a non-negative integer");
    }
    s.labels.push_back(static_cast<int>(label));
    for (std::size_t a = 1; a < cells.size(); ++a) {
      const double v = parse_double(cells[a], where + " coordinate");
      if (!std::isfinite(v)) throw ConfigError(where + ": coordinate is not finite");
      s.points.push_back(v);
    }
  }
  if (s.labels.empty()) throw ConfigError(path.string() + ": no data rows");
  return s;
}

}  // namespace mixmi
