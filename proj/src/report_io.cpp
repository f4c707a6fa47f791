#include "cosadmit/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "cosadmit/errors.hpp"

namespace cosadmit {
namespace {

Json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  return v;
}

Json opt(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

Json to_json(const Assertion& a) {
  return Json{{"name", a.name}, {"passed", a.passed}, {"lhs", num(a.lhs)}, {"rhs", num(a.rhs)},
              {"slack", num(a.slack)}};
}

Json to_json(const std::vector<Assertion>& v) {
  Json arr = Json::array();
  for (const auto& a : v) arr.push_back(to_json(a));
  return arr;
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Field readers for the config schema.
double read_number(const Json& v, const std::string& field) {
  if (!v.is_number()) throw ValidationError(field + ": expected a number");
  return v.get<double>();
}

int read_int(const Json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ValidationError(field + ": expected an integer");
  return v.get<int>();
}

template <typename T, typename Read>
std::vector<T> read_list(const Json& v, const std::string& field, Read read) {
  if (!v.is_array()) throw ValidationError(field + ": expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::string read_string(const Json& v, const std::string& field) {
  if (!v.is_string()) throw ValidationError(field + ": expected a string");
  return v.get<std::string>();
}

}  // namespace

Json to_json(const DensitySpec& f) {
  Json params = Json::object();
  for (const auto& [k, v] : f.params()) params[k] = num(v);
  return Json{{"name", f.name()},
              {"params", params},
              {"support", Json::array({num(f.support().lo), num(f.support().hi)})},
              {"is_even", f.is_even()},
              {"sup_bound", opt(f.sup_bound())},
              {"tail_exponent", opt(f.tail_exponent())},
              {"p_max", opt(f.p_max())}};
}

Json to_json(const ErrorReport& r) {
  return Json{{"l2_error", num(r.l2_error)}, {"sup_error", num(r.sup_error)}, {"grid_points", r.grid_points}};
}

Json to_json(const TailEnergyResult& r) {
  return Json{{"value", num(r.value)},
              {"k_max", r.k_max},
              {"k_tail_estimate", num(r.k_tail_estimate)},
              {"quad_error", num(r.quad_error)},
              {"blocks_used", r.blocks_used},
              {"parseval_total", num(r.parseval_total)},
              {"stagnated", r.stagnated}};
}

Json to_json(const BoundReport& r) {
  return Json{{"L", num(r.L)},
              {"p", num(r.p)},
              {"zeta_p", num(r.zeta_p)},
              {"main_bound", num(r.main_bound)},
              {"tail_rate_bound", num(r.tail_rate_bound)},
              {"uniform_bound", num(r.uniform_bound)},
              {"corollary_bound", opt(r.corollary_bound)},
              {"moments",
               {{"full", num(r.moments.full)}, {"tail", num(r.moments.tail)}, {"tail_plain", num(r.moments.tail_plain)}}},
              {"sup_bound", opt(r.sup_bound)},
              {"abs_moment", opt(r.abs_moment)}};
}

Json to_json(const DimBoundReport& r) {
  return Json{{"dimension", r.dimension},
              {"L", num(r.L)},
              {"p", num(r.p)},
              {"lattice_sum", num(r.lattice_sum)},
              {"constant", num(r.constant)},
              {"norm_factor", num(r.norm_factor)},
              {"tail_moment_upper", num(r.tail_moment_upper)},
              {"full_moment_upper", num(r.full_moment_upper)},
              {"moment_is_upper_estimate", r.moment_is_upper_estimate},
              {"bound", num(r.bound)},
              {"uniform_bound", num(r.uniform_bound)}};
}

Json to_json(const RateFit& r) {
  Json pts = Json::array();
  for (const auto& [x, y] : r.points) pts.push_back(Json::array({num(x), num(y)}));
  return Json{{"slope", num(r.slope)}, {"intercept", num(r.intercept)}, {"r_squared", num(r.r_squared)},
              {"points", pts}};
}

Json to_json(const StudyConfig& c) {
  Json tol = Json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = num(v);
  Json Ls = Json::array();
  for (double L : c.L_values) Ls.push_back(num(L));
  Json ps = Json::array();
  for (double p : c.p_values) ps.push_back(num(p));
  return Json{{"density", c.density},
              {"L_values", Ls},
              {"N_values", c.N_values},
              {"p_values", ps},
              {"k_max", c.k_max},
              {"grid_points", c.grid_points},
              {"tolerances", tol},
              {"output_path", c.output_path},
              {"parallelism", c.parallelism},
              {"studies", c.studies},
              {"dimension", c.dimension},
              {"k_max_per_axis", c.k_max_per_axis},
              {"record_timings", c.record_timings}};
}

Json to_json(const StudyReport& r) {
  Json j;
  j["config"] = to_json(r.config);
  j["all_passed"] = r.all_passed();

  Json conv = Json::array();
  for (const auto& c : r.convergence) {
    Json e{{"L", num(c.L)}, {"N", c.N}, {"error", c.error ? to_json(*c.error) : Json(nullptr)},
           {"failure", c.failure}};
    if (r.config.record_timings) e["seconds"] = num(c.seconds);
    conv.push_back(e);
  }
  j["convergence"] = conv;

  Json floors = Json::array();
  for (const auto& f : r.floors) floors.push_back({{"L", num(f.L)}, {"floor", opt(f.floor)}, {"argmin_N", f.argmin_N}});
  j["floors"] = floors;

  Json adm = Json::array();
  for (const auto& c : r.admissibility) {
    Json bounds = Json::array();
    for (const auto& b : c.bounds) {
      bounds.push_back({{"p", num(b.p)},
                        {"report", b.report ? to_json(*b.report) : Json(nullptr)},
                        {"failure", b.failure},
                        {"checks", to_json(b.checks)}});
    }
    Json e{{"L", num(c.L)}, {"tail_energy", c.tail ? to_json(*c.tail) : Json(nullptr)}, {"failure", c.failure},
           {"bounds", bounds}};
    if (r.config.record_timings) e["seconds"] = num(c.seconds);
    adm.push_back(e);
  }
  j["admissibility"] = adm;

  Json dim = Json::array();
  for (const auto& c : r.dimensional) {
    Json bounds = Json::array();
    for (const auto& [p, b] : c.bounds) bounds.push_back(to_json(b));
    dim.push_back({{"L", num(c.L)},
                   {"tail_energy", c.tail ? to_json(*c.tail) : Json(nullptr)},
                   {"failure", c.failure},
                   {"bounds", bounds},
                   {"checks", to_json(c.checks)}});
  }
  j["dimensional"] = dim;

  Json rates = Json::array();
  for (const auto& e : r.rates) {
    rates.push_back({{"p", num(e.p)},
                     {"fit", e.fit ? to_json(*e.fit) : Json(nullptr)},
                     {"theoretical_slope", opt(e.theoretical_slope)},
                     {"failure", e.failure},
                     {"note", e.note},
                     {"checks", to_json(e.checks)}});
  }
  j["rates"] = rates;
  j["trends"] = to_json(r.trends);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

StudyConfig study_config_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  static const std::set<std::string> known{"density",     "L_values",      "N_values",       "p_values",
                                           "k_max",       "grid_points",   "tolerances",     "output_path",
                                           "parallelism", "studies",       "dimension",      "k_max_per_axis",
                                           "record_timings"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ValidationError(key + ": unknown config field");
  }
  StudyConfig c;
  if (!j.contains("density")) throw ValidationError("density: required field missing");
  c.density = read_string(j["density"], "density");
  if (!j.contains("L_values")) throw ValidationError("L_values: required field missing");
  c.L_values = read_list<double>(j["L_values"], "L_values", read_number);
  if (j.contains("N_values")) c.N_values = read_list<int>(j["N_values"], "N_values", read_int);
  if (j.contains("p_values")) c.p_values = read_list<double>(j["p_values"], "p_values", read_number);
  if (j.contains("k_max")) c.k_max = read_int(j["k_max"], "k_max");
  if (j.contains("grid_points")) c.grid_points = read_int(j["grid_points"], "grid_points");
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) throw ValidationError("tolerances: expected an object");
    for (const auto& [k, v] : j["tolerances"].items()) c.tolerances[k] = read_number(v, "tolerances." + k);
  }
  if (j.contains("output_path")) c.output_path = read_string(j["output_path"], "output_path");
  if (j.contains("parallelism")) c.parallelism = read_int(j["parallelism"], "parallelism");
  if (j.contains("studies")) c.studies = read_list<std::string>(j["studies"], "studies", read_string);
  if (j.contains("dimension")) c.dimension = read_int(j["dimension"], "dimension");
  if (j.contains("k_max_per_axis")) c.k_max_per_axis = read_int(j["k_max_per_axis"], "k_max_per_axis");
  if (j.contains("record_timings")) {
    if (!j["record_timings"].is_boolean()) throw ValidationError("record_timings: expected a boolean");
    c.record_timings = j["record_timings"].get<bool>();
  }
  return c;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config: malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

StudyConfig load_study_config(const std::string& path) { return study_config_from_json(load_json_file(path)); }

void write_study_csv(std::ostream& os, const StudyReport& r) {
  os << "study,density,L,N,p,l2_error,sup_error,B_value,B_quad_error,B_k_tail,main_bound,tail_rate_bound,"
        "uniform_bound,corollary_bound,slack,dominance_pass,chain_pass,status\n";
  const std::string density = csv_text(r.config.density);
  for (const auto& c : r.convergence) {
    os << "convergence," << density << ',' << csv_num(c.L) << ',' << c.N << ",,";
    if (c.error) {
      os << csv_num(c.error->l2_error) << ',' << csv_num(c.error->sup_error);
    } else {
      os << ',';
    }
    os << ",,,,,,,,,,," << (c.failure.empty() ? "ok" : csv_text(c.failure)) << '\n';
  }
  for (const auto& c : r.admissibility) {
    const std::string tail = c.tail ? csv_num(c.tail->value) + ',' + csv_num(c.tail->quad_error) + ',' +
                                          csv_num(c.tail->k_tail_estimate)
                                    : std::string(",,");
    if (c.bounds.empty()) {
      os << "admissibility," << density << ',' << csv_num(c.L) << ",,,,," << tail << ",,,,,,,,"
         << (c.failure.empty() ? "ok" : csv_text(c.failure)) << '\n';
      continue;
    }
    for (const auto& b : c.bounds) {
      os << "admissibility," << density << ',' << csv_num(c.L) << ",," << csv_num(b.p) << ",,," << tail << ',';
      if (b.report) {
        const auto& rep = *b.report;
        os << csv_num(rep.main_bound) << ',' << csv_num(rep.tail_rate_bound) << ',' << csv_num(rep.uniform_bound)
           << ',' << (rep.corollary_bound ? csv_num(*rep.corollary_bound) : "") << ',';
        bool dom = true;
        bool chain = true;
        double slack = 0.0;
        for (const auto& a : b.checks) {
          if (a.name.rfind("dominance", 0) == 0) {
            dom = dom && a.passed;
            slack = a.slack;
          } else {
            chain = chain && a.passed;
          }
        }
        os << csv_num(slack) << ',' << (dom ? "true" : "false") << ',' << (chain ? "true" : "false") << ",ok\n";
      } else {
        os << ",,,,,,," << csv_text(b.failure) << '\n';
      }
    }
  }
}

void write_study_outputs(const StudyReport& r, const std::string& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("output_path: cannot write '" + path + "'");
    out << dump(to_json(r));
  }
  std::filesystem::path csv(path);
  csv.replace_extension(".csv");
  std::ofstream out(csv, std::ios::binary);
  if (!out) throw ValidationError("output_path: cannot write '" + csv.string() + "'");
  write_study_csv(out, r);
}

}  // namespace cosadmit
