#include "cosadmit/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cosadmit/bounds.hpp"
#include "cosadmit/cos_expansion.hpp"
#include "cosadmit/errors.hpp"
#include "cosadmit/parallel.hpp"
#include "cosadmit/report_io.hpp"
#include "cosadmit/study.hpp"
#include "cosadmit/tail_energy.hpp"

namespace cosadmit {
namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;

// COSADMIT_QUAD_TOL overrides the moment quadrature target.
std::optional<double> env_quad_tol() {
  const char* raw = std::getenv("COSADMIT_QUAD_TOL");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !std::isfinite(v) || !(v > 0.0)) {
    throw ValidationError(std::string("COSADMIT_QUAD_TOL: expected a positive number, got '") + raw + "'");
  }
  return v;
}

// Writes to --out when given, otherwise to the standard output.
void emit(const std::string& out_path, std::ostream& out, const std::string& text) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ValidationError("--out: cannot write '" + out_path + "'");
  f << text;
}

ProductDensitySpec product_of(const DensitySpec& f, int dim) {
  if (dim < 1) throw ValidationError("--dim: must be >= 1");
  return ProductDensitySpec(std::vector<DensitySpec>(static_cast<std::size_t>(dim), f));
}

struct Options {
  std::string density;
  double L = 0.0;
  int N = 0;
  double p = 0.0;
  int kmax = 4096;
  int grid = 401;
  int dim = 1;
  std::string out;
  std::string config;
  int parallelism = 0;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fourier-cosine density recovery and tail-energy admissibility checks", "cosadmit"};
  app.require_subcommand(1);
  Options o;
  std::function<void()> action;

  auto* list = app.add_subcommand("list-densities", "print the density catalog as JSON");
  list->add_option("--out", o.out, "output file");
  list->callback([&] {
    action = [&] {
      Json arr = Json::array();
      for (const auto& f : catalog()) arr.push_back(to_json(f));
      emit(o.out, out, dump(arr));
    };
  });

  auto* coeffs = app.add_subcommand("coeffs", "write F_0..F_{N-1} as CSV");
  coeffs->add_option("--density", o.density, "density, e.g. student_t(nu=0.4)")->required();
  coeffs->add_option("--L", o.L, "half-width of the interval [-L, L]")->required();
  coeffs->add_option("--N", o.N, "number of modes")->required();
  coeffs->add_option("--out", o.out, "output CSV file");
  coeffs->callback([&] {
    action = [&] {
      const CosExpansion e = build_expansion(parse_density(o.density), o.L, o.N);
      std::ostringstream os;
      write_coefficients_csv(os, e);
      emit(o.out, out, os.str());
    };
  });

  auto* recover = app.add_subcommand("recover", "reconstruct the pdf and report its errors");
  recover->add_option("--density", o.density, "density")->required();
  recover->add_option("--L", o.L, "half-width")->required();
  recover->add_option("--N", o.N, "number of modes")->required();
  recover->add_option("--grid", o.grid, "points of the sup-error grid")->capture_default_str();
  recover->add_option("--out", o.out, "output JSON file");
  recover->callback([&] {
    action = [&] {
      const DensitySpec f = parse_density(o.density);
      const CosExpansion e = build_expansion(f, o.L, o.N);
      const ErrorReport r = measure_error(f, e, o.grid, default_parallelism());
      Json j{{"density", f.name()}, {"L", o.L}, {"N", o.N}, {"mass", e.mass()}};
      const Json body = to_json(r);
      for (const auto& [k, v] : body.items()) j[k] = v;
      emit(o.out, out, dump(j));
    };
  });

  auto* tail = app.add_subcommand("tail-energy", "brute-force tail cosine energy B(L)");
  tail->add_option("--density", o.density, "density")->required();
  tail->add_option("--L", o.L, "half-width")->required();
  tail->add_option("--kmax", o.kmax, "highest mode (per axis when --dim > 1)")->capture_default_str();
  tail->add_option("--dim", o.dim, "product dimension, 1 to 3")->capture_default_str();
  tail->add_option("--out", o.out, "output JSON file");
  tail->callback([&] {
    action = [&] {
      const DensitySpec f = parse_density(o.density);
      Json j{{"density", f.name()}, {"L", o.L}, {"dimension", o.dim}};
      const TailEnergyResult r =
          o.dim == 1 ? brute_force_B(f, o.L, o.kmax, default_parallelism())
                     : brute_force_Bd(product_of(f, o.dim), std::vector<double>(static_cast<std::size_t>(o.dim), o.L),
                                      o.kmax, default_parallelism());
      const Json body = to_json(r);
      for (const auto& [k, v] : body.items()) j[k] = v;
      emit(o.out, out, dump(j));
    };
  });

  auto* bounds = app.add_subcommand("bounds", "moment-based bounds on B(L) or B_d(L)");
  bounds->add_option("--density", o.density, "density")->required();
  bounds->add_option("--L", o.L, "half-width")->required();
  bounds->add_option("--p", o.p, "moment order")->required();
  bounds->add_option("--dim", o.dim, "product dimension, 1 to 3")->capture_default_str();
  bounds->add_option("--out", o.out, "output JSON file");
  bounds->callback([&] {
    action = [&] {
      const DensitySpec f = parse_density(o.density);
      const double tol = env_quad_tol().value_or(1e-11);
      Json j{{"density", f.name()}};
      const Json body = o.dim == 1 ? to_json(bound_report(f, o.L, o.p, tol))
                                   : to_json(bound_report_d(product_of(f, o.dim), o.L, o.p, tol));
      for (const auto& [k, v] : body.items()) j[k] = v;
      emit(o.out, out, dump(j));
    };
  });

  auto* study = app.add_subcommand("study", "run a convergence/admissibility sweep from a JSON config");
  study->add_option("--config", o.config, "config file")->required();
  study->add_option("--parallelism", o.parallelism, "worker count (default: all cores)");
  study->add_option("--out", o.out, "report path, overrides output_path");
  study->callback([&] {
    action = [&] {
      const Json raw = load_json_file(o.config);
      StudyConfig cfg = study_config_from_json(raw);
      if (study->count("--parallelism") > 0) {
        cfg.parallelism = o.parallelism;
      } else if (!raw.contains("parallelism")) {
        cfg.parallelism = static_cast<int>(default_parallelism());
      }
      if (!o.out.empty()) cfg.output_path = o.out;
      if (auto tol = env_quad_tol(); tol && !cfg.tolerances.contains("quad_tol")) cfg.tolerances["quad_tol"] = *tol;
      const StudyReport r = run_study(cfg);
      if (cfg.output_path.empty()) {
        out << dump(to_json(r));
      } else {
        write_study_outputs(r, cfg.output_path);
        out << "wrote " << cfg.output_path << "\n";
      }
      if (!r.all_passed()) err << "study: some assertions failed, see the report\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInvalid;
  }

  try {
    if (action) action();
    return 0;
  } catch (const AccuracyError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const OverflowError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace cosadmit
