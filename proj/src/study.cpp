#include "cosadmit/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>

#include "cosadmit/errors.hpp"
#include "cosadmit/parallel.hpp"

namespace cosadmit {
namespace {

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> d{
      {"quad_tol", 1e-11}, {"slack_factor", 10.0}, {"chain_rel", 1e-10}};
  return d;
}

template <typename T>
void require_increasing(const std::vector<T>& v, const char* field) {
  if (v.empty()) throw ValidationError(std::string(field) + ": list must be non-empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw ValidationError(std::string(field) + ": values must be strictly increasing");
  }
}

std::string describe(const std::exception& e) {
  if (dynamic_cast<const AccuracyError*>(&e) != nullptr) return std::string("accuracy: ") + e.what();
  if (dynamic_cast<const DivergenceError*>(&e) != nullptr) return std::string("divergence: ") + e.what();
  if (dynamic_cast<const OverflowError*>(&e) != nullptr) return std::string("overflow: ") + e.what();
  return e.what();
}

Assertion check_le(std::string name, double lhs, double rhs, double slack) {
  return {std::move(name), lhs <= rhs + slack, lhs, rhs, slack};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

unsigned workers_of(const StudyConfig& cfg) { return static_cast<unsigned>(std::max(cfg.parallelism, 1)); }

// B must shrink from one L to the next. Two exact zeros (no mass outside
// either interval, or values below the smallest double) count as a pass.
Assertion decreasing(const std::string& what, double L0, double v0, double L1, double v1) {
  Assertion a;
  a.name = what + " L=" + fmt(L0) + "->" + fmt(L1);
  a.lhs = v1;
  a.rhs = v0;
  a.slack = 0.0;
  a.passed = v1 < v0 || (v1 == 0.0 && v0 == 0.0);
  return a;
}

void fill_convergence(const StudyConfig& cfg, const DensitySpec& f, StudyReport& rep) {
  const int n_max = cfg.N_values.back();
  std::vector<std::optional<CosExpansion>> full(cfg.L_values.size());
  std::vector<std::string> build_failure(cfg.L_values.size());
  parallel_for(cfg.L_values.size(), workers_of(cfg), [&](std::size_t i) {
    try {
      full[i] = build_expansion(f, cfg.L_values[i], n_max);
    } catch (const std::exception& e) {
      build_failure[i] = describe(e);
    }
  });

  const std::size_t nn = cfg.N_values.size();
  std::vector<ConvergenceCell> cells(cfg.L_values.size() * nn);
  parallel_for(cells.size(), workers_of(cfg), [&](std::size_t c) {
    const std::size_t li = c / nn;
    ConvergenceCell& cell = cells[c];
    cell.L = cfg.L_values[li];
    cell.N = cfg.N_values[c % nn];
    if (!full[li]) {
      cell.failure = build_failure[li];
      return;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cell.error = measure_error(f, full[li]->truncated(cell.N), cfg.grid_points, 1);
    } catch (const std::exception& e) {
      cell.failure = describe(e);
    }
    if (cfg.record_timings) cell.seconds = seconds_since(t0);
  });

  for (std::size_t li = 0; li < cfg.L_values.size(); ++li) {
    ConvergenceFloor fl;
    fl.L = cfg.L_values[li];
    for (std::size_t j = 0; j < nn; ++j) {
      const auto& cell = cells[li * nn + j];
      if (cell.error && (!fl.floor || cell.error->l2_error < *fl.floor)) {
        fl.floor = cell.error->l2_error;
        fl.argmin_N = cell.N;
      }
    }
    rep.floors.push_back(fl);
  }
  for (std::size_t li = 1; li < rep.floors.size(); ++li) {
    const auto& a = rep.floors[li - 1];
    const auto& b = rep.floors[li];
    if (a.floor && b.floor) {
      Assertion t = check_le("floor_decreasing L=" + fmt(a.L) + "->" + fmt(b.L), *b.floor, *a.floor, 0.0);
      t.passed = *b.floor < *a.floor;
      rep.trends.push_back(t);
    } else {
      rep.trends.push_back({"floor_decreasing L=" + fmt(a.L) + "->" + fmt(b.L), false, 0.0, 0.0, 0.0});
    }
  }
  rep.convergence = std::move(cells);
}

void fill_bounds(const StudyConfig& cfg, const DensitySpec& f, AdmissibilityCell& cell) {
  const double quad_tol = cfg.tolerance("quad_tol");
  const double slack = cfg.tolerance("slack_factor") * (cell.tail->quad_error + cell.tail->k_tail_estimate);
  const double chain = cfg.tolerance("chain_rel");
  const double b = cell.tail->value;
  for (double p : cfg.p_values) {
    BoundCell bc;
    bc.p = p;
    try {
      const BoundReport r = bound_report(f, cell.L, p, quad_tol);
      bc.checks.push_back(check_le("dominance_main", b, r.main_bound, slack));
      bc.checks.push_back(check_le("dominance_tail_rate", b, r.tail_rate_bound, slack));
      bc.checks.push_back(check_le("chain_main_tail_rate", r.main_bound, r.tail_rate_bound,
                                   chain * r.tail_rate_bound));
      bc.checks.push_back(check_le("chain_tail_rate_uniform", r.tail_rate_bound, r.uniform_bound,
                                   chain * r.uniform_bound));
      if (r.corollary_bound) bc.checks.push_back(check_le("dominance_corollary", b, *r.corollary_bound, slack));
      bc.report = r;
    } catch (const std::exception& e) {
      bc.failure = describe(e);
    }
    cell.bounds.push_back(std::move(bc));
  }
}

void fill_dimensional(const StudyConfig& cfg, const DensitySpec& f, StudyReport& rep) {
  const int d = cfg.dimension;
  const ProductDensitySpec prod(std::vector<DensitySpec>(static_cast<std::size_t>(d), f));
  std::vector<DimCell> cells(cfg.L_values.size());
  parallel_for(cells.size(), workers_of(cfg), [&](std::size_t i) {
    DimCell& cell = cells[i];
    cell.L = cfg.L_values[i];
    try {
      cell.tail = brute_force_Bd(prod, std::vector<double>(static_cast<std::size_t>(d), cell.L),
                                 cfg.k_max_per_axis, 1);
    } catch (const std::exception& e) {
      cell.failure = describe(e);
      return;
    }
    const double slack = cfg.tolerance("slack_factor") * (cell.tail->quad_error + cell.tail->k_tail_estimate);
    for (double p : cfg.p_values) {
      if (!(p > d)) continue;
      try {
        const DimBoundReport r = bound_report_d(prod, cell.L, p, cfg.tolerance("quad_tol"));
        cell.checks.push_back(check_le("dominance_d p=" + fmt(p), cell.tail->value, r.bound, slack));
        cell.bounds.emplace_back(p, r);
      } catch (const DivergenceError& e) {
        // The bound is infinite here; record why instead of failing the cell.
        cell.checks.push_back({"dominance_d p=" + fmt(p) + " (bound infinite: " + e.what() + ")", true,
                               cell.tail->value, INFINITY, 0.0});
      } catch (const std::exception& e) {
        cell.failure = describe(e);
      }
    }
  });
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (cells[i - 1].tail && cells[i].tail) {
      rep.trends.push_back(decreasing("Bd_decreasing", cells[i - 1].L, cells[i - 1].tail->value, cells[i].L,
                                      cells[i].tail->value));
    }
  }
  rep.dimensional = std::move(cells);
}

}  // namespace

double StudyConfig::tolerance(const std::string& key) const {
  if (auto it = tolerances.find(key); it != tolerances.end()) return it->second;
  return default_tolerances().at(key);
}

bool StudyConfig::wants(const std::string& study) const {
  return studies.empty() || std::find(studies.begin(), studies.end(), study) != studies.end();
}

void validate(const StudyConfig& cfg) {
  DensitySpec f = DensitySpec::normal();
  try {
    f = parse_density(cfg.density);
  } catch (const Error& e) {
    throw ValidationError(std::string("density: ") + e.what());
  }
  require_increasing(cfg.L_values, "L_values");
  for (double L : cfg.L_values) {
    if (!std::isfinite(L) || !(L > 0.0)) throw ValidationError("L_values: every L must be finite and > 0");
  }
  for (const auto& s : cfg.studies) {
    if (s != "convergence" && s != "admissibility") {
      throw ValidationError("studies: unknown study '" + s + "' (known: convergence, admissibility)");
    }
  }
  if (cfg.wants("convergence")) {
    require_increasing(cfg.N_values, "N_values");
    if (cfg.N_values.front() < 1) throw ValidationError("N_values: every N must be >= 1");
  }
  if (cfg.wants("admissibility")) {
    require_increasing(cfg.p_values, "p_values");
    for (double p : cfg.p_values) {
      if (!std::isfinite(p) || !(p > 1.0)) throw ValidationError("p_values: the moment-based bound requires p > 1");
      if (f.p_max() && p >= *f.p_max()) {
        throw ValidationError("p_values: p must be < " + fmt(*f.p_max()) + " (" + f.p_max_reason() + "), got " +
                              fmt(p));
      }
    }
  }
  if (cfg.k_max < 16) throw ValidationError("k_max: must be >= 16");
  if (cfg.grid_points < 2) throw ValidationError("grid_points: must be >= 2");
  if (cfg.parallelism < 1) throw ValidationError("parallelism: must be >= 1");
  if (cfg.dimension < 1 || cfg.dimension > 3) throw ValidationError("dimension: must be 1, 2 or 3");
  if (cfg.k_max_per_axis < 8) throw ValidationError("k_max_per_axis: must be >= 8");
  for (const auto& [key, value] : cfg.tolerances) {
    if (!default_tolerances().contains(key)) {
      throw ValidationError("tolerances: unknown key '" + key + "' (known: quad_tol, slack_factor, chain_rel)");
    }
    if (!std::isfinite(value) || value < 0.0 || (key == "quad_tol" && value == 0.0)) {
      throw ValidationError("tolerances." + key + ": must be finite and positive");
    }
  }
}

bool StudyReport::all_passed() const {
  auto ok = [](const std::vector<Assertion>& v) {
    return std::all_of(v.begin(), v.end(), [](const Assertion& a) { return a.passed; });
  };
  if (!ok(trends)) return false;
  for (const auto& c : convergence) {
    if (!c.failure.empty()) return false;
  }
  for (const auto& c : admissibility) {
    if (!c.failure.empty()) return false;
    for (const auto& b : c.bounds) {
      if (!b.failure.empty() || !ok(b.checks)) return false;
    }
  }
  for (const auto& c : dimensional) {
    if (!c.failure.empty() || !ok(c.checks)) return false;
  }
  for (const auto& r : rates) {
    if (!r.failure.empty() || !ok(r.checks)) return false;
  }
  return true;
}

StudyReport run_convergence_study(const StudyConfig& cfg) {
  validate(cfg);
  StudyReport rep;
  rep.config = cfg;
  fill_convergence(cfg, parse_density(cfg.density), rep);
  return rep;
}

StudyReport run_admissibility_study(const StudyConfig& cfg) {
  validate(cfg);
  const DensitySpec f = parse_density(cfg.density);
  StudyReport rep;
  rep.config = cfg;

  std::vector<AdmissibilityCell> cells(cfg.L_values.size());
  parallel_for(cells.size(), workers_of(cfg), [&](std::size_t i) {
    AdmissibilityCell& cell = cells[i];
    cell.L = cfg.L_values[i];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cell.tail = brute_force_B(f, cell.L, cfg.k_max, 1);
      fill_bounds(cfg, f, cell);
    } catch (const std::exception& e) {
      cell.failure = describe(e);
    }
    if (cfg.record_timings) cell.seconds = seconds_since(t0);
  });

  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (cells[i - 1].tail && cells[i].tail) {
      rep.trends.push_back(
          decreasing("B_decreasing", cells[i - 1].L, cells[i - 1].tail->value, cells[i].L, cells[i].tail->value));
    }
  }

  std::vector<std::pair<double, double>> samples;
  for (const auto& c : cells) {
    if (c.tail && c.tail->value > 0.0) samples.emplace_back(c.L, c.tail->value);
  }
  for (double p : cfg.p_values) {
    RateEntry re;
    re.p = p;
    if (f.tail_exponent()) re.theoretical_slope = 1.0 - 2.0 * *f.tail_exponent();
    if (samples.size() < 3) {
      re.note = "fewer than 3 positive B values";
    } else {
      try {
        re.fit = fit_rate(samples);
        re.checks.push_back(check_le("slope_le_minus_p", re.fit->slope, -p, 0.0));
      } catch (const std::exception& e) {
        re.failure = describe(e);
      }
    }
    rep.rates.push_back(std::move(re));
  }
  rep.admissibility = std::move(cells);

  if (cfg.dimension > 1) fill_dimensional(cfg, f, rep);
  return rep;
}

StudyReport run_study(const StudyConfig& cfg) {
  validate(cfg);
  StudyReport rep;
  if (cfg.wants("admissibility")) rep = run_admissibility_study(cfg);
  rep.config = cfg;
  if (cfg.wants("convergence")) {
    const DensitySpec f = parse_density(cfg.density);
    fill_convergence(cfg, f, rep);
  }
  return rep;
}

}  // namespace cosadmit
