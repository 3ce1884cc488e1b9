// Command-line front end: model/config parsing, command dispatch,
// deterministic runs, CSV/JSON emission.
//
// Exit codes: 0 success, 2 validation error, 3 numerical non-convergence,
// 4 covariance PSD failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "collapse/config.hpp"
#include "collapse/correlators.hpp"
#include "collapse/dynamics.hpp"
#include "collapse/io.hpp"
#include "collapse/numeric.hpp"
#include "collapse/observables.hpp"
#include "collapse/phenomenology.hpp"
#include "collapse/rates.hpp"
#include "collapse/units.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace collapse;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CliOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string format = "both";
  long long seed = -1;
  int threads = 1;
};

struct RunContext {
  ConfigFile cfg;
  fs::path out;
  CliOptions opts;
  json summary;
  std::vector<std::string> artifacts;
};

QuadratureSpec quad_from_config(const ConfigFile& cfg) {
  cfg.require_known("numerics", {"rel_tol", "abs_tol", "max_evals"});
  QuadratureSpec spec;
  spec.rel_tol = cfg.number_or("numerics", "rel_tol", Dim::None, spec.rel_tol);
  spec.abs_tol = cfg.number_or("numerics", "abs_tol", Dim::None, spec.abs_tol);
  spec.max_evals = static_cast<std::size_t>(
      cfg.number_or("numerics", "max_evals", Dim::None, static_cast<double>(spec.max_evals)));
  spec.validate();
  return spec;
}

std::string out_file(RunContext& ctx, const std::string& name) {
  const std::string p = (ctx.out / name).string();
  ctx.artifacts.push_back(p);
  return p;
}

void cmd_kernel(RunContext& ctx) {
  const auto model = model_from_config(ctx.cfg);
  const auto quad = quad_from_config(ctx.cfg);
  ctx.cfg.require_known("grid", {"r", "t", "k"});
  const auto rs = ctx.cfg.list("grid", "r", Dim::Length);
  const auto ts = ctx.cfg.list("grid", "t", Dim::Time);

  CsvWriter csv(out_file(ctx, "kernel.csv"),
                {"r", "t", "D", "F", "I", "F_diff", "I_diff"});
  for (double r : rs) {
    for (double t : ts) {
      std::vector<std::string> row{format_double(r), format_double(t)};
      try {
        row.push_back(format_double(corr_D(model, r, t, quad)));
      } catch (const DomainError&) {
        row.push_back("na");  // distributional or infrared-divergent
      }
      try {
        row.push_back(format_double(corr_F(model, r, t, quad)));
        row.push_back(format_double(corr_I(model, r, t, quad)));
      } catch (const DomainError&) {
        row.push_back("na");
        row.push_back("na");
      }
      row.push_back(format_double(corr_F_diff(model, r, t, quad)));
      row.push_back(format_double(corr_I_diff(model, r, t, quad)));
      csv.row_mixed(row);
    }
  }
  csv.close();

  if (ctx.cfg.has("grid", "k")) {
    const auto ks = ctx.cfg.list("grid", "k", Dim::Energy);
    CsvWriter fcsv(out_file(ctx, "kernel_fourier.csv"), {"k", "t", "Fhat"});
    for (double k : ks)
      for (double t : ts) {
        std::vector<std::string> row{format_double(k), format_double(t)};
        try {
          row.push_back(format_double(fourier_Fhat(model, k, t, quad)));
        } catch (const DomainError&) {
          row.push_back("na");
        }
        fcsv.row_mixed(row);
      }
    fcsv.close();
  }
  ctx.summary["family"] = family_name(model);
}

void cmd_rate(RunContext& ctx) {
  const auto model = model_from_config(ctx.cfg);
  const auto geom = geometry_from_config(ctx.cfg);
  ctx.cfg.require_known("run", {"times", "far_field_cutoff"});
  const auto ts = ctx.cfg.list("run", "times", Dim::Time);
  RateOptions opts;
  opts.quad = quad_from_config(ctx.cfg);
  opts.far_field_cutoff =
      ctx.cfg.raw_or("run", "far_field_cutoff", "false") == std::string("true");

  const double e0 = geom.probabilities[0] * geom.probabilities[1];
  CsvWriter csv(out_file(ctx, "rate.csv"),
                {"t", "gamma", "decay", "bound_lower", "bound_upper", "integrand_positive"});
  for (double t : ts) {
    const auto r = gamma_pair(model, geom.groups[0], geom.groups[1], t, opts);
    const bool pos = rate_integrand_positive(model, geom.groups[0], geom.groups[1],
                                             t, 64, opts.quad);
    // bounds hold under the positivity assumption; reported regardless,
    // flagged by the last column
    const auto b = reduction_bounds(std::max(r.gamma, 0.0), e0);
    csv.row({t, r.gamma, std::exp(-r.gamma), b.lower, b.upper, pos ? 1.0 : 0.0});
  }
  csv.close();

  if (geom.branches() > 2) {
    CsvWriter lm(out_file(ctx, "rate_lm.csv"), {"t", "L", "M", "gamma_lm"});
    for (double t : ts)
      for (std::size_t L = 0; L < geom.branches(); ++L)
        for (std::size_t M = L + 1; M < geom.branches(); ++M)
          lm.row({t, static_cast<double>(L), static_cast<double>(M),
                  gamma_lm(model, geom, L, M, t, opts).gamma});
    lm.close();
  }
  ctx.summary["branches"] = geom.branches();
}

void cmd_reduce_mc(RunContext& ctx) {
  const auto model = model_from_config(ctx.cfg);
  const auto geom = geometry_from_config(ctx.cfg);
  const auto quad = quad_from_config(ctx.cfg);
  ctx.cfg.require_known("run", {"times", "n_traj", "seed", "sampling"});
  EnsembleSpec es;
  es.output_times = ctx.cfg.list("run", "times", Dim::Time);
  es.n_traj = static_cast<std::size_t>(ctx.cfg.number("run", "n_traj", Dim::None));
  es.seed = static_cast<std::uint64_t>(ctx.cfg.number_or("run", "seed", Dim::None, 1.0));
  if (ctx.opts.seed >= 0) es.seed = static_cast<std::uint64_t>(ctx.opts.seed);
  es.threads = ctx.opts.threads;
  const std::string sampling = ctx.cfg.raw_or("run", "sampling", "mixture");
  if (sampling == "raw")
    es.sampling = Sampling::RawNoise;
  else if (sampling == "mixture")
    es.sampling = Sampling::PhysicalMixture;
  else
    throw ConfigError("run.sampling must be 'mixture' or 'raw'");

  const auto batch = sample_reduction_ensemble(model, geom, es, quad);

  std::vector<std::string> cols{"t"};
  for (std::size_t j = 0; j < geom.branches(); ++j) {
    cols.push_back("p" + std::to_string(j) + "_mean");
    cols.push_back("p" + std::to_string(j) + "_stderr");
  }
  for (const char* c : {"pair01_mean", "pair01_stderr", "weight_mean", "weight_stderr",
                        "gamma", "closed_p1p2"})
    cols.push_back(c);
  CsvWriter csv(out_file(ctx, "reduce_mc.csv"), cols);
  for (const auto& sl : batch.slices) {
    std::vector<double> row{sl.t};
    for (const auto& p : sl.p) {
      row.push_back(p.mean);
      row.push_back(p.stderr_);
    }
    row.push_back(sl.pair01.mean);
    row.push_back(sl.pair01.stderr_);
    row.push_back(sl.weight.mean);
    row.push_back(sl.weight.stderr_);
    RateOptions ropts;
    ropts.quad = quad;
    const double g = gamma_pair(model, geom.groups[0], geom.groups[1], sl.t, ropts).gamma;
    row.push_back(g);
    row.push_back(geom.branches() == 2
                      ? expected_p1p2_closed(std::max(g, 0.0), geom.probabilities[0],
                                             geom.probabilities[1], quad)
                      : std::numeric_limits<double>::quiet_NaN());
    csv.row(row);
  }
  csv.close();
  ctx.summary["n_traj"] = es.n_traj;
  ctx.summary["seed"] = es.seed;
  ctx.summary["sampling"] = sampling;
}

void cmd_fokker_planck(RunContext& ctx) {
  const auto model = model_from_config(ctx.cfg);
  const auto geom = geometry_from_config(ctx.cfg);
  const auto quad = quad_from_config(ctx.cfg);
  ctx.cfg.require_known("run", {"times"});
  const auto ts = ctx.cfg.list("run", "times", Dim::Time);
  CsvWriter csv(out_file(ctx, "fokker_planck.csv"), {"t", "M", "L", "A_ML", "moment_rhs"});
  for (double t : ts) {
    const auto A = fp_diffusion_matrix(model, geom, t, quad);
    for (std::size_t m = 0; m < geom.branches(); ++m)
      for (std::size_t l = 0; l < geom.branches(); ++l)
        csv.row({t, static_cast<double>(m), static_cast<double>(l), A(m, l),
                 -2.0 * A(m, l)});
  }
  csv.close();
}

void cmd_energy(RunContext& ctx) {
  const auto model = model_from_config(ctx.cfg);
  const auto species = species_from_config(ctx.cfg);
  const auto quad = quad_from_config(ctx.cfg);
  ctx.cfg.require_known("run", {"times", "asymptote"});
  const auto ts = ctx.cfg.list("run", "times", Dim::Time);
  CsvWriter csv(out_file(ctx, "energy.csv"), {"t", "rate", "total"});
  for (double t : ts)
    csv.row({t, energy_rate(model, species, t, quad),
             energy_total(model, species, t, quad).value});
  csv.close();
  if (ctx.cfg.raw_or("run", "asymptote", "false") == std::string("true")) {
    const auto tot =
        energy_total(model, species, std::numeric_limits<double>::infinity(), quad);
    ctx.summary["asymptote"] = {{"value", tot.value},
                                {"divergent", tot.divergent},
                                {"growth_exponent", tot.growth_exponent},
                                {"exponent_stderr", tot.exponent_stderr}};
  }
}

void cmd_gamma_spectrum(RunContext& ctx) {
  const auto model = model_from_config(ctx.cfg);
  const auto quad = quad_from_config(ctx.cfg);
  ctx.cfg.require_known("grid", {"p"});
  const auto ps = ctx.cfg.list("grid", "p", Dim::Energy);
  CsvWriter csv(out_file(ctx, "spectrum.csv"), {"p", "dP_dp", "below_threshold"});
  for (double p : ps) {
    const auto s = gamma_spectrum(model, p, quad);
    csv.row({s.p, s.dP_dp, s.below_threshold ? 1.0 : 0.0});
  }
  csv.close();
}

void cmd_dm_scan(RunContext& ctx) {
  ctx.cfg.require_known("scenario",
                        {"mu", "v_rms", "rho_m", "gamma", "m", "n", "n_bunches", "mu5"});
  const auto mus = ctx.cfg.list("scenario", "mu", Dim::Energy);
  const auto vs = ctx.cfg.list("scenario", "v_rms", Dim::Velocity);
  DarkMatterScenario base = [&] {
    // single-point parse for everything except the scanned axes
    ConfigFile one = ctx.cfg;
    one.apply_override("scenario.mu=" + format_double(mus[0]));
    one.apply_override("scenario.v_rms=" + format_double(vs[0]));
    return scenario_from_config(one);
  }();

  CsvWriter csv(out_file(ctx, "dm_scan.csv"),
                {"mu_gev", "v_rms", "r_c_cm", "temperature_gev", "t_r_s", "chem_factor",
                 "dilute_valid", "exponent_2gamma", "reduction_factor",
                 "gamma_rho_m_required_gev_cm", "rho_m_required_gev_cm3",
                 "fifth_force_exponent10"});
  for (double mu : mus) {
    for (double v : vs) {
      DarkMatterScenario s = base;
      s.mu = mu;
      s.v_rms = v;
      const auto d = dm_derived(s);
      const double n_out = s.n_per_bunch * s.n_per_bunch * s.n_bunches;
      const auto rd = dm_required_density(mu, n_out, s.gamma);
      const auto ff = fifth_force_bound(mu, s.mu5);
      csv.row({mu, v, units::to_cm(d.r_c), d.temperature, units::to_seconds(d.t_r),
               d.chem_factor, d.dilute_valid ? 1.0 : 0.0, d.exponent_2gamma,
               std::exp(-std::min(d.exponent_2gamma, 700.0)), rd.gamma_rho_m_gev_per_cm,
               rd.rho_m_gev_per_cm3, ff.exponent10});
    }
  }
  csv.close();
}

std::string render_1sf(double v) {
  std::ostringstream os;
  const double r = round_1sf(v);
  os.precision(1);
  os << std::scientific << r;
  return os.str();
}

void cmd_tables(RunContext& ctx) {
  const auto t = make_tables();
  auto write_table = [&](const std::string& name, const std::vector<std::string>& row_labels,
                         const std::vector<std::vector<double>>& data) {
    std::vector<std::string> cols{"row"};
    for (double mu : t.mu_kev) cols.push_back("mu_" + format_double(mu) + "_kev");
    CsvWriter csv(out_file(ctx, name + ".csv"), cols);
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::vector<std::string> row{row_labels[i]};
      for (double v : data[i]) row.push_back(format_double(v));
      csv.row_mixed(row);
    }
    csv.close();
    // aligned text rendering in the paper's layout (1 s.f. display)
    std::ostringstream os;
    os << name << "\nmu(keV)  ";
    for (double mu : t.mu_kev) os << "  " << format_double(mu);
    os << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
      os << row_labels[i] << "  ";
      for (double v : data[i]) os << "  " << render_1sf(v);
      os << '\n';
    }
    const std::string path = (ctx.out / (name + ".txt")).string();
    std::ofstream txt(path, std::ios::binary);
    txt << os.str();
    ctx.artifacts.push_back(path);
  };

  const std::vector<std::string> vlabels = t.v_labels;
  const std::vector<std::string> nlabels{"n_out_1e22", "n_out_1e8"};
  write_table("table1_rc_cm", vlabels, t.r_c_cm);
  write_table("table2_tr_s", vlabels, t.t_r_s);
  write_table("table3_gamma_rho_m_gev_cm", nlabels, t.gamma_rho_m);
  write_table("table4_rho_m_gev_cm3", nlabels, t.rho_m);

  json full;
  full["mu_kev"] = t.mu_kev;
  full["v_over_c"] = t.v_over_c;
  full["n_out"] = t.n_out;
  auto both = [](const std::vector<std::vector<double>>& d) {
    json out;
    out["full_precision"] = d;
    std::vector<std::vector<double>> disp;
    for (const auto& row : d) {
      std::vector<double> r;
      for (double v : row) r.push_back(round_1sf(v));
      disp.push_back(r);
    }
    out["display_1sf"] = disp;
    return out;
  };
  full["table1_rc_cm"] = both(t.r_c_cm);
  full["table2_tr_s"] = both(t.t_r_s);
  full["table3_gamma_rho_m_gev_cm"] = both(t.gamma_rho_m);
  full["table4_rho_m_gev_cm3"] = both(t.rho_m);
  const std::string jpath = (ctx.out / "tables.json").string();
  std::ofstream jf(jpath, std::ios::binary);
  jf << full.dump(2) << '\n';
  ctx.artifacts.push_back(jpath);
}

int run_command(const std::string& name, const CliOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  RunContext ctx;
  ctx.opts = opts;

  if (!opts.config_path.empty())
    ctx.cfg = ConfigFile::parse_file(opts.config_path);
  else if (name != "tables")
    throw ConfigError("command '" + name + "' requires --config");
  for (const auto& ov : opts.overrides) ctx.cfg.apply_override(ov);

  std::string out_dir = opts.out_dir;
  if (out_dir.empty()) {
    const char* env = std::getenv("CKT_OUT_DIR");
    out_dir = env ? env : ".";
  }
  ctx.out = out_dir;
  fs::create_directories(ctx.out);

  if (name == "kernel") cmd_kernel(ctx);
  else if (name == "rate") cmd_rate(ctx);
  else if (name == "reduce-mc") cmd_reduce_mc(ctx);
  else if (name == "fokker-planck") cmd_fokker_planck(ctx);
  else if (name == "energy") cmd_energy(ctx);
  else if (name == "gamma-spectrum") cmd_gamma_spectrum(ctx);
  else if (name == "dm-scan") cmd_dm_scan(ctx);
  else if (name == "tables") cmd_tables(ctx);
  else throw ConfigError("unknown command " + name);

  const auto t1 = std::chrono::steady_clock::now();
  if (opts.format != "csv") {
    json manifest;
    manifest["command"] = name;
    manifest["version"] = kVersion;
    manifest["config_path"] = opts.config_path;
    manifest["config_text"] = ctx.cfg.text();
    manifest["overrides"] = opts.overrides;
    manifest["seed_flag"] = opts.seed;
    manifest["threads"] = opts.threads;
    manifest["artifacts"] = ctx.artifacts;
    manifest["summary"] = ctx.summary;
    manifest["wall_time_s"] =
        std::chrono::duration_cast<std::chrono::duration<double>>(t1 - t0).count();
    std::string mname = name + "_manifest.json";
    std::replace(mname.begin(), mname.end(), '-', '_');
    std::ofstream mf(ctx.out / mname, std::ios::binary);
    mf << manifest.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-white-noise collapse-model kinetics"};
  app.require_subcommand(1);

  CliOptions opts;
  for (const char* name : {"kernel", "rate", "reduce-mc", "fokker-planck", "energy",
                           "gamma-spectrum", "dm-scan", "tables"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "config file path");
    sub->add_option("--set", opts.overrides, "override section.key=value (repeatable)");
    sub->add_option("--out", opts.out_dir, "output directory (default $CKT_OUT_DIR or .)");
    sub->add_option("--seed", opts.seed, "override the run seed");
    sub->add_option("--threads", opts.threads, "worker threads (never changes results)");
    sub->add_option("--format", opts.format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
  }

  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();

  auto fail = [](int code, const char* category, const std::string& what) {
    json err{{"error_category", category}, {"message", what}};
    std::cerr << err.dump() << std::endl;
    return code;
  };
  try {
    return run_command(name, opts);
  } catch (const ConfigError& e) {
    return fail(2, "validation", e.what());
  } catch (const DomainError& e) {
    return fail(2, "validation", e.what());
  } catch (const ConvergenceError& e) {
    return fail(3, "non-convergence", e.what());
  } catch (const PsdError& e) {
    return fail(4, "psd", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what());
  }
}
