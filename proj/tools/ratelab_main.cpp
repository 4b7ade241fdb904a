#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ratelab/catalog.hpp"
#include "ratelab/convex_integral.hpp"
#include "ratelab/entropy.hpp"
#include "ratelab/io.hpp"
#include "ratelab/ldp_verify.hpp"
#include "ratelab/run_config.hpp"
#include "ratelab/testing_family.hpp"

namespace {

using namespace ratelab;

namespace fs = std::filesystem;

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

void write_provenance(const RunConfig& cfg) {
  write_json_file(out_path(cfg, "provenance.json"), cfg.provenance());
}

double effective_radius(const RunConfig& cfg, const GridSpace& space) {
  return cfg.radius > 0.0 ? cfg.radius : 2.0 * space.max_step();
}

int run_entropy(const RunConfig& cfg) {
  const GridSpace space = make_space(cfg);
  const EntropyModel model = make_model(cfg.model_id, space, cfg.n_ladder, cfg.tail_window);
  write_provenance(cfg);

  if (!cfg.function_spec.empty()) {
    const GridFunction f = parse_function_spec(cfg.function_spec, space);
    std::vector<std::pair<int, ExtendedValue>> sweep;
    for (int n : model.n_ladder()) sweep.emplace_back(n, entropy_at(model, f, n));
    write_sweep_csv(out_path(cfg, "sweep.csv"), sweep);

    const AsymptoticRecord rec = asymptotic_entropy(model, f, cfg.tol_asymptotic);
    const GrowthRecord growth = growth_membership(model, f);
    json doc = json{{"function", cfg.function_spec},
                    {"asymptotic", rec.to_json()},
                    {"diverged", rec.diverged},
                    {"growth", json{{"in_class", growth.in_class},
                                    {"witness_t", growth.witness_t}}},
                    {"provenance", cfg.provenance()}};
    write_json_file(out_path(cfg, "asymptotic.json"), doc);
    return 0;
  }

  if (!cfg.family_spec.empty()) {
    const TestingFamily fam = parse_family(cfg.family_spec, space);
    std::ofstream out(out_path(cfg, "family_entropy.csv"), std::ios::binary);
    if (!out) throw std::runtime_error("cannot open family_entropy.csv for writing");
    std::size_t param_width = 0;
    for (const auto& p : fam.params()) param_width = std::max(param_width, p.size());
    for (std::size_t k = 0; k < param_width; ++k) {
      out << "param_" << (k + 1) << ',';
    }
    for (int n : model.n_ladder()) out << 'n' << n << ',';
    out << "lower,upper,converged\n";
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const GridFunction f = fam.member(space, i);
      for (std::size_t k = 0; k < param_width; ++k) {
        if (k < fam.param(i).size()) out << format_value(fam.param(i)[k]);
        out << ',';
      }
      for (int n : model.n_ladder()) out << format_value(entropy_at(model, f, n)) << ',';
      const AsymptoticRecord rec = asymptotic_entropy(model, f, cfg.tol_asymptotic);
      out << format_value(rec.lower) << ',' << format_value(rec.upper) << ','
          << (rec.converged ? '1' : '0') << '\n';
    }
    return 0;
  }

  throw std::invalid_argument("entropy needs --f or --family");
}

int run_rate(const RunConfig& cfg) {
  if (cfg.family_spec.empty()) throw std::invalid_argument("rate needs --family");
  const GridSpace space = make_space(cfg);
  const EntropyModel model = make_model(cfg.model_id, space, cfg.n_ladder, cfg.tail_window);
  const TestingFamily fam = parse_family(cfg.family_spec, space);
  write_provenance(cfg);

  ConjugateStats stats;
  const RateField rate = conjugate_rate(model, fam, &stats);
  write_rate_field_csv(out_path(cfg, "rate.csv"), rate);
  write_json_file(out_path(cfg, "rate.json"),
                  json{{"family", fam.spec_string()},
                       {"members", stats.members},
                       {"members_skipped_infinite_entropy", stats.skipped_infinite},
                       {"min_value", json_number(rate.min_value())},
                       {"provenance", cfg.provenance()}});
  return 0;
}

int run_exposed(const RunConfig& cfg) {
  if (cfg.family_spec.empty()) throw std::invalid_argument("exposed needs --family");
  const GridSpace space = make_space(cfg);
  const EntropyModel model = make_model(cfg.model_id, space, cfg.n_ladder, cfg.tail_window);
  const TestingFamily fam = parse_family(cfg.family_spec, space);
  write_provenance(cfg);

  const std::vector<MemberRecord> records = member_records(model, fam);
  std::vector<ExtendedValue> psi;
  psi.reserve(records.size());
  for (const MemberRecord& rec : records) {
    psi.push_back(rec.entropy.diverged ? ExtendedValue::pos_inf() : rec.entropy.upper);
  }
  const RateField rate = conjugate_rate(space, fam, psi);
  const ExposedSet exposed =
      detect_exposed(fam, rate, records, cfg.margin, effective_radius(cfg, space));
  write_exposed_csv(out_path(cfg, "exposed.csv"), exposed);
  write_json_file(out_path(cfg, "exposed.json"),
                  json{{"family", fam.spec_string()},
                       {"exposed_count", exposed.count_exposed()},
                       {"margin", exposed.margin},
                       {"radius", exposed.radius},
                       {"provenance", cfg.provenance()}});
  return 0;
}

// The --tol flag doubles as the window-convergence tolerance (default 1e-2)
// and the certification tolerance (default 2e-2). Each consumer keeps its own
// default unless the user explicitly set --tol.
int run_verify(const RunConfig& cfg, std::optional<double> tol_override) {
  if (cfg.family_spec.empty()) throw std::invalid_argument("verify needs --family");
  const GridSpace space = make_space(cfg);
  const EntropyModel model = make_model(cfg.model_id, space, cfg.n_ladder, cfg.tail_window);
  const TestingFamily fam = parse_family(cfg.family_spec, space);
  write_provenance(cfg);

  PipelineConfig pc;
  if (tol_override) pc.tol = *tol_override;
  pc.margin = cfg.margin;
  pc.radius = cfg.radius;
  const LdpReport report = gartner_ellis_pipeline(model, fam, pc);
  write_json_file(out_path(cfg, "report.json"), report.to_json());
  return report.full_certified ? 0 : 1;
}

int run_represent(const RunConfig& cfg, std::optional<double> tol_override) {
  if (cfg.function_spec.empty()) throw std::invalid_argument("represent needs --f");
  const GridSpace space = make_space(cfg);
  const EntropyModel model = make_model(cfg.model_id, space, cfg.n_ladder, cfg.tail_window);
  const GridFunction f = parse_function_spec(cfg.function_spec, space);
  write_provenance(cfg);

  const CheckReport rep = check_representation(model, f, tol_override.value_or(2e-2));
  write_json_file(out_path(cfg, "representation.json"),
                  json{{"function", cfg.function_spec},
                       {"report", rep.to_json()},
                       {"provenance", cfg.provenance()}});
  return rep.pass ? 0 : 1;
}

int run_plot(const RunConfig& cfg, const std::vector<std::string>& inputs) {
  if (inputs.empty() || inputs.size() > 3) {
    throw std::invalid_argument("plot needs between 1 and 3 --in files");
  }
  std::vector<PlotSeries> series;
  for (const std::string& path : inputs) {
    const ValueTable table = read_value_table(path);
    if (table.header.size() != 2) {
      throw std::invalid_argument("plot supports two-column tables only; '" + path + "' has " +
                                  std::to_string(table.header.size()) + " columns");
    }
    PlotSeries s;
    s.label = fs::path(path).stem().string();
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const ExtendedValue& xv = table.rows[r][0];
      if (!xv.is_finite()) {
        throw std::invalid_argument("plot: non-finite abscissa in '" + path + "'");
      }
      s.x.push_back(xv.value());
      s.y.push_back(table.rows[r][1]);
    }
    series.push_back(std::move(s));
  }
  write_provenance(cfg);
  write_svg_plot(out_path(cfg, "plot.svg"), series);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grid laboratory for scaled-entropy models, capacity limits and rate functions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI file with long option names as keys");

  RunConfig cfg;
  app.add_option("--model", cfg.model_id,
                 "model id: laplace | gaussian | gaussian(<m>) | robust:<id>,<id>,...");
  app.add_option("--family", cfg.family_spec,
                 "family: linear:ymin,ymax,step | invv:amin,amax,step | custom:<file>");
  app.add_option("--f", cfg.function_spec, "test function: const:<c> | linear:<y> | invv:<a>");
  app.add_option("--out", cfg.out_dir, "output directory (default out)");
  app.add_option("--seed", cfg.seed, "seed for randomized batteries");
  app.add_option("--n-ladder", cfg.n_ladder, "scale ladder (default 4,8,...,256)")
      ->delimiter(',');
  app.add_option("--tail-window", cfg.tail_window, "trailing ladder entries used as limit proxy");
  app.add_option("--tol", cfg.tol_asymptotic, "tolerance for asymptotic comparisons");
  app.add_option("--tol-exact", cfg.tol_exact, "tolerance for exact comparisons");
  app.add_option("--margin", cfg.margin, "exposure margin");
  app.add_option("--radius", cfg.radius, "exposure radius (0 = two grid steps)");
  app.add_option("--box-lower", cfg.box_lower, "grid lower bound (needs upper+points)");
  app.add_option("--box-upper", cfg.box_upper, "grid upper bound (needs lower+points)");
  app.add_option("--box-points", cfg.box_points, "grid point count (needs lower+upper)");

  CLI::App* c_entropy =
      app.add_subcommand("entropy", "per-scale entropy sweep and tail-window limits");
  CLI::App* c_rate = app.add_subcommand("rate", "conjugate rate of a family");
  CLI::App* c_exposed = app.add_subcommand("exposed", "grid-certified exposed points");
  CLI::App* c_verify =
      app.add_subcommand("verify", "tightness/conjugate/exposure/richness pipeline");
  CLI::App* c_represent =
      app.add_subcommand("represent", "entropy limit against the upper-capacity integral");
  CLI::App* c_plot = app.add_subcommand("plot", "two-column CSV tables to an SVG plot");
  std::vector<std::string> plot_inputs;
  c_plot->add_option("--in", plot_inputs, "input CSV (repeat for up to 3 series)")
      ->required()
      ->expected(1, 3);
  for (CLI::App* sub : {c_entropy, c_rate, c_exposed, c_verify, c_represent, c_plot}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  const std::optional<double> tol_override =
      app.count("--tol") > 0 ? std::optional<double>(cfg.tol_asymptotic) : std::nullopt;

  try {
    if (c_entropy->parsed()) return run_entropy(cfg);
    if (c_rate->parsed()) return run_rate(cfg);
    if (c_exposed->parsed()) return run_exposed(cfg);
    if (c_verify->parsed()) return run_verify(cfg, tol_override);
    if (c_represent->parsed()) return run_represent(cfg, tol_override);
    if (c_plot->parsed()) return run_plot(cfg, plot_inputs);
    std::cerr << "usage error: no command given\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
}
