#include <cmath>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eigencurve/commands.hpp"
#include "eigencurve/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Two-term eigenvalue expansions for one-parameter families of self-adjoint "
      "boundary conditions, verified against tracked eigenvalue curves"};
  app.require_subcommand(1);

  std::string config_path;
  std::string gallery_name;
  eigencurve::CommandOptions opts;
  double t_min = std::nan("");
  double t_max = std::nan("");
  std::size_t steps = 21;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config)
      sub->add_option("--config", config_path, "problem configuration JSON")
          ->required()
          ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "output directory (default: current)");
    sub->add_option("--format", opts.format, "table outputs to write")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--seed", opts.seed, "seed for randomized checks");
  };

  CLI::App* c_check = app.add_subcommand("check", "validate the configured model instance");
  add_common(c_check, true);
  CLI::App* c_expand = app.add_subcommand("expand", "two-term expansion of the target group");
  add_common(c_expand, true);
  CLI::App* c_oracle =
      app.add_subcommand("oracle", "verify the expansion against tracked eigenvalue curves");
  add_common(c_oracle, true);
  c_oracle->add_flag("--predict-only", opts.predict_only,
                     "close the loop on the engine's own prediction instead of tracking");
  CLI::App* c_sweep = app.add_subcommand("sweep", "predicted versus tracked curves over a range");
  add_common(c_sweep, true);
  c_sweep->add_option("--t-min", t_min, "range start (default: window start)");
  c_sweep->add_option("--t-max", t_max, "range end (default: window end)");
  c_sweep->add_option("--steps", steps, "number of grid points");
  CLI::App* c_gallery = app.add_subcommand("gallery", "write a built-in configuration");
  c_gallery->add_option("name", gallery_name, "one of the built-in configuration names")
      ->required();
  c_gallery->add_option("--out", opts.out_dir, "output directory (default: current)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (c_gallery->parsed()) return eigencurve::cmd_gallery(gallery_name, opts, std::cout);
    const eigencurve::ProblemConfig cfg = eigencurve::load_config(config_path);
    if (c_check->parsed()) return eigencurve::cmd_check(cfg, opts, std::cout);
    if (c_expand->parsed()) return eigencurve::cmd_expand(cfg, opts, std::cout);
    if (c_oracle->parsed()) return eigencurve::cmd_oracle(cfg, opts, std::cout);
    if (c_sweep->parsed()) {
      const double lo = std::isnan(t_min) ? cfg.scan_lo() : t_min;
      const double hi = std::isnan(t_max) ? cfg.scan_hi() : t_max;
      return eigencurve::cmd_sweep(cfg, opts, lo, hi, steps, std::cout);
    }
  } catch (const eigencurve::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const eigencurve::UnknownGallery& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const eigencurve::EigencurveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
