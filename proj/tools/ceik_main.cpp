#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ceik/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Complex eikonal solver: parametrized solutions, region atlas, variable index"};
  app.require_subcommand(1);

  ceik::io::Invocation inv;
  std::string config, out, formats;
  int grid = 0;
  double tol = 0.0;

  const char* help[][2] = {
      {"constant", "sample the constant-index parametrization and its residual"},
      {"classify", "shadow / light / infinity atlas, light lines and caustics"},
      {"variable", "variable-index pipeline: Beltrami map, similarity solve, phi recovery"},
      {"field", "leading term of the evanescent-wave field"},
      {"verify", "recompute the residuals of a finished run from its files"},
  };
  for (const auto& [name, text] : help) {
    CLI::App* sub = app.add_subcommand(name, text);
    const bool is_verify = std::string(name) == "verify";
    auto* c = sub->add_option("--config", config, "JSON configuration")->check(CLI::ExistingFile);
    if (!is_verify) c->required();
    sub->add_option("--out", out, is_verify ? "run directory to check" : "output directory")
        ->required();
    if (!is_verify) {
      sub->add_option("--grid", grid, "override grid resolution")->check(CLI::PositiveNumber);
      sub->add_option("--tol", tol, "override the residual tolerance")->check(CLI::PositiveNumber);
      sub->add_option("--format", formats, "comma separated subset of csv,json,svg");
    }
  }

  CLI11_PARSE(app, argc, argv);

  inv.subcommand = app.get_subcommands().front()->get_name();
  inv.config = config;
  inv.out = out;
  if (grid > 0) inv.grid = grid;
  if (tol > 0.0) inv.tol = tol;
  if (!formats.empty()) inv.formats = formats;
  return ceik::io::run(inv, std::cout);
}
