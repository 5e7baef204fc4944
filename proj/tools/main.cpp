#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "towlab/experiment.hpp"
#include "towlab/solutions.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "towlab - tug-of-war games, the infinity Laplacian and friends on "
      "desk-scale grids"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;

  CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("--set", overrides,
                  "override a config key, e.g. --set game.epsilon=0.05")
      ->take_all();
  run->add_option("--out", out_dir, "shorthand for --set output.dir=DIR");

  CLI::App* cat = app.add_subcommand("catalog", "list the reference solutions");

  CLI11_PARSE(app, argc, argv);

  if (cat->parsed()) {
    for (const auto& s : towlab::catalog()) {
      std::cout << s.name << "  (" << s.dim << "D)  u = " << s.expr_text << "\n";
      std::cout << "    " << s.notes << "\n";
      for (const auto& c : s.claims)
        std::cout << "    " << towlab::form_name(c.form) << "/"
                  << towlab::role_name(c.role) << " with f = " << c.f_text << ": "
                  << (c.expect_pass ? "pass" : "fail") << "\n";
    }
    return 0;
  }

  if (!out_dir.empty()) overrides.push_back("output.dir=" + out_dir);
  return towlab::run_config_file(config_path, overrides, std::cout);
}
