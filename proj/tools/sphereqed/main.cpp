// sphereqed command-line front end.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "sphereqed/sphereqed.h"
#include "table.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numeric = 3;
constexpr int exit_io = 4;

std::string joined(const std::vector<std::string> &items) {
  std::string out;
  for (const auto &s : items)
    out += (out.empty() ? "" : ", ") + s;
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Atom-microsphere QED sweeps: resonances, decay rates, emission patterns"};
  app.set_version_flag("--version", sqed_version());

  std::string command, config_path, out_path, format = "csv", recipe;
  std::vector<std::string> assignments;
  int parallel = 1;
  bool list_recipes = false, dump_config = false;

  app.add_option("command", command, "One of: " + joined(sqcli::command_names()));
  app.add_option("--config", config_path, "INI (key = value with [sections]) or JSON file");
  app.add_option("--set", assignments, "Override one key, e.g. --set material.gamma=1e-6")
      ->take_all();
  app.add_option("--out", out_path, "Output file (default stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--parallel", parallel, "Worker threads over sweep points");
  app.add_option("--recipe", recipe, "Load a named parameter recipe");
  app.add_flag("--list-recipes", list_recipes, "Print the recipe names and exit");
  app.add_flag("--dump-config", dump_config, "Print the effective configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  if (list_recipes) {
    for (const auto &n : sqcli::recipe_names())
      std::cout << n << "\n";
    return 0;
  }

  sqcli::Table table;
  try {
    // Precedence: defaults < recipe < config file < --set.
    sqcli::Config cfg;
    if (!recipe.empty())
      sqcli::apply_recipe(cfg, recipe);
    if (!config_path.empty())
      sqcli::load_file(cfg, config_path);
    for (const auto &a : assignments)
      sqcli::apply_assignment(cfg, a);
    if (command.empty())
      command = cfg.text("command");
    else
      cfg.set("command", command);
    if (dump_config) {
      std::cout << cfg.dump();
      return 0;
    }
    if (command.empty())
      throw sqcli::ConfigError("no command given; choose one of: " + joined(sqcli::command_names()));
    table = sqcli::run_command(command, cfg, parallel);
  } catch (const sqcli::ConfigError &e) {
    std::cerr << "sphereqed: configuration error: " << e.what() << "\n";
    return exit_config;
  } catch (const sqcli::IoError &e) {
    std::cerr << "sphereqed: " << e.what() << "\n";
    return exit_io;
  }

  std::ostringstream buf;
  if (format == "json")
    sqcli::write_json(table, buf);
  else
    sqcli::write_csv(table, buf);
  if (out_path.empty()) {
    std::cout << buf.str();
    std::cout.flush();
    if (!std::cout) {
      std::cerr << "sphereqed: failed to write to stdout\n";
      return exit_io;
    }
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << buf.str();
    out.close();
    if (!out) {
      std::cerr << "sphereqed: cannot write '" << out_path << "'\n";
      return exit_io;
    }
  }
  if (table.failures) {
    std::cerr << "sphereqed: some sweep points failed; see the error column\n";
    return exit_numeric;
  }
  return 0;
}
