// Command-line front end; all real work lives in the library so the
// pipeline is scriptable and testable without spawning processes.

#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>

#include "sentaug/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sentaug: data augmentation for explainable sentiment classifiers"};
  app.require_subcommand(1);

  struct PendingCommand {
    std::string config_path;
    std::map<std::string, std::string> overrides;
  };
  std::map<std::string, std::shared_ptr<PendingCommand>> pending;
  std::string chosen;

  for (const auto& spec : sentaug::command_specs()) {
    auto* sub = app.add_subcommand(spec.name, spec.help);
    auto state = std::make_shared<PendingCommand>();
    pending[spec.name] = state;
    sub->add_option("--config", state->config_path, "key = value config file");
    for (const auto& [key, help] : spec.keys) {
      std::string flag = "--" + key;
      for (auto& c : flag)
        if (c == '_') c = '-';
      sub->add_option_function<std::string>(
          flag, [state, key = key](const std::string& v) { state->overrides[key] = v; }, help);
    }
    sub->callback([&chosen, name = spec.name] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const auto& state = *pending.at(chosen);
    sentaug::RunConfig cfg;
    if (!state.config_path.empty()) cfg = sentaug::RunConfig::from_file(state.config_path);
    for (const auto& [k, v] : state.overrides) cfg.set(k, v);
    sentaug::run_command(chosen, std::move(cfg));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
