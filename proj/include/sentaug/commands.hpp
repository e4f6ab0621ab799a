#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sentaug/util.hpp"

namespace sentaug {

// Plain-text "key = value" run configuration. Every command resolves its
// defaults into the map and writes the result next to its outputs, so any run
// can be replayed bit-for-bit from the snapshot alone.
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig from_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void set_default(const std::string& key, const std::string& value);

  const std::string& str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  int64_t integer(const std::string& key, int64_t fallback);
  double real(const std::string& key, double fallback);
  uint64_t seed_value(const std::string& key, uint64_t fallback);
  bool flag(const std::string& key, bool fallback);

  void write(const std::string& path) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<std::pair<std::string, std::string>> keys;  // key, help
};

const std::vector<CommandSpec>& command_specs();

// Command entry points (also used directly by the acceptance suite).
void run_prepare(RunConfig cfg);
void run_augment(RunConfig cfg);
void run_train(RunConfig cfg);
void run_attack(RunConfig cfg);
void run_explain(RunConfig cfg);
void run_evaluate(RunConfig cfg);
void run_human_eval(RunConfig cfg);
void run_reproduce(RunConfig cfg);

void run_command(const std::string& name, RunConfig cfg);

}  // namespace sentaug
