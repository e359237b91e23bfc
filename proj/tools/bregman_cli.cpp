#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bregman/harness.hpp"

using namespace bregman;
using namespace bregman::harness;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scale;
};

ExperimentConfig resolve_config(const std::string& name, const Flags& fl) {
  json j = json::object();
  if (!fl.config.empty()) {
    std::ifstream is(fl.config);
    if (!is) throw ConfigError("cannot read config file " + fl.config);
    try {
      is >> j;
    } catch (const json::exception& e) {
      throw ConfigError("config " + fl.config + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("experiment") && parse_experiment(j.at("experiment").get<std::string>()) != parse_experiment(name)) {
      throw ConfigError("config experiment '" + j.at("experiment").get<std::string>() + "' does not match subcommand '" +
                        name + "'");
    }
  }
  j["experiment"] = name;
  if (fl.out) j["out"] = *fl.out;
  if (fl.seed) j["seed"] = *fl.seed;
  if (fl.scale) j["scale"] = *fl.scale;
  return parse_config(j);
}

void print_report(const ReportSummary& rep) {
  for (const auto& c : rep.checks) {
    std::printf("%-4s %s", to_string(c.status), c.name.c_str());
    if (std::isfinite(c.measured) || std::isfinite(c.bound)) std::printf("  measured=%.6g bound=%.6g", c.measured, c.bound);
    std::printf("\n");
    if (c.status == Status::fail) {
      for (const auto& d : c.detail) std::printf("       %s\n", d.c_str());
    }
  }
  std::printf("%s: %s (%.2fs)\n", rep.experiment.c_str(), rep.passed() ? "PASS" : "FAIL", rep.runtime_s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bregman-Lagrangian flows and accelerated methods: experiments and acceptance checks"};
  app.require_subcommand(1);
  Flags fl;
  for (const auto& [name, kind] : experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", fl.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", fl.out, "output directory");
    sub->add_option("--seed", fl.seed, "random seed");
    sub->add_option("--scale", fl.scale, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kConfigError;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const ExperimentConfig cfg = resolve_config(name, fl);
    const ReportSummary rep = run_experiment(cfg);
    print_report(rep);
    return rep.exit_code();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const CapabilityError& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kConfigError;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}
