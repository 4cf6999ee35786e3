// Command-line runner: one subcommand per scenario.
//
//   thermchan thermalize --config configs/thermalize.yaml --out out/ --format csv,json,svg
//
// Exit codes: 0 success, 1 parse error, 2 engine error, 3 non-convergence.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "thermchan/config.hpp"
#include "thermchan/errors.hpp"
#include "thermchan/output.hpp"
#include "thermchan/scenarios.hpp"

namespace tc = thermchan;
namespace ex = thermchan::expcli;

namespace {

enum Exit { kOk = 0, kParse = 1, kEngine = 2, kNoConvergence = 3 };

struct Options {
  std::string config;
  std::string out = "out";
  std::string engine;
  std::string format;
};

int run(ex::Scenario scenario, const Options& o) {
  ex::ScenarioConfig c;
  try {
    c = o.config.empty() ? ex::default_config(scenario) : ex::load_config(o.config, scenario);
    if (!o.engine.empty()) {
      c.engine = ex::parse_engine(o.engine);
      c.explicit_keys.insert("engine");
    }
    if (!o.format.empty()) c.outputs = ex::parse_formats(o.format);
    ex::validate(c);
  } catch (const tc::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kParse;
  }

  const auto name = ex::to_string(scenario);
  try {
    const auto result = ex::run_scenario(c);
    for (const auto& path : ex::write_outputs(result, o.out)) std::printf("wrote %s\n", path.string().c_str());
    if (result.fit && !result.fit->converged) {
      std::fprintf(stderr, "%s: fit hit the iteration cap; best-so-far written\n", name.c_str());
      return kNoConvergence;
    }
  } catch (const tc::ParseError& e) {
    std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
    return kParse;
  } catch (const tc::NoConvergenceError& e) {
    std::fprintf(stderr, "%s: did not converge: %s\n", name.c_str(), e.what());
    return kNoConvergence;
  } catch (const tc::DegenerateKernelError& e) {
    std::fprintf(stderr, "%s: no unique steady state: %s\n", name.c_str(), e.what());
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
    return kEngine;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven qubit-resonator thermalization simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ex::kVersion);

  Options o;
  std::optional<ex::Scenario> chosen;
  for (auto s : {ex::Scenario::rabi, ex::Scenario::thermalize, ex::Scenario::power_series, ex::Scenario::sweep,
                 ex::Scenario::channel_compare, ex::Scenario::fit}) {
    auto* sub = app.add_subcommand(ex::to_string(s), "run the " + ex::to_string(s) + " scenario");
    sub->add_option("--config", o.config, "YAML configuration document");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--engine", o.engine, "full | channel | both");
    sub->add_option("--format", o.format, "comma-separated subset of csv,json,svg");
    sub->callback([&chosen, s] { chosen = s; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }
  return run(*chosen, o);
}
