// footpath <fetch|build-masks|split|vectorize|assemble|evaluate|pipeline> --config <path> [--section.key value]...

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "footpath/config.hpp"
#include "footpath/errors.hpp"
#include "footpath/pipeline.hpp"

namespace {

using footpath::ConfigOverrides;

// Leftover arguments must be --section.key=value or --section.key value.
ConfigOverrides parse_overrides(const std::vector<std::string>& args) {
  ConfigOverrides out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.find('.') == std::string::npos) {
      throw footpath::ConfigError("unexpected argument '" + a + "'");
    }
    const std::string body = a.substr(2);
    if (const auto eq = body.find('='); eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < args.size()) {
      out.emplace_back(body, args[++i]);
    } else {
      throw footpath::ConfigError("override " + a + " has no value");
    }
  }
  return out;
}

const char* status_text(footpath::StageOutcome::Status s) {
  switch (s) {
    case footpath::StageOutcome::Status::kRan:
      return "ran";
    case footpath::StageOutcome::Status::kUpToDate:
      return "up to date";
    case footpath::StageOutcome::Status::kNotConfigured:
      return "not configured";
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Footpath network extraction from slippy-map tiles and segmentation masks"};
  app.require_subcommand(1, 1);
  std::string config_path;
  const std::vector<std::string> commands = {"fetch",    "build-masks", "split",   "vectorize",
                                             "assemble", "evaluate",    "pipeline"};
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI configuration file")->required();
    sub->allow_extras();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    const footpath::PipelineConfig cfg = footpath::load_config(config_path, parse_overrides(sub->remaining()));
    footpath::write_effective_config(cfg);
    std::ostream& log = std::cerr;
    if (command == "fetch") {
      std::cout << footpath::run_fetch(cfg, nullptr, log) << "\n";
    } else if (command == "build-masks") {
      std::cout << footpath::run_build_masks(cfg, log) << "\n";
    } else if (command == "split") {
      footpath::run_split(cfg, log);
    } else if (command == "vectorize") {
      footpath::run_vectorize(cfg, log);
    } else if (command == "assemble") {
      footpath::run_assemble(cfg, log);
    } else if (command == "evaluate") {
      std::cout << footpath::format_report_text(footpath::run_evaluate(cfg, log));
    } else {
      for (const auto& o : footpath::run_pipeline(cfg, nullptr, log)) {
        std::cout << o.stage << ": " << status_text(o.status) << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "footpath " << command << ": " << e.what() << "\n";
    return footpath::exit_code_for(e);
  }
  return 0;
}
