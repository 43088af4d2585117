#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include "commands.hpp"

namespace {

using cptclock::cli::json;
using cptclock::cli::ValueType;

// Flag text to JSON typed by the key table. Bad numbers are reported as
// config errors by the caller.
json typed_value(ValueType type, const std::string& raw) {
  auto number = [](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
  };
  switch (type) {
    case ValueType::integer: {
      std::size_t used = 0;
      const long long v = std::stoll(raw, &used);
      if (used != raw.size()) throw std::invalid_argument("bad integer '" + raw + "'");
      return v;
    }
    case ValueType::number:
    case ValueType::optional_number:
      return number(raw);
    case ValueType::number_or_array: {
      if (raw.find(',') == std::string::npos) return number(raw);
      json arr = json::array();
      std::size_t start = 0;
      while (true) {
        const auto comma = raw.find(',', start);
        arr.push_back(number(raw.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      return arr;
    }
    case ValueType::string:
      return raw;
  }
  return raw;
}

const char* type_name(ValueType type) {
  switch (type) {
    case ValueType::integer: return "INT";
    case ValueType::string: return "TEXT";
    case ValueType::number_or_array: return "FLOAT[,FLOAT...]";
    default: return "FLOAT";
  }
}

unsigned thread_count() {
  const char* env = std::getenv("CPTCLOCK_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    const long v = std::stol(env);
    if (v >= 1) return static_cast<unsigned>(v);
  } catch (const std::exception&) {
  }
  std::cerr << "ignoring CPTCLOCK_THREADS='" << env << "'\n";
  return 1;
}

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> raw;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-squeezed CPT clock simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cptclock 1.0.0");

  const std::map<std::string, std::string> descriptions{
      {"fringe", "Ramsey fringe scan with slope and phase uncertainty"},
      {"pump", "Lambda-system optical pumping into the dark state"},
      {"report", "Sensitivity under excess noise"},
      {"husimi", "Husimi Q map of a protocol stage"},
      {"mu-sweep", "ESP fringe magnification versus twist strength"},
      {"oracle-check", ""},
  };
  std::map<std::string, Subcommand> subs;
  for (const auto& name : cptclock::cli::command_names()) {
    auto& sub = subs[name];
    sub.app = app.add_subcommand(name, descriptions.at(name));
    if (name == "oracle-check") sub.app->group("");
    sub.app->add_option("--config", sub.config_path, "JSON config file; flags override it")
        ->check(CLI::ExistingFile);
    for (const auto& spec : cptclock::cli::key_specs(name)) {
      if (spec.name == "command") continue;
      const std::string flags = spec.name == "n_atoms" ? "--n,--n_atoms" : "--" + spec.name;
      sub.app->add_option_function<std::string>(
          flags, [&sub, key = spec.name](const std::string& v) { sub.raw[key] = v; },
          spec.fallback.is_null() ? std::string{} : "default " + spec.fallback.dump())
          ->type_name(type_name(spec.type));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cptclock::cli::kConfigError;
  }

  for (auto& [name, sub] : subs) {
    if (!sub.app->parsed()) continue;
    cptclock::cli::RunContext ctx{std::cout, std::cerr, thread_count()};
    json file_config = json::object();
    json overrides = json::object();
    try {
      if (!sub.config_path.empty()) file_config = cptclock::cli::load_config_file(sub.config_path);
      const auto specs = cptclock::cli::key_specs(name);
      for (const auto& [key, value] : sub.raw) {
        const auto it = std::find_if(specs.begin(), specs.end(),
                                     [&](const auto& s) { return s.name == key; });
        try {
          overrides[key] = typed_value(it->type, value);
        } catch (const std::exception&) {
          throw cptclock::cli::ConfigError("--" + key + ": cannot parse '" + value + "'");
        }
      }
    } catch (const cptclock::cli::ConfigError& e) {
      std::cerr << name << ": config error: " << e.what() << "\n";
      return cptclock::cli::kConfigError;
    } catch (const cptclock::cli::IoError& e) {
      std::cerr << name << ": " << e.what() << "\n";
      return cptclock::cli::kIoError;
    }
    return cptclock::cli::run(name, file_config, overrides, ctx);
  }
  return cptclock::cli::kConfigError;
}
