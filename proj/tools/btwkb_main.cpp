// Command line front end. Links only against the C interface; every
// subcommand assembles a JSON experiment config (from --config and/or
// flags) and hands it to btw_experiment_run.

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "btwkb.h"

using nlohmann::json;

namespace {

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CLI::ValidationError("--config", std::string("invalid JSON: ") + e.what());
  }
  return j;
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::string family;
  std::vector<double> family_params;  // raw key=value pairs handled below
  std::vector<std::string> sets;      // key=json overrides
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON config file (flags override it)");
  cmd->add_option("-o,--out", o.out_dir, "output directory")->capture_default_str();
  cmd->add_option("-f,--family", o.family,
                  "family name (plane-isotropic, plane-quadratic, plane-quartic, "
                  "cp1-tilted-well, cp1-poly-n3, cp1-double-well-bump)");
  cmd->add_option("-s,--set", o.sets,
                  "config override key=JSON, dotted keys allowed (e.g. family.alpha=0.3)");
  cmd->add_flag("-q,--quiet", o.quiet, "suppress the report on stdout");
}

json build_config(const CommonOpts& o, const std::string& experiment) {
  json cfg = o.config_path.empty() ? json::object() : load_config(o.config_path);
  cfg["experiment"] = experiment;
  if (!o.family.empty()) cfg["family"]["name"] = o.family;
  for (const std::string& kv : o.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--set", "expected key=value, got " + kv);
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    json parsed;
    try {
      parsed = json::parse(val);
    } catch (const json::exception&) {
      parsed = val;  // bare strings are accepted unquoted
    }
    json* node = &cfg;
    size_t pos = 0;
    while (true) {
      auto dot = key.find('.', pos);
      std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
      if (dot == std::string::npos) {
        (*node)[part] = parsed;
        break;
      }
      node = &(*node)[part];
      pos = dot + 1;
    }
  }
  return cfg;
}

int run(const json& cfg, const CommonOpts& o) {
  char* report = nullptr;
  btw_status st = btw_experiment_run(cfg.dump().c_str(), o.out_dir.c_str(), &report);
  if (st != BTW_OK) {
    std::fprintf(stderr, "error (%d): %s\n", static_cast<int>(st), btw_last_error());
    return st == BTW_EINVAL ? 2 : 1;
  }
  if (!o.quiet && report) std::printf("%s\n", report);
  btw_free_string(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WKB expansions and spectra of Berezin-Toeplitz operators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(btw_version()));
  app.failure_message(CLI::FailureMessage::help);

  struct Sub {
    CLI::App* cmd;
    CommonOpts opts;
    std::string experiment;
  };
  std::vector<Sub> subs;
  subs.reserve(8);  // option bindings hold addresses into the elements
  auto add = [&](const std::string& name, const std::string& experiment, const std::string& desc) {
    subs.push_back({app.add_subcommand(name, desc), {}, experiment});
    add_common(subs.back().cmd, subs.back().opts);
    return &subs.back();
  };

  // per-subcommand convenience flags, stored as optionals so that absent
  // flags do not clobber --config values
  std::optional<int> K, D, N, kmax;
  std::vector<int> Ns;

  add("wkb", "wkb", "expand the ground eigenvalue and quasimode at the well");
  add("spectrum", "spectrum", "eigenvalues of the Toeplitz matrix at one level N");
  add("residual-sweep", "residual-sweep", "quasimode residual against N");
  add("gap-sweep", "gap-sweep", "splitting of the two lowest eigenvalues against N");
  add("count", "count", "low-lying eigenvalue count against a WKB threshold");
  add("profile", "profile", "radial decay profile of the embedded quasimode");
  for (auto& s : subs) {
    s.cmd->add_option("-K,--orders", K, "number of correction orders");
    s.cmd->add_option("-D,--degree", D, "series truncation degree");
    if (s.experiment == "spectrum" || s.experiment == "profile")
      s.cmd->add_option("-N,--level", N, "quantization level");
    else
      s.cmd->add_option("-N,--levels", Ns, "quantization levels");
    s.cmd->add_option("--kmax", kmax, "fixed summation rank (default: growth-adapted)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (auto& s : subs) {
    if (!s.cmd->parsed()) continue;
    try {
      json cfg = build_config(s.opts, s.experiment);
      if (K) cfg["K"] = *K;
      if (D) cfg["D"] = *D;
      if (N) cfg["N"] = *N;
      if (!Ns.empty()) cfg["N"] = Ns;
      if (kmax) cfg["kmax"] = *kmax;
      return run(cfg, s.opts);
    } catch (const CLI::ValidationError& e) {
      std::fprintf(stderr, "%s\n", e.what());
      return 2;
    }
  }
  return 2;
}
