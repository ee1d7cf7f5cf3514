// Command-line front end over the C interface.
#include "bbfair/bbfair.h"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInputError = 2;

struct InstanceDeleter {
  void operator()(bbf_instance* p) const { bbf_instance_free(p); }
};
struct ResultDeleter {
  void operator()(bbf_solve_result* p) const { bbf_solve_result_free(p); }
};
struct StringDeleter {
  void operator()(char* p) const { bbf_string_free(p); }
};
using Instance = std::unique_ptr<bbf_instance, InstanceDeleter>;
using Result = std::unique_ptr<bbf_solve_result, ResultDeleter>;
using String = std::unique_ptr<char, StringDeleter>;

struct Failure {
  int code;
  std::string message;
};

int exit_code(bbf_status s) {
  switch (s) {
    case BBF_OK: return kOk;
    case BBF_ERR_NULL_ARGUMENT:
    case BBF_ERR_INPUT:
    case BBF_ERR_DOMAIN:
    case BBF_ERR_SIZE_GUARD:
    case BBF_ERR_BUFFER_TOO_SMALL: return kInputError;
    default: return kFailed;
  }
}

void check(bbf_status s) {
  if (s != BBF_OK) throw Failure{exit_code(s), std::string(bbf_status_name(s)) + ": " + bbf_last_error()};
}

String take(char* p) { return String(p); }

std::string fixture_list() {
  std::string s;
  for (size_t k = 0; k < bbf_fixture_count(); ++k) s += (k ? ", " : "") + std::string(bbf_fixture_name(k));
  return s;
}

// A path if the file exists, otherwise a bundled fixture name.
Instance open_instance(const std::string& source, bool renormalize) {
  bbf_instance* raw = nullptr;
  std::error_code ec;
  if (std::filesystem::exists(source, ec)) {
    check(renormalize ? bbf_instance_from_file_renormalized(source.c_str(), &raw)
                      : bbf_instance_from_file(source.c_str(), &raw));
  } else {
    const bbf_status s = bbf_instance_from_fixture(source.c_str(), &raw);
    if (s != BBF_OK)
      throw Failure{kInputError, "'" + source + "' is neither a readable file nor a fixture (" + fixture_list() + ")"};
  }
  return Instance(raw);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kInputError, "cannot open '" + path + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> parse_allocation(const std::string& text) {
  size_t len = 0;
  bbf_status s = bbf_parse_allocation(text.c_str(), nullptr, 0, &len);
  if (s != BBF_ERR_BUFFER_TOO_SMALL) check(s);
  std::vector<double> x(len);
  check(bbf_parse_allocation(text.c_str(), x.data(), x.size(), &len));
  return x;
}

// Fewest decimal places among the entries of an inline list that have any;
// nullopt when every entry is exact.
std::optional<int> decimal_places(const std::string& list) {
  std::optional<int> fewest;
  std::stringstream ss(list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.find('/') != std::string::npos) continue;
    const auto dot = token.find('.');
    if (dot == std::string::npos) continue;
    int digits = 0;
    for (size_t k = dot + 1; k < token.size() && std::isdigit(static_cast<unsigned char>(token[k])); ++k) ++digits;
    if (token.find_first_of("eE") != std::string::npos) continue;
    fewest = fewest ? std::min(*fewest, digits) : digits;
  }
  return fewest;
}

struct Common {
  std::string source;
  bool renormalize = false;
};

void add_source(CLI::App* cmd, Common& c) {
  cmd->add_option("instance", c.source, "instance JSON file or bundled fixture name")->required();
  cmd->add_flag("--renormalize", c.renormalize, "scale entitlements to sum to 1");
}

void set_tol(bbf_options& o, double tol) {
  o.eps_bottleneck = tol;
  o.eps_njc = tol;
  o.eps_feasible = std::min(o.eps_feasible, tol);
}

void print(const String& s) { std::fputs(s.get(), stdout); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bottleneck-fair multi-resource allocation: solve, verify, enumerate, compare, trace"};
  app.require_subcommand(1);

  Common solve_in;
  std::optional<double> solve_tol, solve_tmax;
  bool no_dominated = false, solve_json = false, trace_reductions = false, exact = false;
  auto* solve_cmd = app.add_subcommand("solve", "compute and verify a bottleneck-fair allocation");
  add_source(solve_cmd, solve_in);
  solve_cmd->add_option("--tol", solve_tol, "bottleneck and complaint tolerance")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--t-max", solve_tmax, "integration horizon")->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--no-dominated-removal", no_dominated, "keep dominated capacity constraints");
  solve_cmd->add_flag("--json", solve_json, "machine-readable output");
  solve_cmd->add_flag("--trace-reductions", trace_reductions, "print the preprocessing steps");
  solve_cmd->add_flag("--exact", exact, "print the polished vertex as fractions");

  Common verify_in;
  std::string alloc_file, inline_x, format = "text";
  std::optional<double> verify_tol;
  auto* verify_cmd = app.add_subcommand("verify", "check an allocation for justified complaints");
  add_source(verify_cmd, verify_in);
  verify_cmd->add_option("allocation", alloc_file, "allocation file (JSON array or object with \"x\")");
  verify_cmd->add_option("--x", inline_x, "comma-separated allocation, e.g. 1,2/3,0");
  verify_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  verify_cmd->add_option("--tol", verify_tol, "tolerance for capacity, bottlenecks and complaints")
      ->check(CLI::PositiveNumber);

  Common enum_in;
  bool enum_json = false;
  auto* enum_cmd = app.add_subcommand("enumerate", "list fair allocations of a small instance");
  add_source(enum_cmd, enum_in);
  enum_cmd->add_flag("--json", enum_json, "machine-readable output");

  std::string compare_source;
  bool compare_renorm = false, compare_json = false;
  std::optional<size_t> middles;
  auto* compare_cmd = app.add_subcommand("compare", "bottleneck-fair allocation versus DRF");
  compare_cmd->add_option("instance", compare_source, "instance JSON file or bundled fixture name");
  compare_cmd->add_flag("--renormalize", compare_renorm, "scale entitlements to sum to 1");
  compare_cmd->add_option("--middles", middles, "use the utilization instance with k middle resources")
      ->check(CLI::NonNegativeNumber);
  compare_cmd->add_flag("--json", compare_json, "machine-readable output");

  Common trace_in;
  size_t stride = 1;
  std::optional<double> trace_tmax;
  auto* trace_cmd = app.add_subcommand("trace", "write the solver trajectory as CSV");
  add_source(trace_cmd, trace_in);
  trace_cmd->add_option("--stride", stride, "keep every k-th accepted step")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--t-max", trace_tmax, "integration horizon")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    bbf_options opts;
    bbf_options_default(&opts);

    if (*solve_cmd) {
      auto inst = open_instance(solve_in.source, solve_in.renormalize);
      if (solve_tol) set_tol(opts, *solve_tol);
      if (solve_tmax) opts.t_max = *solve_tmax;
      opts.remove_dominated = no_dominated ? 0 : 1;
      bbf_solve_result* raw = nullptr;
      check(bbf_solve(inst.get(), &opts, &raw));
      Result res(raw);
      const int flags = (exact ? BBF_RENDER_EXACT : 0) | (trace_reductions ? BBF_RENDER_TRACE : 0);
      char* out = nullptr;
      check(solve_json ? bbf_solve_result_json(res.get(), flags, &out) : bbf_solve_result_text(res.get(), flags, &out));
      print(take(out));
      if (solve_json) std::fputs("\n", stdout);
      return bbf_solve_result_verified(res.get()) ? kOk : kFailed;
    }

    if (*verify_cmd) {
      auto inst = open_instance(verify_in.source, verify_in.renormalize);
      if (inline_x.empty() == alloc_file.empty())
        throw Failure{kInputError, "give exactly one of an allocation file or --x"};
      const auto x = parse_allocation(inline_x.empty() ? read_file(alloc_file) : inline_x);
      const size_t n = bbf_instance_users(inst.get());
      if (x.size() != n)
        throw Failure{kInputError, "allocation has " + std::to_string(x.size()) + " entries for " + std::to_string(n) +
                                       " users"};
      double tol = opts.eps_bottleneck;
      if (verify_tol) {
        tol = *verify_tol;
      } else if (!inline_x.empty()) {
        // Decimal entries are rounded; allow for the rounding in every usage.
        if (const auto d = decimal_places(inline_x))
          tol = std::max(tol, static_cast<double>(n) * 0.5 * std::pow(10.0, -*d));
      }
      opts.eps_feasible = tol;
      opts.eps_bottleneck = tol;
      opts.eps_njc = tol;
      char* report = nullptr;
      int passed = 0;
      check(bbf_verify(inst.get(), x.data(), x.size(), &opts, format == "json", &report, &passed));
      print(take(report));
      if (format == "json") std::fputs("\n", stdout);
      return passed ? kOk : kFailed;
    }

    if (*enum_cmd) {
      auto inst = open_instance(enum_in.source, enum_in.renormalize);
      char* out = nullptr;
      check(bbf_enumerate(inst.get(), enum_json, &out, nullptr));
      print(take(out));
      if (enum_json) std::fputs("\n", stdout);
      return kOk;
    }

    if (*compare_cmd) {
      Instance inst;
      if (middles) {
        if (!compare_source.empty() && compare_source != "utilization")
          throw Failure{kInputError, "--middles applies to the utilization instance only"};
        bbf_instance* raw = nullptr;
        check(bbf_instance_utilization(*middles, &raw));
        inst.reset(raw);
      } else {
        if (compare_source.empty()) throw Failure{kInputError, "compare needs an instance or --middles"};
        inst = open_instance(compare_source, compare_renorm);
      }
      char* out = nullptr;
      check(bbf_compare(inst.get(), &opts, middles.value_or(0), compare_json, &out));
      print(take(out));
      if (compare_json) std::fputs("\n", stdout);
      return kOk;
    }

    if (*trace_cmd) {
      auto inst = open_instance(trace_in.source, trace_in.renormalize);
      if (trace_tmax) opts.t_max = *trace_tmax;
      bbf_solve_result* raw = nullptr;
      check(bbf_solve(inst.get(), &opts, &raw));
      Result res(raw);
      char* out = nullptr;
      check(bbf_solve_result_trajectory_csv(res.get(), stride, &out));
      print(take(out));
      return kOk;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return kInputError;
}
