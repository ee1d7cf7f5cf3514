#include "bbfair/bbfair.h"

#include "bbfair/errors.hpp"
#include "bbfair/fixtures.hpp"
#include "bbfair/instance_io.hpp"
#include "bbfair/oracle.hpp"
#include "bbfair/report.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

struct bbf_instance {
  bbfair::ProblemInstance inst;
};

struct bbf_solve_result {
  bbfair::ProblemInstance inst;
  bbfair::SolveResult result;
  std::string termination;
};

namespace {

thread_local std::string last_error;

bbf_status fail(bbf_status code, const std::string& message) {
  last_error = message;
  return code;
}

template <class F>
bbf_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const bbfair::SizeGuardError& e) {
    return fail(BBF_ERR_SIZE_GUARD, e.what());
  } catch (const bbfair::DomainError& e) {
    return fail(BBF_ERR_DOMAIN, e.what());
  } catch (const bbfair::InfeasibleAllocation& e) {
    return fail(BBF_ERR_INFEASIBLE, e.what());
  } catch (const bbfair::NumericalError& e) {
    return fail(BBF_ERR_NUMERICAL, e.what());
  } catch (const bbfair::ConsistencyError& e) {
    return fail(BBF_ERR_CONSISTENCY, e.what());
  } catch (const bbfair::InputError& e) {
    return fail(BBF_ERR_INPUT, e.what());
  } catch (const std::exception& e) {
    return fail(BBF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BBF_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

bbfair::ToleranceConfig tolerances(const bbf_options* opts) {
  bbfair::ToleranceConfig tol;
  if (opts) {
    tol.eps_feasible = opts->eps_feasible;
    tol.eps_bottleneck = opts->eps_bottleneck;
    tol.eps_njc = opts->eps_njc;
    tol.t_max = opts->t_max;
  }
  tol.validate();
  return tol;
}

bbf_status make_instance(bbfair::ProblemInstance inst, bool renormalize, bbf_instance** out) {
  if (renormalize) bbfair::renormalize_entitlements(inst);
  bbfair::require_valid(inst);
  *out = new bbf_instance{std::move(inst)};
  return BBF_OK;
}

}  // namespace

extern "C" {

const char* bbf_last_error(void) { return last_error.c_str(); }

const char* bbf_status_name(bbf_status status) {
  switch (status) {
    case BBF_OK: return "ok";
    case BBF_ERR_NULL_ARGUMENT: return "null argument";
    case BBF_ERR_INPUT: return "input error";
    case BBF_ERR_DOMAIN: return "domain error";
    case BBF_ERR_INFEASIBLE: return "infeasible allocation";
    case BBF_ERR_NUMERICAL: return "numerical error";
    case BBF_ERR_SIZE_GUARD: return "size guard exceeded";
    case BBF_ERR_CONSISTENCY: return "consistency error";
    case BBF_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case BBF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void bbf_string_free(char* s) { std::free(s); }

bbf_status bbf_instance_from_json(const char* text, bbf_instance** out) {
  if (!text || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_instance_from_json: null argument");
  return guarded([&] { return make_instance(bbfair::parse_instance(text), false, out); });
}

bbf_status bbf_instance_from_json_renormalized(const char* text, bbf_instance** out) {
  if (!text || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_instance_from_json_renormalized: null argument");
  return guarded([&] { return make_instance(bbfair::parse_instance(text), true, out); });
}

bbf_status bbf_instance_from_file(const char* path, bbf_instance** out) {
  if (!path || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_instance_from_file: null argument");
  return guarded([&] { return make_instance(bbfair::load_instance(path), false, out); });
}

bbf_status bbf_instance_from_file_renormalized(const char* path, bbf_instance** out) {
  if (!path || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_instance_from_file_renormalized: null argument");
  return guarded([&] { return make_instance(bbfair::load_instance(path), true, out); });
}

bbf_status bbf_instance_from_fixture(const char* name, bbf_instance** out) {
  if (!name || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_instance_from_fixture: null argument");
  return guarded([&] { return make_instance(bbfair::fixture(name), false, out); });
}

bbf_status bbf_instance_utilization(size_t middles, bbf_instance** out) {
  if (!out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_instance_utilization: null argument");
  return guarded([&] { return make_instance(bbfair::utilization_instance(middles), false, out); });
}

bbf_status bbf_instance_create(size_t users, size_t resources, const double* entitlements,
                               const double* requirements, bbf_instance** out) {
  if (!entitlements || !requirements || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_instance_create: null argument");
  return guarded([&] {
    bbfair::ProblemInstance inst;
    const auto n = static_cast<Eigen::Index>(users);
    const auto m = static_cast<Eigen::Index>(resources);
    inst.entitlements = Eigen::Map<const Eigen::VectorXd>(entitlements, n);
    inst.requirements = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        requirements, n, m);
    return make_instance(std::move(inst), false, out);
  });
}

void bbf_instance_free(bbf_instance* inst) { delete inst; }

size_t bbf_instance_users(const bbf_instance* inst) { return inst ? inst->inst.num_users() : 0; }

size_t bbf_instance_resources(const bbf_instance* inst) { return inst ? inst->inst.num_resources() : 0; }

bbf_status bbf_instance_to_json(const bbf_instance* inst, char** out) {
  if (!inst || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_instance_to_json: null argument");
  return guarded([&] {
    *out = copy_string(bbfair::instance_to_json(inst->inst).dump(2));
    return BBF_OK;
  });
}

size_t bbf_fixture_count(void) { return bbfair::fixture_names().size(); }

const char* bbf_fixture_name(size_t index) {
  static const std::vector<std::string> names = bbfair::fixture_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

void bbf_options_default(bbf_options* opts) {
  if (!opts) return;
  const bbfair::ToleranceConfig tol;
  opts->eps_feasible = tol.eps_feasible;
  opts->eps_bottleneck = tol.eps_bottleneck;
  opts->eps_njc = tol.eps_njc;
  opts->t_max = tol.t_max;
  opts->remove_dominated = 1;
}

bbf_status bbf_solve(const bbf_instance* inst, const bbf_options* opts, bbf_solve_result** out) {
  if (!inst || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_solve: null argument");
  return guarded([&] {
    bbfair::SolveOptions so;
    so.remove_dominated = opts ? opts->remove_dominated != 0 : true;
    auto res = std::make_unique<bbf_solve_result>();
    res->inst = inst->inst;
    res->result = bbfair::solve(inst->inst, tolerances(opts), so);
    res->termination = bbfair::to_string(res->result.termination);
    *out = res.release();
    return BBF_OK;
  });
}

void bbf_solve_result_free(bbf_solve_result* res) { delete res; }

int bbf_solve_result_verified(const bbf_solve_result* res) { return res && res->result.verified ? 1 : 0; }

int bbf_solve_result_polished(const bbf_solve_result* res) { return res && res->result.polish_applied ? 1 : 0; }

const char* bbf_solve_result_termination(const bbf_solve_result* res) { return res ? res->termination.c_str() : ""; }

bbf_status bbf_solve_result_allocation(const bbf_solve_result* res, double* out, size_t len) {
  if (!res || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_solve_result_allocation: null argument");
  const auto& x = res->result.solution.allocation;
  if (len < static_cast<size_t>(x.size()))
    return fail(BBF_ERR_BUFFER_TOO_SMALL, "allocation needs " + std::to_string(x.size()) + " entries");
  std::copy(x.data(), x.data() + x.size(), out);
  return BBF_OK;
}

bbf_status bbf_solve_result_text(const bbf_solve_result* res, int flags, char** out) {
  if (!res || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_solve_result_text: null argument");
  return guarded([&] {
    const bbfair::RenderOptions ro{(flags & BBF_RENDER_EXACT) != 0, (flags & BBF_RENDER_TRACE) != 0};
    *out = copy_string(bbfair::render_solve(res->inst, res->result, ro));
    return BBF_OK;
  });
}

bbf_status bbf_solve_result_json(const bbf_solve_result* res, int flags, char** out) {
  if (!res || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_solve_result_json: null argument");
  return guarded([&] {
    const bbfair::RenderOptions ro{(flags & BBF_RENDER_EXACT) != 0, (flags & BBF_RENDER_TRACE) != 0};
    *out = copy_string(bbfair::solve_to_json(res->inst, res->result, ro).dump(2));
    return BBF_OK;
  });
}

bbf_status bbf_solve_result_trajectory_csv(const bbf_solve_result* res, size_t stride, char** out) {
  if (!res || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_solve_result_trajectory_csv: null argument");
  return guarded([&] {
    *out = copy_string(bbfair::trajectory_csv(res->result.trace, res->result.trajectory, stride));
    return BBF_OK;
  });
}

bbf_status bbf_parse_allocation(const char* text, double* out, size_t capacity, size_t* len) {
  if (!text || !len) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_parse_allocation: null argument");
  return guarded([&] {
    const auto x = bbfair::parse_allocation(text);
    *len = static_cast<size_t>(x.size());
    if (!out || capacity < *len)
      return fail(BBF_ERR_BUFFER_TOO_SMALL, "allocation needs " + std::to_string(x.size()) + " entries");
    std::copy(x.data(), x.data() + x.size(), out);
    return BBF_OK;
  });
}

bbf_status bbf_verify(const bbf_instance* inst, const double* x, size_t len, const bbf_options* opts, int json,
                      char** report, int* passed) {
  if (!inst || !x || !report || !passed) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_verify: null argument");
  return guarded([&] {
    if (len != inst->inst.num_users())
      return fail(BBF_ERR_INPUT, "allocation has " + std::to_string(len) + " entries for " +
                                     std::to_string(inst->inst.num_users()) + " users");
    const bbfair::Allocation a = Eigen::Map<const Eigen::VectorXd>(x, static_cast<Eigen::Index>(len));
    const auto r = bbfair::verify(inst->inst, a, tolerances(opts));
    *passed = r.passed() ? 1 : 0;
    *report = copy_string(json ? bbfair::to_json(r).dump(2) : bbfair::render_text(inst->inst, r));
    return BBF_OK;
  });
}

bbf_status bbf_enumerate(const bbf_instance* inst, int json, char** out, size_t* witnesses) {
  if (!inst || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_enumerate: null argument");
  return guarded([&] {
    const auto family = bbfair::enumerate_solutions(inst->inst);
    if (witnesses) *witnesses = family.witnesses.size();
    *out = copy_string(json ? bbfair::to_json(family).dump(2) : bbfair::render_family(inst->inst, family));
    return BBF_OK;
  });
}

bbf_status bbf_compare(const bbf_instance* inst, const bbf_options* opts, size_t middles, int json, char** out) {
  if (!inst || !out) return fail(BBF_ERR_NULL_ARGUMENT, "bbf_compare: null argument");
  return guarded([&] {
    const auto c = bbfair::compare(inst->inst, tolerances(opts));
    std::optional<std::size_t> k;
    if (middles > 0) k = middles;
    *out = copy_string(json ? bbfair::comparison_to_json(inst->inst, c, k).dump(2)
                            : bbfair::render_comparison(inst->inst, c, k));
    return BBF_OK;
  });
}

}  // extern "C"
