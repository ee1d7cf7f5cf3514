#include "bbfair/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace bbfair {

using nlohmann::json;

namespace {

std::vector<double> vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json one_based(const std::vector<std::size_t>& v) {
  json a = json::array();
  for (const auto k : v) a.push_back(k + 1);
  return a;
}

std::string join(const Eigen::VectorXd& v, bool exact) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + (exact ? format_exact(v[i]) : format_number(v[i]));
  return s + ")";
}

std::string set_string(const std::vector<std::size_t>& v) {
  std::string s = "{";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + std::to_string(v[k] + 1);
  return s + "}";
}

}  // namespace

std::optional<Fraction> to_fraction(double v, long long max_den, double tol) {
  if (!std::isfinite(v)) return std::nullopt;
  const bool negative = v < 0.0;
  double a = std::abs(v);
  // Convergents h/k of the continued fraction of |v|.
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double rest = a;
  for (int iter = 0; iter < 64; ++iter) {
    const double fl = std::floor(rest);
    if (fl > 9e15) break;
    const auto q = static_cast<long long>(fl);
    const long long h2 = q * h1 + h0;
    const long long k2 = q * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - a) <= tol) {
      return Fraction{negative ? -h1 : h1, k1};
    }
    const double frac = rest - fl;
    if (frac <= 0.0) break;
    rest = 1.0 / frac;
  }
  return std::nullopt;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string format_exact(double v) {
  const auto f = to_fraction(v);
  if (!f) return format_number(v);
  if (f->den == 1) return std::to_string(f->num);
  return std::to_string(f->num) + "/" + std::to_string(f->den);
}

std::string render_solve(const ProblemInstance& inst, const SolveResult& res, const RenderOptions& opts) {
  std::ostringstream os;
  const auto& s = res.solution;
  const bool exact = opts.exact && res.polish_applied;
  os << "status: " << (res.verified ? "verified" : "NOT VERIFIED") << "\n";
  os << "termination: " << to_string(res.termination) << (res.polish_applied ? ", polished" : ", unpolished") << "\n";
  if (opts.exact && !res.polish_applied) os << "note: no polished vertex, printing decimals\n";
  os << "x = " << join(s.allocation, exact) << "\n";
  os << "bottlenecks: " << set_string(s.bottlenecks) << "\n";
  os << "justification:\n";
  for (std::size_t i = 0; i < s.justification.size(); ++i) {
    const auto& j = s.justification[i];
    os << "  user " << i + 1 << ": ";
    switch (j.kind) {
      case Justification::Kind::Resource: os << "bottleneck " << j.resource + 1; break;
      case Justification::Kind::FullRequest: os << "full request"; break;
      case Justification::Kind::None: os << "none (complaint)"; break;
    }
    os << "\n";
  }
  const Eigen::MatrixXd a = bundles(inst, s.allocation);
  os << "bundles:\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) os << "  a_" << i + 1 << " = " << join(a.row(i).transpose(), exact) << "\n";
  os << "slacks: " << join(s.slacks, false) << "\n";
  os << "residuals: capacity excess " << format_number(std::max(0.0, res.report.capacity.worst_excess))
     << ", distance from numeric endpoint "
     << format_number(res.numeric.size() == s.allocation.size() ? (res.numeric - s.allocation).lpNorm<Eigen::Infinity>()
                                                                   : 0.0)
     << "\n";
  if (opts.trace_reductions) os << "reductions:\n" << render_trace(inst, res.trace);
  if (!res.verified) os << res.diagnostic;
  return os.str();
}

json solve_to_json(const ProblemInstance& inst, const SolveResult& res, const RenderOptions& opts) {
  const auto& s = res.solution;
  json just = json::array();
  for (const auto& j : s.justification) {
    switch (j.kind) {
      case Justification::Kind::Resource: just.push_back(j.resource + 1); break;
      case Justification::Kind::FullRequest: just.push_back("full"); break;
      case Justification::Kind::None: just.push_back(nullptr); break;
    }
  }
  json out;
  out["verified"] = res.verified;
  out["termination"] = to_string(res.termination);
  out["polished"] = res.polish_applied;
  out["x"] = vec(s.allocation);
  if (opts.exact && res.polish_applied) {
    json e = json::array();
    for (Eigen::Index i = 0; i < s.allocation.size(); ++i) e.push_back(format_exact(s.allocation[i]));
    out["x_exact"] = std::move(e);
  }
  out["numeric_x"] = vec(res.numeric);
  out["bottlenecks"] = one_based(s.bottlenecks);
  out["justification"] = std::move(just);
  out["slacks"] = vec(s.slacks);
  const Eigen::MatrixXd a = bundles(inst, s.allocation);
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) rows.push_back(vec(a.row(i).transpose()));
  out["bundles"] = std::move(rows);
  out["report"] = to_json(res.report);
  if (opts.trace_reductions) out["reductions"] = render_trace(inst, res.trace);
  return out;
}

Comparison compare(const ProblemInstance& inst, const ToleranceConfig& tol) {
  Comparison c;
  c.bbf = solve(inst, tol, SolveOptions{true, false});
  c.drf = solve_drf(inst);
  const auto& x = c.bbf.solution.allocation;
  c.bbf_dominant_shares.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) c.bbf_dominant_shares[i] = dominant_share(inst, static_cast<std::size_t>(i), x[i]);
  c.bbf_utilizations = usages(inst.requirements, x);
  c.bbf_average = average_utilization(inst, x);
  c.drf_average = average_utilization(inst, c.drf.x);
  return c;
}

std::string render_comparison(const ProblemInstance& inst, const Comparison& c, std::optional<std::size_t> middles) {
  std::ostringstream os;
  const Eigen::MatrixXd ab = bundles(inst, c.bbf.solution.allocation);
  const Eigen::MatrixXd ad = bundles(inst, c.drf.x);
  os << "bottleneck-fair: " << (c.bbf.verified ? "verified" : "NOT VERIFIED") << "\n";
  for (Eigen::Index i = 0; i < ab.rows(); ++i) {
    os << "user " << i + 1 << ":\n";
    os << "  bbf x = " << format_number(c.bbf.solution.allocation[i]) << "  bundle " << join(ab.row(i).transpose(), false)
       << "  dominant share " << format_number(c.bbf_dominant_shares[i]) << "\n";
    os << "  drf x = " << format_number(c.drf.x[i]) << "  bundle " << join(ad.row(i).transpose(), false)
       << "  dominant share " << format_number(c.drf.dominant_shares[i]) << "\n";
  }
  os << "utilization bbf: " << join(c.bbf_utilizations, false) << "\n";
  os << "utilization drf: " << join(c.drf.utilizations, false) << "\n";
  os << "drf saturating resource: "
     << (c.drf.saturating_resource ? std::to_string(*c.drf.saturating_resource + 1) : std::string("none")) << "\n";
  os << "average utilization: bbf " << format_number(c.bbf_average) << ", drf " << format_number(c.drf_average) << " over "
     << inst.num_resources() << " resources\n";
  if (middles)
    os << "with " << *middles << " middle resources; as the count grows the averages tend to "
       << format_number(kBbfUtilizationLimit) << " (bbf) and " << format_number(kDrfUtilizationLimit) << " (drf)\n";
  return os.str();
}

json comparison_to_json(const ProblemInstance& inst, const Comparison& c, std::optional<std::size_t> middles) {
  auto rows = [](const Eigen::MatrixXd& a) {
    json r = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) r.push_back(vec(a.row(i).transpose()));
    return r;
  };
  json out;
  out["bbf"] = {{"verified", c.bbf.verified},
                {"x", vec(c.bbf.solution.allocation)},
                {"bundles", rows(bundles(inst, c.bbf.solution.allocation))},
                {"dominant_shares", vec(c.bbf_dominant_shares)},
                {"utilizations", vec(c.bbf_utilizations)},
                {"average_utilization", c.bbf_average}};
  out["drf"] = {{"x", vec(c.drf.x)},
                {"share", c.drf.share},
                {"bundles", rows(bundles(inst, c.drf.x))},
                {"dominant_shares", vec(c.drf.dominant_shares)},
                {"utilizations", vec(c.drf.utilizations)},
                {"saturating_resource",
                 c.drf.saturating_resource ? json(*c.drf.saturating_resource + 1) : json(nullptr)},
                {"average_utilization", c.drf_average}};
  if (middles) {
    out["middles"] = *middles;
    out["limits"] = {{"bbf", kBbfUtilizationLimit}, {"drf", kDrfUtilizationLimit}};
  }
  return out;
}

}  // namespace bbfair
