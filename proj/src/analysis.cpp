#include "fockwalk/analysis.hpp"

#include <cmath>
#include <numbers>

namespace fockwalk {

using std::numbers::pi;

void BudgetParams::validate() const {
  if (n_target < 1) throw ValidationError("budget: n_T must be at least 1");
  if (!(wait_multiple > 0.0)) throw ValidationError("budget: M must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("budget: alpha must lie in [0, 1]");
  if (!(rate_ratio >= 0.0) || !std::isfinite(rate_ratio)) throw ValidationError("budget: rate ratio must be non-negative");
}

double analytic_fidelity(const BudgetParams& b) {
  b.validate();
  const double n3 = std::pow(static_cast<double>(b.n_target), 3);
  const double denom = pi * pi * b.alpha + 4.0 * b.wait_multiple * n3 * b.rate_ratio;
  if (!(denom > 0.0)) throw ValidationError("budget: non-positive denominator");
  return pi * pi * (b.alpha - residual_ground_population(b.wait_multiple)) / denom;
}

double residual_ground_population(double wait_multiple) {
  if (!(wait_multiple >= 0.0)) throw ValidationError("budget: M must be non-negative");
  return std::exp(-wait_multiple);
}

double neighbour_transfer(int n_target) {
  const double s = std::sin(pi * std::sqrt(static_cast<double>(n_target)) / std::sqrt(n_target + 1.0));
  return s * s;
}

double balance_residual(double fidelity, const BudgetParams& b) {
  b.validate();
  const double s2 = neighbour_transfer(b.n_target);
  const double loss = -std::expm1(-b.n_target * b.rate_ratio * b.wait_multiple);
  return fidelity * loss + std::exp(-b.wait_multiple) * s2 - b.alpha * (1.0 - fidelity) * s2;
}

double balance_fidelity(const BudgetParams& b) {
  b.validate();
  const double s2 = neighbour_transfer(b.n_target);
  const double loss = -std::expm1(-b.n_target * b.rate_ratio * b.wait_multiple);
  const double denom = loss + b.alpha * s2;
  if (!(denom > 0.0)) throw ValidationError("budget: degenerate balance relation");
  return s2 * (b.alpha - std::exp(-b.wait_multiple)) / denom;
}

StationaryPoint stationary_point(std::span<const StepRecord> records, int n_target) {
  if (n_target < 1) throw ValidationError("stationary_point: n_T must be at least 1");
  const auto s = stabilization_step(records);
  if (!s) throw NotStationaryError("run for n_T = " + std::to_string(n_target) + " never stabilized");
  const int idx = std::min<int>(*s + 10, static_cast<int>(records.size()) - 1);
  const auto& r = records[static_cast<std::size_t>(idx)];
  return StationaryPoint{n_target, r.step, r.populations.at(n_target), r.populations.at(n_target - 1)};
}

AlphaEstimate estimate_alpha(std::span<const StationaryPoint> points) {
  if (points.size() < 3) throw ValidationError("estimate_alpha: need stationary points for at least three targets");
  AlphaEstimate out;
  for (const auto& p : points) {
    const double missing = 1.0 - p.fidelity;
    if (!(missing > 1e-12)) throw ValidationError("estimate_alpha: fidelity 1 leaves alpha undefined");
    out.per_point.push_back(p.below_population / missing);
  }
  double sum = 0.0;
  for (double a : out.per_point) sum += a;
  out.mean = sum / static_cast<double>(out.per_point.size());
  double ss = 0.0;
  for (double a : out.per_point) ss += (a - out.mean) * (a - out.mean);
  out.spread = std::sqrt(ss / static_cast<double>(out.per_point.size() - 1));
  return out;
}

std::vector<FidelityCurveRow> fidelity_curve(const ProtocolParams& base, std::span<const int> n_targets,
                                             double alpha, double wait_multiple, double rate_ratio) {
  if (n_targets.empty()) throw ValidationError("no targets");
  std::vector<FidelityCurveRow> rows;
  for (int n : n_targets) {
    ProtocolParams p = base;
    p.n_target = n;
    p.n_max.reset();
    const auto records = run_protocol(p);
    const auto sp = stationary_point(records, n);
    FidelityCurveRow row;
    row.n_target = n;
    row.analytic = analytic_fidelity(BudgetParams{n, wait_multiple, alpha, rate_ratio});
    row.numeric = sp.fidelity;
    row.alpha = sp.below_population / (1.0 - sp.fidelity);
    row.stationary_step = sp.step;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fockwalk
