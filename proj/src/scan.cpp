#include "warpdirac/scan.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "warpdirac/errors.hpp"

namespace warpdirac {

namespace {

constexpr int kTrendWindow = 8;

bool decreasing_towards_end(const std::vector<double>& values, bool at_right) {
  const int n = static_cast<int>(values.size());
  if (n < kTrendWindow + 1) return false;
  for (int k = 0; k < kTrendWindow; ++k) {
    const int i = at_right ? n - 1 - k : k;
    const int j = at_right ? i - 1 : i + 1;
    if (!(values[i] < values[j])) return false;
  }
  return true;
}

}  // namespace

ScanExtremum scan_infimum(const std::function<double(double)>& f, const InfimumScanPolicy& policy,
                          std::optional<double> limit_at_zero, std::optional<double> limit_at_infinity) {
  require(policy.r_min > 0.0 && policy.r_max > policy.r_min && policy.points >= 16,
          ErrorKind::Configuration, "invalid scan policy");
  const double lo = std::log(policy.r_min);
  const double hi = std::log(policy.r_max);
  const int n = policy.points;
  const double step = (hi - lo) / (n - 1);

  std::vector<double> values(n);
  int best = 0;
  for (int i = 0; i < n; ++i) {
    values[i] = f(std::exp(lo + step * i));
    if (std::isnan(values[i])) fail(ErrorKind::Numerical, "scan function returned NaN");
    if (values[i] < values[best]) best = i;
  }

  ScanExtremum out{values[best], std::exp(lo + step * best), false};

  if (best > 0 && best < n - 1) {
    // Golden-section search in log r on the bracketing cell pair.
    double a = lo + step * (best - 1);
    double b = lo + step * (best + 1);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(std::exp(c));
    double fd = f(std::exp(d));
    for (int it = 0; it < policy.refine_iterations; ++it) {
      if (fc < fd) {
        b = d; d = c; fd = fc;
        c = b - g * (b - a);
        fc = f(std::exp(c));
      } else {
        a = c; c = d; fc = fd;
        d = a + g * (b - a);
        fd = f(std::exp(d));
      }
    }
    const double x = fc < fd ? c : d;
    const double fx = std::min(fc, fd);
    if (fx < out.value) out = {fx, std::exp(x), false};
  }

  if (best == n - 1 && !limit_at_infinity && decreasing_towards_end(values, true)) {
    return {-std::numeric_limits<double>::infinity(), policy.r_max, true};
  }
  if (best == 0 && !limit_at_zero && decreasing_towards_end(values, false)) {
    return {-std::numeric_limits<double>::infinity(), policy.r_min, true};
  }
  if (limit_at_zero && *limit_at_zero < out.value) out = {*limit_at_zero, 0.0, false};
  if (limit_at_infinity && *limit_at_infinity < out.value) {
    out = {*limit_at_infinity, std::numeric_limits<double>::infinity(), false};
  }
  return out;
}

ScanExtremum scan_supremum(const std::function<double(double)>& f, const InfimumScanPolicy& policy,
                           std::optional<double> limit_at_zero, std::optional<double> limit_at_infinity) {
  auto neg = [&f](double r) { return -f(r); };
  auto opt_neg = [](std::optional<double> v) { return v ? std::optional<double>(-*v) : std::nullopt; };
  ScanExtremum e = scan_infimum(neg, policy, opt_neg(limit_at_zero), opt_neg(limit_at_infinity));
  e.value = -e.value;
  return e;
}

}  // namespace warpdirac
