/* Copyright 2026 The kex Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "kex/stats.h"

#include <cmath>
#include <limits>

#include "json.hpp"
#include "kex/error.h"

namespace kex {
namespace {

constexpr int kMaxIterations = 500;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// Continued fraction for the incomplete beta function (modified Lentz).
double BetaContinuedFraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw Error("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTCdf(double t, double df) {
  if (df <= 0.0) throw Error("degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * RegularizedIncompleteBeta(df / 2.0, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult PairedTTest(std::span<const std::pair<double, double>> pairs,
                        double alpha, Sidedness sidedness) {
  if (pairs.size() < 2) throw Error("paired t-test needs at least 2 pairs");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must be in (0, 1)");

  const double n = static_cast<double>(pairs.size());
  double mean = 0.0;
  for (const auto& [a, b] : pairs) mean += b - a;
  mean /= n;
  double sum_squares = 0.0;
  for (const auto& [a, b] : pairs) {
    const double deviation = (b - a) - mean;
    sum_squares += deviation * deviation;
  }
  const double sd = std::sqrt(sum_squares / (n - 1.0));
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    throw Error("degenerate: constant differences");
  }

  TTestResult result;
  result.n = pairs.size();
  result.df = pairs.size() - 1;
  result.mean_difference = mean;
  result.sd_difference = sd;
  result.t = mean / (sd / std::sqrt(n));
  const double df = static_cast<double>(result.df);
  const double x = df / (df + result.t * result.t);
  result.p_two_sided = RegularizedIncompleteBeta(df / 2.0, 0.5, x);
  result.p_one_sided = 1.0 - StudentTCdf(result.t, df);
  if (result.t > 0.0) result.p_one_sided = 0.5 * result.p_two_sided;
  result.sidedness = sidedness;
  result.alpha = alpha;
  result.p = sidedness == Sidedness::kTwoSided ? result.p_two_sided
                                               : result.p_one_sided;
  result.significant = result.p < alpha;
  return result;
}

std::string TTestResultToJson(const TTestResult& result) {
  nlohmann::ordered_json json;
  json["n"] = result.n;
  json["mean_difference"] = result.mean_difference;
  json["sd_difference"] = result.sd_difference;
  json["t"] = result.t;
  json["df"] = result.df;
  json["p_two_sided"] = result.p_two_sided;
  json["p_one_sided"] = result.p_one_sided;
  json["sidedness"] =
      result.sidedness == Sidedness::kTwoSided ? "two" : "one";
  json["p"] = result.p;
  json["alpha"] = result.alpha;
  json["significant"] = result.significant;
  return json.dump(2) + "\n";
}

}  // namespace kex
