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

// Paired Student t-test with p-values from the regularized incomplete beta
// function.

#ifndef KEX_STATS_H_
#define KEX_STATS_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>

namespace kex {

enum class Sidedness { kOneSided, kTwoSided };

struct TTestResult {
  size_t n = 0;
  double mean_difference = 0.0;
  double sd_difference = 0.0;
  double t = 0.0;
  size_t df = 0;
  double p_two_sided = 1.0;
  // Alternative hypothesis: mean of (b - a) is greater than zero.
  double p_one_sided = 1.0;
  Sidedness sidedness = Sidedness::kTwoSided;
  double alpha = 0.05;
  // p of the selected sidedness.
  double p = 1.0;
  bool significant = false;
};

// I_x(a, b), evaluated with Lentz's continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);

// P(T <= t) for Student's t with `df` degrees of freedom.
double StudentTCdf(double t, double df);

// Tests differences b - a of each pair. Requires at least two pairs and a
// non-zero standard deviation of the differences.
TTestResult PairedTTest(std::span<const std::pair<double, double>> pairs,
                        double alpha = 0.05,
                        Sidedness sidedness = Sidedness::kTwoSided);

std::string TTestResultToJson(const TTestResult& result);

}  // namespace kex

#endif  // KEX_STATS_H_
