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

#include "kex/crf.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>

#include "kex/error.h"

namespace kex {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::string_view kMagic = "kex-crf";
constexpr int kFormatVersion = 1;

using TagRow = std::array<double, kNumTags>;

double LogSumExp(const TagRow& values) {
  const double max = *std::max_element(values.begin(), values.end());
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

// Emission scores per position and the masked transition matrix.
struct Lattice {
  std::vector<TagRow> emission;
  std::array<TagRow, kNumTags> transition;
};

Lattice BuildLattice(const CrfModel& model, const CrfInstance& instance) {
  const auto& w = model.weights();
  Lattice lattice;
  for (Tag prev : kAllTags) {
    for (Tag next : kAllTags) {
      lattice.transition[TagIndex(prev)][TagIndex(next)] =
          IsLegalTransition(prev, next)
              ? w[CrfModel::TransitionIndex(prev, next)]
              : kNegInf;
    }
  }
  lattice.emission.resize(instance.size());
  for (size_t i = 0; i < instance.size(); ++i) {
    TagRow& row = lattice.emission[i];
    row.fill(0.0);
    for (uint32_t attribute : instance.attributes[i]) {
      if (attribute >= model.num_attributes()) {
        throw Error("instance " + instance.id +
                    " references an unknown attribute id");
      }
      for (Tag tag : kAllTags) {
        row[TagIndex(tag)] += w[CrfModel::StateIndex(attribute, tag)];
      }
    }
  }
  return lattice;
}

std::vector<TagRow> Forward(const Lattice& lattice) {
  const size_t n = lattice.emission.size();
  std::vector<TagRow> alpha(n);
  if (n == 0) return alpha;
  alpha[0] = lattice.emission[0];
  for (size_t i = 1; i < n; ++i) {
    for (size_t next = 0; next < kNumTags; ++next) {
      TagRow terms;
      for (size_t prev = 0; prev < kNumTags; ++prev) {
        terms[prev] = alpha[i - 1][prev] + lattice.transition[prev][next];
      }
      alpha[i][next] = lattice.emission[i][next] + LogSumExp(terms);
    }
  }
  return alpha;
}

std::vector<TagRow> Backward(const Lattice& lattice) {
  const size_t n = lattice.emission.size();
  std::vector<TagRow> beta(n);
  if (n == 0) return beta;
  beta[n - 1].fill(0.0);
  for (size_t i = n - 1; i-- > 0;) {
    for (size_t prev = 0; prev < kNumTags; ++prev) {
      TagRow terms;
      for (size_t next = 0; next < kNumTags; ++next) {
        terms[next] = lattice.transition[prev][next] +
                      lattice.emission[i + 1][next] + beta[i + 1][next];
      }
      beta[i][prev] = LogSumExp(terms);
    }
  }
  return beta;
}

std::string FormatExact(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

double InfinityNorm(const std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm = std::max(norm, std::fabs(x));
  return norm;
}

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

std::string_view TagName(Tag tag) {
  switch (tag) {
    case Tag::kS: return "key_S";
    case Tag::kB: return "key_B";
    case Tag::kM: return "key_M";
    case Tag::kE: return "key_E";
    case Tag::kN: return "key_N";
  }
  return "key_N";
}

std::optional<Tag> ParseTag(std::string_view name) {
  for (Tag tag : kAllTags) {
    if (TagName(tag) == name) return tag;
  }
  return std::nullopt;
}

bool IsLegalTransition(Tag prev, Tag next) {
  const bool inside = prev == Tag::kB || prev == Tag::kM;
  const bool continues = next == Tag::kM || next == Tag::kE;
  return inside == continues;
}

bool IsLegalSequence(std::span<const Tag> tags) {
  for (size_t i = 1; i < tags.size(); ++i) {
    if (!IsLegalTransition(tags[i - 1], tags[i])) return false;
  }
  return true;
}

std::vector<Tag> EncodeTags(std::span<const std::string> lemmas,
                            std::span<const std::vector<std::string>> gold) {
  std::vector<Tag> tags(lemmas.size(), Tag::kN);
  size_t i = 0;
  while (i < lemmas.size()) {
    size_t best = 0;
    for (const auto& phrase : gold) {
      if (phrase.size() <= best || i + phrase.size() > lemmas.size()) continue;
      if (std::equal(phrase.begin(), phrase.end(), lemmas.begin() + i)) {
        best = phrase.size();
      }
    }
    if (best == 0) {
      ++i;
      continue;
    }
    if (best == 1) {
      tags[i] = Tag::kS;
    } else {
      tags[i] = Tag::kB;
      for (size_t k = i + 1; k + 1 < i + best; ++k) tags[k] = Tag::kM;
      tags[i + best - 1] = Tag::kE;
    }
    i += best;
  }
  return tags;
}

std::set<std::string> DecodeSpans(std::span<const Tag> tags,
                                  std::span<const std::string> lemmas) {
  if (tags.size() != lemmas.size()) {
    throw Error("DecodeSpans: tag and token counts differ");
  }
  std::set<std::string> phrases;
  size_t i = 0;
  while (i < tags.size()) {
    if (tags[i] == Tag::kS) {
      phrases.insert(lemmas[i]);
      ++i;
      continue;
    }
    if (tags[i] != Tag::kB) {
      ++i;
      continue;
    }
    size_t j = i + 1;
    while (j < tags.size() && tags[j] == Tag::kM) ++j;
    if (j < tags.size() && tags[j] == Tag::kE) {
      std::string phrase = lemmas[i];
      for (size_t k = i + 1; k <= j; ++k) phrase += " " + lemmas[k];
      phrases.insert(std::move(phrase));
      i = j + 1;
    } else {
      i = j;
    }
  }
  return phrases;
}

uint32_t CrfModel::AddAttribute(std::string_view name) {
  auto [it, inserted] = attribute_ids_.emplace(
      std::string(name), static_cast<uint32_t>(attribute_names_.size()));
  if (inserted) {
    attribute_names_.emplace_back(name);
    weights_.resize(weights_.size() + kNumTags, 0.0);
  }
  return it->second;
}

std::optional<uint32_t> CrfModel::FindAttribute(std::string_view name) const {
  auto it = attribute_ids_.find(std::string(name));
  if (it == attribute_ids_.end()) return std::nullopt;
  return it->second;
}

void CrfModel::set_weights(std::vector<double> weights) {
  if (weights.size() != weights_.size()) {
    throw Error("weight vector size does not match the feature registry");
  }
  weights_ = std::move(weights);
}

void CrfModel::set_l2(double l2) {
  if (!(l2 >= 0.0)) throw Error("L2 strength must be >= 0");
  l2_ = l2;
}

CrfInstance CrfModel::Compile(
    const std::vector<std::vector<std::string>>& attributes,
    std::vector<Tag> tags, std::string id, bool grow) {
  if (!grow) return CompileFrozen(attributes, std::move(tags), std::move(id));
  CrfInstance instance;
  instance.id = std::move(id);
  instance.tags = std::move(tags);
  instance.attributes.reserve(attributes.size());
  for (const auto& names : attributes) {
    std::vector<uint32_t> ids;
    ids.reserve(names.size());
    for (const std::string& name : names) {
      ids.push_back(AddAttribute(name));
    }
    instance.attributes.push_back(std::move(ids));
  }
  return instance;
}

CrfInstance CrfModel::CompileFrozen(
    const std::vector<std::vector<std::string>>& attributes,
    std::vector<Tag> tags, std::string id) const {
  CrfInstance instance;
  instance.id = std::move(id);
  instance.tags = std::move(tags);
  instance.attributes.reserve(attributes.size());
  for (const auto& names : attributes) {
    std::vector<uint32_t> ids;
    ids.reserve(names.size());
    for (const std::string& name : names) {
      if (auto found = FindAttribute(name)) ids.push_back(*found);
    }
    instance.attributes.push_back(std::move(ids));
  }
  return instance;
}

void CrfModel::Save(std::ostream& out) const {
  out << kMagic << '\t' << kFormatVersion << '\n';
  out << "l2\t" << FormatExact(l2_) << '\n';
  for (const auto& [key, value] : metadata_) {
    out << "meta\t" << key << '\t' << value << '\n';
  }
  for (Tag prev : kAllTags) {
    out << "mask\t" << TagName(prev);
    for (Tag next : kAllTags) out << '\t' << IsLegalTransition(prev, next);
    out << '\n';
  }
  out << "attributes\t" << attribute_names_.size() << '\n';
  for (const std::string& name : attribute_names_) out << name << '\n';
  out << "weights\t" << weights_.size() << '\n';
  for (double w : weights_) out << FormatExact(w) << '\n';
}

CrfModel CrfModel::Load(std::istream& in) {
  const auto fail = [](const std::string& what) -> Error {
    return Error("crf model: " + what);
  };
  std::string line;
  if (!std::getline(in, line) ||
      line != std::string(kMagic) + "\t" + std::to_string(kFormatVersion)) {
    throw fail("bad header");
  }
  CrfModel model;
  std::vector<double> weights;
  bool have_weights = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    const std::string key = line.substr(0, tab);
    const std::string rest =
        tab == std::string::npos ? std::string() : line.substr(tab + 1);
    if (key == "l2") {
      model.set_l2(std::stod(rest));
    } else if (key == "meta") {
      const size_t sep = rest.find('\t');
      if (sep == std::string::npos) throw fail("malformed meta line");
      model.metadata_[rest.substr(0, sep)] = rest.substr(sep + 1);
    } else if (key == "mask") {
      const size_t sep = rest.find('\t');
      auto prev = ParseTag(rest.substr(0, sep));
      if (!prev || sep == std::string::npos) throw fail("malformed mask line");
      std::string expected;
      for (Tag next : kAllTags) {
        if (!expected.empty()) expected += '\t';
        expected += IsLegalTransition(*prev, next) ? '1' : '0';
      }
      if (rest.substr(sep + 1) != expected) {
        throw fail("transition mask differs from this build");
      }
    } else if (key == "attributes") {
      const size_t count = std::stoul(rest);
      for (size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) throw fail("truncated attribute list");
        model.AddAttribute(line);
      }
    } else if (key == "weights") {
      const size_t count = std::stoul(rest);
      weights.reserve(count);
      for (size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) throw fail("truncated weight vector");
        weights.push_back(std::stod(line));
      }
      have_weights = true;
    } else {
      throw fail("unrecognized line '" + line + "'");
    }
  }
  if (!have_weights) throw fail("missing weights");
  model.set_weights(std::move(weights));
  return model;
}

double SequenceScore(const CrfModel& model, const CrfInstance& instance,
                     std::span<const Tag> tags) {
  if (tags.size() != instance.size()) {
    throw Error("tag sequence length differs from instance " + instance.id);
  }
  const Lattice lattice = BuildLattice(model, instance);
  double score = 0.0;
  for (size_t i = 0; i < tags.size(); ++i) {
    score += lattice.emission[i][TagIndex(tags[i])];
    if (i > 0) {
      score += lattice.transition[TagIndex(tags[i - 1])][TagIndex(tags[i])];
    }
  }
  return score;
}

double LogPartition(const CrfModel& model, const CrfInstance& instance) {
  if (instance.size() == 0) return 0.0;
  const auto alpha = Forward(BuildLattice(model, instance));
  return LogSumExp(alpha.back());
}

NllGradient NllAndGradient(const CrfModel& model,
                           std::span<const CrfInstance> batch) {
  const auto& w = model.weights();
  NllGradient result;
  result.gradient.assign(w.size(), 0.0);
  auto& grad = result.gradient;

  for (const CrfInstance& instance : batch) {
    const size_t n = instance.size();
    if (n == 0) continue;
    if (instance.tags.size() != n) {
      throw Error("instance " + instance.id + " is not labeled");
    }
    const Lattice lattice = BuildLattice(model, instance);
    const auto alpha = Forward(lattice);
    const auto beta = Backward(lattice);
    const double log_z = LogSumExp(alpha.back());
    const double gold = SequenceScore(model, instance, instance.tags);
    if (!std::isfinite(log_z) || !std::isfinite(gold)) {
      throw Error("non-finite likelihood for instance " + instance.id);
    }
    result.value += log_z - gold;

    for (size_t i = 0; i < n; ++i) {
      TagRow marginal;
      for (size_t t = 0; t < kNumTags; ++t) {
        marginal[t] = std::exp(alpha[i][t] + beta[i][t] - log_z);
      }
      const size_t gold_tag = TagIndex(instance.tags[i]);
      for (uint32_t attribute : instance.attributes[i]) {
        const size_t base = CrfModel::StateIndex(attribute, Tag::kS);
        for (size_t t = 0; t < kNumTags; ++t) grad[base + t] += marginal[t];
        grad[base + gold_tag] -= 1.0;
      }
      if (i == 0) continue;
      for (size_t prev = 0; prev < kNumTags; ++prev) {
        for (size_t next = 0; next < kNumTags; ++next) {
          const double edge = lattice.transition[prev][next];
          if (edge == kNegInf) continue;
          grad[prev * kNumTags + next] +=
              std::exp(alpha[i - 1][prev] + edge + lattice.emission[i][next] +
                       beta[i][next] - log_z);
        }
      }
      grad[TagIndex(instance.tags[i - 1]) * kNumTags + gold_tag] -= 1.0;
    }
  }

  const double l2 = model.l2();
  if (l2 > 0.0) {
    double norm = 0.0;
    for (size_t k = 0; k < w.size(); ++k) {
      norm += w[k] * w[k];
      grad[k] += l2 * w[k];
    }
    result.value += 0.5 * l2 * norm;
  }
  if (!std::isfinite(result.value)) throw Error("non-finite objective");
  return result;
}

std::vector<Tag> ViterbiDecode(const CrfModel& model,
                               const CrfInstance& instance) {
  const size_t n = instance.size();
  if (n == 0) return {};
  const Lattice lattice = BuildLattice(model, instance);
  std::vector<TagRow> delta(n);
  std::vector<std::array<uint8_t, kNumTags>> back(n);
  delta[0] = lattice.emission[0];
  for (size_t i = 1; i < n; ++i) {
    for (size_t next = 0; next < kNumTags; ++next) {
      double best = kNegInf;
      uint8_t arg = 0;
      for (size_t prev = 0; prev < kNumTags; ++prev) {
        const double s = delta[i - 1][prev] + lattice.transition[prev][next];
        if (s > best) {
          best = s;
          arg = static_cast<uint8_t>(prev);
        }
      }
      delta[i][next] = best + lattice.emission[i][next];
      back[i][next] = arg;
    }
  }
  size_t last = 0;
  for (size_t t = 1; t < kNumTags; ++t) {
    if (delta[n - 1][t] > delta[n - 1][last]) last = t;
  }
  std::vector<Tag> tags(n);
  tags[n - 1] = static_cast<Tag>(last);
  for (size_t i = n - 1; i > 0; --i) {
    last = back[i][last];
    tags[i - 1] = static_cast<Tag>(last);
  }
  return tags;
}

CrfTrainReport TrainCrf(CrfModel& model, std::span<const CrfInstance> data,
                        const CrfTrainOptions& options) {
  if (data.empty()) throw Error("cannot train a CRF on no sequences");
  if (options.max_epochs < 1) throw Error("max_epochs must be >= 1");
  model.set_l2(options.l2);
  model.set_weights(std::vector<double>(model.num_weights(), 0.0));

  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 60;

  CrfTrainReport report;
  NllGradient current = NllAndGradient(model, data);
  std::vector<double> weights = model.weights();
  std::vector<double> previous_weights;
  std::vector<double> previous_gradient;
  double step = 1.0;

  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    if (InfinityNorm(current.gradient) < options.gradient_tolerance) {
      report.converged = true;
      break;
    }
    // Barzilai-Borwein trial step once a previous iterate exists.
    if (!previous_weights.empty()) {
      std::vector<double> s(weights.size()), y(weights.size());
      for (size_t k = 0; k < weights.size(); ++k) {
        s[k] = weights[k] - previous_weights[k];
        y[k] = current.gradient[k] - previous_gradient[k];
      }
      const double sy = Dot(s, y);
      if (sy > 0.0) step = Dot(s, s) / sy;
    }
    const double slope = Dot(current.gradient, current.gradient);
    bool accepted = false;
    std::vector<double> trial(weights.size());
    NllGradient next;
    for (int attempt = 0; attempt < kMaxBacktracks; ++attempt) {
      for (size_t k = 0; k < weights.size(); ++k) {
        trial[k] = weights[k] - step * current.gradient[k];
      }
      model.set_weights(trial);
      next = NllAndGradient(model, data);
      if (next.value <= current.value - kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      model.set_weights(weights);
      break;
    }
    previous_weights = std::move(weights);
    previous_gradient = std::move(current.gradient);
    weights = trial;
    current = std::move(next);
    report.nll_history.push_back(current.value);
    report.epochs = epoch + 1;
  }
  if (!report.converged &&
      InfinityNorm(current.gradient) < options.gradient_tolerance) {
    report.converged = true;
  }
  model.set_weights(weights);
  report.final_nll = current.value;
  report.gradient_norm = InfinityNorm(current.gradient);
  return report;
}

}  // namespace kex
