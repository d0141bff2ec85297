// Copyright 2026 The relscm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RELSCM_SCM_H_
#define RELSCM_SCM_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relscm/rng.h"

namespace relscm {

// The n-dimensional vector carried at every node.
using NodeVector = std::vector<double>;

enum class Activation { kIdentity, kRelu, kTanh, kLogAbs, kSin };

std::string_view ActivationName(Activation a);
std::optional<Activation> ParseActivation(std::string_view name);

// Offset inside logabs(x) = log(|x| + kLogAbsOffset).
inline constexpr double kLogAbsOffset = 1e-6;

double Activate(Activation a, double x);

struct RootDistribution {
  enum class Kind { kNormal, kGamma, kMixture };

  Kind kind = Kind::kNormal;
  // kNormal
  double mean = 0.0;
  double stddev = 1.0;
  // kGamma
  double shape = 1.0;
  double scale = 1.0;
  // kMixture: each component is Normal(0, normal_std^2) with probability p,
  // otherwise exponential with mean exp_scale.
  double p = 0.5;
  double normal_std = 1.0;
  double exp_scale = 1.0;

  static RootDistribution Normal(double mean, double stddev);
  static RootDistribution Gamma(double shape, double scale);
  static RootDistribution Mixture(double p, double normal_std,
                                  double exp_scale);

  // Throws kInvalidParameter if a parameter is non-finite or out of range.
  void Validate() const;

  // Closed-form per-component mean and variance.
  double Mean() const;
  double Variance() const;

  bool operator==(const RootDistribution&) const = default;
};

std::string_view RootKindName(RootDistribution::Kind kind);
std::optional<RootDistribution::Kind> ParseRootKind(std::string_view name);

// One-layer fully connected map followed by an activation:
//   x -> activation(W * concat(parents)),  W is n x (parent_count * n).
// Weights are stored row-major.
struct PropagationFn {
  size_t out_dim = 0;
  size_t in_dim = 0;
  std::vector<double> weights;
  Activation activation = Activation::kIdentity;

  size_t parent_count() const { return out_dim == 0 ? 0 : in_dim / out_dim; }
  double weight(size_t row, size_t col) const {
    return weights[row * in_dim + col];
  }

  bool operator==(const PropagationFn&) const = default;
};

enum class NoiseGranularity { kPerNode, kPerSample, kPerComponent };

std::string_view NoiseGranularityName(NoiseGranularity g);
std::optional<NoiseGranularity> ParseNoiseGranularity(std::string_view name);

struct NoiseConfig {
  double affected_fraction = 0.1;
  double noise_std = 0.1;
  NoiseGranularity granularity = NoiseGranularity::kPerNode;

  void Validate() const;
  bool operator==(const NoiseConfig&) const = default;
};

// Component-wise lower and upper quantile vectors of one node.
struct QuantilePair {
  NodeVector lo;
  NodeVector hi;

  bool operator==(const QuantilePair&) const = default;
};

// n independent draws from `dist`.
NodeVector SampleRoot(const RootDistribution& dist, size_t n, Rng& rng);

// Same as SampleRoot but writes into `out` (size n) without allocating.
void SampleRootInto(const RootDistribution& dist, Rng& rng,
                    std::span<double> out);

// Draws W i.i.d. Normal(0, 1 / (parent_count * n)).
PropagationFn InitPropagationFn(size_t parent_count, size_t n,
                                Activation activation, Rng& rng);

// activation(W * concat(parents)). Throws kContractViolation on shape
// mismatch.
NodeVector Propagate(std::span<const NodeVector> parents,
                     const PropagationFn& f);

// propagate(parents, f) + (q.hi - q.lo) * eps, component-wise.
NodeVector StructuralAssign(std::span<const NodeVector> parents,
                            const PropagationFn& f, const QuantilePair& q,
                            const NodeVector& eps);

// Allocation-free kernel shared by Propagate and the samplers: `input` is
// the concatenated parent data (length f.in_dim), `out` has length
// f.out_dim.
void PropagateInto(std::span<const double> input, const PropagationFn& f,
                   std::span<double> out);

// Adds (q.hi - q.lo) * eps to `x` in place.
void AddScaledNoise(const QuantilePair& q, std::span<const double> eps,
                    std::span<double> x);

// A whole-node noise draw: with probability affected_fraction every
// component is Normal(0, noise_std^2), otherwise the zero vector. Under
// kPerComponent the Bernoulli mask is drawn per component instead.
// kPerSample is resolved by the caller (one mask per row) and behaves like
// kPerNode here.
NodeVector SampleNoise(const NoiseConfig& cfg, size_t n, Rng& rng);

// Fills `out` with Normal(0, noise_std^2) draws, or zeros where the
// component is not affected. `affected` forces the whole-vector decision
// when set (per-sample masking); otherwise the granularity decides.
void SampleNoiseInto(const NoiseConfig& cfg, std::optional<bool> affected,
                     Rng& rng, std::span<double> out);

}  // namespace relscm

#endif  // RELSCM_SCM_H_
