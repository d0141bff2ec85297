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

#include "relscm/scm.h"

#include <cmath>
#include <random>
#include <string>

#include "relscm/error.h"

namespace relscm {
namespace {

void RequireFinite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidParameter,
                std::string(what) + " must be finite");
  }
}

void RequirePositive(double v, const char* what) {
  RequireFinite(v, what);
  if (!(v > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                std::string(what) + " must be > 0, got " + std::to_string(v));
  }
}

}  // namespace

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kLogAbs: return "logabs";
    case Activation::kSin: return "sin";
  }
  return "identity";
}

std::optional<Activation> ParseActivation(std::string_view name) {
  for (Activation a : {Activation::kIdentity, Activation::kRelu,
                       Activation::kTanh, Activation::kLogAbs,
                       Activation::kSin}) {
    if (ActivationName(a) == name) return a;
  }
  return std::nullopt;
}

double Activate(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity: return x;
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kTanh: return std::tanh(x);
    case Activation::kLogAbs: return std::log(std::fabs(x) + kLogAbsOffset);
    case Activation::kSin: return std::sin(x);
  }
  return x;
}

RootDistribution RootDistribution::Normal(double mean, double stddev) {
  RootDistribution d;
  d.kind = Kind::kNormal;
  d.mean = mean;
  d.stddev = stddev;
  return d;
}

RootDistribution RootDistribution::Gamma(double shape, double scale) {
  RootDistribution d;
  d.kind = Kind::kGamma;
  d.shape = shape;
  d.scale = scale;
  return d;
}

RootDistribution RootDistribution::Mixture(double p, double normal_std,
                                           double exp_scale) {
  RootDistribution d;
  d.kind = Kind::kMixture;
  d.p = p;
  d.normal_std = normal_std;
  d.exp_scale = exp_scale;
  return d;
}

void RootDistribution::Validate() const {
  switch (kind) {
    case Kind::kNormal:
      RequireFinite(mean, "normal mean");
      RequirePositive(stddev, "normal stddev");
      break;
    case Kind::kGamma:
      RequirePositive(shape, "gamma shape");
      RequirePositive(scale, "gamma scale");
      break;
    case Kind::kMixture:
      RequireFinite(p, "mixture p");
      if (p < 0.0 || p > 1.0) {
        throw Error(ErrorCode::kInvalidParameter, "mixture p must lie in [0, 1]");
      }
      RequirePositive(normal_std, "mixture normal_std");
      RequirePositive(exp_scale, "mixture exp_scale");
      break;
  }
}

double RootDistribution::Mean() const {
  switch (kind) {
    case Kind::kNormal: return mean;
    case Kind::kGamma: return shape * scale;
    case Kind::kMixture: return (1.0 - p) * exp_scale;
  }
  return 0.0;
}

double RootDistribution::Variance() const {
  switch (kind) {
    case Kind::kNormal: return stddev * stddev;
    case Kind::kGamma: return shape * scale * scale;
    case Kind::kMixture: {
      // E[X^2] = p s^2 + (1 - p) 2 l^2
      const double second = p * normal_std * normal_std +
                            (1.0 - p) * 2.0 * exp_scale * exp_scale;
      const double m = Mean();
      return second - m * m;
    }
  }
  return 0.0;
}

std::string_view RootKindName(RootDistribution::Kind kind) {
  switch (kind) {
    case RootDistribution::Kind::kNormal: return "normal";
    case RootDistribution::Kind::kGamma: return "gamma";
    case RootDistribution::Kind::kMixture: return "mixture";
  }
  return "normal";
}

std::optional<RootDistribution::Kind> ParseRootKind(std::string_view name) {
  using K = RootDistribution::Kind;
  for (K k : {K::kNormal, K::kGamma, K::kMixture}) {
    if (RootKindName(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view NoiseGranularityName(NoiseGranularity g) {
  switch (g) {
    case NoiseGranularity::kPerNode: return "per_node";
    case NoiseGranularity::kPerSample: return "per_sample";
    case NoiseGranularity::kPerComponent: return "per_component";
  }
  return "per_node";
}

std::optional<NoiseGranularity> ParseNoiseGranularity(std::string_view name) {
  for (NoiseGranularity g :
       {NoiseGranularity::kPerNode, NoiseGranularity::kPerSample,
        NoiseGranularity::kPerComponent}) {
    if (NoiseGranularityName(g) == name) return g;
  }
  return std::nullopt;
}

void NoiseConfig::Validate() const {
  if (!std::isfinite(affected_fraction) || affected_fraction < 0.0 ||
      affected_fraction > 1.0) {
    throw Error(ErrorCode::kInvalidParameter,
                "noise affected_fraction must lie in [0, 1]");
  }
  RequirePositive(noise_std, "noise std");
}

void SampleRootInto(const RootDistribution& dist, Rng& rng,
                    std::span<double> out) {
  switch (dist.kind) {
    case RootDistribution::Kind::kNormal: {
      std::normal_distribution<double> normal(dist.mean, dist.stddev);
      for (double& v : out) v = normal(rng);
      break;
    }
    case RootDistribution::Kind::kGamma: {
      std::gamma_distribution<double> gamma(dist.shape, dist.scale);
      for (double& v : out) v = gamma(rng);
      break;
    }
    case RootDistribution::Kind::kMixture: {
      // One fresh draw per component keeps the stream layout independent of
      // which branch earlier components took.
      for (double& v : out) {
        if (UniformUnit(rng) < dist.p) {
          v = std::normal_distribution<double>(0.0, dist.normal_std)(rng);
        } else {
          v = std::exponential_distribution<double>(1.0 / dist.exp_scale)(rng);
        }
      }
      break;
    }
  }
}

NodeVector SampleRoot(const RootDistribution& dist, size_t n, Rng& rng) {
  dist.Validate();
  NodeVector out(n);
  SampleRootInto(dist, rng, out);
  return out;
}

PropagationFn InitPropagationFn(size_t parent_count, size_t n,
                                Activation activation, Rng& rng) {
  if (parent_count == 0 || n == 0) {
    throw Error(ErrorCode::kInvalidParameter,
                "propagation needs at least one parent and n >= 1");
  }
  PropagationFn f;
  f.out_dim = n;
  f.in_dim = parent_count * n;
  f.activation = activation;
  f.weights.resize(f.out_dim * f.in_dim);
  std::normal_distribution<double> normal(
      0.0, 1.0 / std::sqrt(static_cast<double>(f.in_dim)));
  for (double& w : f.weights) w = normal(rng);
  return f;
}

void PropagateInto(std::span<const double> input, const PropagationFn& f,
                   std::span<double> out) {
  for (size_t r = 0; r < f.out_dim; ++r) {
    const double* w = f.weights.data() + r * f.in_dim;
    double acc = 0.0;
    for (size_t c = 0; c < f.in_dim; ++c) acc += w[c] * input[c];
    out[r] = Activate(f.activation, acc);
  }
}

NodeVector Propagate(std::span<const NodeVector> parents,
                     const PropagationFn& f) {
  if (f.weights.size() != f.out_dim * f.in_dim) {
    throw Error(ErrorCode::kContractViolation, "weight matrix size mismatch");
  }
  if (parents.size() * f.out_dim != f.in_dim) {
    throw Error(ErrorCode::kContractViolation,
                "expected " + std::to_string(f.parent_count()) +
                    " parents, got " + std::to_string(parents.size()));
  }
  NodeVector input;
  input.reserve(f.in_dim);
  for (const NodeVector& p : parents) {
    if (p.size() != f.out_dim) {
      throw Error(ErrorCode::kContractViolation,
                  "parent vector has dimension " + std::to_string(p.size()) +
                      ", expected " + std::to_string(f.out_dim));
    }
    input.insert(input.end(), p.begin(), p.end());
  }
  NodeVector out(f.out_dim);
  PropagateInto(input, f, out);
  return out;
}

void AddScaledNoise(const QuantilePair& q, std::span<const double> eps,
                    std::span<double> x) {
  for (size_t c = 0; c < x.size(); ++c) x[c] += (q.hi[c] - q.lo[c]) * eps[c];
}

NodeVector StructuralAssign(std::span<const NodeVector> parents,
                            const PropagationFn& f, const QuantilePair& q,
                            const NodeVector& eps) {
  NodeVector out = Propagate(parents, f);
  if (q.lo.size() != out.size() || q.hi.size() != out.size() ||
      eps.size() != out.size()) {
    throw Error(ErrorCode::kContractViolation,
                "quantile or noise dimension does not match the node");
  }
  AddScaledNoise(q, eps, out);
  return out;
}

void SampleNoiseInto(const NoiseConfig& cfg, std::optional<bool> affected,
                     Rng& rng, std::span<double> out) {
  std::normal_distribution<double> normal(0.0, cfg.noise_std);
  if (!affected && cfg.granularity == NoiseGranularity::kPerComponent) {
    for (double& v : out) {
      v = UniformUnit(rng) < cfg.affected_fraction ? normal(rng) : 0.0;
    }
    return;
  }
  const bool hit =
      affected ? *affected : UniformUnit(rng) < cfg.affected_fraction;
  for (double& v : out) v = hit ? normal(rng) : 0.0;
}

NodeVector SampleNoise(const NoiseConfig& cfg, size_t n, Rng& rng) {
  cfg.Validate();
  NodeVector out(n);
  SampleNoiseInto(cfg, std::nullopt, rng, out);
  return out;
}

}  // namespace relscm
