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
#include <vector>

#include "doctest.h"
#include "relscm/error.h"

namespace relscm {
namespace {

PropagationFn IdentityFn(size_t n) {
  PropagationFn f;
  f.out_dim = f.in_dim = n;
  f.weights.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) f.weights[i * n + i] = 1.0;
  return f;
}

double SampleMean(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v;
  return s / x.size();
}

double SampleVariance(const std::vector<double>& x) {
  const double m = SampleMean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

std::vector<double> Draws(const RootDistribution& d, size_t count, uint64_t seed) {
  Rng rng = MakeStream(seed, "root-test", 0);
  return SampleRoot(d, count, rng);
}

TEST_CASE("root distribution validation") {
  CHECK_NOTHROW(RootDistribution::Normal(-0.029, 0.816).Validate());
  CHECK_NOTHROW(RootDistribution::Gamma(2.245, 1.780).Validate());
  CHECK_NOTHROW(RootDistribution::Mixture(0.5, 1.0, 0.584).Validate());
  Rng rng(1);
  for (const RootDistribution& bad :
       {RootDistribution::Normal(0.0, 0.0), RootDistribution::Normal(NAN, 1.0),
        RootDistribution::Gamma(0.0, 1.0), RootDistribution::Gamma(1.0, -1.0),
        RootDistribution::Mixture(1.5, 1.0, 1.0),
        RootDistribution::Mixture(0.5, 1.0, 0.0),
        RootDistribution::Normal(0.0, INFINITY)}) {
    try {
      SampleRoot(bad, 2, rng);
      FAIL("expected invalid parameter");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidParameter);
    }
  }
}

TEST_CASE("root samplers match closed-form means within 3 standard errors") {
  const size_t n = 100000;
  for (const RootDistribution& d :
       {RootDistribution::Gamma(2.245, 1.780),
        RootDistribution::Normal(-0.029, 0.816),
        RootDistribution::Mixture(0.5, 1.0, 0.584)}) {
    const auto x = Draws(d, n, 11);
    const double se = std::sqrt(d.Variance() / n);
    CAPTURE(RootKindName(d.kind));
    CHECK(std::fabs(SampleMean(x) - d.Mean()) < 3 * se);
  }
  // gamma mean = shape * scale
  CHECK(RootDistribution::Gamma(2.245, 1.780).Mean() == doctest::Approx(3.9961).epsilon(1e-12));
}

TEST_CASE("gamma samples are positive") {
  for (double v : Draws(RootDistribution::Gamma(0.5, 2.0), 1000, 3)) CHECK(v > 0.0);
}

TEST_CASE("propagate: identity weights reproduce the parent") {
  const NodeVector parent{0.25, -1.5, 3.0};
  const std::vector<NodeVector> parents{parent};
  CHECK(Propagate(parents, IdentityFn(3)) == parent);
}

TEST_CASE("propagate: relu kills negative pre-activations") {
  PropagationFn f;
  f.out_dim = f.in_dim = 2;
  f.weights.assign(4, -1.0);
  f.activation = Activation::kRelu;
  const std::vector<NodeVector> parents{{0.5, 2.0}};
  CHECK(Propagate(parents, f) == NodeVector{0.0, 0.0});
}

TEST_CASE("logabs on +1 and -1") {
  PropagationFn f = IdentityFn(2);
  f.activation = Activation::kLogAbs;
  const std::vector<NodeVector> parents{{1.0, -1.0}};
  const NodeVector out = Propagate(parents, f);
  // log(1 + 1e-6) = 9.999995e-7
  CHECK(out[0] == doctest::Approx(9.999995e-7).epsilon(1e-9));
  CHECK(out[1] == doctest::Approx(9.999995e-7).epsilon(1e-9));
  CHECK(std::isfinite(Activate(Activation::kLogAbs, 0.0)));
}

TEST_CASE("activations evaluate as named") {
  CHECK(Activate(Activation::kIdentity, -2.0) == -2.0);
  CHECK(Activate(Activation::kRelu, -2.0) == 0.0);
  CHECK(Activate(Activation::kTanh, 0.5) == std::tanh(0.5));
  CHECK(Activate(Activation::kSin, 0.5) == std::sin(0.5));
  for (Activation a : {Activation::kIdentity, Activation::kRelu, Activation::kTanh,
                       Activation::kLogAbs, Activation::kSin}) {
    CHECK(ParseActivation(ActivationName(a)) == a);
  }
  CHECK_FALSE(ParseActivation("gelu").has_value());
}

TEST_CASE("propagate rejects shape mismatches") {
  const PropagationFn f = IdentityFn(2);
  const std::vector<NodeVector> two_parents{{1, 2}, {3, 4}};
  const std::vector<NodeVector> wrong_dim{{1, 2, 3}};
  CHECK_THROWS_AS(Propagate(two_parents, f), Error);
  CHECK_THROWS_AS(Propagate(wrong_dim, f), Error);
}

TEST_CASE("structural assignment arithmetic") {
  const std::vector<NodeVector> parents{{1.0, 1.0}};
  const QuantilePair q{{0.0, -1.0}, {2.0, 1.0}};
  const NodeVector out = StructuralAssign(parents, IdentityFn(2), q, {0.1, -0.1});
  CHECK(out[0] == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("structural assignment: zero noise or zero spread reduces to propagate") {
  Rng rng(5);
  const PropagationFn f = InitPropagationFn(2, 3, Activation::kTanh, rng);
  const std::vector<NodeVector> parents{{0.1, 0.2, 0.3}, {-1.0, 0.5, 2.0}};
  const QuantilePair q{{-1, -1, -1}, {1, 2, 3}};
  CHECK(StructuralAssign(parents, f, q, {0, 0, 0}) == Propagate(parents, f));
  const QuantilePair flat{{0.7, 0.7, 0.7}, {0.7, 0.7, 0.7}};
  CHECK(StructuralAssign(parents, f, flat, {5, -5, 9}) == Propagate(parents, f));
}

TEST_CASE("noise sampling") {
  Rng rng(3);
  NoiseConfig off{0.0, 0.1};
  for (int i = 0; i < 100; ++i) CHECK(SampleNoise(off, 2, rng) == NodeVector{0, 0});

  NoiseConfig on{1.0, 0.1};
  std::vector<double> c0, c1;
  for (int i = 0; i < 100000; ++i) {
    const NodeVector e = SampleNoise(on, 2, rng);
    c0.push_back(e[0]);
    c1.push_back(e[1]);
  }
  CHECK(std::fabs(SampleVariance(c0) - 0.01) < 0.05 * 0.01);
  CHECK(std::fabs(SampleVariance(c1) - 0.01) < 0.05 * 0.01);

  NoiseConfig defaults;
  CHECK(defaults.affected_fraction == 0.1);
  CHECK(defaults.noise_std == 0.1);
}

TEST_CASE("noise mask fraction per node and per component") {
  Rng rng(9);
  NoiseConfig per_node{0.3, 1.0};
  NoiseConfig per_comp{0.3, 1.0, NoiseGranularity::kPerComponent};
  int node_hits = 0, comp_hits = 0, partial = 0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    const NodeVector a = SampleNoise(per_node, 4, rng);
    node_hits += a[0] != 0.0;
    // Whole-vector masking: either all components are drawn or none.
    CHECK(((a[0] != 0.0) == (a[3] != 0.0)));
    const NodeVector b = SampleNoise(per_comp, 4, rng);
    int nz = 0;
    for (double v : b) nz += v != 0.0;
    comp_hits += nz;
    partial += nz > 0 && nz < 4;
  }
  CHECK(node_hits / double(trials) == doctest::Approx(0.3).epsilon(0.05));
  CHECK(comp_hits / double(4 * trials) == doctest::Approx(0.3).epsilon(0.05));
  CHECK(partial > 0);
}

TEST_CASE("weight initialization") {
  Rng a(17), b(17);
  const PropagationFn f = InitPropagationFn(2, 2, Activation::kRelu, a);
  CHECK(f.out_dim == 2);
  CHECK(f.in_dim == 4);
  CHECK(f.weights.size() == 8);
  CHECK(f == InitPropagationFn(2, 2, Activation::kRelu, b));

  Rng c(23);
  const PropagationFn big = InitPropagationFn(100, 10, Activation::kIdentity, c);
  REQUIRE(big.weights.size() == 10000);
  const double expected = 1.0 / 1000.0;
  CHECK(std::fabs(SampleVariance(big.weights) - expected) < 0.1 * expected);
  CHECK_THROWS_AS(InitPropagationFn(0, 2, Activation::kRelu, c), Error);
}

}  // namespace
}  // namespace relscm
