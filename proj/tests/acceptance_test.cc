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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance_test [--only N]... [--allow-fail N]...
//
// Exit status is non-zero when a criterion fails that was not listed with
// --allow-fail. Allowed failures are still printed as FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "relscm/config.h"
#include "relscm/error.h"
#include "relscm/eval.h"
#include "relscm/graph.h"
#include "relscm/io.h"
#include "relscm/pipeline.h"
#include "relscm/presampler.h"
#include "relscm/relational.h"
#include "relscm/rng.h"
#include "relscm/sampler.h"
#include "relscm/scm.h"

namespace fs = std::filesystem;

namespace relscm {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure messages of a criterion.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (messages_.size() < 5) messages_.push_back(what);
  }
  Outcome Finish(const std::string& summary) const {
    Outcome o;
    o.pass = failures_ == 0;
    std::ostringstream s;
    s << summary << " (" << checks_ << " checks";
    if (failures_) s << ", " << failures_ << " failed";
    s << ")";
    for (const std::string& m : messages_) s << "\n      " << m;
    o.detail = s.str();
    return o;
  }

 private:
  size_t checks_ = 0;
  size_t failures_ = 0;
  std::vector<std::string> messages_;
};

std::string Fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

fs::path WorkDir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "relscm_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int RunCli(const std::string& args) {
  const std::string cmd =
      std::string("\"") + RELSCM_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Reference profile: 8-node main graph, 5-node additional graph,
// 100,000 main rows, 500 additional rows, n = 2.
fs::path WriteProfile() {
  const fs::path path = WorkDir() / "profile.json";
  WriteFile(path, R"({
  "master_seed": 75,
  "main_graph": {"min_nodes": 8, "max_nodes": 8},
  "additional_graph": {"min_nodes": 5, "max_nodes": 5},
  "rows_main": 100000,
  "rows_add": 500
}
)");
  return path;
}

// ---------------------------------------------------------------------------
// 1. Determinism and runtime budget.

Outcome Determinism() {
  Checker c;
  const fs::path profile = WriteProfile();
  const fs::path a = WorkDir() / "run_a", b = WorkDir() / "run_b",
                 t8 = WorkDir() / "run_t8";

  const auto start = std::chrono::steady_clock::now();
  const int rc = RunCli("generate --config \"" + profile.string() + "\" --out \"" +
                        a.string() + "\" --threads 1");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.Expect(rc == 0, "single-thread generate exited with " + std::to_string(rc));
  c.Expect(seconds < 60.0, "single-thread run took " + Fmt(seconds, 1) + " s");

  c.Expect(RunCli("generate --config \"" + profile.string() + "\" --out \"" +
                  b.string() + "\" --threads 1") == 0,
           "second generate failed");
  c.Expect(RunCli("generate --config \"" + profile.string() + "\" --out \"" +
                  t8.string() + "\" --threads 8") == 0,
           "8-thread generate failed");

  for (const char* f : {"main.csv", "additional.csv", "schema.json"}) {
    const std::string ref = ReadFile(a / f);
    c.Expect(!ref.empty(), std::string(f) + " is empty");
    c.Expect(ReadFile(b / f) == ref, std::string(f) + " differs between identical runs");
    c.Expect(ReadFile(t8 / f) == ref, std::string(f) + " differs between 1 and 8 threads");
  }
  return c.Finish("identical bytes across reruns and 1 vs 8 threads; "
                  "default profile in " + Fmt(seconds, 2) + " s on one thread");
}

// ---------------------------------------------------------------------------
// 2. Equation fidelity.

Outcome EquationFidelity() {
  Checker c;
  Rng rng(20260101);
  std::normal_distribution<double> g(0.0, 3.0);
  const std::vector<Activation> activations{Activation::kIdentity, Activation::kRelu,
                                            Activation::kTanh, Activation::kLogAbs,
                                            Activation::kSin};
  NoiseConfig off;
  off.affected_fraction = 0.0;
  size_t bit_equal = 0;
  for (int t = 0; t < 10000; ++t) {
    const size_t n = 1 + UniformIndex(rng, 4);
    const size_t parents = 1 + UniformIndex(rng, 4);
    const PropagationFn f = InitPropagationFn(
        parents, n, activations[UniformIndex(rng, activations.size())], rng);
    std::vector<NodeVector> in(parents, NodeVector(n));
    for (auto& v : in)
      for (double& x : v) x = g(rng);
    QuantilePair q{NodeVector(n), NodeVector(n)};
    for (size_t i = 0; i < n; ++i) {
      q.lo[i] = g(rng);
      q.hi[i] = q.lo[i] + std::fabs(g(rng));
    }
    const NodeVector eps = SampleNoise(off, n, rng);
    const NodeVector assigned = StructuralAssign(in, f, q, eps);
    const NodeVector propagated = Propagate(in, f);
    const bool same = assigned.size() == propagated.size() &&
                      std::memcmp(assigned.data(), propagated.data(),
                                  n * sizeof(double)) == 0;
    bit_equal += same;
    c.Expect(same, "structural assignment differs from propagation in case " +
                       std::to_string(t));
  }

  std::uniform_int_distribution<int> grid(-3, 3);
  size_t ties = 0;
  for (int t = 0; t < 10000; ++t) {
    const size_t n = 1 + UniformIndex(rng, 3);
    const size_t k = 2 + UniformIndex(rng, 6);
    Codebook cb;
    for (size_t j = 0; j < k; ++j) {
      NodeVector v(n);
      for (double& x : v) x = grid(rng);
      cb.centroids.push_back(v);
    }
    NodeVector x(n);
    if (t % 3 == 0) {
      // Midpoint of two centroids: equidistant to both.
      const NodeVector& u = cb.centroids[UniformIndex(rng, k)];
      const NodeVector& w = cb.centroids[UniformIndex(rng, k)];
      for (size_t i = 0; i < n; ++i) x[i] = 0.5 * (u[i] + w[i]);
    } else {
      for (double& v : x) v = grid(rng) + 0.5 * grid(rng);
    }
    std::vector<double> d2;
    for (const NodeVector& v : cb.centroids) {
      double s = 0;
      for (size_t i = 0; i < n; ++i) s += (x[i] - v[i]) * (x[i] - v[i]);
      d2.push_back(s);
    }
    ties += std::count(d2.begin(), d2.end(), *std::min_element(d2.begin(), d2.end())) > 1;
    c.Expect(NearestCentroid(x, cb) == oracle::BruteNearest(x, cb.centroids),
             "nearest centroid differs from brute force in case " + std::to_string(t));
  }
  return c.Finish(std::to_string(bit_equal) +
                  "/10000 noiseless assignments bit-equal to propagation; "
                  "10000 pooling cases incl. " + std::to_string(ties) + " ties");
}

// ---------------------------------------------------------------------------
// 3. Structure suite.

// Reachability by repeated relaxation over the edge list; independent of the
// library's queue-based search.
std::vector<bool> ReachOracle(size_t n, const std::set<Edge>& edges,
                              const std::vector<NodeIndex>& sources,
                              NodeIndex blocked) {
  std::vector<bool> r(n, false);
  for (NodeIndex s : sources)
    if (s != blocked) r[s] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [u, v] : edges) {
      if (r[u] && !r[v] && v != blocked) {
        r[v] = true;
        changed = true;
      }
    }
  }
  return r;
}

Outcome Structure() {
  Checker c;
  NodeConfigParams cfg;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    const GraphParams params{4 + seed % 5, 8 + seed % 9, 1 + seed % 3};
    DagSpec dag = SampleDag(params, seed, "acceptance/structure", "M");
    Rng rng(seed);
    AssignNodeConfigs(dag, cfg, rng);
    const size_t n = dag.size();
    std::vector<size_t> in(n, 0), out(n, 0);
    bool forward = true;
    for (const auto& [u, v] : dag.edges()) {
      forward &= u < v;
      ++out[u];
      ++in[v];
    }
    const std::string tag = " (seed " + std::to_string(seed) + ")";
    c.Expect(forward && IsAcyclic(dag), "cyclic graph" + tag);
    for (NodeIndex i = 0; i < n; ++i) {
      c.Expect(in[i] + out[i] > 0, "isolated node" + tag);
      const bool sink = out[i] == 0, root = in[i] == 0;
      c.Expect((dag.node(i).role == NodeRole::kTarget) == sink, "sink is not a target" + tag);
      c.Expect((dag.node(i).role == NodeRole::kRoot) == root, "root role mismatch" + tag);
      c.Expect(dag.node(i).root_dist.has_value() == root, "root distribution mismatch" + tag);
      c.Expect(dag.node(i).propagation.has_value() == !root, "propagation mismatch" + tag);
    }
    c.Expect(!HasIsolatedNode(dag), "library reports an isolated node" + tag);
  }

  size_t composed = 0;
  for (uint64_t seed = 0; seed < 250; ++seed) {
    for (size_t latent : {0, 1, 2, 3}) {
      DagSpec main = SampleDag({8, 8, 2}, seed, tags::kGraphMain, "M");
      DagSpec add = SampleDag({5, 5, 2}, seed, tags::kGraphAdditional, "A");
      Rng rng = MakeStream(seed, tags::kCompose, latent);
      AssignNodeConfigs(main, cfg, rng);
      AssignNodeConfigs(add, cfg, rng);
      const RelationalSchema s = Compose(main, add, latent, CouplingParams{}, cfg, rng);
      ++composed;
      const std::string tag =
          " (seed " + std::to_string(seed) + ", latent " + std::to_string(latent) + ")";
      bool forward = true;
      for (const auto& [u, v] : s.merged.edges()) forward &= u < v;
      c.Expect(forward && IsAcyclic(s.merged), "merged graph cyclic" + tag);

      std::vector<NodeIndex> sources;
      for (NodeIndex i = 0; i < s.coupling; ++i) sources.push_back(i);
      const std::vector<bool> reach =
          ReachOracle(s.merged.size(), s.merged.edges(), sources, s.coupling);
      std::vector<NodeIndex> affected;
      bool any_main = false;
      for (NodeIndex i = s.main_offset(); i < s.merged.size(); ++i) {
        any_main |= reach[i];
        if (reach[i] && s.merged.children(i).empty()) affected.push_back(i);
      }
      c.Expect(affected == LatentlyAffectedTargets(s), "affected targets disagree" + tag);
      if (latent == 0) {
        c.Expect(!any_main, "a main node is reachable without C" + tag);
        c.Expect(CouplingIsOnlyCut(s), "library reports a bypass of C" + tag);
      } else {
        c.Expect(!affected.empty(), "no latent path" + tag);
        for (const auto& [u, v] : s.latent_edges)
          c.Expect(reach[v], "latent edge target unreachable" + tag);
        c.Expect(!CouplingIsOnlyCut(s), "latent edges did not bypass C" + tag);
      }
    }
  }
  return c.Finish("1000 DAGs and " + std::to_string(composed) +
                  " composed schemas checked against graph-search oracles");
}

// ---------------------------------------------------------------------------
// 4. Statistical suite.

struct ClosedForm {
  std::string name;
  RootDistribution dist;
  double mean;
  double variance;
};

Outcome Statistics() {
  Checker c;
  // Closed forms written out independently of the library.
  std::vector<ClosedForm> cases{
      {"normal(-0.029, 0.816)", RootDistribution::Normal(-0.029, 0.816), -0.029,
       0.816 * 0.816},
      {"gamma(2.245, 1.780)", RootDistribution::Gamma(2.245, 1.780), 2.245 * 1.780,
       2.245 * 1.780 * 1.780},
      {"mixture(0.5, 1, 0.584)", RootDistribution::Mixture(0.5, 1.0, 0.584),
       0.5 * 0.584, 0.5 * 1.0 + 0.5 * 2 * 0.584 * 0.584 - 0.25 * 0.584 * 0.584},
      {"normal(3, 0.2)", RootDistribution::Normal(3.0, 0.2), 3.0, 0.04},
      {"gamma(1, 0.5)", RootDistribution::Gamma(1.0, 0.5), 0.5, 0.25},
      {"mixture(0.2, 2, 1.5)", RootDistribution::Mixture(0.2, 2.0, 1.5), 0.8 * 1.5,
       0.2 * 4.0 + 0.8 * 2 * 2.25 - 0.64 * 2.25}};
  std::string worst;
  double worst_z = 0;
  for (size_t k = 0; k < cases.size(); ++k) {
    Rng rng = MakeStream(4, "acceptance/roots", k);
    const size_t draws = 100000;
    const NodeVector x = SampleRoot(cases[k].dist, draws, rng);
    double sum = 0;
    for (double v : x) sum += v;
    const double se = std::sqrt(cases[k].variance / draws);
    const double z = std::fabs(sum / draws - cases[k].mean) / se;
    if (z > worst_z) {
      worst_z = z;
      worst = cases[k].name;
    }
    c.Expect(z < 3.0, cases[k].name + " mean is " + Fmt(z, 2) + " standard errors off");
  }

  // Coverage on 1,000-sample pre-runs of continuous roots.
  double min_cov = 1, max_cov = 0;
  RootDistributionParams root_params;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng = MakeStream(seed, "acceptance/coverage", 0);
    DagSpec dag(2, {{0, 1}}, "R");
    ClassifyNodes(dag);
    dag.mutable_node(0).root_dist = SampleRootDistribution(root_params, rng);
    dag.mutable_node(1).propagation = InitPropagationFn(1, 2, Activation::kTanh, rng);
    const auto pre = Prerun(dag, 1000, seed, Execution::kSerial);
    const QuantilePair q = ComputeQuantiles(pre[0]);
    for (size_t comp = 0; comp < 2; ++comp) {
      size_t below = 0;
      for (size_t r = 0; r < 1000; ++r) below += pre[0].row(r)[comp] < q.lo[comp];
      const double cov = below / 1000.0;
      min_cov = std::min(min_cov, cov);
      max_cov = std::max(max_cov, cov);
      c.Expect(cov >= 0.05 && cov <= 0.15, "coverage " + Fmt(cov, 3));
      c.Expect(q.lo[comp] <= q.hi[comp], "q10 above q90");
    }
  }

  // k-means objective per Lloyd iteration.
  size_t fits = 0, iterations = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng = MakeStream(seed, "acceptance/kmeans", 0);
    SampleMatrix m(1000, 2);
    std::gamma_distribution<double> gamma(1.0 + seed % 3, 1.0);
    std::normal_distribution<double> normal;
    for (size_t r = 0; r < m.rows; ++r) {
      m.row(r)[0] = gamma(rng);
      m.row(r)[1] = normal(rng) + 0.5 * m.row(r)[0];
    }
    const KMeansResult fit = FitCodebook(m, 2 + seed % 9, rng);
    ++fits;
    iterations += fit.objective_trace.size();
    for (size_t i = 1; i < fit.objective_trace.size(); ++i) {
      c.Expect(fit.objective_trace[i] <= fit.objective_trace[i - 1],
               "objective rose from " + Fmt(fit.objective_trace[i - 1], 12) + " to " +
                   Fmt(fit.objective_trace[i], 12));
    }
  }
  return c.Finish("root means within 3 SE (worst " + worst + " at " + Fmt(worst_z, 2) +
                  "); coverage in [" + Fmt(min_cov, 3) + ", " + Fmt(max_cov, 3) +
                  "]; " + std::to_string(fits) + " k-means fits, " +
                  std::to_string(iterations) + " iterations non-increasing");
}

// ---------------------------------------------------------------------------
// 5. Evaluation oracles.

FeatureMatrix FromRows(const std::vector<std::vector<double>>& rows) {
  FeatureMatrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows[0].size();
  for (const auto& r : rows) m.values.insert(m.values.end(), r.begin(), r.end());
  return m;
}

Outcome EvalOracles() {
  Checker c;
  double worst_knn = 0, worst_auc = 0;
  for (uint64_t inst = 0; inst < 100; ++inst) {
    Rng rng = MakeStream(5, "acceptance/knn", inst);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> grid(0, 2);
    const bool coarse = inst % 2 == 1;
    const size_t width = 1 + inst % 6;
    std::vector<std::vector<double>> train(100, std::vector<double>(width));
    std::vector<std::vector<double>> test(30, std::vector<double>(width));
    for (auto* set : {&train, &test})
      for (auto& row : *set)
        for (double& v : row) v = coarse ? grid(rng) : g(rng);
    std::vector<double> y(100), labels(100);
    std::vector<int> ilabels(100);
    for (size_t i = 0; i < 100; ++i) {
      y[i] = g(rng);
      ilabels[i] = static_cast<int>(UniformIndex(rng, 3));
      labels[i] = ilabels[i];
    }
    const size_t k = 1 + inst % 10 + (inst % 7 == 0 ? 90 : 0);
    const KnnParams params{k, 1e-12};
    const Predictions reg =
        KnnPredict(FromRows(train), y, FromRows(test), TaskKind::kRegression, 0, params);
    const auto want = oracle::BruteKnnRegression(train, y, test, k, 1e-12);
    const Predictions cls = KnnPredict(FromRows(train), labels, FromRows(test),
                                       TaskKind::kClassification, 3, params);
    const auto want_cls = oracle::BruteKnnClassification(train, ilabels, test, k, 1e-12, 3);
    for (size_t i = 0; i < test.size(); ++i) {
      const double e = std::fabs(reg.values[i] - want[i]);
      worst_knn = std::max(worst_knn, e);
      c.Expect(e <= 1e-9, "kNN regression off by " + std::to_string(e));
      for (size_t cl = 0; cl < 3; ++cl) {
        const double ec = std::fabs(cls.scores[i * 3 + cl] - want_cls[i][cl]);
        worst_knn = std::max(worst_knn, ec);
        c.Expect(ec <= 1e-9, "kNN class score off by " + std::to_string(ec));
      }
    }
  }
  for (uint64_t inst = 0; inst < 200; ++inst) {
    Rng rng = MakeStream(5, "acceptance/auc", inst);
    std::normal_distribution<double> g;
    std::vector<double> s(200);
    std::vector<bool> pos(200);
    std::unique_ptr<bool[]> flags(new bool[200]);
    for (size_t i = 0; i < 200; ++i) {
      pos[i] = flags[i] = UniformUnit(rng) < 0.1 + 0.004 * inst;
      const double shift = pos[i] ? 0.8 : 0.0;
      s[i] = inst % 3 == 0 ? std::round(2 * (g(rng) + shift)) : g(rng) + shift;
    }
    if (std::count(pos.begin(), pos.end(), true) == 0) pos[0] = flags[0] = true;
    const double rank = RankAuc(s, std::span<const bool>(flags.get(), 200));
    const double e = std::fabs(rank - oracle::TrapezoidalAuc(s, pos));
    worst_auc = std::max(worst_auc, e);
    c.Expect(e <= 1e-9, "AUC off by " + std::to_string(e));
  }
  for (uint64_t inst = 0; inst < 100; ++inst) {
    Rng rng = MakeStream(5, "acceptance/rmse", inst);
    std::vector<double> v(1 + inst * 10);
    for (double& x : v) x = std::ldexp(UniformUnit(rng) - 0.5, static_cast<int>(inst % 40) - 20);
    c.Expect(Rmse(v, v) == 0.0, "RMSE of perfect predictions is not 0");
  }
  std::ostringstream s;
  s << "kNN max error " << worst_knn << ", AUC max error " << worst_auc
    << ", perfect RMSE exactly 0";
  return c.Finish(s.str());
}

// ---------------------------------------------------------------------------
// 6. Latent-information effect.

struct Effect {
  std::string metric;
  bool affected = false;
  double sum = 0;
  int count = 0;
  double mean() const { return count ? sum / count : NAN; }
};

// First master seed whose main table has the reference header kinds
// (cat, num, num, num, cat, num, num, cat, cat).
uint64_t ReferenceKindsSeed() {
  for (uint64_t seed = 1;; ++seed) {
    GenerationConfig cfg;
    cfg.master_seed = seed;
    cfg.main_graph = {8, 8, 2};
    cfg.add_graph = {5, 5, 2};
    cfg.rows_main = 1;
    cfg.rows_add = 1;
    const GeneratedDataset g = Generate(cfg, Execution::kSerial);
    std::string kinds;
    for (const Column& col : g.data.main_table.columns())
      kinds += col.categorical() ? 'c' : 'n';
    if (kinds == "cnnncnncc") return seed;
  }
}

std::map<std::string, Effect> MeasureEffects(uint64_t schema_seed, size_t latent,
                                             const std::vector<uint64_t>& seeds) {
  GenerationConfig cfg;
  cfg.master_seed = schema_seed;
  cfg.main_graph = {8, 8, 2};
  cfg.add_graph = {5, 5, 2};
  cfg.rows_main = 1;
  cfg.rows_add = 1;
  cfg.latent_count = latent;
  const RelationalSchema schema = Generate(cfg).schema;
  std::map<std::string, Effect> effects;
  for (uint64_t seed : seeds) {
    RelationalSchema s = schema;
    RelationalRunParams run;
    run.rows_main = 10000;
    run.rows_add = 500;
    const RelationalDataset data = GenerateRelational(s, run, seed);
    const EvalReport report = RunComparison(data, s, EvalParams{});
    for (const TargetResult& t : report.targets) {
      Effect& e = effects[t.column];
      e.metric = t.metric;
      e.affected = t.latently_affected;
      if (!t.main_only || !t.joined) continue;
      e.sum += t.metric == "AUC" ? *t.joined - *t.main_only : *t.joined / *t.main_only;
      ++e.count;
    }
  }
  return effects;
}

Outcome LatentEffect() {
  const uint64_t schema_seed = ReferenceKindsSeed();
  const std::vector<uint64_t> seeds{1, 2, 3, 4, 5};
  const auto with = MeasureEffects(schema_seed, 2, seeds);
  const auto without = MeasureEffects(schema_seed, 0, seeds);

  std::ostringstream s;
  s << "schema seed " << schema_seed << ", data seeds 1-5, mean joined-vs-main effect";
  bool a = false;
  s << "\n      (a) latent_count=2:";
  for (const auto& [name, e] : with) {
    const double m = e.mean();
    s << " " << name << (e.affected ? "*" : "") << " "
      << (e.metric == "AUC" ? "dAUC=" : "ratio=") << Fmt(m);
    if (e.affected && e.count > 0)
      a |= e.metric == "AUC" ? m >= 0.02 : m <= 0.98;
  }
  bool b = true;
  s << "\n      (b) latent_count=0:";
  for (const auto& [name, e] : without) {
    const double m = e.mean();
    s << " " << name << " " << (e.metric == "AUC" ? "dAUC=" : "ratio=") << Fmt(m);
    if (e.count == 0) continue;
    b &= e.metric == "AUC" ? std::fabs(m) < 0.01 : std::fabs(m - 1.0) < 0.02;
  }
  s << "\n      (a) " << (a ? "met" : "not met") << ", (b) " << (b ? "met" : "not met")
    << "; * marks latently affected targets";
  return {a && b, s.str()};
}

// ---------------------------------------------------------------------------
// 7. Format suite.

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

void CheckCsv(Checker& c, const fs::path& path, const std::vector<std::string>& names,
              const std::vector<int>& categories) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  c.Expect(SplitLine(line) == names, path.filename().string() + " header is " + line);
  size_t rows = 0;
  while (std::getline(in, line)) {
    const auto fields = SplitLine(line);
    if (fields.size() != names.size()) {
      c.Expect(false, path.filename().string() + " row width");
      continue;
    }
    for (size_t j = 0; j < fields.size(); ++j) {
      const std::string& f = fields[j];
      if (categories[j] > 0) {
        long v = -1;
        const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        const bool ok = ec == std::errc() && p == f.data() + f.size() && v >= 0 &&
                        v < categories[j];
        if (!ok) c.Expect(false, names[j] + " holds " + f);
      } else {
        double v = 0;
        const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc() || p != f.data() + f.size() || !std::isfinite(v))
          c.Expect(false, names[j] + " holds " + f);
      }
    }
    ++rows;
  }
  c.Expect(rows > 0, path.filename().string() + " has no rows");
}

Outcome Format() {
  Checker c;
  const fs::path a = WorkDir() / "run_a";
  if (!fs::exists(a / "manifest.json")) {
    RunCli("generate --config \"" + WriteProfile().string() + "\" --out \"" +
           a.string() + "\"");
  }
  const nlohmann::json schema = nlohmann::json::parse(ReadFile(a / "schema.json"));
  const auto& nodes = schema.at("schema").at("merged").at("nodes");
  const size_t coupling = schema.at("schema").at("coupling").get<size_t>();

  std::vector<std::string> main_names, add_names;
  std::vector<int> main_k, add_k;
  int kc = 0;
  std::string kinds;
  for (const auto& node : nodes) {
    const size_t idx = node.at("index").get<size_t>();
    const std::string name = node.at("name").get<std::string>();
    const int k = node.at("pooling") == "categorical" ? node.at("category_count").get<int>() : 0;
    if (idx < coupling) {
      add_names.push_back(name);
      add_k.push_back(k);
    } else if (idx > coupling) {
      main_names.push_back(name);
      main_k.push_back(k);
      kinds += k ? "cat " : "num ";
    } else {
      kc = k;
    }
  }
  main_names.push_back("C");
  main_k.push_back(kc);
  add_names.push_back("C");
  add_k.push_back(kc);
  c.Expect(kc >= 2, "C has " + std::to_string(kc) + " categories");
  const std::vector<std::string> expect_main{"M0", "M1", "M2", "M3", "M4",
                                             "M5", "M6", "M7", "C"};
  const std::vector<std::string> expect_add{"A0", "A1", "A2", "A3", "A4", "C"};
  c.Expect(main_names == expect_main, "main columns are not M0..M7, C");
  c.Expect(add_names == expect_add, "additional columns are not A0..A4, C");
  for (size_t j = 0; j + 1 < main_k.size(); ++j)
    c.Expect(main_k[j] == 0 || main_k[j] >= 2, main_names[j] + " has fewer than 2 categories");
  CheckCsv(c, a / "main.csv", main_names, main_k);
  CheckCsv(c, a / "additional.csv", add_names, add_k);

  const fs::path regen = WorkDir() / "regen";
  c.Expect(RunCli("regenerate --manifest \"" + (a / "manifest.json").string() +
                  "\" --out \"" + regen.string() + "\"") == 0,
           "regenerate reported a mismatch");
  const nlohmann::json manifest = nlohmann::json::parse(ReadFile(a / "manifest.json"));
  for (const auto& item : manifest.at("files").items()) {
    c.Expect(Sha256File(regen / item.key()) == item.value().get<std::string>(),
             "regenerated " + item.key() + " hash differs");
  }
  return c.Finish("main kinds [" + kinds + "cat], K_C = " + std::to_string(kc) +
                  "; regenerated hashes match the manifest");
}

}  // namespace
}  // namespace relscm

int main(int argc, char** argv) {
  std::set<int> only, allowed;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    const int value = std::atoi(argv[i + 1]);
    if (flag == "--only") only.insert(value);
    else if (flag == "--allow-fail") allowed.insert(value);
    else {
      std::fprintf(stderr, "unknown flag %s\n", flag.c_str());
      return 2;
    }
  }
  using relscm::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"determinism", relscm::Determinism},
      {"equation fidelity", relscm::EquationFidelity},
      {"structure", relscm::Structure},
      {"statistics", relscm::Statistics},
      {"evaluation oracles", relscm::EvalOracles},
      {"latent-information effect", relscm::LatentEffect},
      {"format", relscm::Format}};
  int unexpected = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.contains(id)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %-27s %s  [%.1fs] %s\n", id, criteria[i].first.c_str(),
                o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !allowed.contains(id)) ++unexpected;
  }
  if (!allowed.empty()) {
    std::printf("failures tolerated for criteria:");
    for (int id : allowed) std::printf(" %d", id);
    std::printf("\n");
  }
  return unexpected == 0 ? 0 : 1;
}
