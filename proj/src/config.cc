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

#include "relscm/config.h"

#include <cmath>
#include <set>
#include <string>

#include "relscm/error.h"
#include "relscm/io.h"

namespace relscm {
namespace {

[[noreturn]] void Invalid(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, key + ": " + what);
}

// Walks one JSON object, tracking the key path for diagnostics and
// rejecting keys that were never read.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) Invalid(path_.empty() ? "<root>" : path_, "expected an object");
  }

  // Call once every key has been read.
  void Finish() const {
    for (const auto& item : j_.items()) {
      if (!read_.contains(item.key())) Invalid(Key(item.key()), "unknown key");
    }
  }

  std::string Key(const std::string& k) const {
    return path_.empty() ? k : path_ + "." + k;
  }

  const nlohmann::json* Find(const std::string& k) {
    read_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }

  void Double(const std::string& k, double& out) {
    if (const auto* v = Find(k)) {
      if (!v->is_number()) Invalid(Key(k), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) Invalid(Key(k), "must be finite");
    }
  }

  void Count(const std::string& k, size_t& out) {
    if (const auto* v = Find(k)) {
      if (!v->is_number_integer()) Invalid(Key(k), "expected an integer");
      const long long x = v->get<long long>();
      if (x < 0) Invalid(Key(k), "must be >= 0");
      out = static_cast<size_t>(x);
    }
  }

  void Int(const std::string& k, int& out) {
    if (const auto* v = Find(k)) {
      if (!v->is_number_integer()) Invalid(Key(k), "expected an integer");
      out = v->get<int>();
    }
  }

  void Seed(const std::string& k, uint64_t& out) {
    if (const auto* v = Find(k)) {
      if (!v->is_number_integer()) Invalid(Key(k), "expected an integer");
      if (v->is_number_unsigned()) {
        out = v->get<uint64_t>();
      } else {
        const long long x = v->get<long long>();
        if (x < 0) Invalid(Key(k), "must be >= 0");
        out = static_cast<uint64_t>(x);
      }
    }
  }

  void String(const std::string& k, std::string& out) {
    if (const auto* v = Find(k)) {
      if (!v->is_string()) Invalid(Key(k), "expected a string");
      out = v->get<std::string>();
    }
  }

  void Range(const std::string& k, std::pair<double, double>& out) {
    if (const auto* v = Find(k)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() ||
          !(*v)[1].is_number()) {
        Invalid(Key(k), "expected [lo, hi]");
      }
      out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
      if (!std::isfinite(out.first) || !std::isfinite(out.second) ||
          out.first > out.second) {
        Invalid(Key(k), "expected finite lo <= hi");
      }
    }
  }

  template <typename Fn>
  void Object(const std::string& k, Fn&& fn) {
    if (const auto* v = Find(k)) {
      ObjectReader sub(*v, Key(k));
      fn(sub);
      sub.Finish();
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> read_;
};

void ReadGraph(ObjectReader& r, GraphParams& g) {
  r.Count("min_nodes", g.min_nodes);
  r.Count("max_nodes", g.max_nodes);
  r.Count("attach_m", g.attach_m);
}

Json GraphToJson(const GraphParams& g) {
  return Json{{"min_nodes", g.min_nodes},
              {"max_nodes", g.max_nodes},
              {"attach_m", g.attach_m}};
}

Json RangeToJson(const std::pair<double, double>& r) {
  return Json::array({r.first, r.second});
}

void RequireProbability(const std::string& key, double p) {
  if (!(p >= 0.0 && p <= 1.0)) Invalid(key, "must lie in [0, 1]");
}

void RequirePositive(const std::string& key, double v) {
  if (!(v > 0.0)) Invalid(key, "must be > 0");
}

void ValidateGraph(const std::string& key, const GraphParams& g) {
  if (g.min_nodes < 3) Invalid(key + ".min_nodes", "must be >= 3");
  if (g.max_nodes < g.min_nodes) Invalid(key + ".max_nodes", "must be >= min_nodes");
  if (g.attach_m < 1) Invalid(key + ".attach_m", "must be >= 1");
  if (g.attach_m >= g.min_nodes) Invalid(key + ".attach_m", "must be < min_nodes");
}

}  // namespace

void GenerationConfig::Validate() const {
  if (nodes.hidden_dim < 1) Invalid("hidden_dim", "must be >= 1");
  ValidateGraph("main_graph", main_graph);
  ValidateGraph("additional_graph", add_graph);
  const auto& r = nodes.roots;
  if (r.normal_weight < 0 || r.gamma_weight < 0 || r.mixture_weight < 0)
    Invalid("root_distributions", "family weights must be >= 0");
  if (!(r.normal_weight + r.gamma_weight + r.mixture_weight > 0))
    Invalid("root_distributions", "family weights must not all be zero");
  RequirePositive("root_distributions.normal_std", r.normal_std.first);
  RequirePositive("root_distributions.gamma_shape", r.gamma_shape.first);
  RequirePositive("root_distributions.gamma_scale", r.gamma_scale.first);
  RequireProbability("root_distributions.mixture_p", r.mixture_p.first);
  RequireProbability("root_distributions.mixture_p", r.mixture_p.second);
  RequirePositive("root_distributions.mixture_normal_std", r.mixture_normal_std);
  RequirePositive("root_distributions.mixture_exp_scale", r.mixture_exp_scale.first);
  if (nodes.activations.empty()) Invalid("activations", "must not be empty");
  if (nodes.poolings.empty()) Invalid("poolings", "must not be empty");
  for (PoolingKind k : nodes.poolings)
    if (k == PoolingKind::kCategorical)
      Invalid("poolings", "list continuous kinds only; use categorical_probability");
  RequireProbability("categorical_probability", nodes.categorical_probability);
  RequirePositive("category_count.std", nodes.category_std);
  RequirePositive("coupling_category_count.std", coupling.category_std);
  RequireProbability("noise.affected_fraction", noise.affected_fraction);
  RequirePositive("noise.std", noise.noise_std);
  if (prerun.num_presamples < 2) Invalid("num_presamples", "must be >= 2");
  if (!(prerun.quantile_lo >= 0.0 && prerun.quantile_lo < prerun.quantile_hi &&
        prerun.quantile_hi <= 1.0))
    Invalid("quantiles", "must satisfy 0 <= lo < hi <= 1");
  if (prerun.kmeans.max_iterations < 1) Invalid("kmeans.max_iterations", "must be >= 1");
  RequirePositive("kmeans.tolerance", prerun.kmeans.tolerance);
}

Json ConfigToJson(const GenerationConfig& cfg) {
  const auto& r = cfg.nodes.roots;
  Json activations = Json::array();
  for (Activation a : cfg.nodes.activations) activations.push_back(ActivationName(a));
  Json poolings = Json::array();
  for (PoolingKind k : cfg.nodes.poolings) poolings.push_back(PoolingKindName(k));
  Json j;
  j["master_seed"] = cfg.master_seed;
  j["hidden_dim"] = cfg.nodes.hidden_dim;
  j["main_graph"] = GraphToJson(cfg.main_graph);
  j["additional_graph"] = GraphToJson(cfg.add_graph);
  j["root_distributions"] = {
      {"normal_weight", r.normal_weight},
      {"gamma_weight", r.gamma_weight},
      {"mixture_weight", r.mixture_weight},
      {"normal_mean", RangeToJson(r.normal_mean)},
      {"normal_std", RangeToJson(r.normal_std)},
      {"gamma_shape", RangeToJson(r.gamma_shape)},
      {"gamma_scale", RangeToJson(r.gamma_scale)},
      {"mixture_p", RangeToJson(r.mixture_p)},
      {"mixture_normal_std", r.mixture_normal_std},
      {"mixture_exp_scale", RangeToJson(r.mixture_exp_scale)}};
  j["activations"] = std::move(activations);
  j["poolings"] = std::move(poolings);
  j["categorical_probability"] = cfg.nodes.categorical_probability;
  j["category_count"] = {{"mean", cfg.nodes.category_mean},
                         {"std", cfg.nodes.category_std}};
  j["coupling_category_count"] = {{"mean", cfg.coupling.category_mean},
                                  {"std", cfg.coupling.category_std}};
  j["noise"] = {{"affected_fraction", cfg.noise.affected_fraction},
                {"std", cfg.noise.noise_std},
                {"granularity", NoiseGranularityName(cfg.noise.granularity)}};
  j["num_presamples"] = cfg.prerun.num_presamples;
  j["quantiles"] = {{"lo", cfg.prerun.quantile_lo}, {"hi", cfg.prerun.quantile_hi}};
  j["kmeans"] = {{"max_iterations", cfg.prerun.kmeans.max_iterations},
                 {"tolerance", cfg.prerun.kmeans.tolerance}};
  j["rows_main"] = cfg.rows_main;
  j["rows_add"] = cfg.rows_add;
  j["latent_count"] = cfg.latent_count;
  j["output_dir"] = cfg.output_dir;
  return j;
}

GenerationConfig ConfigFromJson(const nlohmann::json& j) {
  GenerationConfig cfg;
  {
    ObjectReader r(j, "");
    r.Seed("master_seed", cfg.master_seed);
    r.Count("hidden_dim", cfg.nodes.hidden_dim);
    r.Object("main_graph", [&](ObjectReader& g) { ReadGraph(g, cfg.main_graph); });
    r.Object("additional_graph", [&](ObjectReader& g) { ReadGraph(g, cfg.add_graph); });
    r.Object("root_distributions", [&](ObjectReader& o) {
      auto& p = cfg.nodes.roots;
      o.Double("normal_weight", p.normal_weight);
      o.Double("gamma_weight", p.gamma_weight);
      o.Double("mixture_weight", p.mixture_weight);
      o.Range("normal_mean", p.normal_mean);
      o.Range("normal_std", p.normal_std);
      o.Range("gamma_shape", p.gamma_shape);
      o.Range("gamma_scale", p.gamma_scale);
      o.Range("mixture_p", p.mixture_p);
      o.Double("mixture_normal_std", p.mixture_normal_std);
      o.Range("mixture_exp_scale", p.mixture_exp_scale);
    });
    if (const auto* v = r.Find("activations")) {
      if (!v->is_array()) Invalid("activations", "expected a list");
      cfg.nodes.activations.clear();
      for (const auto& a : *v) {
        const auto parsed = a.is_string() ? ParseActivation(a.get<std::string>())
                                          : std::nullopt;
        if (!parsed) Invalid("activations", "unknown activation " + a.dump());
        cfg.nodes.activations.push_back(*parsed);
      }
    }
    if (const auto* v = r.Find("poolings")) {
      if (!v->is_array()) Invalid("poolings", "expected a list");
      cfg.nodes.poolings.clear();
      for (const auto& a : *v) {
        const auto parsed = a.is_string() ? ParsePoolingKind(a.get<std::string>())
                                          : std::nullopt;
        if (!parsed) Invalid("poolings", "unknown pooling " + a.dump());
        cfg.nodes.poolings.push_back(*parsed);
      }
    }
    r.Double("categorical_probability", cfg.nodes.categorical_probability);
    r.Object("category_count", [&](ObjectReader& o) {
      o.Double("mean", cfg.nodes.category_mean);
      o.Double("std", cfg.nodes.category_std);
    });
    r.Object("coupling_category_count", [&](ObjectReader& o) {
      o.Double("mean", cfg.coupling.category_mean);
      o.Double("std", cfg.coupling.category_std);
    });
    r.Object("noise", [&](ObjectReader& o) {
      o.Double("affected_fraction", cfg.noise.affected_fraction);
      o.Double("std", cfg.noise.noise_std);
      std::string g(NoiseGranularityName(cfg.noise.granularity));
      o.String("granularity", g);
      const auto parsed = ParseNoiseGranularity(g);
      if (!parsed) Invalid(o.Key("granularity"), "unknown granularity " + g);
      cfg.noise.granularity = *parsed;
    });
    r.Count("num_presamples", cfg.prerun.num_presamples);
    r.Object("quantiles", [&](ObjectReader& o) {
      o.Double("lo", cfg.prerun.quantile_lo);
      o.Double("hi", cfg.prerun.quantile_hi);
    });
    r.Object("kmeans", [&](ObjectReader& o) {
      o.Int("max_iterations", cfg.prerun.kmeans.max_iterations);
      o.Double("tolerance", cfg.prerun.kmeans.tolerance);
    });
    r.Count("rows_main", cfg.rows_main);
    r.Count("rows_add", cfg.rows_add);
    r.Count("latent_count", cfg.latent_count);
    r.String("output_dir", cfg.output_dir);
    r.Finish();
  }
  cfg.Validate();
  return cfg;
}

GenerationConfig LoadConfig(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    return GenerationConfig{};
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig,
                path.string() + ": parse error: " + e.what());
  }
  return ConfigFromJson(j);
}

}  // namespace relscm
