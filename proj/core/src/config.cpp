// Copyright 2026 The ECE Authors.
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

#include "ece/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ece/dynamics.hpp"
#include "json.hpp"

namespace ece {
namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(path + ": unknown key '" + key + "'");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": expected true or false");
  return j.get<bool>();
}

Vec get_vec(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
  Vec v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    v(k) = get_number(j[k], path + "[" + std::to_string(k) + "]");
  }
  return v;
}

Mat get_mat(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? (j[0].is_array() ? j[0].size() : 0) : 0;
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Vec row = get_vec(j[r], path + "[" + std::to_string(r) + "]");
    if (static_cast<std::size_t>(row.size()) != cols) {
      throw ConfigError(path + ": ragged matrix rows");
    }
    m.row(r) = row.transpose();
  }
  return m;
}

// Square matrix given either explicitly or as a scalar multiple of I.
Mat get_square(const json& j, int dim, const std::string& path) {
  if (j.is_number()) return j.get<double>() * Mat::Identity(dim, dim);
  Mat m = get_mat(j, path);
  if (m.rows() != dim || m.cols() != dim) {
    throw ConfigError(path + ": expected a " + std::to_string(dim) + "x" +
                      std::to_string(dim) + " matrix");
  }
  return m;
}

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

json mat_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec_json(m.row(r).transpose()));
  return out;
}

bool same(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

bool same(const Vec& a, const Vec& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

int state_dim_of(const DynamicsConfig& d, int num_agents) {
  if (d.kind == "linear") return static_cast<int>(d.A.rows());
  if (d.kind == "point_mass") return 4 * num_agents;
  if (d.kind == "unicycle") return 3 * num_agents;
  throw ConfigError("dynamics.kind: unknown kind '" + d.kind + "'");
}

std::vector<int> default_positions(const DynamicsConfig& d, int agent) {
  if (d.kind == "point_mass") return PointMassDynamics::position_indices(agent);
  if (d.kind == "unicycle") return UnicycleDynamics::position_indices(agent);
  return {};
}

Vec default_initial_mean(const ScenarioConfig& c) {
  const int N = c.num_agents();
  const int n = state_dim_of(c.dynamics, N);
  Vec mean = Vec::Zero(n);
  for (int i = 0; i < N; ++i) {
    const auto& a = c.agents[i];
    if (a.start.size() != 2) {
      throw ConfigError("initial_state.mean is required unless every agent has a 2-D start");
    }
    if (c.dynamics.kind == "point_mass") {
      mean.segment(4 * i, 2) = a.start;
    } else {
      mean.segment(3 * i, 2) = a.start;
      if (a.goal.size() == 2) {
        const Vec d = a.goal - a.start;
        mean(3 * i + 2) = std::atan2(d(1), d(0));
      }
    }
  }
  return mean;
}

DynamicsConfig parse_dynamics(const json& j) {
  const std::string path = "dynamics";
  DynamicsConfig d;
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(path + ".kind is required");
  d.kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
  if (d.kind == "linear") {
    check_keys(j, {"kind", "A", "B"}, path);
    if (!j.contains("A") || !j.contains("B")) throw ConfigError(path + ": linear needs A and B");
    d.A = get_mat(j["A"], path + ".A");
    if (d.A.rows() != d.A.cols() || d.A.rows() == 0) throw ConfigError(path + ".A must be square");
    if (!j["B"].is_array() || j["B"].empty()) throw ConfigError(path + ".B must list B^j");
    for (std::size_t k = 0; k < j["B"].size(); ++k) {
      Mat b = get_mat(j["B"][k], path + ".B[" + std::to_string(k) + "]");
      if (b.rows() != d.A.rows()) throw ConfigError(path + ".B: B^j must have n rows");
      d.B.push_back(std::move(b));
    }
  } else if (d.kind == "point_mass" || d.kind == "unicycle") {
    check_keys(j, {"kind", "dt"}, path);
    if (!j.contains("dt")) throw ConfigError(path + ".dt is required");
    d.dt = get_number(j["dt"], path + ".dt");
    if (!(d.dt > 0.0)) throw ConfigError(path + ".dt must be > 0");
  } else {
    throw ConfigError(path + ".kind: unknown kind '" + d.kind + "'");
  }
  return d;
}

json dynamics_json(const DynamicsConfig& d) {
  json j;
  j["kind"] = d.kind;
  if (d.kind == "linear") {
    j["A"] = mat_json(d.A);
    j["B"] = json::array();
    for (const auto& b : d.B) j["B"].push_back(mat_json(b));
  } else {
    j["dt"] = d.dt;
  }
  return j;
}

FeatureConfig parse_feature(const json& j, const std::string& path) {
  check_keys(j, {"kind", "other", "sigma"}, path);
  FeatureConfig f;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError(path + ".kind is required");
  f.kind = j["kind"].get<std::string>();
  if (f.kind == "gaussian_proximity") {
    if (!j.contains("other")) throw ConfigError(path + ".other is required");
    f.other = get_int(j["other"], path + ".other");
    if (j.contains("sigma")) f.sigma = get_number(j["sigma"], path + ".sigma");
    if (!(f.sigma > 0.0)) throw ConfigError(path + ".sigma must be > 0");
  } else if (f.kind == "reference_tracking" || f.kind == "control_effort") {
    if (j.contains("other") || j.contains("sigma")) {
      throw ConfigError(path + ": '" + f.kind + "' takes no parameters");
    }
  } else {
    throw ConfigError(path + ".kind: unknown feature '" + f.kind + "'");
  }
  return f;
}

SolverConfig parse_solver(const json& j) {
  const std::string path = "solver";
  check_keys(j, {"max_iterations", "convergence_tol", "line_search_threshold", "min_step",
                 "hessian_floor", "strict_paper"},
             path);
  SolverConfig s;
  if (j.contains("max_iterations")) s.max_iterations = get_int(j["max_iterations"], path + ".max_iterations");
  if (j.contains("convergence_tol")) s.convergence_tol = get_number(j["convergence_tol"], path + ".convergence_tol");
  if (j.contains("line_search_threshold")) {
    s.line_search_threshold = get_number(j["line_search_threshold"], path + ".line_search_threshold");
  }
  if (j.contains("min_step")) s.min_step = get_number(j["min_step"], path + ".min_step");
  if (j.contains("hessian_floor")) s.hessian_floor = get_number(j["hessian_floor"], path + ".hessian_floor");
  if (j.contains("strict_paper")) s.strict_paper = get_bool(j["strict_paper"], path + ".strict_paper");
  s.validate();
  return s;
}

json solver_json(const SolverConfig& s) {
  return {{"max_iterations", s.max_iterations},
          {"convergence_tol", s.convergence_tol},
          {"line_search_threshold", s.line_search_threshold},
          {"min_step", s.min_step},
          {"hessian_floor", s.hessian_floor},
          {"strict_paper", s.strict_paper}};
}

LearnConfig parse_learner(const json& j) {
  const std::string path = "learner";
  check_keys(j, {"learning_rate", "samples", "max_iterations", "tolerance", "mode", "seed",
                 "standardize", "effort_floor", "resample"},
             path);
  LearnConfig l;
  if (j.contains("learning_rate")) l.learning_rate = get_number(j["learning_rate"], path + ".learning_rate");
  if (j.contains("samples")) l.samples = get_int(j["samples"], path + ".samples");
  if (j.contains("max_iterations")) l.max_iterations = get_int(j["max_iterations"], path + ".max_iterations");
  if (j.contains("tolerance")) l.tolerance = get_number(j["tolerance"], path + ".tolerance");
  if (j.contains("mode")) {
    const std::string mode = j["mode"].is_string() ? j["mode"].get<std::string>() : "";
    if (mode == "joint") {
      l.mode = LearnMode::kJoint;
    } else if (mode == "independent") {
      l.mode = LearnMode::kIndependent;
    } else {
      throw ConfigError(path + ".mode must be \"joint\" or \"independent\"");
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError(path + ".seed must be a non-negative integer");
    l.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("standardize")) l.standardize = get_bool(j["standardize"], path + ".standardize");
  if (j.contains("effort_floor")) l.effort_floor = get_number(j["effort_floor"], path + ".effort_floor");
  if (j.contains("resample")) l.resample = get_bool(j["resample"], path + ".resample");
  l.validate();
  return l;
}

json learner_json(const LearnConfig& l) {
  return {{"learning_rate", l.learning_rate},
          {"samples", l.samples},
          {"max_iterations", l.max_iterations},
          {"tolerance", l.tolerance},
          {"mode", l.mode == LearnMode::kJoint ? "joint" : "independent"},
          {"seed", l.seed},
          {"standardize", l.standardize},
          {"effort_floor", l.effort_floor},
          {"resample", l.resample}};
}

HistogramSpec parse_histogram(const json& j) {
  check_keys(j, {"bins", "smoothing"}, "histogram");
  HistogramSpec h;
  if (j.contains("bins")) h.bins = get_int(j["bins"], "histogram.bins");
  if (j.contains("smoothing")) h.smoothing = get_number(j["smoothing"], "histogram.smoothing");
  h.validate();
  return h;
}

FeatureDescriptor to_descriptor(const FeatureConfig& f, const AgentConfig& a) {
  if (f.kind == "reference_tracking") return FeatureDescriptor::tracking(a.start, a.goal);
  if (f.kind == "control_effort") return FeatureDescriptor::effort();
  return FeatureDescriptor::proximity(f.other, f.sigma);
}

}  // namespace

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  if (a.schema_version != b.schema_version || a.name != b.name || a.horizon != b.horizon) {
    return false;
  }
  const auto& da = a.dynamics;
  const auto& db = b.dynamics;
  if (da.kind != db.kind || da.dt != db.dt || !same(da.A, db.A) || da.B.size() != db.B.size()) {
    return false;
  }
  for (std::size_t k = 0; k < da.B.size(); ++k) {
    if (!same(da.B[k], db.B[k])) return false;
  }
  if (!same(a.noise_gain, b.noise_gain) || !same(a.noise_covariance, b.noise_covariance) ||
      !same(a.initial_mean, b.initial_mean) ||
      !same(a.initial_covariance, b.initial_covariance)) {
    return false;
  }
  if (a.agents.size() != b.agents.size()) return false;
  for (std::size_t i = 0; i < a.agents.size(); ++i) {
    const auto& x = a.agents[i];
    const auto& y = b.agents[i];
    if (!same(x.start, y.start) || !same(x.goal, y.goal) ||
        x.position_indices != y.position_indices || !same(x.true_weights, y.true_weights) ||
        !same(x.init_weights, y.init_weights) || x.temperature != y.temperature ||
        x.features.size() != y.features.size()) {
      return false;
    }
    for (std::size_t k = 0; k < x.features.size(); ++k) {
      const auto& f = x.features[k];
      const auto& g = y.features[k];
      if (f.kind != g.kind || f.other != g.other || f.sigma != g.sigma) return false;
    }
  }
  return a.solver == b.solver && a.learner == b.learner && a.histogram == b.histogram;
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, {"schema_version", "name", "horizon", "dynamics", "noise", "initial_state",
                    "agents", "solver", "learner", "histogram"},
             "config");
  ScenarioConfig c;
  if (!root.contains("schema_version")) throw ConfigError("config.schema_version is required");
  c.schema_version = get_int(root["schema_version"], "schema_version");
  if (c.schema_version != kScenarioSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
  }
  if (root.contains("name")) {
    if (!root["name"].is_string()) throw ConfigError("name: expected a string");
    c.name = root["name"].get<std::string>();
  }
  if (!root.contains("horizon")) throw ConfigError("config.horizon is required");
  c.horizon = get_int(root["horizon"], "horizon");
  if (c.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!root.contains("dynamics")) throw ConfigError("config.dynamics is required");
  c.dynamics = parse_dynamics(root["dynamics"]);

  if (!root.contains("agents") || !root["agents"].is_array() || root["agents"].empty()) {
    throw ConfigError("config.agents must be a non-empty array");
  }
  const int N = static_cast<int>(root["agents"].size());
  if (c.dynamics.kind == "linear" && static_cast<int>(c.dynamics.B.size()) != N) {
    throw ConfigError("dynamics.B must have one entry per agent");
  }
  const int n = state_dim_of(c.dynamics, N);

  for (int i = 0; i < N; ++i) {
    const std::string path = "agents[" + std::to_string(i) + "]";
    const json& ja = root["agents"][i];
    check_keys(ja, {"start", "goal", "position_indices", "features", "true_weights",
                    "init_weights", "temperature"},
               path);
    AgentConfig a;
    if (ja.contains("start")) a.start = get_vec(ja["start"], path + ".start");
    if (ja.contains("goal")) a.goal = get_vec(ja["goal"], path + ".goal");
    if (ja.contains("position_indices")) {
      const Vec idx = get_vec(ja["position_indices"], path + ".position_indices");
      for (Eigen::Index k = 0; k < idx.size(); ++k) {
        const int v = static_cast<int>(idx(k));
        if (v != idx(k) || v < 0 || v >= n) {
          throw ConfigError(path + ".position_indices: invalid state index");
        }
        a.position_indices.push_back(v);
      }
    } else {
      a.position_indices = default_positions(c.dynamics, i);
    }
    if (!ja.contains("features") || !ja["features"].is_array() || ja["features"].empty()) {
      throw ConfigError(path + ".features must be a non-empty array");
    }
    for (std::size_t k = 0; k < ja["features"].size(); ++k) {
      a.features.push_back(
          parse_feature(ja["features"][k], path + ".features[" + std::to_string(k) + "]"));
      const auto& f = a.features.back();
      if (f.kind == "reference_tracking" &&
          (a.start.size() == 0 || a.start.size() != a.goal.size() ||
           a.start.size() != static_cast<Eigen::Index>(a.position_indices.size()))) {
        throw ConfigError(path + ": reference_tracking needs start and goal matching the "
                                 "position dimension");
      }
      if (f.kind == "gaussian_proximity" && (f.other < 0 || f.other >= N || f.other == i)) {
        throw ConfigError(path + ": gaussian_proximity.other must name another agent");
      }
    }
    const auto nf = static_cast<Eigen::Index>(a.features.size());
    if (ja.contains("true_weights")) {
      a.true_weights = get_vec(ja["true_weights"], path + ".true_weights");
      if (a.true_weights.size() != nf) throw ConfigError(path + ".true_weights: one per feature");
    }
    a.init_weights = ja.contains("init_weights")
                         ? get_vec(ja["init_weights"], path + ".init_weights")
                         : Vec(Vec::Ones(nf));
    if (a.init_weights.size() != nf) throw ConfigError(path + ".init_weights: one per feature");
    if (ja.contains("temperature")) {
      a.temperature = get_number(ja["temperature"], path + ".temperature");
      if (!(a.temperature > 0.0)) throw ConfigError(path + ".temperature must be > 0");
    }
    c.agents.push_back(std::move(a));
  }

  c.noise_gain = Mat::Identity(n, n);
  c.noise_covariance = Mat::Identity(n, n);
  if (root.contains("noise")) {
    const json& jn = root["noise"];
    check_keys(jn, {"gain", "covariance", "state_dependent"}, "noise");
    if (jn.contains("state_dependent") && get_bool(jn["state_dependent"], "noise.state_dependent")) {
      throw ConfigError("noise.state_dependent: only a constant noise gain is supported");
    }
    if (jn.contains("gain")) {
      c.noise_gain = jn["gain"].is_number() ? Mat(jn["gain"].get<double>() * Mat::Identity(n, n))
                                            : get_mat(jn["gain"], "noise.gain");
      if (c.noise_gain.rows() != n) throw ConfigError("noise.gain must have n rows");
    }
    if (jn.contains("covariance")) {
      c.noise_covariance = get_square(jn["covariance"], static_cast<int>(c.noise_gain.cols()),
                                      "noise.covariance");
    } else if (c.noise_gain.cols() != n) {
      throw ConfigError("noise.covariance is required when the gain is not square");
    }
  }

  c.initial_covariance = Mat::Zero(n, n);
  if (root.contains("initial_state")) {
    const json& ji = root["initial_state"];
    check_keys(ji, {"mean", "covariance"}, "initial_state");
    c.initial_mean = ji.contains("mean") ? get_vec(ji["mean"], "initial_state.mean")
                                         : default_initial_mean(c);
    if (ji.contains("covariance")) {
      c.initial_covariance = get_square(ji["covariance"], n, "initial_state.covariance");
    }
  } else {
    c.initial_mean = default_initial_mean(c);
  }
  if (c.initial_mean.size() != n) throw ConfigError("initial_state.mean must have length n");

  if (root.contains("solver")) c.solver = parse_solver(root["solver"]);
  if (root.contains("learner")) c.learner = parse_learner(root["learner"]);
  if (root.contains("histogram")) c.histogram = parse_histogram(root["histogram"]);

  // Surface any remaining inconsistency (PSD checks, basis shapes) now.
  try {
    (void)build_problem(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config is inconsistent: ") + e.what());
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioConfig& c) {
  json root;
  root["schema_version"] = c.schema_version;
  root["name"] = c.name;
  root["horizon"] = c.horizon;
  root["dynamics"] = dynamics_json(c.dynamics);
  root["noise"] = {{"gain", mat_json(c.noise_gain)}, {"covariance", mat_json(c.noise_covariance)}};
  root["initial_state"] = {{"mean", vec_json(c.initial_mean)},
                           {"covariance", mat_json(c.initial_covariance)}};
  root["agents"] = json::array();
  for (const auto& a : c.agents) {
    json ja;
    ja["start"] = vec_json(a.start);
    ja["goal"] = vec_json(a.goal);
    ja["position_indices"] = a.position_indices;
    ja["features"] = json::array();
    for (const auto& f : a.features) {
      json jf{{"kind", f.kind}};
      if (f.kind == "gaussian_proximity") {
        jf["other"] = f.other;
        jf["sigma"] = f.sigma;
      }
      ja["features"].push_back(jf);
    }
    if (a.true_weights.size() > 0) ja["true_weights"] = vec_json(a.true_weights);
    ja["init_weights"] = vec_json(a.init_weights);
    ja["temperature"] = a.temperature;
    root["agents"].push_back(ja);
  }
  root["solver"] = solver_json(c.solver);
  root["learner"] = learner_json(c.learner);
  root["histogram"] = {{"bins", c.histogram.bins}, {"smoothing", c.histogram.smoothing}};
  return root.dump(2) + "\n";
}

std::shared_ptr<const DynamicsModel> build_dynamics(const ScenarioConfig& c) {
  const auto& d = c.dynamics;
  if (d.kind == "linear") return std::make_shared<LinearDynamics>(d.A, d.B);
  if (d.kind == "point_mass") return std::make_shared<PointMassDynamics>(c.num_agents(), d.dt);
  if (d.kind == "unicycle") return std::make_shared<UnicycleDynamics>(c.num_agents(), d.dt);
  throw ConfigError("dynamics.kind: unknown kind '" + d.kind + "'");
}

FeatureBasis build_basis(const ScenarioConfig& c) {
  std::vector<AgentFeatures> agents;
  for (const auto& a : c.agents) {
    AgentFeatures af;
    af.position_indices = a.position_indices;
    for (const auto& f : a.features) af.features.push_back(to_descriptor(f, a));
    agents.push_back(std::move(af));
  }
  return FeatureBasis(c.horizon, std::move(agents));
}

LearningProblem build_problem(const ScenarioConfig& c) {
  LearningProblem p;
  p.horizon = c.horizon;
  p.dynamics = build_dynamics(c);
  p.noise = NoiseModel(c.noise_gain, c.noise_covariance);
  p.initial_state = InitialStateModel(c.initial_mean, c.initial_covariance);
  for (const auto& a : c.agents) p.temperatures.push_back(a.temperature);
  p.basis = build_basis(c);
  p.solver = c.solver;
  return p;
}

GameSpec build_game(const ScenarioConfig& c, const WeightVector& weights) {
  GameSpec game = build_game(build_problem(c), weights);
  game.validate();
  return game;
}

bool has_true_weights(const ScenarioConfig& c) {
  for (const auto& a : c.agents) {
    if (a.true_weights.size() == 0) return false;
  }
  return true;
}

WeightVector true_weights(const ScenarioConfig& c) {
  if (!has_true_weights(c)) throw ConfigError("config has no true_weights for every agent");
  WeightVector w;
  for (const auto& a : c.agents) w.push_back(a.true_weights);
  return w;
}

WeightVector initial_weights(const ScenarioConfig& c) {
  WeightVector w;
  for (const auto& a : c.agents) w.push_back(a.init_weights);
  return w;
}

std::vector<Vec> goals(const ScenarioConfig& c) {
  std::vector<Vec> g;
  for (const auto& a : c.agents) {
    if (a.goal.size() == 0) throw ConfigError("every agent needs a goal for goal distances");
    g.push_back(a.goal);
  }
  return g;
}

}  // namespace ece
