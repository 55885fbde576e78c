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

#include "ece/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ece {
namespace {

using json = nlohmann::json;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type pos = 0;
  while (true) {
    const auto next = line.find(',', pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += ',';
    out += parts[k];
  }
  return out;
}

bool getline_clean(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

bool parse_double(const std::string& text, double& value) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && !text.empty();
}

template <typename Int>
bool parse_int(const std::string& text, Int& value) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && !text.empty();
}

json mat_json(const Mat& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Mat json_mat(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw IngestError("policy matrix data does not match its dimensions");
  }
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[r * cols + c].get<double>();
  }
  return m;
}

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Vec json_vec(const json& j) {
  if (!j.is_array()) throw IngestError("expected an array of numbers");
  Vec v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) v(k) = j[k].get<double>();
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> trajectory_columns(int state_dim, const std::vector<int>& action_dims) {
  std::vector<std::string> cols{"trial", "t"};
  for (int k = 1; k <= state_dim; ++k) cols.push_back("s_" + std::to_string(k));
  for (std::size_t i = 0; i < action_dims.size(); ++i) {
    for (int k = 1; k <= action_dims[i]; ++k) {
      cols.push_back("a" + std::to_string(i + 1) + "_" + std::to_string(k));
    }
  }
  return cols;
}

void write_trajectories(std::ostream& out, const TrajectoryBatch& batch) {
  if (batch.empty()) throw ShapeError("cannot write an empty trajectory batch");
  const Trajectory& first = batch.front();
  if (first.states.empty() || first.actions.empty()) {
    throw ShapeError("trajectory has no time steps");
  }
  std::vector<int> dims;
  for (const auto& a : first.actions.front()) dims.push_back(static_cast<int>(a.size()));
  const int n = static_cast<int>(first.states.front().size());
  check_batch(batch, n, dims, first.horizon());
  for (std::size_t j = 1; j < batch.size(); ++j) {
    if (batch[j].seed <= batch[j - 1].seed) {
      throw ShapeError("trial ids must be strictly increasing (trajectory " +
                       std::to_string(j) + ")");
    }
  }
  out << join(trajectory_columns(n, dims)) << '\n';
  for (const auto& traj : batch) {
    for (int k = 0; k < traj.horizon(); ++k) {
      out << traj.seed << ',' << (k + 1);
      for (Eigen::Index r = 0; r < traj.states[k].size(); ++r) {
        out << ',' << format_double(traj.states[k](r));
      }
      for (const auto& a : traj.actions[k]) {
        for (Eigen::Index r = 0; r < a.size(); ++r) out << ',' << format_double(a(r));
      }
      out << '\n';
    }
  }
}

void write_trajectory_file(const std::string& path, const TrajectoryBatch& batch) {
  std::ostringstream buf;
  write_trajectories(buf, batch);
  write_text_file(path, buf.str());
}

TrajectoryBatch read_trajectories(std::istream& in, int state_dim,
                                  const std::vector<int>& action_dims) {
  const auto expected = trajectory_columns(state_dim, action_dims);
  std::string line;
  if (!getline_clean(in, line)) throw IngestError("trajectory file is empty", 1);
  const auto header = split(line);
  if (header != expected) {
    std::string msg = "header mismatch: expected " + std::to_string(expected.size()) +
                      " columns '" + join(expected) + "', found " +
                      std::to_string(header.size()) + " columns '" + line + "'";
    throw IngestError(msg, 1);
  }

  TrajectoryBatch batch;
  int line_no = 1;
  int horizon = -1;
  while (getline_clean(in, line)) {
    ++line_no;
    if (line.empty()) throw IngestError("blank line", line_no);
    const auto cells = split(line);
    if (cells.size() != expected.size()) {
      throw IngestError("expected " + std::to_string(expected.size()) + " columns, found " +
                            std::to_string(cells.size()),
                        line_no);
    }
    std::uint64_t trial = 0;
    int t = 0;
    if (!parse_int(cells[0], trial)) throw IngestError("bad trial id '" + cells[0] + "'", line_no);
    if (!parse_int(cells[1], t)) throw IngestError("bad time step '" + cells[1] + "'", line_no);

    const bool new_trial = batch.empty() || trial != batch.back().seed;
    if (new_trial) {
      if (!batch.empty()) {
        if (trial < batch.back().seed) throw IngestError("rows not sorted by trial", line_no);
        if (horizon < 0) horizon = batch.back().horizon();
        if (batch.back().horizon() != horizon) {
          throw IngestError("trial " + std::to_string(batch.back().seed) + " has " +
                                std::to_string(batch.back().horizon()) +
                                " time steps, expected " + std::to_string(horizon),
                            line_no - 1);
        }
      }
      batch.emplace_back();
      batch.back().seed = trial;
    }
    Trajectory& traj = batch.back();
    if (t != traj.horizon() + 1) {
      throw IngestError("time step " + cells[1] + " out of order, expected " +
                            std::to_string(traj.horizon() + 1),
                        line_no);
    }
    std::vector<double> values(cells.size() - 2);
    for (std::size_t c = 2; c < cells.size(); ++c) {
      if (!parse_double(cells[c], values[c - 2]) || !std::isfinite(values[c - 2])) {
        throw IngestError("column '" + expected[c] + "': bad number '" + cells[c] + "'",
                          line_no);
      }
    }
    Vec s = Eigen::Map<const Vec>(values.data(), state_dim);
    JointAction a;
    int offset = state_dim;
    for (int m : action_dims) {
      a.push_back(Eigen::Map<const Vec>(values.data() + offset, m));
      offset += m;
    }
    traj.states.push_back(std::move(s));
    traj.actions.push_back(std::move(a));
  }
  if (batch.empty()) throw IngestError("trajectory file has no rows", line_no);
  if (horizon >= 0 && batch.back().horizon() != horizon) {
    throw IngestError("trial " + std::to_string(batch.back().seed) + " has " +
                          std::to_string(batch.back().horizon()) + " time steps, expected " +
                          std::to_string(horizon),
                      line_no);
  }
  return batch;
}

TrajectoryBatch read_trajectory_file(const std::string& path, int state_dim,
                                     const std::vector<int>& action_dims) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path + "'");
  return read_trajectories(in, state_dim, action_dims);
}

std::string policy_to_json(const AffineGaussianPolicySet& policies) {
  json root;
  root["horizon"] = policies.horizon();
  root["num_agents"] = policies.num_agents();
  root["nominal_states"] = json::array();
  for (const auto& s : policies.nominal_states) root["nominal_states"].push_back(vec_json(s));
  root["nominal_actions"] = json::array();
  for (const auto& joint : policies.nominal_actions) {
    json row = json::array();
    for (const auto& a : joint) row.push_back(vec_json(a));
    root["nominal_actions"].push_back(row);
  }
  root["stages"] = json::array();
  for (int k = 0; k < policies.horizon(); ++k) {
    json agents = json::array();
    for (const auto& st : policies.stages[k]) {
      agents.push_back({{"gain", mat_json(st.gain)},
                        {"offset", vec_json(st.offset)},
                        {"covariance", mat_json(st.covariance)}});
    }
    root["stages"].push_back({{"t", k + 1}, {"agents", agents}});
  }
  return root.dump(1) + "\n";
}

AffineGaussianPolicySet policy_from_json(const std::string& text) {
  try {
    const json root = json::parse(text);
    AffineGaussianPolicySet p;
    const int T = root.at("horizon").get<int>();
    const int N = root.at("num_agents").get<int>();
    for (const auto& s : root.at("nominal_states")) p.nominal_states.push_back(json_vec(s));
    for (const auto& row : root.at("nominal_actions")) {
      JointAction joint;
      for (const auto& a : row) joint.push_back(json_vec(a));
      p.nominal_actions.push_back(std::move(joint));
    }
    for (const auto& stage : root.at("stages")) {
      std::vector<PolicyStage> agents;
      for (const auto& ja : stage.at("agents")) {
        agents.push_back({json_mat(ja.at("gain")), json_vec(ja.at("offset")),
                          json_mat(ja.at("covariance"))});
      }
      if (static_cast<int>(agents.size()) != N) throw IngestError("policy agent count mismatch");
      p.stages.push_back(std::move(agents));
    }
    if (p.horizon() != T || static_cast<int>(p.nominal_states.size()) != T ||
        static_cast<int>(p.nominal_actions.size()) != T) {
      throw IngestError("policy horizon mismatch");
    }
    return p;
  } catch (const json::exception& e) {
    throw IngestError(std::string("malformed policy file: ") + e.what());
  }
}

std::string weights_to_json(const FeatureBasis& basis, const WeightVector& weights) {
  json root;
  root["agents"] = json::array();
  for (int i = 0; i < basis.num_agents(); ++i) {
    json names = json::array();
    for (const auto& f : basis.agent(i).features) names.push_back(f.name());
    root["agents"].push_back({{"features", names}, {"weights", vec_json(weights.at(i))}});
  }
  return root.dump(2) + "\n";
}

WeightVector weights_from_json(const std::string& text, const FeatureBasis& basis) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw IngestError(std::string("malformed weights file: ") + e.what());
  }
  if (!root.is_object() || !root.contains("agents") || !root["agents"].is_array() ||
      static_cast<int>(root["agents"].size()) != basis.num_agents()) {
    throw IngestError("weights file must list one entry per agent");
  }
  WeightVector w;
  for (int i = 0; i < basis.num_agents(); ++i) {
    const json& ja = root["agents"][i];
    Vec v;
    try {
      v = json_vec(ja.at("weights"));
    } catch (const json::exception& e) {
      throw IngestError("agent " + std::to_string(i + 1) + ": " + e.what());
    }
    if (v.size() != basis.num_features(i)) {
      throw IngestError("agent " + std::to_string(i + 1) + ": expected " +
                        std::to_string(basis.num_features(i)) + " weights, found " +
                        std::to_string(v.size()));
    }
    if (ja.contains("features")) {
      for (int k = 0; k < basis.num_features(i); ++k) {
        if (ja["features"].at(k) != basis.agent(i).features[k].name()) {
          throw IngestError("agent " + std::to_string(i + 1) + ": feature " +
                            std::to_string(k + 1) + " is '" +
                            ja["features"].at(k).dump() + "', expected '" +
                            basis.agent(i).features[k].name() + "'");
        }
      }
    }
    w.push_back(std::move(v));
  }
  return w;
}

void write_iteration_trace(std::ostream& out, const IterationTrace& trace, int num_agents) {
  out << "iteration,max_deviation,step";
  for (int i = 1; i <= num_agents; ++i) out << ",cost_" << i;
  out << '\n';
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << format_double(r.max_deviation) << ',' << format_double(r.step);
    for (int i = 0; i < num_agents; ++i) {
      out << ',' << (i < r.costs.size() ? format_double(r.costs(i)) : std::string("nan"));
    }
    out << '\n';
  }
}

void write_learn_trace(std::ostream& out, const LearnTrace& trace, const FeatureBasis& basis) {
  out << "iteration,agent,residual,solver_iterations,floor_applied,feature,weight,gap\n";
  for (const auto& r : trace.records) {
    for (Eigen::Index k = 0; k < r.weights.size(); ++k) {
      out << r.iteration << ',' << (r.agent + 1) << ',' << format_double(r.residual) << ','
          << r.solver_iterations << ',' << (r.floor_applied ? 1 : 0) << ','
          << basis.agent(r.agent).features[k].name() << ',' << format_double(r.weights(k))
          << ',' << format_double(r.gap(k)) << '\n';
    }
  }
}

void write_kl_table(std::ostream& out, const std::vector<std::vector<double>>& kl,
                    const FeatureBasis& basis) {
  out << "agent,feature,kl\n";
  for (std::size_t i = 0; i < kl.size(); ++i) {
    for (std::size_t k = 0; k < kl[i].size(); ++k) {
      out << (i + 1) << ',' << basis.agent(static_cast<int>(i)).features[k].name() << ','
          << format_double(kl[i][k]) << '\n';
    }
  }
}

void write_goal_distance_table(std::ostream& out, const std::vector<DistanceStats>& stats) {
  out << "agent,mean_dist,std_dist\n";
  for (std::size_t i = 0; i < stats.size(); ++i) {
    out << (i + 1) << ',' << format_double(stats[i].mean) << ','
        << format_double(stats[i].stddev) << '\n';
  }
}

void write_rmse_table(std::ostream& out, const std::vector<double>& rmse) {
  out << "t,rmse\n";
  for (std::size_t k = 0; k < rmse.size(); ++k) {
    out << (k + 1) << ',' << format_double(rmse[k]) << '\n';
  }
}

CsvTable read_csv_table(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!getline_clean(in, line)) throw IngestError("table is empty", 1);
  table.header = split(line);
  int line_no = 1;
  while (getline_clean(in, line)) {
    ++line_no;
    auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw IngestError("expected " + std::to_string(table.header.size()) +
                            " columns, found " + std::to_string(cells.size()),
                        line_no);
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
    if (!out) throw Error("write failed for '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

}  // namespace ece
