// Copyright (c) the teamlmi contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLMI_IO_HPP_
#define TEAMLMI_IO_HPP_

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "teamlmi/types.hpp"

namespace teamlmi {

using json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace io_detail {

inline Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array())
    throw ParseError("field '" + field + "' must be an array of rows");
  const auto rows = j.size();
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array())
    throw ParseError("field '" + field + "' rows must be arrays of numbers");
  const auto cols = j[0].size();
  Matrix M(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ParseError("field '" + field + "' row " + std::to_string(r) +
                       " has " + std::to_string(j[r].size()) +
                       " entries, expected " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw ParseError("field '" + field + "' entry (" + std::to_string(r) +
                         "," + std::to_string(c) + ") is not a number");
      M(static_cast<int>(r), static_cast<int>(c)) = j[r][c].get<double>();
    }
  }
  return M;
}

inline json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline const json& require(const json& j, const std::string& field) {
  if (!j.contains(field)) throw ParseError("missing field '" + field + "'");
  return j.at(field);
}

inline Partition partition_from_json(const json& j) {
  Partition part;
  const json& pj = require(j, "partition");
  part.m_sizes = require(pj, "m").get<std::vector<int>>();
  part.p_sizes = require(pj, "p").get<std::vector<int>>();
  if (!part.valid())
    throw ParseError("partition invalid: m and p must list equal counts of "
                     "positive sizes");
  return part;
}

inline json partition_to_json(const Partition& part) {
  return json{{"m", part.m_sizes}, {"p", part.p_sizes}};
}

}  // namespace io_detail

inline json to_json(const TeamProblem& prob) {
  return json{{"kind", "team"},
              {"partition", io_detail::partition_to_json(prob.partition)},
              {"Qww", io_detail::matrix_to_json(prob.Qww)},
              {"Qwu", io_detail::matrix_to_json(prob.Qwu)},
              {"Quu", io_detail::matrix_to_json(prob.Quu)},
              {"D", io_detail::matrix_to_json(prob.D)},
              {"E", io_detail::matrix_to_json(prob.E)}};
}

inline json to_json(const GammaFormProblem& prob) {
  json j{{"kind", "gamma_form"},
         {"partition", io_detail::partition_to_json(prob.partition)},
         {"Q", io_detail::matrix_to_json(prob.Q)},
         {"R", io_detail::matrix_to_json(prob.R)},
         {"q", prob.q},
         {"p", prob.p}};
  return j;
}

inline json to_json(const DynamicProblem& dyn) {
  json cs = json::array();
  for (const auto& C : dyn.Cmeas) cs.push_back(io_detail::matrix_to_json(C));
  json j{{"kind", "dynamic"},
         {"A", io_detail::matrix_to_json(dyn.A)},
         {"B", io_detail::matrix_to_json(dyn.B)},
         {"C", cs},
         {"stage_cost",
          {{"Qxx", io_detail::matrix_to_json(dyn.Qxx)},
           {"Qxu", io_detail::matrix_to_json(dyn.Qxu)},
           {"Quu", io_detail::matrix_to_json(dyn.Quu)}}},
         {"horizon", dyn.horizon},
         {"include_initial_state", dyn.include_initial_state}};
  if (!dyn.m_sizes.empty()) j["m_sizes"] = dyn.m_sizes;
  return j;
}

inline json to_json(const BlockGain& gain) {
  json blocks = json::array();
  for (const auto& b : gain.blocks) blocks.push_back(io_detail::matrix_to_json(b));
  return json{{"kind", "gain"}, {"blocks", blocks}};
}

inline TeamProblem team_from_json(const json& j) {
  TeamProblem prob;
  prob.partition = io_detail::partition_from_json(j);
  prob.Qww = io_detail::matrix_from_json(io_detail::require(j, "Qww"), "Qww");
  prob.Qwu = io_detail::matrix_from_json(io_detail::require(j, "Qwu"), "Qwu");
  prob.Quu = io_detail::matrix_from_json(io_detail::require(j, "Quu"), "Quu");
  prob.D = io_detail::matrix_from_json(io_detail::require(j, "D"), "D");
  prob.E = io_detail::matrix_from_json(io_detail::require(j, "E"), "E");
  return prob;
}

inline GammaFormProblem gamma_form_from_json(const json& j) {
  GammaFormProblem prob;
  prob.partition = io_detail::partition_from_json(j);
  prob.Q = io_detail::matrix_from_json(io_detail::require(j, "Q"), "Q");
  prob.R = io_detail::matrix_from_json(io_detail::require(j, "R"), "R");
  prob.q = io_detail::require(j, "q").get<int>();
  prob.p = io_detail::require(j, "p").get<int>();
  prob.m = prob.partition.total_m();
  if (prob.q < 0 || prob.p != prob.partition.total_p())
    throw ParseError("gamma_form: q/p inconsistent with partition");
  const int s = prob.dim();
  if (prob.Q.rows() != s || prob.Q.cols() != s || prob.R.rows() != s ||
      prob.R.cols() != s)
    throw ParseError("gamma_form: Q and R must be " + std::to_string(s) + "x" +
                     std::to_string(s));
  prob.C = Matrix::Zero(prob.p, prob.n());
  prob.C.rightCols(prob.p) = Matrix::Identity(prob.p, prob.p);
  return prob;
}

inline DynamicProblem dynamic_from_json(const json& j) {
  DynamicProblem dyn;
  dyn.A = io_detail::matrix_from_json(io_detail::require(j, "A"), "A");
  dyn.B = io_detail::matrix_from_json(io_detail::require(j, "B"), "B");
  const json& cs = io_detail::require(j, "C");
  if (!cs.is_array() || cs.empty())
    throw ParseError("field 'C' must list one measurement matrix per player");
  for (std::size_t i = 0; i < cs.size(); ++i)
    dyn.Cmeas.push_back(
        io_detail::matrix_from_json(cs[i], "C[" + std::to_string(i) + "]"));
  const json& sc = io_detail::require(j, "stage_cost");
  dyn.Qxx = io_detail::matrix_from_json(io_detail::require(sc, "Qxx"), "stage_cost.Qxx");
  dyn.Qxu = io_detail::matrix_from_json(io_detail::require(sc, "Qxu"), "stage_cost.Qxu");
  dyn.Quu = io_detail::matrix_from_json(io_detail::require(sc, "Quu"), "stage_cost.Quu");
  dyn.horizon = io_detail::require(j, "horizon").get<int>();
  if (j.contains("include_initial_state"))
    dyn.include_initial_state = j.at("include_initial_state").get<bool>();
  if (j.contains("m_sizes"))
    dyn.m_sizes = j.at("m_sizes").get<std::vector<int>>();
  return dyn;
}

inline BlockGain gain_from_json(const json& j) {
  const json& blocks = io_detail::require(j, "blocks");
  if (!blocks.is_array()) throw ParseError("field 'blocks' must be an array");
  BlockGain gain;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    gain.blocks.push_back(io_detail::matrix_from_json(
        blocks[i], "blocks[" + std::to_string(i) + "]"));
  return gain;
}

using Problem = std::variant<TeamProblem, GammaFormProblem, DynamicProblem>;

inline Problem problem_from_json(const json& j) {
  const std::string kind = io_detail::require(j, "kind").get<std::string>();
  if (kind == "team") return team_from_json(j);
  if (kind == "gamma_form") return gamma_form_from_json(j);
  if (kind == "dynamic") return dynamic_from_json(j);
  throw ParseError("unknown problem kind '" + kind +
                   "' (expected team | gamma_form | dynamic)");
}

inline json to_json(const SolveReport& report) {
  json gain_blocks = json::array();
  for (const auto& b : report.gain.blocks)
    gain_blocks.push_back(io_detail::matrix_to_json(b));
  json trace = json::array();
  for (const auto& step : report.trace)
    trace.push_back(json{{"gamma", step.gamma},
                         {"feasible", step.feasible},
                         {"margin", step.margin}});
  return json{{"gamma_star", report.gamma_star},
              {"gamma_bar", report.gamma_bar},
              {"gain", gain_blocks},
              {"gain_norm", report.gain_norm},
              {"lmi_margin", report.lmi_margin},
              {"oracle_gamma", report.oracle_gamma},
              {"assumption_ok", report.assumption_ok},
              {"bisection_trace", trace},
              {"solver",
               {{"outer_iterations", report.outer_iterations},
                {"inner_iterations", report.inner_iterations},
                {"inner_converged", report.inner_converged},
                {"seed", report.seed},
                {"gamma_tol", report.gamma_tol},
                {"feas_tol", report.feas_tol},
                {"wall_time_s", report.wall_time_s}}}};
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  return j;
}

inline void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace teamlmi

#endif  // TEAMLMI_IO_HPP_
