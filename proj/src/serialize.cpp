#include "lookahead/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace lookahead {

json mdp_to_json(const TabularMdp& mdp) {
  json j;
  j["S"] = mdp.num_states;
  j["A"] = mdp.num_actions;
  j["H"] = mdp.horizon;
  j["ell"] = mdp.lookahead;
  j["terminal"] = mdp.terminal;
  json laws = json::array();
  for (Step h = 1; h <= mdp.horizon; ++h) {
    json groups = json::array();
    for (const FactorGroup& g : mdp.laws[h - 1].groups) {
      json cells = json::array();
      for (const Cell& c : g.cells) cells.push_back({c.state, c.action});
      json outcomes = json::array();
      for (const Outcome& o : g.outcomes)
        outcomes.push_back({{"w", o.weight}, {"rewards", o.rewards}, {"next", o.next}});
      groups.push_back({{"cells", cells}, {"outcomes", outcomes}});
    }
    laws.push_back({{"h", h}, {"groups", groups}});
  }
  j["laws"] = laws;
  return j;
}

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw std::runtime_error("mdp file: field '" + field + "': " + why);
}

template <class T>
T require(const json& j, const char* field) {
  if (!j.contains(field)) bad_field(field, "missing");
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    bad_field(field, "wrong type");
  }
}

}  // namespace

TabularMdp mdp_from_json(const json& j) {
  TabularMdp mdp;
  mdp.num_states = require<int>(j, "S");
  mdp.num_actions = require<int>(j, "A");
  mdp.horizon = require<int>(j, "H");
  mdp.lookahead = require<int>(j, "ell");
  mdp.terminal = j.contains("terminal") ? require<int>(j, "terminal") : -1;
  const json laws = require<json>(j, "laws");
  if (!laws.is_array() || static_cast<int>(laws.size()) != mdp.horizon)
    bad_field("laws", "need exactly one entry per step");
  mdp.laws.resize(mdp.horizon);
  for (const json& lj : laws) {
    const int h = require<int>(lj, "h");
    if (h < 1 || h > mdp.horizon) bad_field("laws.h", "step out of range");
    StepLaw& law = mdp.laws[h - 1];
    for (const json& gj : require<json>(lj, "groups")) {
      FactorGroup g;
      for (const json& cj : require<json>(gj, "cells")) {
        if (!cj.is_array() || cj.size() != 2) bad_field("cells", "expect [state, action]");
        g.cells.push_back({cj[0].get<int>(), cj[1].get<int>()});
      }
      for (const json& oj : require<json>(gj, "outcomes")) {
        Outcome o;
        o.weight = require<double>(oj, "w");
        o.rewards = require<std::vector<double>>(oj, "rewards");
        o.next = require<std::vector<int>>(oj, "next");
        g.outcomes.push_back(std::move(o));
      }
      law.groups.push_back(std::move(g));
    }
    law.index_cells(mdp.num_states, mdp.num_actions);
  }
  const ValidationReport report = validate_mdp(mdp);
  if (!report.ok)
    throw std::runtime_error("mdp file: field '" + report.field + "' (step " +
                             std::to_string(report.step) + ", group " +
                             std::to_string(report.group) + "): " + report.message);
  return mdp;
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mdp file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("mdp file '" + path + "': " + e.what());
  }
  return mdp_from_json(j);
}

void save_mdp(const TabularMdp& mdp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mdp file: " + path);
  out << mdp_to_json(mdp).dump(2) << "\n";
}

json policy_to_json(const BatchingPolicy& policy) {
  json j;
  json v = json::array();
  for (Eigen::Index r = 0; r < policy.values.v.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < policy.values.v.cols(); ++c)
      row.push_back(policy.values.v(r, c));
    v.push_back(row);
  }
  json b = json::array();
  for (Eigen::Index r = 0; r < policy.batch.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < policy.batch.cols(); ++c) row.push_back(policy.batch(r, c));
    b.push_back(row);
  }
  j["V"] = v;
  j["B"] = b;
  j["label"] = policy.label;
  return j;
}

BatchingPolicy policy_from_json(const json& j) {
  BatchingPolicy pol;
  const auto v = require<std::vector<std::vector<double>>>(j, "V");
  const auto b = require<std::vector<std::vector<int>>>(j, "B");
  pol.label = j.contains("label") ? require<std::string>(j, "label") : "";
  if (v.empty() || b.empty() || v.size() != b.size() + 1)
    throw std::runtime_error("plan file: V must have one more row than B");
  const std::size_t S = v[0].size();
  pol.values.v = Eigen::ArrayXXd::Zero(static_cast<int>(v.size()), static_cast<int>(S));
  pol.batch = Eigen::ArrayXXi::Ones(static_cast<int>(b.size()), static_cast<int>(S));
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (v[r].size() != S) throw std::runtime_error("plan file: ragged V");
    for (std::size_t c = 0; c < S; ++c) pol.values.v(r, c) = v[r][c];
  }
  for (std::size_t r = 0; r < b.size(); ++r) {
    if (b[r].size() != S) throw std::runtime_error("plan file: ragged B");
    for (std::size_t c = 0; c < S; ++c) pol.batch(r, c) = b[r][c];
  }
  return pol;
}

json lookahead_to_json(const LookaheadInfo& info) {
  json j;
  j["origin"] = {{"h", info.start_step}, {"s", info.origin_state}, {"B", info.range}};
  json rewards = json::array(), next = json::array();
  for (int b = 0; b < info.range; ++b) {
    json rr = json::array(), nn = json::array();
    for (Eigen::Index s = 0; s < info.rewards[b].rows(); ++s) {
      json r_row = json::array(), n_row = json::array();
      for (Eigen::Index a = 0; a < info.rewards[b].cols(); ++a) {
        r_row.push_back(info.rewards[b](s, a));
        n_row.push_back(info.next[b](s, a));
      }
      rr.push_back(r_row);
      nn.push_back(n_row);
    }
    rewards.push_back(rr);
    next.push_back(nn);
  }
  j["rewards"] = rewards;
  j["next"] = next;
  return j;
}

}  // namespace lookahead
