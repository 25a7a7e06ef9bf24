#pragma once

#include <string>

#include <json.hpp>

#include "lookahead/lookahead.hpp"
#include "lookahead/mdp.hpp"
#include "lookahead/planner.hpp"

namespace lookahead {

using json = nlohmann::json;

// MDP file schema (documented in the README):
// {
//   "S": int, "A": int, "H": int, "ell": int, "terminal": int (-1 = none),
//   "laws": [ { "h": int, "groups": [ {
//       "cells":    [[state, action], ...],
//       "outcomes": [ { "w": double,
//                       "rewards": [double, ...],   // aligned with cells
//                       "next":    [int, ...] } ] } ] } ]
// }
json mdp_to_json(const TabularMdp& mdp);

// Parses and validates; throws std::runtime_error naming the offending field
// on invalid input.
TabularMdp mdp_from_json(const json& j);

TabularMdp load_mdp(const std::string& path);
void save_mdp(const TabularMdp& mdp, const std::string& path);

// Plan file schema: {"V": [[...]], "B": [[...]], "label": "..."} with V of
// shape (H+1) x S (last row terminal zeros) and B of shape H x S.
json policy_to_json(const BatchingPolicy& policy);
BatchingPolicy policy_from_json(const json& j);

// Debug dump of a window; pruned cells appear as reward 0 / next -1.
json lookahead_to_json(const LookaheadInfo& info);

}  // namespace lookahead
