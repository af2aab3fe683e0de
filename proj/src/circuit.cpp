#include <algorithm>
#include <optional>

#include "tracer/error.hpp"
#include "tracer/grounder.hpp"

namespace tracer::ground {

std::size_t BoolCircuit::KeyHash::operator()(const std::pair<int, std::vector<NodeId>>& k) const noexcept {
  std::size_t h = static_cast<std::size_t>(k.first) * 0x9e3779b97f4a7c15ULL;
  for (NodeId id : k.second) h = (h ^ id) * 0x100000001b3ULL;
  return h;
}

BoolCircuit::BoolCircuit() {
  nodes_.push_back({NodeKind::False, 0, {}});
  nodes_.push_back({NodeKind::True, 0, {}});
}

NodeId BoolCircuit::intern(Node n) {
  std::pair<int, std::vector<NodeId>> key{static_cast<int>(n.kind), n.inputs};
  auto it = table_.find(key);
  if (it != table_.end()) return it->second;
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(n));
  table_.emplace(std::move(key), id);
  return id;
}

NodeId BoolCircuit::var(int v) {
  if (v <= 0) throw Error(ErrorKind::Internal, "circuit variables are 1-based");
  auto it = vars_.find(v);
  if (it != vars_.end()) return it->second;
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({NodeKind::Var, v, {}});
  vars_.emplace(v, id);
  return id;
}

NodeId BoolCircuit::make_not(NodeId a) {
  if (a == kTrue) return kFalse;
  if (a == kFalse) return kTrue;
  if (nodes_[a].kind == NodeKind::Not) return nodes_[a].inputs[0];
  return intern({NodeKind::Not, 0, {a}});
}

namespace {

// Shared folding for AND (absorbing = FALSE) and OR (absorbing = TRUE).
template <class Circuit>
std::optional<NodeId> normalize(const Circuit& c, NodeKind kind, std::vector<NodeId>& inputs) {
  const NodeId absorbing = kind == NodeKind::And ? BoolCircuit::kFalse : BoolCircuit::kTrue;
  const NodeId neutral = kind == NodeKind::And ? BoolCircuit::kTrue : BoolCircuit::kFalse;
  std::vector<NodeId> flat;
  flat.reserve(inputs.size());
  for (NodeId id : inputs) {
    if (id == absorbing) return absorbing;
    if (id == neutral) continue;
    const Node& n = c.node(id);
    if (n.kind == kind) {
      flat.insert(flat.end(), n.inputs.begin(), n.inputs.end());
    } else {
      flat.push_back(id);
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  for (NodeId id : flat) {
    const Node& n = c.node(id);
    if (n.kind == NodeKind::Not && std::binary_search(flat.begin(), flat.end(), n.inputs[0])) return absorbing;
  }
  if (flat.empty()) return neutral;
  if (flat.size() == 1) return flat[0];
  inputs = std::move(flat);
  return std::nullopt;
}

}  // namespace

NodeId BoolCircuit::make_and(std::vector<NodeId> inputs) {
  if (auto folded = normalize(*this, NodeKind::And, inputs)) return *folded;
  return intern({NodeKind::And, 0, std::move(inputs)});
}

NodeId BoolCircuit::make_or(std::vector<NodeId> inputs) {
  if (auto folded = normalize(*this, NodeKind::Or, inputs)) return *folded;
  return intern({NodeKind::Or, 0, std::move(inputs)});
}

NodeId BoolCircuit::make_iff(NodeId a, NodeId b) {
  return make_or(make_and(a, b), make_and(make_not(a), make_not(b)));
}

bool BoolCircuit::evaluate(NodeId id, const std::vector<bool>& assignment) const {
  std::vector<char> value(id + 1, 0);
  for (NodeId i = 0; i <= id; ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::False: value[i] = 0; break;
      case NodeKind::True: value[i] = 1; break;
      case NodeKind::Var: value[i] = assignment.at(static_cast<std::size_t>(n.var)); break;
      case NodeKind::Not: value[i] = !value[n.inputs[0]]; break;
      case NodeKind::And:
        value[i] = std::all_of(n.inputs.begin(), n.inputs.end(), [&](NodeId c) { return value[c]; });
        break;
      case NodeKind::Or:
        value[i] = std::any_of(n.inputs.begin(), n.inputs.end(), [&](NodeId c) { return value[c]; });
        break;
    }
  }
  return value[id];
}

VarMap::VarMap(const rel::Bounds& bounds) {
  for (const auto& name : bounds.order) {
    const rel::RelationBounds& rb = bounds.at(name);
    auto& slot = index_[name];
    for (const rel::Tuple& t : rb.upper) {
      if (rb.lower.contains(t)) continue;
      entries_.emplace_back(name, t);
      slot.emplace(t, static_cast<int>(entries_.size()));
    }
  }
}

int VarMap::find(std::string_view relation, const rel::Tuple& t) const {
  auto it = index_.find(relation);
  if (it == index_.end()) return 0;
  auto jt = it->second.find(t);
  return jt == it->second.end() ? 0 : jt->second;
}

std::vector<int> VarMap::vars_of(std::string_view relation) const {
  std::vector<int> out;
  auto it = index_.find(relation);
  if (it == index_.end()) return out;
  for (const auto& [t, v] : it->second) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

rel::Valuation VarMap::decode(const rel::Bounds& bounds, const std::vector<bool>& assignment) const {
  rel::Valuation out = bounds.lower_valuation();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i + 1 < assignment.size() && assignment[i + 1]) out.at(entries_[i].first).insert(entries_[i].second);
  }
  return out;
}

TseitinEncoder::TseitinEncoder(const BoolCircuit& circuit, int num_tuple_vars, CnfOptions options)
    : circuit_(circuit), options_(options), next_var_(num_tuple_vars + 1) {}

sat::Lit TseitinEncoder::literal(NodeId id, bool positive, sat::CnfFormula& out) {
  const Node& n = circuit_.node(id);
  switch (n.kind) {
    case NodeKind::Var: return n.var;
    case NodeKind::Not: return -literal(n.inputs[0], !positive, out);
    case NodeKind::False:
    case NodeKind::True: throw Error(ErrorKind::Internal, "constant node reached the Tseitin encoder");
    case NodeKind::And:
    case NodeKind::Or: break;
  }
  auto [it, fresh] = aux_.try_emplace(id, 0);
  if (fresh) it->second = next_var_++;
  const int v = it->second;
  std::uint8_t need = options_.plaisted_greenbaum ? (positive ? 1 : 2) : 3;
  std::uint8_t& done = emitted_[id];
  std::uint8_t missing = need & static_cast<std::uint8_t>(~done);
  done |= missing;
  const bool conj = n.kind == NodeKind::And;
  std::vector<sat::Lit> wide;
  // AND: v -> c_i (positive) and (all c_i) -> v (negative). OR is the dual.
  if (missing & 1) {
    if (conj) {
      for (NodeId c : n.inputs) out.add_clause({-v, literal(c, true, out)});
    } else {
      wide = {-v};
      for (NodeId c : n.inputs) wide.push_back(literal(c, true, out));
      out.add_clause(wide);
    }
  }
  if (missing & 2) {
    if (conj) {
      wide = {v};
      for (NodeId c : n.inputs) wide.push_back(-literal(c, false, out));
      out.add_clause(wide);
    } else {
      for (NodeId c : n.inputs) out.add_clause({v, -literal(c, false, out)});
    }
  }
  return v;
}

void TseitinEncoder::assert_node(NodeId id, sat::CnfFormula& out) {
  const Node& n = circuit_.node(id);
  switch (n.kind) {
    case NodeKind::True: return;
    case NodeKind::False: {
      int x = next_var_++;
      out.add_clause({x});
      out.add_clause({-x});
      return;
    }
    case NodeKind::Var: out.add_clause({n.var}); return;
    case NodeKind::And:
      for (NodeId c : n.inputs) assert_node(c, out);
      return;
    case NodeKind::Or: {
      std::vector<sat::Lit> clause;
      for (NodeId c : n.inputs) clause.push_back(literal(c, true, out));
      out.add_clause(clause);
      return;
    }
    case NodeKind::Not: {
      const Node& inner = circuit_.node(n.inputs[0]);
      if (inner.kind == NodeKind::Or) {
        for (NodeId c : inner.inputs) out.add_clause({-literal(c, false, out)});
      } else if (inner.kind == NodeKind::And) {
        std::vector<sat::Lit> clause;
        for (NodeId c : inner.inputs) clause.push_back(-literal(c, false, out));
        out.add_clause(clause);
      } else {
        out.add_clause({-literal(n.inputs[0], false, out)});
      }
      return;
    }
  }
}

sat::CnfFormula to_cnf(const BoolCircuit& circuit, NodeId root, int num_tuple_vars, CnfOptions options) {
  sat::CnfFormula out;
  out.set_num_vars(num_tuple_vars);
  TseitinEncoder encoder(circuit, num_tuple_vars, options);
  encoder.assert_node(root, out);
  out.set_num_vars(std::max(out.num_vars(), encoder.num_vars()));
  for (const auto& [node, var] : encoder.aux()) out.aux_nodes.emplace(var, node);
  return out;
}

}  // namespace tracer::ground
