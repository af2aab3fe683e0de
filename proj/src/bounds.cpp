#include <algorithm>

#include "tracer/error.hpp"
#include "tracer/relational.hpp"

namespace tracer::rel {

std::string fresh_atom_name(int index) { return "$fresh" + std::to_string(index); }

bool is_fresh_atom(std::string_view name) { return name.starts_with("$fresh"); }

namespace {

TupleSet column_product(const std::vector<const TupleSet*>& columns) {
  TupleSet out(1);
  out = *columns[0];
  for (std::size_t i = 1; i < columns.size(); ++i) out = out.product(*columns[i]);
  return out;
}

bool has_fresh(const Tuple& t, Atom first_fresh) {
  return std::any_of(t.begin(), t.end(), [&](Atom a) { return a >= first_fresh; });
}

}  // namespace

Bounds build_bounds(const BoundsMode& mode, const forl::TypedSpec& spec, const Instance& instance) {
  Bounds b;
  b.universe = instance.universe;
  for (const auto& r : spec.relations) b.order.push_back(r.name);

  for (const auto& t : mode.targets) {
    const forl::Relation* r = spec.relation(t);
    if (!r || r->is_sig) throw Error(ErrorKind::UnknownTarget, "'" + t + "' is not a declared field");
  }
  if (mode.mode == Mode::Discover && mode.fresh_count < 1) {
    throw Error(ErrorKind::InvalidArgument, "discovery needs at least one fresh atom");
  }

  for (const auto& name : instance.relations) {
    if (!spec.relation(name.first)) {
      throw Error(ErrorKind::UnknownName, "instance mentions undeclared relation '" + name.first + "'");
    }
  }

  // Instance tuples must respect the declared column types.
  for (const auto& r : spec.relations) {
    const TupleSet& value = instance.value(r.name);
    if (!value.empty() && value.arity() != r.arity()) {
      throw Error(ErrorKind::TupleOutsideType, "relation '" + r.name + "' has arity " +
                                                   std::to_string(r.arity()) + " but the instance holds arity " +
                                                   std::to_string(value.arity()));
    }
    if (r.is_sig) continue;
    for (const Tuple& t : value) {
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!instance.value(r.columns[i]).contains({t[i]})) {
          throw Error(ErrorKind::TupleOutsideType, "tuple " + format_tuple(t, instance.universe) + " of '" + r.name +
                                                       "' has '" + instance.universe.name(t[i]) +
                                                       "' outside column type " + r.columns[i]);
        }
      }
    }
  }

  Atom first_fresh = static_cast<Atom>(b.universe.size());
  if (mode.mode == Mode::Discover) {
    for (int i = 0; i < mode.fresh_count; ++i) b.universe.add(fresh_atom_name(i));
  }

  for (const auto& r : spec.relations) {
    RelationBounds rb;
    rb.lower = instance.value(r.name);
    if (rb.lower.empty()) rb.lower = TupleSet(r.arity());
    rb.upper = rb.lower;
    if (mode.mode == Mode::Infer && std::find(mode.targets.begin(), mode.targets.end(), r.name) != mode.targets.end()) {
      std::vector<const TupleSet*> cols;
      for (const auto& c : r.columns) cols.push_back(&instance.value(c));
      rb.upper = column_product(cols);
    }
    if (mode.mode == Mode::Discover && r.is_sig && !spec.concrete_descendants(r.name).empty()) {
      for (Atom a = first_fresh; a < b.universe.size(); ++a) rb.upper.insert({a});
    }
    b.relations.emplace(r.name, std::move(rb));
  }

  if (mode.mode == Mode::Discover && mode.link_fresh) {
    for (const auto& r : spec.relations) {
      if (r.is_sig) continue;
      std::vector<const TupleSet*> cols;
      for (const auto& c : r.columns) cols.push_back(&b.relations.at(c).upper);
      RelationBounds& rb = b.relations.at(r.name);
      for (const Tuple& t : column_product(cols)) {
        if (has_fresh(t, first_fresh)) rb.upper.insert(t);
      }
    }
  }
  return b;
}

std::optional<std::string> check_bounds(const Bounds& bounds, const forl::TypedSpec& spec) {
  std::vector<Atom> fresh;
  for (Atom a = 0; a < bounds.universe.size(); ++a) {
    if (is_fresh_atom(bounds.universe.name(a))) fresh.push_back(a);
  }
  auto is_fresh = [&](Atom a) { return std::find(fresh.begin(), fresh.end(), a) != fresh.end(); };
  for (const auto& r : spec.relations) {
    auto it = bounds.relations.find(r.name);
    if (it == bounds.relations.end()) return "missing bounds for " + r.name;
    const RelationBounds& rb = it->second;
    if (!rb.lower.subset_of(rb.upper)) return "lower bound of " + r.name + " exceeds its upper bound";
    for (const Tuple& t : rb.upper) {
      if (static_cast<int>(t.size()) != r.arity()) return "arity mismatch in " + r.name;
      for (Atom a : t) {
        if (a >= bounds.universe.size()) return "atom outside universe in " + r.name;
      }
      if (r.is_sig) continue;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!bounds.at(r.columns[i]).upper.contains({t[i]})) {
          return "upper bound of " + r.name + " leaves column type " + r.columns[i];
        }
      }
    }
  }
  for (const auto& s : spec.sigs) {
    const RelationBounds& child = bounds.at(s.name);
    for (const auto& p : s.parents) {
      if (s.kind == forl::SigKind::SubsetOf && s.parents.size() > 1) break;
      if (!child.upper.subset_of(bounds.at(p).upper)) return "upper bound of " + s.name + " exceeds parent " + p;
    }
    if (s.kind == forl::SigKind::SubsetOf && s.parents.size() > 1) {
      for (const Tuple& t : child.upper) {
        bool inside = std::any_of(s.parents.begin(), s.parents.end(),
                                  [&](const std::string& p) { return bounds.at(p).upper.contains(t); });
        if (!inside) return "upper bound of " + s.name + " exceeds the union of its parents";
      }
    }
    // Extends siblings are disjoint apart from fresh atoms, whose membership the solver picks.
    for (std::size_t i = 0; i < s.children.size(); ++i) {
      for (std::size_t j = i + 1; j < s.children.size(); ++j) {
        for (const Tuple& t : bounds.at(s.children[i]).upper) {
          if (!is_fresh(t[0]) && bounds.at(s.children[j]).upper.contains(t)) {
            return "extends siblings " + s.children[i] + " and " + s.children[j] + " share an atom";
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace tracer::rel
