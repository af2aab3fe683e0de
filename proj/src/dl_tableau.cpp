#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "tracer/dl.hpp"
#include "tracer/error.hpp"

namespace tracer::dl {

namespace {

using Label = std::set<int>;
using RoleSet = std::set<int>;

struct Entry {
  ConceptKind kind = ConceptKind::Top;
  int atom = -1;  // Atomic: name id
  int role = -1;  // Exists / Forall
  std::vector<int> args;
  ConceptPtr source;
};

struct Node {
  Label label;
  int parent = -1;
  RoleSet edge;  // roles on the edge parent -> this
  std::vector<int> children;
  bool alive = true;
};

using Graph = std::vector<Node>;

}  // namespace

struct Reasoner::Impl {
  ReasonerLimits limits;
  std::mutex mutex;

  std::vector<Entry> entries;
  std::map<std::tuple<ConceptKind, int, int, std::vector<int>>, int> interned;
  std::map<std::string, int, std::less<>> atoms;
  std::vector<Role> roles;
  std::map<Role, int> role_ids;
  std::vector<std::pair<Role, Role>> inclusions;
  std::unordered_map<int, RoleSet> supers_memo;
  std::vector<int> functional;           // role ids
  std::map<int, std::vector<int>> unfold;  // atom id -> concepts implied by it
  std::vector<int> internal;             // added to every node
  std::unordered_map<int, bool> cache;
  int bottom_id = -1;
  std::size_t created = 0;

  int role_id(const Role& r) {
    auto [it, fresh] = role_ids.emplace(r, static_cast<int>(roles.size()));
    if (fresh) roles.push_back(r);
    return it->second;
  }

  int inverse(int r) { return role_id(roles[r].inv()); }

  // Reflexive-transitive closure of the role hierarchy, inverse-closed.
  const RoleSet& supers(int r) {
    if (auto it = supers_memo.find(r); it != supers_memo.end()) return it->second;
    RoleSet out{r};
    std::vector<Role> todo{roles[r]};
    while (!todo.empty()) {
      Role cur = todo.back();
      todo.pop_back();
      for (const auto& [sub, sup] : inclusions) {
        Role next;
        if (sub == cur) {
          next = sup;
        } else if (sub.inv() == cur) {
          next = sup.inv();
        } else {
          continue;
        }
        if (out.insert(role_id(next)).second) todo.push_back(next);
      }
    }
    return supers_memo[r] = std::move(out);
  }

  int atom_id(const std::string& name) {
    auto [it, fresh] = atoms.emplace(name, static_cast<int>(atoms.size()));
    return it->second;
  }

  int add(Entry e) {
    auto key = std::make_tuple(e.kind, e.atom, e.role, e.args);
    if (auto it = interned.find(key); it != interned.end()) return it->second;
    int id = static_cast<int>(entries.size());
    entries.push_back(std::move(e));
    interned.emplace(std::move(key), id);
    return id;
  }

  // `c` must be in negation normal form.
  int intern(const ConceptPtr& c) {
    Entry e;
    e.kind = c->kind;
    e.source = c;
    switch (c->kind) {
      case ConceptKind::Top:
      case ConceptKind::Bottom: break;
      case ConceptKind::Atomic: e.atom = atom_id(c->name); break;
      case ConceptKind::Not:
      case ConceptKind::And:
      case ConceptKind::Or:
        for (const auto& a : c->args) e.args.push_back(intern(a));
        break;
      case ConceptKind::Exists:
      case ConceptKind::Forall:
        e.role = role_id(c->role);
        e.args.push_back(intern(c->args[0]));
        break;
    }
    return add(std::move(e));
  }

  // --- completion graph ---------------------------------------------------

  bool is_neighbour_via(const RoleSet& edge_roles, int r) {
    for (int s : edge_roles) {
      if (supers(s).count(r)) return true;
    }
    return false;
  }

  // (neighbour, roles from x to neighbour)
  std::vector<std::pair<int, RoleSet>> neighbours(const Graph& g, int x) {
    std::vector<std::pair<int, RoleSet>> out;
    const Node& n = g[x];
    if (n.parent >= 0) {
      RoleSet up;
      for (int s : n.edge) up.insert(inverse(s));
      out.emplace_back(n.parent, std::move(up));
    }
    for (int c : n.children) {
      if (g[c].alive) out.emplace_back(c, g[c].edge);
    }
    return out;
  }

  int new_node(Graph& g, int parent, int role, int filler) {
    if (++created > limits.max_nodes) {
      throw Error(ErrorKind::ResourceLimit,
                  "tableau exceeded the node budget of " + std::to_string(limits.max_nodes));
    }
    Node n;
    n.parent = parent;
    if (role >= 0) n.edge.insert(role);
    n.label.insert(filler);
    n.label.insert(internal.begin(), internal.end());
    int id = static_cast<int>(g.size());
    g.push_back(std::move(n));
    if (parent >= 0) g[parent].children.push_back(id);
    return id;
  }

  void prune(Graph& g, int x) {
    g[x].alive = false;
    for (int c : g[x].children) {
      if (g[c].alive) prune(g, c);
    }
  }

  bool clash(const Graph& g) {
    for (const Node& n : g) {
      if (!n.alive) continue;
      if (n.label.count(bottom_id)) return true;
      for (int id : n.label) {
        const Entry& e = entries[id];
        if (e.kind == ConceptKind::Not && n.label.count(e.args[0])) return true;
      }
    }
    return false;
  }

  // Applies the and, unfolding and forall rules to a fixpoint.
  void propagate(Graph& g) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t x = 0; x < g.size(); ++x) {
        if (!g[x].alive) continue;
        std::vector<int> todo(g[x].label.begin(), g[x].label.end());
        while (!todo.empty()) {
          int id = todo.back();
          todo.pop_back();
          const Entry& e = entries[id];
          auto add_here = [&](int c) {
            if (g[x].label.insert(c).second) {
              todo.push_back(c);
              changed = true;
            }
          };
          if (e.kind == ConceptKind::And) {
            for (int a : e.args) add_here(a);
          } else if (e.kind == ConceptKind::Atomic) {
            if (auto it = unfold.find(e.atom); it != unfold.end()) {
              for (int c : it->second) add_here(c);
            }
          } else if (e.kind == ConceptKind::Forall) {
            int filler = e.args[0];
            for (auto& [y, via] : neighbours(g, static_cast<int>(x))) {
              if (is_neighbour_via(via, e.role) && g[y].label.insert(filler).second) changed = true;
            }
          }
        }
      }
    }
  }

  // Merges two neighbours reached through a functional role. Returns true
  // when the graph changed.
  bool merge_functional(Graph& g) {
    for (std::size_t x = 0; x < g.size(); ++x) {
      if (!g[x].alive) continue;
      for (int f : functional) {
        std::vector<std::pair<int, RoleSet>> hits;
        for (auto& nb : neighbours(g, static_cast<int>(x))) {
          if (is_neighbour_via(nb.second, f)) hits.push_back(std::move(nb));
        }
        if (hits.size() < 2) continue;
        // The parent, if present, comes first and absorbs the other node.
        auto& [keep, keep_via] = hits[0];
        auto& [drop, drop_via] = hits[1];
        Node& into = g[keep];
        into.label.insert(g[drop].label.begin(), g[drop].label.end());
        if (keep == g[x].parent) {
          for (int s : drop_via) g[x].edge.insert(inverse(s));
        } else {
          into.edge.insert(drop_via.begin(), drop_via.end());
        }
        prune(g, drop);
        return true;
      }
    }
    return false;
  }

  bool same_edge_and_labels(const Graph& g, int x, int y) {
    return g[x].label == g[y].label && g[g[x].parent].label == g[g[y].parent].label && g[x].edge == g[y].edge;
  }

  // Pairwise blocking: nodes are visited root-first, so ancestors are settled.
  std::vector<char> blocked(const Graph& g) {
    std::vector<char> out(g.size(), 0);
    for (std::size_t x = 0; x < g.size(); ++x) {
      if (!g[x].alive || g[x].parent < 0) continue;
      if (out[g[x].parent]) {
        out[x] = 2;  // indirectly
        continue;
      }
      for (int y = g[x].parent; y >= 0 && g[y].parent >= 0; y = g[y].parent) {
        if (same_edge_and_labels(g, static_cast<int>(x), y)) {
          out[x] = 1;
          break;
        }
      }
    }
    return out;
  }

  bool expand(Graph g) {
    for (;;) {
      propagate(g);
      if (clash(g)) return false;
      if (merge_functional(g)) continue;

      auto block = blocked(g);
      // Disjunction: branch on the first unresolved one.
      for (std::size_t x = 0; x < g.size(); ++x) {
        if (!g[x].alive || block[x] == 2) continue;
        for (int id : g[x].label) {
          const Entry& e = entries[id];
          if (e.kind != ConceptKind::Or) continue;
          if (std::any_of(e.args.begin(), e.args.end(), [&](int a) { return g[x].label.count(a) > 0; })) continue;
          for (int a : e.args) {
            Graph branch = g;
            branch[x].label.insert(a);
            if (expand(std::move(branch))) return true;
          }
          return false;
        }
      }

      bool generated = false;
      for (std::size_t x = 0; x < g.size() && !generated; ++x) {
        if (!g[x].alive || block[x]) continue;
        for (int id : g[x].label) {
          const Entry& e = entries[id];
          if (e.kind != ConceptKind::Exists) continue;
          int filler = e.args[0];
          bool witnessed = false;
          for (auto& [y, via] : neighbours(g, static_cast<int>(x))) {
            if (is_neighbour_via(via, e.role) && g[y].label.count(filler)) {
              witnessed = true;
              break;
            }
          }
          if (witnessed) continue;
          new_node(g, static_cast<int>(x), e.role, filler);
          generated = true;
          break;
        }
      }
      if (!generated) return true;
    }
  }

  bool satisfiable(const ConceptPtr& c) {
    int id = intern(nnf(c));
    if (auto it = cache.find(id); it != cache.end()) return it->second;
    created = 0;
    Graph g;
    new_node(g, -1, -1, id);
    bool result = expand(std::move(g));
    cache[id] = result;
    return result;
  }
};

Reasoner::Reasoner(Ontology ontology, ReasonerLimits limits)
    : ontology_(std::move(ontology)), impl_(std::make_unique<Impl>()) {
  Impl& m = *impl_;
  m.limits = limits;
  m.inclusions = ontology_.role_inclusions;
  m.bottom_id = m.intern(bottom());
  for (const Role& r : ontology_.functional) m.functional.push_back(m.role_id(r));

  auto axiom = [&](const ConceptPtr& sub, const ConceptPtr& sup) {
    ConceptPtr lhs = nnf(sub);
    if (lhs->kind == ConceptKind::Atomic) {
      m.unfold[m.atom_id(lhs->name)].push_back(m.intern(nnf(sup)));
    } else if (lhs->kind != ConceptKind::Bottom) {
      m.internal.push_back(m.intern(nnf(disj({negate(sub), sup}))));
    }
  };
  for (const auto& [sub, sup] : ontology_.gcis) axiom(sub, sup);
  for (const auto& [a, b] : ontology_.disjoint) {
    if (a->kind != ConceptKind::Atomic && b->kind == ConceptKind::Atomic) {
      axiom(b, negate(a));
    } else {
      axiom(a, negate(b));
    }
  }
}

Reasoner::~Reasoner() = default;

bool Reasoner::is_satisfiable(const ConceptPtr& c) {
  std::lock_guard lock(impl_->mutex);
  return impl_->satisfiable(c);
}

bool Reasoner::subsumes(const ConceptPtr& sup, const ConceptPtr& sub) {
  return !is_satisfiable(conj({sub, negate(sup)}));
}

bool is_satisfiable(const ConceptPtr& c, const Ontology& onto) { return Reasoner(onto).is_satisfiable(c); }

bool subsumes(const ConceptPtr& sup, const ConceptPtr& sub, const Ontology& onto) {
  return Reasoner(onto).subsumes(sup, sub);
}

std::vector<DetectedTrace> detect_trace(const SidpAxiom& a, const SidpAxiom& b, Reasoner& with_roles,
                                        Reasoner& without_roles) {
  ConceptPtr pa = a.phi();
  ConceptPtr pb = b.phi();
  if (!with_roles.is_satisfiable(conj({pa, pb}))) return {{TraceKind::Conflicts, a.source, b.source}};
  bool ab = with_roles.subsumes(pb, pa);
  bool ba = with_roles.subsumes(pa, pb);
  if (ab && ba) return {{TraceKind::Equals, a.source, b.source}};
  std::vector<DetectedTrace> out;
  auto entail = [&](const ConceptPtr& sub, const ConceptPtr& sup, const std::string& from, const std::string& to) {
    TraceKind kind = without_roles.subsumes(sup, sub) ? TraceKind::Refines : TraceKind::Requires;
    out.push_back({kind, from, to});
  };
  if (ab) entail(pa, pb, a.source, b.source);
  if (ba) entail(pb, pa, b.source, a.source);
  return out;
}

std::vector<DetectedTrace> detect_trace(const SidpAxiom& a, const SidpAxiom& b, const Ontology& onto) {
  Reasoner with_roles(onto);
  Reasoner without_roles(onto.without_role_inclusions());
  return detect_trace(a, b, with_roles, without_roles);
}

}  // namespace tracer::dl
