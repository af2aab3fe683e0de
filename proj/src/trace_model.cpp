#include <algorithm>
#include <fstream>
#include <set>

#include "tracer/error.hpp"
#include "tracer/trace_model.hpp"

namespace tracer::trace {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Manual: return "manual";
    case Provenance::DL: return "DL";
    case Provenance::RL: return "RL";
  }
  return "manual";
}

Provenance parse_provenance(std::string_view text) {
  if (text == "manual") return Provenance::Manual;
  if (text == "DL") return Provenance::DL;
  if (text == "RL") return Provenance::RL;
  throw Error(ErrorKind::MalformedDocument, "unknown provenance '" + std::string(text) + "'");
}

std::optional<std::string> TraceabilityInformation::find_link(std::string_view relation,
                                                              const std::vector<std::string>& endpoints) const {
  for (const auto& [id, link] : links) {
    if (link.relation && *link.relation == relation && link.endpoints == endpoints) return id;
  }
  return std::nullopt;
}

namespace {

const forl::SigInfo& require_sig(const forl::TypedSpec& spec, const std::string& name) {
  const forl::SigInfo* s = spec.sig(name);
  if (!s) throw Error(ErrorKind::UnknownSignature, "unknown signature '" + name + "'");
  if (s->is_abstract) throw Error(ErrorKind::AbstractSignature, "signature '" + name + "' is abstract");
  return *s;
}

// Every sig an atom of type `sig` belongs to, including `sig` itself.
std::vector<std::string> memberships(const forl::TypedSpec& spec, const std::string& sig) {
  std::vector<std::string> out;
  std::string current = sig;
  for (;;) {
    out.push_back(current);
    const forl::SigInfo* s = spec.sig(current);
    if (!s || s->parents.empty()) return out;
    if (s->parents.size() > 1) {
      throw Error(ErrorKind::AmbiguousSignature, "signature '" + s->name +
                                                     "' is a subset of several sigs; assign one of them instead");
    }
    current = s->parents.front();
  }
}

const std::string& endpoint_type(const TraceabilityInformation& info, const std::string& link,
                                 const std::string& endpoint) {
  auto it = info.types.find(endpoint);
  if (it == info.types.end()) {
    throw Error(ErrorKind::UntypedEndpoint, "endpoint '" + endpoint + "' of link '" + link + "' has no type");
  }
  return it->second;
}

}  // namespace

void validate(const TraceabilityInformation& info) {
  auto fail = [](const std::string& message) { throw Error(ErrorKind::InvalidWorkspace, message); };
  for (const auto& [id, loc] : info.locations) {
    if (id != loc.id) fail("location key '" + id + "' does not match its id");
    if (id.empty()) fail("location with an empty id");
    if (loc.parent && !info.locations.count(*loc.parent)) {
      fail("location '" + id + "' has unknown parent '" + *loc.parent + "'");
    }
    if (const auto* text = std::get_if<TextSpan>(&loc.kind)) {
      if (text->offset < 0 || text->length < 0) fail("location '" + id + "' has a negative offset or length");
    }
    if (info.links.count(id)) fail("id '" + id + "' names both a location and a link");
  }
  for (const auto& [id, loc] : info.locations) {
    std::set<std::string> seen{id};
    for (auto p = loc.parent; p; p = info.locations.at(*p).parent) {
      if (!seen.insert(*p).second) fail("containment cycle through location '" + id + "'");
    }
  }
  for (const auto& [id, link] : info.links) {
    if (id != link.id) fail("link key '" + id + "' does not match its id");
    if (link.endpoints.size() < 2) fail("link '" + id + "' needs at least two endpoints");
    for (const auto& e : link.endpoints) {
      if (!info.locations.count(e)) fail("link '" + id + "' references unknown location '" + e + "'");
    }
  }
  for (const auto& [loc, sig] : info.types) {
    if (!info.locations.count(loc)) fail("type assigned to unknown location '" + loc + "'");
    if (sig.empty()) fail("empty signature name for location '" + loc + "'");
  }
  if (info.revision < 0) fail("negative revision");
}

TraceabilityInformation assign_type(const TraceabilityInformation& info, const std::string& location,
                                    const std::string& sig, const forl::TypedSpec& spec) {
  if (!info.locations.count(location)) {
    throw Error(ErrorKind::UnknownLocation, "unknown location '" + location + "'");
  }
  require_sig(spec, sig);
  TraceabilityInformation out = info;
  out.types[location] = sig;
  ++out.revision;
  return out;
}

TraceabilityInformation add_location(const TraceabilityInformation& info, TraceLocation location) {
  if (info.locations.count(location.id)) {
    throw Error(ErrorKind::InvalidWorkspace, "duplicate location id '" + location.id + "'");
  }
  TraceabilityInformation out = info;
  std::string id = location.id;
  out.locations.emplace(id, std::move(location));
  validate(out);
  ++out.revision;
  return out;
}

TraceabilityInformation add_link(const TraceabilityInformation& info, TraceLink link) {
  if (info.links.count(link.id)) throw Error(ErrorKind::InvalidWorkspace, "duplicate link id '" + link.id + "'");
  TraceabilityInformation out = info;
  std::string id = link.id;
  out.links.emplace(id, std::move(link));
  validate(out);
  ++out.revision;
  return out;
}

TraceabilityInformation remove_link(const TraceabilityInformation& info, const std::string& id) {
  if (!info.links.count(id)) throw Error(ErrorKind::UnknownLocation, "unknown link '" + id + "'");
  TraceabilityInformation out = info;
  out.links.erase(id);
  ++out.revision;
  return out;
}

std::vector<std::string> approximate_link_type(const TraceabilityInformation& info, const TraceLink& link,
                                               const forl::TypedSpec& spec) {
  std::vector<std::string> types;
  for (const auto& e : link.endpoints) types.push_back(endpoint_type(info, link.id, e));
  std::vector<std::string> out;
  for (const auto& r : spec.relations) {
    if (r.is_sig || r.columns.size() != types.size()) continue;
    bool fits = true;
    for (std::size_t i = 0; i < types.size() && fits; ++i) fits = spec.is_subsig(types[i], r.columns[i]);
    if (fits) out.push_back(r.name);
  }
  return out;
}

rel::Instance to_relational(const TraceabilityInformation& info, const forl::TypedSpec& spec) {
  rel::Instance inst;
  for (const auto& [loc, sig] : info.types) {
    if (!info.locations.count(loc)) throw Error(ErrorKind::UnknownLocation, "unknown location '" + loc + "'");
    inst.universe.add(loc);
  }
  for (const auto& r : spec.relations) inst.relations.emplace(r.name, rel::TupleSet(r.arity()));
  for (const auto& [loc, sig] : info.types) {
    require_sig(spec, sig);
    rel::Atom a = inst.universe.at(loc);
    for (const auto& s : memberships(spec, sig)) inst.relations.at(s).insert({a});
  }
  for (const auto& [id, link] : info.links) {
    if (!link.relation) continue;
    const forl::Relation* r = spec.relation(*link.relation);
    if (!r || r->is_sig) {
      throw Error(ErrorKind::UnknownName, "link '" + id + "' uses undeclared relation '" + *link.relation + "'");
    }
    if (static_cast<int>(link.endpoints.size()) != r->arity()) {
      throw Error(ErrorKind::ArityMismatch, "link '" + id + "' has " + std::to_string(link.endpoints.size()) +
                                                " endpoints but '" + r->name + "' has arity " +
                                                std::to_string(r->arity()));
    }
    rel::Tuple t;
    for (const auto& e : link.endpoints) {
      endpoint_type(info, id, e);
      t.push_back(inst.universe.at(e));
    }
    inst.relations.at(r->name).insert(std::move(t));
  }
  return inst;
}

namespace {

std::int64_t count_code_points(const std::string& bytes) {
  return std::count_if(bytes.begin(), bytes.end(),
                       [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; });
}

}  // namespace

std::vector<std::string> broken_locations(const TraceabilityInformation& info, const std::filesystem::path& root) {
  std::vector<std::string> out;
  for (const auto& [id, loc] : info.locations) {
    const std::string& path = std::visit([](const auto& k) -> const std::string& { return k.path; }, loc.kind);
    std::filesystem::path p = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : root / path;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) {
      out.push_back(id);
      continue;
    }
    if (const auto* text = std::get_if<TextSpan>(&loc.kind)) {
      std::ifstream in(p, std::ios::binary);
      std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      if (text->offset + text->length > count_code_points(content)) out.push_back(id);
    }
  }
  return out;
}

}  // namespace tracer::trace
