#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tracer/forl.hpp"
#include "tracer/relational.hpp"

namespace tracer::trace {

struct TextSpan {
  std::string path;
  std::int64_t offset = 0;
  std::int64_t length = 0;
  friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

struct FileRef {
  std::string path;
  friend bool operator==(const FileRef&, const FileRef&) = default;
};

// XMI fragments are stored opaquely and never resolved.
struct XmiRef {
  std::string path;
  std::string fragment;
  friend bool operator==(const XmiRef&, const XmiRef&) = default;
};

struct JavaRef {
  std::string path;
  std::vector<std::string> ast_path;
  friend bool operator==(const JavaRef&, const JavaRef&) = default;
};

using LocationKind = std::variant<TextSpan, FileRef, XmiRef, JavaRef>;

struct TraceLocation {
  std::string id;
  LocationKind kind;
  std::optional<std::string> parent;
  friend bool operator==(const TraceLocation&, const TraceLocation&) = default;
};

// Where a link came from; inferred links keep their origin after acceptance.
enum class Provenance { Manual, DL, RL };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);  // throws MalformedDocument

struct TraceLink {
  std::string id;
  std::vector<std::string> endpoints;  // size >= 2
  std::optional<std::string> relation;
  Provenance provenance = Provenance::Manual;
  friend bool operator==(const TraceLink&, const TraceLink&) = default;
};

// Immutable workspace snapshot. Every mutation returns a copy with
// revision + 1; maps are keyed by id so iteration order is canonical.
struct TraceabilityInformation {
  std::map<std::string, TraceLocation> locations;
  std::map<std::string, TraceLink> links;
  std::map<std::string, std::string> types;  // location id -> sig name
  std::int64_t revision = 0;

  friend bool operator==(const TraceabilityInformation&, const TraceabilityInformation&) = default;

  // Id of a link with this relation and endpoints, if one exists.
  std::optional<std::string> find_link(std::string_view relation, const std::vector<std::string>& endpoints) const;
};

// Throws UnknownLocation, UnknownSignature or AbstractSignature.
TraceabilityInformation assign_type(const TraceabilityInformation& info, const std::string& location,
                                    const std::string& sig, const forl::TypedSpec& spec);

// Throws InvalidWorkspace for duplicate ids, dangling references or containment cycles.
TraceabilityInformation add_location(const TraceabilityInformation& info, TraceLocation location);
TraceabilityInformation add_link(const TraceabilityInformation& info, TraceLink link);
TraceabilityInformation remove_link(const TraceabilityInformation& info, const std::string& id);

// Fields whose arity matches and whose columns are supertypes of the
// endpoint types, in declaration order. Throws UntypedEndpoint.
std::vector<std::string> approximate_link_type(const TraceabilityInformation& info, const TraceLink& link,
                                               const forl::TypedSpec& spec);

// One atom per typed location (lexicographic by id). Sig values include the
// atoms of every sub-signature; field values come from typed links.
// Throws UntypedEndpoint, ArityMismatch, UnknownSignature, AbstractSignature,
// AmbiguousSignature or UnknownName.
rel::Instance to_relational(const TraceabilityInformation& info, const forl::TypedSpec& spec);

// Structural checks applied on load and after every mutation.
void validate(const TraceabilityInformation& info);

// Locations whose referenced document is missing, or whose text span lies
// outside it. Relative paths are resolved against `root`.
std::vector<std::string> broken_locations(const TraceabilityInformation& info, const std::filesystem::path& root);

// Canonical JSON document (sorted keys, arrays sorted by id, trailing newline).
std::string save(const TraceabilityInformation& info);
// Throws MalformedDocument (with line or JSON pointer) or InvalidWorkspace.
TraceabilityInformation load(std::string_view text);

}  // namespace tracer::trace
