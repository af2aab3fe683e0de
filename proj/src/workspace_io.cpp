#include <json.hpp>

#include "tracer/error.hpp"
#include "tracer/trace_model.hpp"

namespace tracer::trace {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& pointer, const std::string& message) {
  throw Error(ErrorKind::MalformedDocument, (pointer.empty() ? std::string("/") : pointer) + ": " + message);
}

const json& member(const json& object, const std::string& pointer, const char* key) {
  auto it = object.find(key);
  if (it == object.end()) malformed(pointer, std::string("missing field '") + key + "'");
  return *it;
}

std::string string_at(const json& object, const std::string& pointer, const char* key) {
  const json& v = member(object, pointer, key);
  if (!v.is_string()) malformed(pointer + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::int64_t count_at(const json& object, const std::string& pointer, const char* key) {
  const json& v = member(object, pointer, key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    malformed(pointer + "/" + key, "expected a non-negative integer");
  }
  return v.get<std::int64_t>();
}

json location_json(const TraceLocation& loc) {
  json j;
  j["id"] = loc.id;
  if (loc.parent) j["parent"] = *loc.parent;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        j["path"] = k.path;
        if constexpr (std::is_same_v<K, TextSpan>) {
          j["kind"] = "text";
          j["offset"] = k.offset;
          j["length"] = k.length;
        } else if constexpr (std::is_same_v<K, FileRef>) {
          j["kind"] = "file";
        } else if constexpr (std::is_same_v<K, XmiRef>) {
          j["kind"] = "xmi";
          j["fragment"] = k.fragment;
        } else {
          j["kind"] = "java";
          j["astPath"] = k.ast_path;
        }
      },
      loc.kind);
  return j;
}

TraceLocation location_from(const json& j, const std::string& pointer) {
  if (!j.is_object()) malformed(pointer, "expected an object");
  TraceLocation loc;
  loc.id = string_at(j, pointer, "id");
  std::string kind = string_at(j, pointer, "kind");
  std::string path = string_at(j, pointer, "path");
  if (kind == "text") {
    loc.kind = TextSpan{path, count_at(j, pointer, "offset"), count_at(j, pointer, "length")};
  } else if (kind == "file") {
    loc.kind = FileRef{path};
  } else if (kind == "xmi") {
    loc.kind = XmiRef{path, string_at(j, pointer, "fragment")};
  } else if (kind == "java") {
    const json& ast = member(j, pointer, "astPath");
    if (!ast.is_array()) malformed(pointer + "/astPath", "expected an array of strings");
    JavaRef ref{path, {}};
    for (std::size_t i = 0; i < ast.size(); ++i) {
      if (!ast[i].is_string()) malformed(pointer + "/astPath/" + std::to_string(i), "expected a string");
      ref.ast_path.push_back(ast[i].get<std::string>());
    }
    loc.kind = std::move(ref);
  } else {
    malformed(pointer + "/kind", "unknown location kind '" + kind + "'");
  }
  if (j.contains("parent")) loc.parent = string_at(j, pointer, "parent");
  return loc;
}

json link_json(const TraceLink& link) {
  json j;
  j["id"] = link.id;
  j["endpoints"] = link.endpoints;
  if (link.relation) j["relation"] = *link.relation;
  j["provenance"] = std::string(to_string(link.provenance));
  return j;
}

TraceLink link_from(const json& j, const std::string& pointer) {
  if (!j.is_object()) malformed(pointer, "expected an object");
  TraceLink link;
  link.id = string_at(j, pointer, "id");
  const json& ends = member(j, pointer, "endpoints");
  if (!ends.is_array()) malformed(pointer + "/endpoints", "expected an array of location ids");
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (!ends[i].is_string()) malformed(pointer + "/endpoints/" + std::to_string(i), "expected a string");
    link.endpoints.push_back(ends[i].get<std::string>());
  }
  if (j.contains("relation")) link.relation = string_at(j, pointer, "relation");
  if (j.contains("provenance")) {
    try {
      link.provenance = parse_provenance(string_at(j, pointer, "provenance"));
    } catch (const Error& e) {
      malformed(pointer + "/provenance", e.what());
    }
  }
  return link;
}

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::string save(const TraceabilityInformation& info) {
  json doc;
  doc["version"] = 1;
  doc["revision"] = info.revision;
  doc["locations"] = json::array();
  for (const auto& [id, loc] : info.locations) doc["locations"].push_back(location_json(loc));
  doc["links"] = json::array();
  for (const auto& [id, link] : info.links) doc["links"].push_back(link_json(link));
  doc["types"] = json::object();
  for (const auto& [loc, sig] : info.types) doc["types"][loc] = sig;
  return doc.dump(2) + "\n";
}

TraceabilityInformation load(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = position_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::MalformedDocument,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": invalid JSON");
  }
  if (!doc.is_object()) malformed("", "expected a JSON object");
  const json& version = member(doc, "", "version");
  if (!version.is_number_integer() || version.get<int>() != 1) malformed("/version", "unsupported version");

  TraceabilityInformation info;
  info.revision = count_at(doc, "", "revision");
  const json& locations = member(doc, "", "locations");
  if (!locations.is_array()) malformed("/locations", "expected an array");
  for (std::size_t i = 0; i < locations.size(); ++i) {
    std::string pointer = "/locations/" + std::to_string(i);
    TraceLocation loc = location_from(locations[i], pointer);
    std::string id = loc.id;
    if (!info.locations.emplace(id, std::move(loc)).second) malformed(pointer + "/id", "duplicate id '" + id + "'");
  }
  const json& links = member(doc, "", "links");
  if (!links.is_array()) malformed("/links", "expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    std::string pointer = "/links/" + std::to_string(i);
    TraceLink link = link_from(links[i], pointer);
    std::string id = link.id;
    if (!info.links.emplace(id, std::move(link)).second) malformed(pointer + "/id", "duplicate id '" + id + "'");
  }
  const json& types = member(doc, "", "types");
  if (!types.is_object()) malformed("/types", "expected an object");
  for (const auto& [loc, sig] : types.items()) {
    if (!sig.is_string()) malformed("/types/" + loc, "expected a signature name");
    info.types.emplace(loc, sig.get<std::string>());
  }
  validate(info);
  return info;
}

}  // namespace tracer::trace
