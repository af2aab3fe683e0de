#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "tracer/trace_model.hpp"

namespace tracer::trace {
namespace {

using testing::sidp_spec;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Internal;
}

TraceabilityInformation small() {
  TraceabilityInformation info;
  info = add_location(info, {"a", FileRef{"a.md"}, std::nullopt});
  info = add_location(info, {"b", TextSpan{"b.txt", 0, 4}, std::nullopt});
  info = add_location(info, {"c", XmiRef{"m.uml", "//@packagedElement.0"}, std::string("a")});
  info = add_location(info, {"d", JavaRef{"D.java", {"D", "run()"}}, std::nullopt});
  info = assign_type(info, "a", "Requirement", sidp_spec());
  info = assign_type(info, "b", "Specification", sidp_spec());
  info = add_link(info, {"l1", {"a", "b"}, std::string("refines"), Provenance::Manual});
  info = add_link(info, {"l2", {"a", "c"}, std::nullopt, Provenance::DL});
  return info;
}

TEST(TraceModel, MutationsBumpRevisionAndKeepInputs) {
  TraceabilityInformation empty;
  TraceabilityInformation one = add_location(empty, {"a", FileRef{"a.md"}, std::nullopt});
  EXPECT_EQ(empty.revision, 0);
  EXPECT_TRUE(empty.locations.empty());
  EXPECT_EQ(one.revision, 1);
  EXPECT_EQ(small().revision, 8);
  TraceabilityInformation removed = remove_link(small(), "l1");
  EXPECT_FALSE(removed.links.count("l1"));
  EXPECT_EQ(removed.revision, 9);
}

TEST(TraceModel, SaveLoadRoundTripIsCanonical) {
  TraceabilityInformation info = small();
  std::string text = save(info);
  TraceabilityInformation back = load(text);
  EXPECT_EQ(back, info);
  EXPECT_EQ(save(back), text);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(save(testing::workspace("table1.trace.json")), testing::data("table1.trace.json"));
}

TEST(TraceModel, LoadErrors) {
  EXPECT_EQ(kind_of([] { load("{"); }), ErrorKind::MalformedDocument);
  EXPECT_EQ(kind_of([] { load("[]"); }), ErrorKind::MalformedDocument);
  EXPECT_EQ(kind_of([] { load(R"({"version":2,"revision":0,"locations":[],"links":[],"types":{}})"); }),
            ErrorKind::MalformedDocument);
  EXPECT_EQ(kind_of([] {
              load(R"({"version":1,"revision":0,"locations":[{"id":"a","kind":"blob","path":"x"}],"links":[],"types":{}})");
            }),
            ErrorKind::MalformedDocument);
  EXPECT_EQ(kind_of([] {
              load(R"({"version":1,"revision":0,"locations":[],"links":[{"id":"l","endpoints":["a","b"]}],"types":{}})");
            }),
            ErrorKind::InvalidWorkspace);
  try {
    load(R"({"version":1,"revision":0,"locations":[{"id":"a","kind":"text","path":"x","offset":-1,"length":2}],"links":[],"types":{}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/locations/0/offset"), std::string::npos) << e.what();
  }
}

TEST(TraceModel, StructuralErrors) {
  TraceabilityInformation info = small();
  EXPECT_EQ(kind_of([&] { add_location(info, {"a", FileRef{"x"}, std::nullopt}); }), ErrorKind::InvalidWorkspace);
  EXPECT_EQ(kind_of([&] { add_location(info, {"z", FileRef{"x"}, std::string("nope")}); }),
            ErrorKind::InvalidWorkspace);
  EXPECT_EQ(kind_of([&] { add_link(info, {"l1", {"a", "b"}, std::nullopt, Provenance::Manual}); }),
            ErrorKind::InvalidWorkspace);
  EXPECT_EQ(kind_of([&] { add_link(info, {"l9", {"a"}, std::nullopt, Provenance::Manual}); }),
            ErrorKind::InvalidWorkspace);
  EXPECT_EQ(kind_of([&] { add_link(info, {"l9", {"a", "q"}, std::nullopt, Provenance::Manual}); }),
            ErrorKind::InvalidWorkspace);
  EXPECT_EQ(kind_of([&] { remove_link(info, "l9"); }), ErrorKind::UnknownLocation);
}

TEST(TraceModel, TypeAssignmentErrors) {
  TraceabilityInformation info = small();
  EXPECT_EQ(kind_of([&] { assign_type(info, "q", "Requirement", sidp_spec()); }), ErrorKind::UnknownLocation);
  EXPECT_EQ(kind_of([&] { assign_type(info, "c", "Widget", sidp_spec()); }), ErrorKind::UnknownSignature);
  EXPECT_EQ(kind_of([&] { assign_type(info, "c", "Artifact", sidp_spec()); }), ErrorKind::AbstractSignature);
}

TEST(TraceModel, LinkTypeApproximation) {
  TraceabilityInformation info = small();
  const TraceLink& l1 = info.links.at("l1");
  EXPECT_EQ(approximate_link_type(info, l1, sidp_spec()),
            (std::vector<std::string>{"contains", "refines", "requires", "conflicts", "equals"}));
  EXPECT_EQ(kind_of([&] { approximate_link_type(info, info.links.at("l2"), sidp_spec()); }),
            ErrorKind::UntypedEndpoint);
}

TEST(TraceModel, ToRelational) {
  rel::Instance inst = testing::instance("table1.trace.json");
  EXPECT_EQ(inst.universe.atoms(), (std::vector<std::string>{"r1", "r2", "r3", "r4", "r5", "r6"}));
  EXPECT_EQ(inst.value("Requirement").size(), 6u);
  EXPECT_EQ(inst.value("Artifact").size(), 6u);
  EXPECT_TRUE(inst.value("Specification").empty());
  EXPECT_EQ(inst.value("refines").size(), 4u);
  EXPECT_TRUE(inst.value("conflicts").contains({4, 5}));
  EXPECT_TRUE(inst.value("conflicts").contains({5, 4}));
  EXPECT_TRUE(inst.value("requires").contains({3, 4}));
}

TEST(TraceModel, ToRelationalErrors) {
  TraceabilityInformation info = small();
  // l2 has no relation, so it does not contribute; c is untyped but unused.
  EXPECT_NO_THROW(to_relational(info, sidp_spec()));
  TraceabilityInformation bad = add_link(info, {"l3", {"a", "d"}, std::string("refines"), Provenance::Manual});
  EXPECT_EQ(kind_of([&] { to_relational(bad, sidp_spec()); }), ErrorKind::UntypedEndpoint);
  bad = add_link(info, {"l3", {"a", "b", "a"}, std::string("refines"), Provenance::Manual});
  EXPECT_EQ(kind_of([&] { to_relational(bad, sidp_spec()); }), ErrorKind::ArityMismatch);
  bad = add_link(info, {"l3", {"a", "b"}, std::string("blocks"), Provenance::Manual});
  EXPECT_EQ(kind_of([&] { to_relational(bad, sidp_spec()); }), ErrorKind::UnknownName);
}

TEST(TraceModel, AmbiguousSubsetSignature) {
  forl::TypedSpec spec = forl::load_spec("sig A {}\nsig B {}\nsig C in A + B {}\n");
  TraceabilityInformation info = add_location({}, {"x", FileRef{"x"}, std::nullopt});
  info = assign_type(info, "x", "C", spec);
  EXPECT_EQ(kind_of([&] { to_relational(info, spec); }), ErrorKind::AmbiguousSignature);
}

TEST(TraceModel, BrokenLocations) {
  auto root = std::filesystem::temp_directory_path() / "tracer-broken-locations";
  std::filesystem::create_directories(root);
  std::ofstream(root / "a.md") << "hello";
  std::ofstream(root / "b.txt") << "abc";
  TraceabilityInformation info = small();
  // b.txt is 3 bytes, the span needs 4; the other documents do not exist.
  EXPECT_EQ(broken_locations(info, root), (std::vector<std::string>{"b", "c", "d"}));
  std::filesystem::remove_all(root);
}

TEST(TraceModel, FindLink) {
  TraceabilityInformation info = small();
  EXPECT_EQ(info.find_link("refines", {"a", "b"}), std::optional<std::string>("l1"));
  EXPECT_FALSE(info.find_link("refines", {"b", "a"}).has_value());
}

}  // namespace
}  // namespace tracer::trace
