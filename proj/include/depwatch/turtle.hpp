#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "depwatch/graph.hpp"

namespace depwatch {

/// Canonical Turtle rendering: sorted prefix block, subjects grouped and
/// sorted, rdf:type written first as `a`, one predicate-object pair per line
/// joined with `;`. The same graph always serializes to the same bytes.
std::string serialize_turtle(const Graph& g);

/// Parses the Turtle subset used by the pipeline's stores: prefix
/// directives, `a`, predicate lists with `;`, angle-bracket IRIs, prefixed
/// names, and plain or datatyped literals. Throws ParseError with line and
/// column on malformed input.
Graph parse_turtle(std::string_view text);

Graph load_turtle_file(const std::filesystem::path& path);
void save_turtle_file(const Graph& g, const std::filesystem::path& path);

/// Renders one term the way the serializer would (prefixed name when a
/// declared namespace applies, angle brackets otherwise).
std::string term_to_turtle(const Term& t, const Graph& prefix_source);

}  // namespace depwatch
