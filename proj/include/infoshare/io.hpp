#pragma once

// Spec files (JSON), CSV writers/readers and JSON reports.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "infoshare/conditions.hpp"
#include "infoshare/decomposition.hpp"
#include "infoshare/engine.hpp"
#include "infoshare/game.hpp"

namespace infoshare {

struct SpecFile {
  GameSpec spec;
  std::optional<std::uint64_t> seed;
};

/// Throws ParseError naming the line (syntax) or field (content) at fault.
SpecFile parse_spec(const std::string& text, const std::string& source = "<spec>");
SpecFile load_spec(const std::string& path);

/// Shortest round-trip decimal form.
std::string format_double(double x);

void write_trace_csv(std::ostream& os, const EpisodeTrace& trace);
/// Inverse of write_trace_csv; discount and seed are not stored in the CSV.
EpisodeTrace read_trace_csv(std::istream& is, double discount);

void write_continuation_csv(std::ostream& os, const ContinuationMap& map);
void write_vertices_csv(std::ostream& os, const std::vector<std::vector<double>>& vertices);
void write_halfspaces_csv(std::ostream& os, const std::vector<HalfSpace>& halfspaces);

std::string report_json(const ConditionReport& report, int indent = 2);
std::string assumptions_json(const AssumptionReport& report, int indent = 2);

}  // namespace infoshare
