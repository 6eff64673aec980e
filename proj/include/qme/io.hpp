// Input/output: config-file parsing, CSV/JSON/SVG writers, and generator
// serialisation.  All floating-point output uses shortest round-trip
// formatting, so identical runs produce byte-identical files.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qme/liouvillian.hpp"
#include "qme/scenario.hpp"

namespace qme {

// --- numbers -----------------------------------------------------------------

std::string format_double(double v);  // shortest round-trip decimal form

// --- config files ------------------------------------------------------------

// Key-value format with [section] headers, '#' comments, and comma-separated
// lists; see presets/*.conf for annotated examples of every run kind.
ScenarioConfig parse_config_text(const std::string& text,
                                 const std::string& name_hint);
ScenarioConfig load_config(const std::filesystem::path& file);

// Renders a scenario back into the config format (the presets/ files are
// checked against this in the tests to prevent drift).
std::string render_config(const ScenarioConfig& cfg);

// --- results -----------------------------------------------------------------

void write_csv(const Table& table, const std::filesystem::path& file);
void write_table_json(const Table& table, const std::filesystem::path& file);
void write_svg(const Table& table, const std::filesystem::path& file);

// Trajectory archive: metadata, time grid, and full states with complex
// entries stored as [re, im] pairs.  Round-trips bit-exactly.
void write_trajectory_json(const Trajectory& traj, const std::string& label,
                           const std::filesystem::path& file);
Trajectory read_trajectory_json(const std::filesystem::path& file);

// Generator archive for regression snapshots; round-trips bit-exactly.
void write_liouvillian_json(const Liouvillian& l,
                            const std::filesystem::path& file);
struct LiouvillianSnapshot {
  Mat16 matrix, ham_part, lamb_part, diss_part;
  std::vector<Mat16> bath_generators;
  std::string variant, construction;
};
LiouvillianSnapshot read_liouvillian_json(const std::filesystem::path& file);

// Writes every table (and, for trajectory runs, per-variant archives) of a
// result in the requested formats ("csv", "json", "svg").  Returns the list
// of files written.
std::vector<std::filesystem::path> write_outputs(
    const RunResult& result, const std::filesystem::path& out_dir,
    const std::vector<std::string>& formats);

}  // namespace qme
