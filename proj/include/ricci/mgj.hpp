#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ricci/graph.hpp"
#include "ricci/rewiring.hpp"

namespace ricci {

// Trajectory file, JSON:
//   {"version": 1, "static_mesh": bool, "frames": [
//     {"positions": [[x, y]...], "cells": [[i, j, k]...], "node_type": [int...],
//      "velocity": [[u, v]...], "pressure": [p...]?, "density": [rho...]?,
//      "edges": [[i, j]...]?}]}
// Keys are written in that order, floats in shortest round-trip form, and
// "edges" only when the edge set is not exactly the cell sides (rewired
// graphs). Serialization is canonical: parse(serialize(t)) == t and
// serialize(parse(s)) == s for any s this function produced.
std::string serialize_trajectory(const Trajectory& t);

// Throws InvalidInput on malformed input.
Trajectory parse_trajectory(std::string_view text);

Trajectory read_trajectory(const std::filesystem::path& path);
void write_trajectory(const std::filesystem::path& path, const Trajectory& t);

struct FrameEdits {
  std::vector<AddedEdge> added;
  std::vector<Edge> removed;
  RewireStats stats;  // wall time is not persisted

  friend bool operator==(const FrameEdits&, const FrameEdits&) = default;
};

// Edit log of one rewiring run: the configuration echo and per-frame edits.
struct EditLog {
  RewireConfig config;
  TrajectoryMode mode = TrajectoryMode::per_frame;
  std::vector<FrameEdits> frames;

  friend bool operator==(const EditLog&, const EditLog&) = default;
};

EditLog make_edit_log(const RewireConfig& cfg, TrajectoryMode mode, const std::vector<RewireResult>& results);

std::string serialize_edit_log(const EditLog& log);
EditLog parse_edit_log(std::string_view text);

// Applies each frame's edits to the matching input frame.
// Throws InvalidInput when frame counts differ.
Trajectory replay(const Trajectory& input, const EditLog& log);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace ricci
