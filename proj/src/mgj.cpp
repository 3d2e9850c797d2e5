#include "ricci/mgj.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <sstream>

#include "ricci/errors.hpp"

namespace ricci {

using ojson = nlohmann::ordered_json;

namespace {

ojson vec2_array(const std::vector<Vec2>& v) {
  ojson a = ojson::array();
  for (const Vec2& p : v) a.push_back(ojson::array({p.x, p.y}));
  return a;
}

template <typename T>
const ojson& require(const ojson& obj, const char* key, T check, const char* what) {
  if (!obj.contains(key)) throw InvalidInput(std::string("missing key '") + key + "'");
  const ojson& v = obj.at(key);
  if (!check(v)) throw InvalidInput(std::string("key '") + key + "' must be " + what);
  return v;
}

auto is_array = [](const ojson& v) { return v.is_array(); };

std::vector<Vec2> parse_vec2_array(const ojson& a, const char* key) {
  std::vector<Vec2> out;
  out.reserve(a.size());
  for (const ojson& p : a) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw InvalidInput(std::string("'") + key + "' entries must be [x, y] number pairs");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

std::vector<double> parse_scalar_array(const ojson& a, const char* key) {
  std::vector<double> out;
  out.reserve(a.size());
  for (const ojson& v : a) {
    if (!v.is_number()) throw InvalidInput(std::string("'") + key + "' entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

NodeId parse_index(const ojson& v) {
  if (!v.is_number_unsigned()) throw InvalidInput("node indices must be non-negative integers");
  const auto x = v.get<std::uint64_t>();
  if (x > std::numeric_limits<NodeId>::max()) throw InvalidInput("node index too large");
  return static_cast<NodeId>(x);
}

ojson frame_to_json(const MeshGraph& g) {
  const NodeFields& f = g.fields();
  ojson frame = ojson::object();
  frame["positions"] = vec2_array(f.positions);
  ojson cells = ojson::array();
  for (const Cell& c : g.cells()) cells.push_back(ojson::array({c[0], c[1], c[2]}));
  frame["cells"] = std::move(cells);
  frame["node_type"] = f.node_type;
  frame["velocity"] = vec2_array(f.velocity);
  if (f.pressure) frame["pressure"] = *f.pressure;
  if (f.density) frame["density"] = *f.density;
  if (!g.edges_match_cells()) {
    ojson edges = ojson::array();
    for (const Edge& e : g.edges()) edges.push_back(ojson::array({e.u, e.v}));
    frame["edges"] = std::move(edges);
  }
  return frame;
}

MeshGraph frame_from_json(const ojson& frame) {
  if (!frame.is_object()) throw InvalidInput("frame must be an object");
  NodeFields f;
  f.positions = parse_vec2_array(require(frame, "positions", is_array, "an array"), "positions");
  f.velocity = parse_vec2_array(require(frame, "velocity", is_array, "an array"), "velocity");
  for (const ojson& t : require(frame, "node_type", is_array, "an array")) {
    if (!t.is_number_integer()) throw InvalidInput("'node_type' entries must be integers");
    f.node_type.push_back(t.get<int>());
  }
  if (frame.contains("pressure")) {
    f.pressure = parse_scalar_array(require(frame, "pressure", is_array, "an array"), "pressure");
  }
  if (frame.contains("density")) {
    f.density = parse_scalar_array(require(frame, "density", is_array, "an array"), "density");
  }
  std::vector<Cell> cells;
  for (const ojson& c : require(frame, "cells", is_array, "an array")) {
    if (!c.is_array() || c.size() != 3) throw InvalidInput("'cells' entries must be [i, j, k]");
    cells.push_back({parse_index(c[0]), parse_index(c[1]), parse_index(c[2])});
  }
  if (!frame.contains("edges")) return MeshGraph::from_cells(std::move(f), std::move(cells));
  std::vector<Edge> edges;
  for (const ojson& e : require(frame, "edges", is_array, "an array")) {
    if (!e.is_array() || e.size() != 2) throw InvalidInput("'edges' entries must be [i, j]");
    edges.push_back({parse_index(e[0]), parse_index(e[1])});
  }
  for (const Cell& c : cells) {
    if (c[0] == c[1] || c[1] == c[2] || c[0] == c[2]) throw InvalidInput("degenerate cell: repeated vertex");
  }
  return MeshGraph::from_edges(std::move(f), std::move(edges), std::move(cells));
}

ojson config_to_json(const RewireConfig& c) {
  ojson j = ojson::object();
  j["method"] = to_string(c.method);
  j["pooling_ratio"] = c.pooling_ratio;
  j["former"] = to_string(c.former);
  j["latter"] = to_string(c.latter);
  j["action"] = to_string(c.action);
  j["direction"] = to_string(c.direction);
  j["weighted"] = c.weighted;
  j["seed"] = c.seed;
  const MethodParams& p = c.params;
  j["params"] = {{"digl_alpha", p.digl_alpha},
                 {"digl_eps", p.digl_eps},
                 {"sdrf_iterations", p.sdrf_iterations},
                 {"fosr_initial_power", p.fosr_initial_power},
                 {"fosr_iterations", p.fosr_iterations},
                 {"borf_batches", p.borf_batches},
                 {"borf_add_per_batch", p.borf_add_per_batch},
                 {"borf_remove_per_batch", p.borf_remove_per_batch},
                 {"budget_seconds", p.budget_seconds}};
  return j;
}

RewireConfig config_from_json(const ojson& j) {
  try {
    RewireConfig c;
    c.method = parse_method(j.at("method").get<std::string>());
    c.pooling_ratio = j.at("pooling_ratio").get<double>();
    c.former = parse_former(j.at("former").get<std::string>());
    c.latter = parse_latter(j.at("latter").get<std::string>());
    c.action = parse_action(j.at("action").get<std::string>());
    c.direction = parse_direction(j.at("direction").get<std::string>());
    c.weighted = j.at("weighted").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    const ojson& p = j.at("params");
    c.params.digl_alpha = p.at("digl_alpha").get<double>();
    c.params.digl_eps = p.at("digl_eps").get<double>();
    c.params.sdrf_iterations = p.at("sdrf_iterations").get<std::size_t>();
    c.params.fosr_initial_power = p.at("fosr_initial_power").get<std::size_t>();
    c.params.fosr_iterations = p.at("fosr_iterations").get<std::size_t>();
    c.params.borf_batches = p.at("borf_batches").get<std::size_t>();
    c.params.borf_add_per_batch = p.at("borf_add_per_batch").get<std::size_t>();
    c.params.borf_remove_per_batch = p.at("borf_remove_per_batch").get<std::size_t>();
    c.params.budget_seconds = p.at("budget_seconds").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("edit log config: ") + e.what());
  }
}

}  // namespace

std::string serialize_trajectory(const Trajectory& t) {
  ojson root = ojson::object();
  root["version"] = 1;
  root["static_mesh"] = t.static_mesh;
  ojson frames = ojson::array();
  for (const MeshGraph& g : t.frames) frames.push_back(frame_to_json(g));
  root["frames"] = std::move(frames);
  return root.dump() + "\n";
}

Trajectory parse_trajectory(std::string_view text) {
  ojson root;
  try {
    root = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("trajectory is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw InvalidInput("trajectory root must be an object");
  const ojson& version = require(root, "version", [](const ojson& v) { return v.is_number_integer(); },
                                 "an integer");
  if (version.get<int>() != 1) throw InvalidInput("unsupported trajectory version");
  Trajectory t;
  t.static_mesh = require(root, "static_mesh", [](const ojson& v) { return v.is_boolean(); }, "a boolean")
                      .get<bool>();
  const ojson& frames = require(root, "frames", is_array, "an array");
  for (std::size_t k = 0; k < frames.size(); ++k) {
    try {
      t.frames.push_back(frame_from_json(frames[k]));
    } catch (const InvalidInput& e) {
      throw InvalidInput("frame " + std::to_string(k) + ": " + e.what());
    }
  }
  t.validate();
  return t;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Trajectory read_trajectory(const std::filesystem::path& path) { return parse_trajectory(read_text(path)); }

void write_trajectory(const std::filesystem::path& path, const Trajectory& t) {
  write_text(path, serialize_trajectory(t));
}

EditLog make_edit_log(const RewireConfig& cfg, TrajectoryMode mode, const std::vector<RewireResult>& results) {
  EditLog log;
  log.config = cfg;
  log.mode = mode;
  for (const RewireResult& r : results) {
    FrameEdits f{r.added, r.removed, r.stats};
    f.stats.seconds = 0.0;
    log.frames.push_back(std::move(f));
  }
  return log;
}

std::string serialize_edit_log(const EditLog& log) {
  ojson root = ojson::object();
  root["method"] = to_string(log.config.method);
  root["config"] = config_to_json(log.config);
  root["mode"] = to_string(log.mode);
  ojson frames = ojson::array();
  for (std::size_t k = 0; k < log.frames.size(); ++k) {
    const FrameEdits& f = log.frames[k];
    ojson jf = ojson::object();
    jf["frame"] = k;
    ojson added = ojson::array();
    for (const AddedEdge& a : f.added) added.push_back(ojson::array({a.source, a.target, to_string(a.direction)}));
    jf["added"] = std::move(added);
    ojson removed = ojson::array();
    for (const Edge& e : f.removed) removed.push_back(ojson::array({e.u, e.v}));
    jf["removed"] = std::move(removed);
    ojson stats = ojson::object();
    stats["added"] = f.stats.added;
    stats["removed"] = f.stats.removed;
    stats["timed_out"] = f.stats.timed_out;
    stats["curvature_computations"] = f.stats.curvature_computations;
    if (!f.stats.improvements.empty()) {
      ojson imp = ojson::array();
      for (const auto& [before, after] : f.stats.improvements) imp.push_back(ojson::array({before, after}));
      stats["improvements"] = std::move(imp);
    }
    if (!f.stats.note.empty()) stats["note"] = f.stats.note;
    jf["stats"] = std::move(stats);
    frames.push_back(std::move(jf));
  }
  root["frames"] = std::move(frames);
  return root.dump(2) + "\n";
}

EditLog parse_edit_log(std::string_view text) {
  ojson root;
  try {
    root = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("edit log is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw InvalidInput("edit log root must be an object");
  EditLog log;
  log.config = config_from_json(require(root, "config", [](const ojson& v) { return v.is_object(); }, "an object"));
  log.mode = parse_mode(require(root, "mode", [](const ojson& v) { return v.is_string(); }, "a string")
                            .get<std::string>());
  for (const ojson& jf : require(root, "frames", is_array, "an array")) {
    FrameEdits f;
    try {
      for (const ojson& a : jf.at("added")) {
        f.added.push_back({parse_index(a.at(0)), parse_index(a.at(1)), parse_direction(a.at(2).get<std::string>())});
      }
      for (const ojson& e : jf.at("removed")) f.removed.push_back({parse_index(e.at(0)), parse_index(e.at(1))});
      const ojson& s = jf.at("stats");
      f.stats.added = s.at("added").get<std::size_t>();
      f.stats.removed = s.at("removed").get<std::size_t>();
      f.stats.timed_out = s.at("timed_out").get<bool>();
      f.stats.curvature_computations = s.at("curvature_computations").get<std::size_t>();
      if (s.contains("improvements")) {
        for (const ojson& p : s.at("improvements")) {
          f.stats.improvements.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        }
      }
      if (s.contains("note")) f.stats.note = s.at("note").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("edit log frame: ") + e.what());
    }
    log.frames.push_back(std::move(f));
  }
  return log;
}

Trajectory replay(const Trajectory& input, const EditLog& log) {
  if (input.frames.size() != log.frames.size()) {
    throw InvalidInput("edit log has " + std::to_string(log.frames.size()) + " frames, input has " +
                       std::to_string(input.frames.size()));
  }
  Trajectory out;
  for (std::size_t k = 0; k < input.frames.size(); ++k) {
    out.frames.push_back(apply_edits(input.frames[k], log.frames[k].added, log.frames[k].removed));
  }
  // Per-frame edits can give a static input frames with differing edge sets.
  out.static_mesh = input.static_mesh;
  for (const MeshGraph& f : out.frames) {
    if (!std::ranges::equal(f.edges(), out.frames.front().edges())) out.static_mesh = false;
  }
  return out;
}

}  // namespace ricci
