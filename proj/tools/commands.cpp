#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ricci/curvature.hpp"
#include "ricci/diagnostics.hpp"
#include "ricci/errors.hpp"
#include "ricci/meshgen.hpp"
#include "ricci/mgj.hpp"
#include "ricci/rewiring.hpp"

namespace ricci::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& flag, const std::string& s, std::size_t count) {
  std::vector<double> out;
  for (const std::string& item : split_list(s)) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw InvalidInput(flag + ": '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.size() != count) {
    throw InvalidInput(flag + ": expected " + std::to_string(count) + " comma-separated numbers");
  }
  return out;
}

// Sibling path: report.json -> report<suffix>.
fs::path with_suffix(const fs::path& base, const std::string& suffix) {
  fs::path out = base;
  out.replace_filename(base.stem().string() + suffix);
  return out;
}

json optional_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  MeshSpec spec;
  std::string domain;
  std::string obstacle;
  std::optional<double> refine;
  std::string output;
};

void add_gen(CLI::App& app, GenArgs& a) {
  auto* c = app.add_subcommand("gen", "Generate a synthetic cylinder-flow mesh trajectory");
  c->add_option("--nx", a.spec.nx, "Cells along x")->check(CLI::Range(2, 1 << 20));
  c->add_option("--ny", a.spec.ny, "Cells along y")->check(CLI::Range(2, 1 << 20));
  c->add_option("--domain", a.domain, "x_min,x_max,y_min,y_max");
  c->add_option("--obstacle", a.obstacle, "Cylinder cx,cy,radius");
  c->add_option("--refine", a.refine, "Refine cells within this distance of the cylinder")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--speed", a.spec.inflow_speed, "Free-stream speed");
  c->add_option("--frames", a.spec.frames, "Number of frames")->check(CLI::Range(1, 1 << 20));
  c->add_option("--dt", a.spec.time_step, "Time step between frames")->check(CLI::PositiveNumber);
  c->add_option("-o,--output", a.output, "Output .mgj file")->required();
}

int cmd_gen(GenArgs& a, std::ostream& out) {
  if (!a.domain.empty()) {
    const auto d = parse_numbers("--domain", a.domain, 4);
    a.spec.x_min = d[0];
    a.spec.x_max = d[1];
    a.spec.y_min = d[2];
    a.spec.y_max = d[3];
  }
  if (!a.obstacle.empty()) {
    const auto d = parse_numbers("--obstacle", a.obstacle, 3);
    a.spec.obstacle = Disk{{d[0], d[1]}, d[2]};
  }
  if (a.refine) {
    if (!a.spec.obstacle) throw InvalidInput("--refine requires --obstacle");
    a.spec.refine_radius = *a.refine;
  }
  const Trajectory t = generate(a.spec);
  write_trajectory(a.output, t);
  out << "wrote " << a.output << ": " << t.frames.size() << " frame(s), "
      << t.frames.front().node_count() << " nodes, " << t.frames.front().edge_count() << " edges\n";
  return exit_ok;
}

// ---- curvature -------------------------------------------------------------

struct CurvatureArgs {
  std::string input;
  bool weighted = false;
  std::string output = "curvature.json";
};

void add_curvature(CLI::App& app, CurvatureArgs& a) {
  auto* c = app.add_subcommand("curvature", "Ollivier-Ricci curvature of every edge and node");
  c->add_option("input", a.input, "Input .mgj file")->required();
  c->add_flag("--weighted", a.weighted, "Use velocity-difference edge lengths");
  c->add_option("--out", a.output, "JSON summary; CSVs are written next to it");
}

int cmd_curvature(const CurvatureArgs& a, std::ostream& out) {
  const Trajectory t = read_trajectory(a.input);
  json summary;
  summary["input"] = fs::path(a.input).filename().string();
  summary["weighted"] = a.weighted;
  json frames = json::array();
  for (std::size_t k = 0; k < t.frames.size(); ++k) {
    const MeshGraph& g = t.frames[k];
    CurvatureReport r;
    try {
      r = full_report(g, a.weighted);
    } catch (const TransportError& e) {
      throw TransportError("frame " + std::to_string(k) + ": " + e.what());
    }

    const std::string tag = ".f" + std::to_string(k);
    std::string edges_csv = "i,j,kappa\n";
    for (std::size_t e = 0; e < r.edges.size(); ++e) {
      edges_csv += std::to_string(r.edges[e].u) + "," + std::to_string(r.edges[e].v) + "," +
                   format_double(r.edge_curvature[e]) + "\n";
    }
    std::string nodes_csv = "i,gamma\n";
    for (std::size_t i = 0; i < r.node_curvature.size(); ++i) {
      if (r.node_curvature[i]) nodes_csv += std::to_string(i) + "," + format_double(*r.node_curvature[i]) + "\n";
    }
    write_text(with_suffix(a.output, tag + ".edges.csv"), edges_csv);
    write_text(with_suffix(a.output, tag + ".nodes.csv"), nodes_csv);

    json f;
    f["frame"] = k;
    f["nodes"] = g.node_count();
    f["edges"] = g.edge_count();
    if (r.edge_curvature.empty()) {
      f["min"] = nullptr;
      f["p01"] = nullptr;
      f["mean"] = nullptr;
    } else {
      const auto& kv = r.edge_curvature;
      double sum = 0.0;
      for (double v : kv) sum += v;
      f["min"] = *std::min_element(kv.begin(), kv.end());
      f["p01"] = percentile(kv, 1.0);
      f["mean"] = sum / static_cast<double>(kv.size());
    }
    frames.push_back(std::move(f));
    out << "frame " << k << ": " << r.edges.size() << " edges\n";
  }
  summary["frames"] = std::move(frames);
  write_text(a.output, summary.dump(2) + "\n");
  return exit_ok;
}

// ---- rewire ----------------------------------------------------------------

struct RewireArgs {
  std::string input;
  std::string method = "piorf";
  std::string former = "orc";
  std::string latter = "velocity";
  std::string action = "add";
  std::string direction = "bidirectional";
  std::string mode = "per_frame";
  RewireConfig cfg;
  std::string output;
  std::string log;
};

void add_method_params(CLI::App* c, MethodParams& p) {
  c->add_option("--alpha", p.digl_alpha, "DIGL teleport probability");
  c->add_option("--eps", p.digl_eps, "DIGL threshold");
  c->add_option("--sdrf-iterations", p.sdrf_iterations, "SDRF iterations");
  c->add_option("--fosr-initial-power", p.fosr_initial_power, "FoSR initial power rounds");
  c->add_option("--fosr-iterations", p.fosr_iterations, "FoSR iterations");
  c->add_option("--borf-batches", p.borf_batches, "BORF batches");
  c->add_option("--borf-add", p.borf_add_per_batch, "BORF additions per batch");
  c->add_option("--borf-remove", p.borf_remove_per_batch, "BORF removals per batch");
  c->add_option("--budget-seconds", p.budget_seconds, "Wall-time budget for iterative methods (0 = none)")
      ->check(CLI::NonNegativeNumber);
}

void add_rewire(CLI::App& app, RewireArgs& a) {
  auto* c = app.add_subcommand("rewire", "Rewire every frame of a trajectory");
  c->add_option("input", a.input, "Input .mgj file")->required();
  c->add_option("--method", a.method, "piorf|digl|sdrf|fosr|borf");
  c->add_option("--delta", a.cfg.pooling_ratio, "Pooling ratio (fraction of nodes used as sources)");
  c->add_option("--former", a.former, "orc|degree|random");
  c->add_option("--latter", a.latter, "velocity|pressure|random");
  c->add_option("--action", a.action, "add|remove|both");
  c->add_option("--direction", a.direction, "bidirectional|to_senders|to_receivers");
  c->add_flag("--weighted", a.cfg.weighted, "Velocity-difference edge lengths in curvature");
  c->add_option("--seed", a.cfg.seed, "Seed for random selectors");
  c->add_option("--mode", a.mode, "per_frame|first_frame");
  add_method_params(c, a.cfg.params);
  c->add_option("-o,--output", a.output, "Rewired .mgj file")->required();
  c->add_option("--log", a.log, "Edit log JSON")->required();
}

int cmd_rewire(RewireArgs& a, std::ostream& out) {
  a.cfg.method = parse_method(a.method);
  a.cfg.former = parse_former(a.former);
  a.cfg.latter = parse_latter(a.latter);
  a.cfg.action = parse_action(a.action);
  a.cfg.direction = parse_direction(a.direction);
  const TrajectoryMode mode = parse_mode(a.mode);
  validate(a.cfg);

  const Trajectory t = read_trajectory(a.input);
  const std::vector<RewireResult> results = rewire_trajectory(t, a.cfg, mode);
  const EditLog log = make_edit_log(a.cfg, mode, results);
  const Trajectory rewired = replay(t, log);
  write_trajectory(a.output, rewired);
  write_text(a.log, serialize_edit_log(log));
  for (std::size_t k = 0; k < results.size(); ++k) {
    const RewireStats& s = results[k].stats;
    out << "frame " << k << ": added " << s.added << " removed " << s.removed << " seconds "
        << format_double(s.seconds) << (s.timed_out ? " (timed out)" : "") << "\n";
  }
  return exit_ok;
}

// ---- replay ----------------------------------------------------------------

struct ReplayArgs {
  std::string input;
  std::string log;
  std::string output;
};

void add_replay(CLI::App& app, ReplayArgs& a) {
  auto* c = app.add_subcommand("replay", "Apply an edit log to a trajectory");
  c->add_option("input", a.input, "Input .mgj file")->required();
  c->add_option("--log", a.log, "Edit log JSON")->required();
  c->add_option("-o,--output", a.output, "Output .mgj file")->required();
}

int cmd_replay(const ReplayArgs& a, std::ostream& out) {
  const Trajectory t = read_trajectory(a.input);
  const EditLog log = parse_edit_log(read_text(a.log));
  write_trajectory(a.output, replay(t, log));
  out << "wrote " << a.output << "\n";
  return exit_ok;
}

// ---- diagnose --------------------------------------------------------------

struct DiagnoseArgs {
  std::string before;
  std::string after;
  std::string output = "diagnostics.json";
  std::size_t frame = 0;
  bool weighted = false;
  bool skip_resistance = false;
};

void add_diagnose(CLI::App& app, DiagnoseArgs& a) {
  auto* c = app.add_subcommand("diagnose", "Structural diagnostics of one graph or a before/after pair");
  c->add_option("before", a.before, "Input .mgj file")->required();
  c->add_option("after", a.after, "Rewired .mgj file to compare against");
  c->add_option("--out", a.output, "JSON report; histogram CSV is written next to it");
  c->add_option("--frame", a.frame, "Frame to analyse");
  c->add_flag("--weighted", a.weighted, "Velocity-difference edge lengths in curvature");
  c->add_flag("--skip-resistance", a.skip_resistance,
              "Do not compute total effective resistance (disconnected graphs only warn)");
}

json report_json(const DiagnosticsReport& r) {
  json j;
  j["node_count"] = r.node_count;
  j["edge_count"] = r.edge_count;
  j["connected"] = r.connected;
  j["component_count"] = r.component_count;
  j["total_effective_resistance"] =
      r.total_effective_resistance ? optional_number(*r.total_effective_resistance) : json(nullptr);
  j["min_edge_curvature"] = r.min_edge_curvature;
  j["p01_edge_curvature"] = r.p01_edge_curvature;
  j["mean_edge_curvature"] = r.mean_edge_curvature;
  j["orc_degree_pearson"] = optional_number(r.orc_degree_pearson);
  json deg = json::object();
  for (const auto& [d, count] : r.degree_histogram) deg[std::to_string(d)] = count;
  j["degree_histogram"] = std::move(deg);
  j["curvature_histogram"] = {{"bin_edges", r.curvature_histogram.bin_edges},
                              {"counts", r.curvature_histogram.counts}};
  return j;
}

json delta_json(const DiagnosticsDelta& d) {
  json j;
  j["total_effective_resistance"] =
      d.total_effective_resistance ? optional_number(*d.total_effective_resistance) : json(nullptr);
  j["min_edge_curvature"] = d.min_edge_curvature;
  j["p01_edge_curvature"] = d.p01_edge_curvature;
  j["mean_edge_curvature"] = d.mean_edge_curvature;
  j["orc_degree_pearson"] = optional_number(d.orc_degree_pearson);
  j["edge_count"] = d.edge_count;
  j["component_count"] = d.component_count;
  return j;
}

const MeshGraph& pick_frame(const Trajectory& t, std::size_t frame, const std::string& name) {
  if (frame >= t.frames.size()) {
    throw InvalidInput(name + ": frame " + std::to_string(frame) + " out of range");
  }
  return t.frames[frame];
}

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out, std::ostream& err) {
  const Trajectory tb = read_trajectory(a.before);
  const MeshGraph& before = pick_frame(tb, a.frame, a.before);
  std::optional<Trajectory> ta;
  if (!a.after.empty()) ta = read_trajectory(a.after);
  const MeshGraph* after = ta ? &pick_frame(*ta, a.frame, a.after) : nullptr;

  for (const MeshGraph* g : {&before, after}) {
    if (g == nullptr || is_connected(*g)) continue;
    const std::string& name = g == &before ? a.before : a.after;
    if (!a.skip_resistance) {
      throw Disconnected(name + ": graph is disconnected; total effective resistance is infinite");
    }
    err << "warning: " << name << ": graph is disconnected\n";
  }

  DiagnosticsOptions opts;
  opts.resistance = !a.skip_resistance;
  opts.weighted = a.weighted;

  json doc;
  std::string hist = "bin_lo,bin_hi,";
  if (after != nullptr) {
    const Comparison c = compare(before, *after, opts);
    doc["before"] = report_json(c.before);
    doc["after"] = report_json(c.after);
    doc["delta"] = delta_json(c.delta);
    hist += "before,after\n";
    const Histogram& hb = c.before.curvature_histogram;
    const Histogram& ha = c.after.curvature_histogram;
    for (std::size_t b = 0; b < hb.counts.size(); ++b) {
      hist += format_double(hb.bin_edges[b]) + "," + format_double(hb.bin_edges[b + 1]) + "," +
              std::to_string(hb.counts[b]) + "," + std::to_string(ha.counts[b]) + "\n";
    }
    if (c.delta.total_effective_resistance) {
      out << "total effective resistance: " << format_double(*c.before.total_effective_resistance) << " -> "
          << format_double(*c.after.total_effective_resistance) << "\n";
    }
    out << "min edge curvature: " << format_double(c.before.min_edge_curvature) << " -> "
        << format_double(c.after.min_edge_curvature) << "\n";
  } else {
    const DiagnosticsReport r = diagnose(before, opts);
    doc["before"] = report_json(r);
    hist += "count\n";
    const Histogram& h = r.curvature_histogram;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      hist += format_double(h.bin_edges[b]) + "," + format_double(h.bin_edges[b + 1]) + "," +
              std::to_string(h.counts[b]) + "\n";
    }
    if (r.total_effective_resistance) {
      out << "total effective resistance: " << format_double(*r.total_effective_resistance) << "\n";
    }
    out << "min edge curvature: " << format_double(r.min_edge_curvature) << "\n";
  }
  write_text(a.output, doc.dump(2) + "\n");
  write_text(with_suffix(a.output, ".hist.csv"), hist);
  return exit_ok;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string input;
  std::string methods = "piorf,sdrf,fosr,borf";
  std::string edge_counts = "16,32,64,128,256";
  std::size_t reps = 3;
  std::size_t frame = 0;
  std::string output = "timings.csv";
};

void add_bench(CLI::App& app, BenchArgs& a) {
  auto* c = app.add_subcommand("bench", "Rewiring wall time versus number of added edges");
  c->add_option("input", a.input, "Input .mgj file")->required();
  c->add_option("--methods", a.methods, "Comma-separated methods");
  c->add_option("--edge-counts", a.edge_counts, "Comma-separated edge budgets");
  c->add_option("--reps", a.reps, "Repetitions per point (median is reported)")->check(CLI::Range(3, 1000));
  c->add_option("--frame", a.frame, "Frame to benchmark on");
  c->add_option("--out", a.output, "Output CSV");
}

// Maps an edge budget onto the method's native knob.
RewireConfig budget_config(Method m, std::size_t edges, std::size_t nodes) {
  RewireConfig cfg;
  cfg.method = m;
  switch (m) {
    case Method::piorf:
      // floor(delta |V|) == edges; the half keeps the product clear of rounding.
      cfg.pooling_ratio = (static_cast<double>(edges) + 0.5) / static_cast<double>(nodes);
      break;
    case Method::sdrf:
      cfg.params.sdrf_iterations = edges;
      break;
    case Method::fosr:
      cfg.params.fosr_iterations = edges;
      break;
    case Method::borf:
      cfg.params.borf_batches = (edges + cfg.params.borf_add_per_batch - 1) / cfg.params.borf_add_per_batch;
      break;
    case Method::digl:
      break;
  }
  return cfg;
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<Method> methods;
  for (const std::string& name : split_list(a.methods)) {
    const Method m = parse_method(name);
    if (m == Method::digl) {
      err << "note: digl excluded; its threshold does not budget edge counts\n";
      continue;
    }
    methods.push_back(m);
  }
  std::vector<std::size_t> counts;
  for (const std::string& item : split_list(a.edge_counts)) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || v == 0) {
      throw InvalidInput("--edge-counts: '" + item + "' is not a positive integer");
    }
    counts.push_back(v);
  }

  std::string csv = "method,edges_added,seconds\n";
  if (!methods.empty() && !counts.empty()) {
    const Trajectory t = read_trajectory(a.input);
    const MeshGraph& g = pick_frame(t, a.frame, a.input);
    for (Method m : methods) {
      for (std::size_t edges : counts) {
        const RewireConfig cfg = budget_config(m, edges, g.node_count());
        validate(cfg);
        std::vector<double> times;
        for (std::size_t r = 0; r < a.reps; ++r) {
          const auto start = std::chrono::steady_clock::now();
          const RewireResult res = rewire(g, cfg);
          times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        }
        std::sort(times.begin(), times.end());
        const double median = times.size() % 2 == 1
                                  ? times[times.size() / 2]
                                  : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
        csv += std::string(to_string(m)) + "," + std::to_string(edges) + "," + format_double(median) + "\n";
        out << to_string(m) << " " << edges << " edges: " << format_double(median) << " s\n";
      }
    }
  }
  write_text(a.output, csv);
  return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ollivier-Ricci rewiring of simulation meshes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ricci 1.0");

  GenArgs gen;
  CurvatureArgs curv;
  RewireArgs rew;
  ReplayArgs rep;
  DiagnoseArgs diag;
  BenchArgs bench;
  add_gen(app, gen);
  add_curvature(app, curv);
  add_rewire(app, rew);
  add_replay(app, rep);
  add_diagnose(app, diag);
  add_bench(app, bench);

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());  // CLI11 consumes the vector from the back
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "gen") return cmd_gen(gen, out);
    if (name == "curvature") return cmd_curvature(curv, out);
    if (name == "rewire") return cmd_rewire(rew, out);
    if (name == "replay") return cmd_replay(rep, out);
    if (name == "diagnose") return cmd_diagnose(diag, out, err);
    if (name == "bench") return cmd_bench(bench, out, err);
  } catch (const TransportError& e) {
    err << "error: " << e.what() << "\n";
    return exit_curvature;
  } catch (const MissingField& e) {
    err << "error: " << e.what() << "\n";
    return exit_missing_field;
  } catch (const Disconnected& e) {
    err << "error: " << e.what() << "\n";
    return exit_disconnected;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
  return exit_usage;
}

}  // namespace ricci::cli
