#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "bt/config.hpp"
#include "bt/io.hpp"
#include "bt/run.hpp"

namespace {

int exit_code(bt::ErrorKind kind) {
  switch (kind) {
    case bt::ErrorKind::config: return 2;
    case bt::ErrorKind::numerical: return 3;
    case bt::ErrorKind::io: return 4;
  }
  return 1;
}

void set_log_level() {
  const char* env = std::getenv("BT_LOG");
  if (!env) return;
  const std::string level(env);
  if (level == "error")
    spdlog::set_level(spdlog::level::err);
  else if (level == "warn")
    spdlog::set_level(spdlog::level::warn);
  else if (level == "info")
    spdlog::set_level(spdlog::level::info);
  else if (level == "debug")
    spdlog::set_level(spdlog::level::debug);
  else
    spdlog::warn("ignoring BT_LOG={} (expected error, warn, info or debug)", level);
}

Eigen::VectorXd parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw bt::config_error("cli", "bad coordinate list '" + s + "'");
    }
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void print_stats(const bt::FieldStats& s) {
  std::cout << "min=" << bt::format_double(s.min) << " max=" << bt::format_double(s.max)
            << " neg_nodes=" << s.negative_nodes
            << " neg_volume_fraction=" << bt::format_double(s.negative_volume_fraction) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  // stdout carries command output; diagnostics go to stderr.
  spdlog::set_default_logger(spdlog::stderr_color_mt("bt"));
  set_log_level();
  CLI::App app{"Bound-preserving stabilized advection-reaction solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  app.add_option("--config", config_path, "run configuration file")->option_text("FILE");
  app.add_option("--out", out_dir, "output directory")->option_text("DIR");
  app.add_option("--threads", threads, "worker threads for assembly")->check(CLI::PositiveNumber);

  auto* run_cmd = app.add_subcommand("run", "solve the problem described by --config");
  run_cmd->fallthrough();

  auto* channel_cmd = app.add_subcommand("channel", "solve the built-in power-law channel");
  channel_cmd->fallthrough();
  int nx = 80, ny = 62;
  double jitter = 0.0;
  std::uint32_t seed = 42;
  std::string dc_mode = "none", transform = "upper";
  channel_cmd->add_option("--nx", nx, "cells along x")->check(CLI::Range(2, 100000));
  channel_cmd->add_option("--ny", ny, "cells along y")->check(CLI::Range(2, 100000));
  channel_cmd->add_option("--jitter", jitter, "interior node perturbation, fraction of a cell")->check(CLI::Range(0.0, 0.49));
  channel_cmd->add_option("--seed", seed, "perturbation seed");
  channel_cmd->add_option("--dc", dc_mode, "discontinuity capturing")
      ->check(CLI::IsMember({"none", "iso-lin", "iso-quad", "cwd-lin", "cwd-quad", "codina"}));
  channel_cmd->add_option("--transform", transform, "change of variable")->check(CLI::IsMember({"identity", "upper"}));

  auto* stats_cmd = app.add_subcommand("stats", "field statistics of a VTK solution");
  stats_cmd->fallthrough();
  std::string vtk_path, field = "c";
  stats_cmd->add_option("file", vtk_path, "solution written by run or channel")->required();
  stats_cmd->add_option("--field", field, "point scalar name");

  auto* sample_cmd = app.add_subcommand("sample", "sample a VTK solution along a segment");
  sample_cmd->fallthrough();
  std::string from, to, name = "probe";
  int samples = 101;
  sample_cmd->add_option("file", vtk_path, "solution written by run or channel")->required();
  sample_cmd->add_option("--field", field, "point scalar name");
  sample_cmd->add_option("--from", from, "start point x,y[,z]")->required();
  sample_cmd->add_option("--to", to, "end point x,y[,z]")->required();
  sample_cmd->add_option("-n,--samples", samples, "number of samples")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--name", name, "output is line_<name>.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed() || channel_cmd->parsed()) {
      bt::RunConfig cfg;
      if (run_cmd->parsed()) {
        if (config_path.empty()) throw bt::config_error("cli", "run needs --config");
        cfg = bt::parse_config(config_path);
      } else {
        cfg.channel_nx = nx;
        cfg.channel_ny = ny;
        cfg.channel_jitter = jitter;
        cfg.channel_seed = seed;
        cfg.stress = bt::FieldSource::channel;
        cfg.viscosity = 0.35;
        cfg.law = {1.0, 2.0, 1.0};
        cfg.transform = transform == "identity" ? bt::TransformKind::identity : bt::TransformKind::upper_bound;
        if (dc_mode != "none") {
          const auto dash = dc_mode.find('-');
          const auto op = dc_mode.substr(0, dash);
          cfg.dc.op = dc_mode == "codina" ? bt::DcOperator::cwd_physical
                      : op == "iso"       ? bt::DcOperator::isotropic
                                          : bt::DcOperator::cwd_reference;
          cfg.dc.diffusivity = dc_mode == "codina"            ? bt::DcDiffusivity::codina
                               : dc_mode.substr(dash + 1) == "lin" ? bt::DcDiffusivity::dc_lin
                                                                   : bt::DcDiffusivity::dc_quad;
        }
        cfg.probes.push_back({"upper_outflow", {2.0, 0.5}, {2.0, 0.62}, 121});
        cfg.probes.push_back({"wall", {0.0, 0.0}, {2.0, 0.0}, 201});
      }
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (threads > 0) cfg.solver.threads = threads;
      const auto summary = bt::run(cfg);
      print_stats(summary.stats);
      for (const auto& p : summary.written) spdlog::info("wrote {}", p.string());
      return 0;
    }

    const auto data = bt::read_vtk(vtk_path);
    const auto& values = data.scalar(field);
    if (stats_cmd->parsed()) {
      const auto s = bt::field_stats(data.mesh, values);
      print_stats(s);
      if (!out_dir.empty())
        bt::write_key_values(std::filesystem::path(out_dir) / "stats.csv",
                             {{"num_nodes", data.mesh.num_nodes()},
                              {"num_elements", data.mesh.num_elements()},
                              {"min", s.min},
                              {"max", s.max},
                              {"negative_nodes", s.negative_nodes},
                              {"negative_volume_fraction", s.negative_volume_fraction}});
      return 0;
    }
    const auto line = bt::sample_line(data.mesh, values, parse_point(from), parse_point(to), samples);
    const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(out_dir);
    bt::write_line_csv(dir / ("line_" + name + ".csv"), line);
    return 0;
  } catch (const bt::Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
