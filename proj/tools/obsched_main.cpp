// Command-line front end: run one scenario, sweep an axis, trace a two-user
// rate region, or self-verify the library.
//
// Exit codes: 0 success, 1 usage error, 2 configuration or I/O error,
// 3 verification failure.

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "obsched/obsched.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<long> slots;
};

obsched::SimConfig load_config(const CommonOptions& options) {
  obsched::SimConfig config = obsched::parse_config_file(options.config_path);
  for (const std::string& assignment : options.overrides)
    obsched::apply_override(config, assignment);
  if (options.seed) config.seed = *options.seed;
  if (options.slots) config.n_slots = *options.slots;
  config.validate();
  return config;
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" + out_dir +
                             "': " + ec.message());
  return dir;
}

void add_common(CLI::App* cmd, CommonOptions& options) {
  cmd->add_option("--config", options.config_path, "scenario config file")
      ->required();
  cmd->add_option("--out", options.out_dir, "output directory");
  cmd->add_option("--set", options.overrides,
                  "override a config key (key=value, repeatable)");
  cmd->add_option("--seed", options.seed, "override the run seed");
  cmd->add_option("--slots", options.slots, "override the slot count");
}

int command_run(const CommonOptions& options) {
  const obsched::SimConfig config = load_config(options);
  const auto dir = prepare_out_dir(options.out_dir);

  std::ofstream channel_out;
  obsched::ChannelSink sink;
  if (config.channel_trace) {
    channel_out = obsched::open_output((dir / "channel_trace.csv").string());
    obsched::write_channel_header(channel_out);
    sink = [&channel_out](const obsched::ChannelRealization& channel) {
      obsched::write_channel_rows(channel_out, channel);
    };
  }

  const obsched::TraceLog log = obsched::run(config, sink);
  auto trace = obsched::open_output((dir / "trace.csv").string());
  obsched::write_trace_csv(trace, log);
  auto summary = obsched::open_output((dir / "summary.json").string());
  obsched::write_summary_json(summary, log);

  if (log.summary.slots > 0) {
    std::cout << "slots " << log.summary.slots << "  mean sum rate "
              << log.summary.mean_sum_rate << " bit/slot  mean power "
              << log.summary.mean_total_power << " W\n";
  } else {
    std::cout << "empty run: trace has no rows, summary written\n";
  }
  std::cout << "wrote " << (dir / "trace.csv").string() << " and "
            << (dir / "summary.json").string() << "\n";
  return 0;
}

int command_sweep(const CommonOptions& options, const std::string& axis_name,
                  const std::vector<double>& values) {
  const obsched::SimConfig base = load_config(options);
  obsched::SweepAxis axis;
  if (axis_name == "K") axis = obsched::SweepAxis::users;
  else if (axis_name == "t") axis = obsched::SweepAxis::antennas;
  else if (axis_name == "tbar") axis = obsched::SweepAxis::active_beams;
  else if (axis_name == "snr") axis = obsched::SweepAxis::snr;
  else throw obsched::ConfigError("unknown sweep axis '" + axis_name + "'");

  const auto points = obsched::sweep(base, axis, values);
  const auto dir = prepare_out_dir(options.out_dir);
  auto csv = obsched::open_output((dir / "sweep.csv").string());
  obsched::write_sweep_csv(csv, axis, points);
  auto json_out = obsched::open_output((dir / "sweep.json").string());
  json_out << obsched::sweep_to_json(axis, points).dump(2) << '\n';

  for (const auto& point : points)
    std::cout << obsched::to_string(axis) << " = " << point.value
              << ": mean sum rate " << point.summary.mean_sum_rate
              << " bit/slot\n";
  std::cout << "wrote " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int command_rate_region(const CommonOptions& options,
                        const std::vector<double>& phi1_values) {
  const obsched::SimConfig base = load_config(options);
  std::vector<std::array<double, 2>> pairs;
  pairs.reserve(phi1_values.size());
  for (double phi1 : phi1_values) pairs.push_back({phi1, 1.0 - phi1});

  const auto region = obsched::rate_region(base, pairs);
  const auto dir = prepare_out_dir(options.out_dir);
  auto csv = obsched::open_output((dir / "rate_region.csv").string());
  obsched::write_rate_region_csv(csv, pairs, region);

  for (std::size_t i = 0; i < region.size(); ++i)
    std::cout << "phi = (" << pairs[i][0] << ", " << pairs[i][1] << "): R = ("
              << region[i][0] << ", " << region[i][1] << ") bit/slot\n";
  std::cout << "wrote " << (dir / "rate_region.csv").string() << "\n";
  return 0;
}

int command_verify(std::uint64_t seed) {
  const auto results = obsched::run_verification(seed);
  bool all_pass = true;
  for (const auto& result : results) {
    std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << result.name << ": "
              << result.detail << "\n";
    all_pass &= result.pass;
  }
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opportunistic multi-beam downlink scheduling simulator"};
  app.require_subcommand(1);

  CommonOptions run_options;
  CLI::App* run_cmd = app.add_subcommand("run", "simulate one scenario");
  add_common(run_cmd, run_options);

  CommonOptions sweep_options;
  std::string axis_name;
  std::vector<double> axis_values;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "simulate a scenario across one axis");
  add_common(sweep_cmd, sweep_options);
  sweep_cmd->add_option("--axis", axis_name, "axis: K, t, tbar, or snr")
      ->required();
  sweep_cmd->add_option("--values", axis_values, "axis values")
      ->required()
      ->delimiter(',');

  CommonOptions region_options;
  std::vector<double> phi1_values;
  CLI::App* region_cmd = app.add_subcommand(
      "rate-region", "trace the two-user balanced rate region");
  add_common(region_cmd, region_options);
  region_cmd
      ->add_option("--phi1", phi1_values,
                   "first-user target fractions (phi2 = 1 - phi1)")
      ->required()
      ->delimiter(',');

  std::uint64_t verify_seed = 1;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run library self-checks");
  verify_cmd->add_option("--seed", verify_seed, "self-check seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 1;
  }

  try {
    if (run_cmd->parsed()) return command_run(run_options);
    if (sweep_cmd->parsed()) return command_sweep(sweep_options, axis_name, axis_values);
    if (region_cmd->parsed()) return command_rate_region(region_options, phi1_values);
    if (verify_cmd->parsed()) return command_verify(verify_seed);
  } catch (const obsched::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
