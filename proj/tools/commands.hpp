#pragma once

#include "run_config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chromainv::cli {

/// Echo of the invocation written into every output directory.
struct Invocation {
  std::string command;
  std::vector<std::string> args;
};

struct GenerateArgs {
  std::filesystem::path out;
  bool plot_data = false;
};
void cmd_generate(const RunConfig& cfg, const GenerateArgs& args, const Invocation& inv);

struct SimulateArgs {
  std::filesystem::path out;
  std::vector<double> params;
  std::vector<double> injection;
};
void cmd_simulate(const RunConfig& cfg, const SimulateArgs& args, const Invocation& inv);

struct TrainArgs {
  std::filesystem::path data;
  std::filesystem::path out;
  int augment_shift = 0;
};
void cmd_train(const RunConfig& cfg, const TrainArgs& args, const Invocation& inv);

struct EvaluateArgs {
  std::filesystem::path model;
  std::filesystem::path data;
  std::filesystem::path out;
  std::string subset = "auto";
  std::optional<std::string> noise;
  bool regrid = false;
};
void cmd_evaluate(const RunConfig& cfg, const EvaluateArgs& args, const Invocation& inv);

struct PredictArgs {
  std::filesystem::path model;
  std::filesystem::path chromatogram;
  std::vector<double> injection;
  std::optional<std::filesystem::path> out;
};
void cmd_predict(const RunConfig& cfg, const PredictArgs& args);

struct VariationalArgs {
  std::vector<std::string> observations;
  std::filesystem::path out;
  int fit_cells = 100;
  std::string alphas = "1e-8:1e-4:5";
};
void cmd_fit_variational(const RunConfig& cfg, const VariationalArgs& args, const Invocation& inv);
void cmd_alpha_sweep(const RunConfig& cfg, const VariationalArgs& args, const Invocation& inv);

struct DataArgs {
  std::filesystem::path data;
  std::filesystem::path out;
};
void cmd_cross_validate(const RunConfig& cfg, const DataArgs& args, const Invocation& inv);
void cmd_grid_search(const RunConfig& cfg, const DataArgs& args, const Invocation& inv);

} // namespace chromainv::cli
