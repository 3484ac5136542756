#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rankstrat/core.hpp"
#include "rankstrat/dtree.hpp"
#include "rankstrat/io.hpp"

namespace rankstrat::cli {

enum class Command { Validate, Eda, Train, Eval, Strategy, WhatIf, Export, Serve };

struct RunConfig {
  Command command = Command::Train;
  std::string input;
  std::optional<std::string> test;
  std::string out_dir = "out";
  std::string criterion = "ig";
  int max_depth = 5;
  int min_leaf = 1;
  int classes = 4;
  /// Unset: no-perception for training, full for score validation.
  std::optional<std::string> weights;
  int band_size = 10;
  int target_class = 1;
  std::optional<std::string> subject;
  std::string depths = "1-10";
  std::optional<int> year;
  std::optional<int> test_year;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> ui_dir;

  /// Checks numeric ranges and that input files exist. Throws ConfigError /
  /// IoError.
  void validate() const;
};

/// "1-10", "3,5,7" or a mix such as "1-3,8".
std::vector<int> parse_depths(const std::string& text);

/// Year from --year, else the first 4-digit 19xx/20xx run in the file name.
int infer_year(const std::string& path, std::optional<int> explicit_year);

// Each command writes its artifacts under config.out_dir atomically.
void cmd_validate(const RunConfig& config);
void cmd_eda(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_eval(const RunConfig& config);
void cmd_strategy(const RunConfig& config);
/// Returns the single-line JSON result (also printed by run()).
std::string cmd_whatif(const RunConfig& config);
void cmd_export(const RunConfig& config);
/// Blocks until the process is interrupted.
void cmd_serve(const RunConfig& config);

/// The full bundle document written by cmd_export.
Json build_bundle(const RunConfig& config);

/// Parses argv and runs one command. Errors go to `err` as a single-line
/// JSON object {"error": kind, "message": text}; the return value is the
/// process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rankstrat::cli
