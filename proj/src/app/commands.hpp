#pragma once

#include <string>
#include <vector>

#include "io.hpp"
#include "schottky.hpp"

namespace sforge::app {

/// Outcome of one command. Exit codes: 0 success, 1 precondition or validation, 2 parse,
/// 3 non-convergence, 4 verification failure.
struct CommandResult {
  int exit_code = 0;
  std::string report;   // JSON document
  std::string summary;  // human-readable lines
  std::vector<std::string> files;
};

CommandResult cmd_validate(const RelativeSchottkySet& s);
CommandResult cmd_reroute(const RelativeSchottkySet& s, const Polyline& curve, const io::RunConfig& cfg, bool svg);
CommandResult cmd_modulus(const RelativeSchottkySet& s, const std::string& e_spec, const std::string& f_spec,
                          bool transboundary, const io::RunConfig& cfg);
/// Empty sequence runs the full scene once.
CommandResult cmd_uniformize(const RelativeSchottkySet& s, const std::vector<int>& sequence, const io::RunConfig& cfg);

/// Fault injections for the verification suite.
enum class Fault { None, Expand };
Fault parse_fault(const std::string& name);

CommandResult cmd_verify(const RelativeSchottkySet& s, const io::RunConfig& cfg, Fault fault = Fault::None);

}  // namespace sforge::app
