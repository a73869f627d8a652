#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "prism/error.hpp"
#include "prism/graph.hpp"
#include "prism/structure.hpp"

namespace prism::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kInternalError = 2 };

struct UsageError : Error {
  using Error::Error;
};

/// Runs one subcommand. args excludes the program name:
///   build-graphs | train | evaluate | check-invariance | fusion-report | generate-data
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv);

/// {"id","kind","num_nodes","edges":[[src,dst,n1,n2,n3,dx,dy,dz],...]}.
/// Multiscale edges carry no geometry and are written as [src,dst,0,0,0].
std::string graph_to_json_line(const std::string& id, const PeriodicGraph& g);

}  // namespace prism::cli
