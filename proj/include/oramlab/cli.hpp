#pragma once

#include <iosfwd>

#include "oramlab/config_file.hpp"
#include "oramlab/construction.hpp"
#include "oramlab/praxen.hpp"

namespace oramlab::cli {

/// Entry point of the `oramlab` tool. Diagnostics go to `err`; returns the
/// process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Keys accepted by the config file of a subcommand (run, distinguish,
/// stash-analyze, praxen-sim).
std::vector<std::string> schema_for(std::string_view command);

// Builders shared by the subcommands and the Python bindings. `base` resolves
// relative file paths.
OramConfig oram_from(const ConfigFile& cfg);
RecursionConfig recursion_from(const ConfigFile& cfg);
BogusConfig bogus_from(const ConfigFile& cfg);
TraceInput input_from(const ConfigFile& cfg, const std::string& prefix, const std::filesystem::path& base);
WorkloadSpec workload_from(const ConfigFile& cfg, const std::string& prefix);
std::shared_ptr<Construction> construction_from(const ConfigFile& cfg);
std::pair<praxen::PraxenConfig, std::vector<praxen::ThreadSpec>> praxen_from(const ConfigFile& cfg);

/// Ledger bits per thread recomputed from a decisions CSV.
std::vector<double> ledger_from_decisions(std::istream& in);

}  // namespace oramlab::cli
