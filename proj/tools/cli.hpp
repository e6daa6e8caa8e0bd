#pragma once
// Command-line front end. Subcommands: validate, score, analyze, featurize,
// train, evaluate, report, synth. Exit codes: 0 ok, 1 validation failure,
// 2 usage error.

#include <string>
#include <vector>

namespace teamflow::cli {

int run(const std::vector<std::string>& args);

} // namespace teamflow::cli
