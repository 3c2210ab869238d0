#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wpsenv::cli {

enum Exit : int { kOk = 0, kValidation = 1, kNetwork = 2, kRemoteFault = 3 };

/// Runs one command line. Everything except `serve` talks to the server over
/// REST only. `env` resolves WPSENV_SERVER / WPSENV_TOKEN fallbacks.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const char* (*env)(const char*) = nullptr);

}  // namespace wpsenv::cli
