#pragma once

#include <string>

namespace csal {

// Recoverable events (re-seeded clusters, failed grid cells) go to stderr when verbose.
void set_verbose(bool on);
bool verbose();
void warn(const std::string& message);

}  // namespace csal
