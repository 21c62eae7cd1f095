#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace doomsday::cli {

/// Fixture directory: $DOOMSDAY_DATA_DIR if set, else the bundled data/.
std::filesystem::path data_dir();

/// Runs one command line (without the program name). Reports go to `out`
/// unless --output is given; failures write a JSON error record to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace doomsday::cli
