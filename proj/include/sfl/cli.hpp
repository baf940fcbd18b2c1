#pragma once

namespace sfl {

/// Entry point shared by the sflcut binary and the in-process CLI tests.
/// Returns one of the kExit* codes.
int run_cli(int argc, const char* const* argv);

}  // namespace sfl
