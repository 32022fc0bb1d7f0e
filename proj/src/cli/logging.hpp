#pragma once

namespace morphkit::cli {

// Stderr logger; MORPHKIT_LOG picks the level (trace, debug, info, warn,
// error, critical, off). Defaults to warn.
void init_logging();

}  // namespace morphkit::cli
