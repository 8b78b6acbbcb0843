#pragma once

namespace glyphflow::app {

// Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.
int cli_main(int argc, char** argv);

}  // namespace glyphflow::app
