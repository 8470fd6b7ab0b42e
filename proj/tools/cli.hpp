#pragma once

#include <iosfwd>

namespace thermvisc {

// Exit codes: 0 success, 1 check failure or halted run, 2 usage or input error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thermvisc
