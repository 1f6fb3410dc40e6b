#pragma once

#include <ostream>

namespace xmdl {

// Runs the full desk-scale reproduction suite, printing one pass/fail line
// per criterion. Returns 0 when everything passes, 1 on any failure, 2 when
// the only problems are inconclusive numerical verdicts.
int run_reproduce(std::ostream& out);

}  // namespace xmdl
