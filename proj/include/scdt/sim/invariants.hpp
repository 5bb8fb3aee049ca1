#pragma once

#include <string>
#include <vector>

#include "scdt/sim/params.hpp"
#include "scdt/sim/trace.hpp"

namespace scdt::sim {

/// Checks conservation, buffer limits, blocking, FCFS, halted stages and
/// record shape. Returns one message per violation; empty means clean.
std::vector<std::string> check_invariants(const ReplicationTrace& trace, const SimParams& params);

}  // namespace scdt::sim
