#pragma once

#include <string>

#include "netscan/elaborate.hpp"

namespace netscan {

/// Emit an elaborated (flat) design back into the accepted Verilog subset as
/// a single module. Hierarchical names are mangled ('.' -> "__", made unique);
/// re-parsing the emitted text yields a DFG isomorphic to the original.
std::string emit_verilog(const ElaboratedDesign& design, const std::string& module_name = "flat");

}  // namespace netscan
