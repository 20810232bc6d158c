#pragma once

#include <string>
#include <string_view>

#include "aepn/net.hpp"

namespace aepn {

// JSON net documents. Throws SchemaError with a dotted path for structural
// problems and ParseError (prefixed with the path) for bad inscriptions.
// Semantic checks are left to validate_net.
AEPNet load_net(std::string_view document);
// Throws IoError when the file cannot be read.
AEPNet load_net_file(const std::string& path);
// Pretty-printed document; load_net(save_net(n)) == n.
std::string save_net(const AEPNet& net);

}  // namespace aepn
