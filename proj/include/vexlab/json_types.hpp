#pragma once

#include <json.hpp>

namespace vexlab {

// Insertion-ordered JSON keeps report layout stable and readable.
using Json = nlohmann::ordered_json;

}  // namespace vexlab
