#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ocp/io.hpp"

namespace ocp {

/// Shipped configurations, one per reference experiment.
[[nodiscard]] std::vector<std::string> preset_names();
[[nodiscard]] bool has_preset(std::string_view name);
/// Throws ocp::Error on unknown names.
[[nodiscard]] RunConfig preset(std::string_view name);

}  // namespace ocp
