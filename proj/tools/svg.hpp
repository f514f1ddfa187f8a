#pragma once

#include <string>
#include <vector>

#include "dfpp/bench.hpp"

namespace dfpp::cli {

/// Line chart of data-profile curves: alpha on [0, 100], fraction on [0, 1],
/// one polyline per curve and a legend.
std::string render_profile_svg(const std::vector<ProfileCurve>& curves, const std::string& title);

}  // namespace dfpp::cli
