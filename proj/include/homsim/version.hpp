#pragma once

namespace homsim {

inline constexpr const char *version_string = "hom-sim 0.1.0";

}  // namespace homsim
