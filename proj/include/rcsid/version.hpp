#pragma once

namespace rcsid {
inline constexpr const char* version = "0.1.0";
}
