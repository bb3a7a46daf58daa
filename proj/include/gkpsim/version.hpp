#pragma once

namespace gkpsim {
inline constexpr const char* version_string = "gkpsim 0.1.0";
}
