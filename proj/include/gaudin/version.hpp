#pragma once

#define GAUDIN_VERSION "0.3.0"

namespace gaudin {
inline constexpr const char* library_version = GAUDIN_VERSION;
}
