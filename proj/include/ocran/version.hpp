#pragma once

namespace ocran {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ocran
