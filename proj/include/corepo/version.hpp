#pragma once

namespace corepo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace corepo
