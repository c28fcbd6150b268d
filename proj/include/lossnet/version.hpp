#pragma once

namespace lossnet {

inline constexpr const char* kVersion = "0.1.0";

} // namespace lossnet
