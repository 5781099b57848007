#pragma once

namespace fuzzyburst {
inline constexpr const char* kVersion = "0.1.0";
} // namespace fuzzyburst
