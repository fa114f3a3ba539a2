#pragma once

namespace kinkasym {
inline constexpr const char* kVersion = "0.1.0";
}
