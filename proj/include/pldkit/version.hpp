#pragma once

namespace pldkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pldkit
