#pragma once

namespace graspkit {

// Keep in sync with the project() version in CMakeLists.txt and
// pyproject.toml; stamped into record provenance and --version output.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace graspkit
