#ifndef MUBSA_VERSION_HPP
#define MUBSA_VERSION_HPP

#include <string_view>

namespace mubsa {

inline constexpr std::string_view kVersion = "0.1.0";

} // namespace mubsa

#endif // MUBSA_VERSION_HPP
