#ifndef SGUR_VERSION_HPP
#define SGUR_VERSION_HPP

namespace sgur {

inline constexpr const char* kVersion = "0.1.0";

}

#endif
