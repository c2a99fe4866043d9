#ifndef BSPEC_VERSION_HPP
#define BSPEC_VERSION_HPP

namespace bspec {

inline constexpr const char* tool_name = "bspec";
inline constexpr const char* tool_version = "0.1.0";

}

#endif
