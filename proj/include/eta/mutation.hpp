#pragma once

#include <string>

namespace eta::mut {

// Single active mutation, set only by the mutation-sensitivity harness.
// Every hook sits on a sign or coefficient that some registry case must
// notice; production runs keep this empty.
inline std::string g_active;

inline bool on(const char* name) { return g_active == name; }
inline void set(const std::string& name) { g_active = name; }
inline void clear() { g_active.clear(); }

inline int flip(const char* name) { return on(name) ? -1 : 1; }

}  // namespace eta::mut
