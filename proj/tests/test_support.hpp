#pragma once

#include <functional>
#include <string>

#include "isofree/error.hpp"

namespace test_support {

// True when f throws an isofree::Error with the given code.
inline bool raises(isofree::ErrorCode code, const std::function<void()>& f) {
  try {
    f();
  } catch (const isofree::Error& e) {
    return e.code() == code;
  }
  return false;
}

inline std::string error_path(const std::function<void()>& f) {
  try {
    f();
  } catch (const isofree::Error& e) {
    return e.path();
  }
  return "<none>";
}

}  // namespace test_support
