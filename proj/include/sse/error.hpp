#pragma once

#include <stdexcept>
#include <string>

namespace sse {

// All library failures surface as sse::Error with a short, stable message.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sse
