#pragma once

#include <stdexcept>
#include <string>

namespace degloc {

// Exit-code aligned error classes.
enum class ErrorKind { Schema = 2, Math = 3, Universality = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
  ErrorKind kind() const { return kind_; }
  const char* kind_name() const {
    switch (kind_) {
      case ErrorKind::Schema: return "schema";
      case ErrorKind::Math: return "math";
      case ErrorKind::Universality: return "universality";
    }
    return "unknown";
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void schema_error(const std::string& s) { throw Error(ErrorKind::Schema, s); }
[[noreturn]] inline void math_error(const std::string& s) { throw Error(ErrorKind::Math, s); }

}  // namespace degloc
