#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace diqrng {

enum class ErrorKind {
  Parameter,    // argument outside its documented range
  Domain,       // numeric function evaluated outside its domain
  Format,       // malformed file or config
  Validation,   // well-formed input that fails a semantic check
  Convergence,  // iterative solver did not reach tolerance
  Unsupported,  // request outside what the toolkit models
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace diqrng
