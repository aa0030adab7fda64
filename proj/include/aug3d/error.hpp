#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aug3d {

enum class ErrorKind {
  Parse,
  Reference,
  EmptyModel,
  Format,
  Truncation,
  EmptyInput,
  InsufficientViews,
  EmptyResult,
  DegenerateFit,
  EmptyRequest,
  InvalidArgument,
  Placement,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// All domain failures surface as this exception. `line()` is 1-based and
// only meaningful for Parse errors (0 otherwise).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::size_t line = 0);

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::size_t line_;
};

// Non-fatal conditions (degenerate inputs that still produce a result) go
// through here. The default sink writes to stderr.
using WarningSink = void (*)(std::string_view message);
void set_warning_sink(WarningSink sink) noexcept;
void warn(std::string_view message);

}  // namespace aug3d
