#include "aug3d/error.hpp"

#include <atomic>
#include <iostream>

namespace aug3d {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Reference: return "reference error";
    case ErrorKind::EmptyModel: return "empty model";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Truncation: return "truncation error";
    case ErrorKind::EmptyInput: return "empty input";
    case ErrorKind::InsufficientViews: return "insufficient views";
    case ErrorKind::EmptyResult: return "empty result";
    case ErrorKind::DegenerateFit: return "degenerate fit";
    case ErrorKind::EmptyRequest: return "empty request";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Placement: return "placement error";
    case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& what, std::size_t line) {
  std::string msg(to_string(kind));
  if (line > 0) msg += " at line " + std::to_string(line);
  msg += ": ";
  msg += what;
  return msg;
}

void stderr_sink(std::string_view message) { std::cerr << "warning: " << message << '\n'; }

std::atomic<WarningSink> g_sink{&stderr_sink};

}  // namespace

Error::Error(ErrorKind kind, const std::string& what, std::size_t line)
    : std::runtime_error(format_message(kind, what, line)), kind_(kind), line_(line) {}

void set_warning_sink(WarningSink sink) noexcept { g_sink.store(sink ? sink : &stderr_sink); }

void warn(std::string_view message) { g_sink.load()(message); }

}  // namespace aug3d
