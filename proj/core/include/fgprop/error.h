#ifndef FGPROP_ERROR_H_
#define FGPROP_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fgprop {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the file name and 1-based line number
// (0 when the error is not tied to a line).
class FormatError : public Error {
 public:
  FormatError(std::string file, std::size_t line, const std::string &what)
      : Error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) +
              ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string &file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace fgprop

#endif  // FGPROP_ERROR_H_
