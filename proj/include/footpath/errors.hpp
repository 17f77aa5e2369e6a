#pragma once

#include <stdexcept>
#include <string>

namespace footpath {

// Every failure the library raises derives from Error. The CLI maps each
// concrete type onto a stable process exit code (see exit_code_for).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or values outside a type's valid range.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid rings, off-lattice coordinates, unusable geometry input.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Network failure that persisted through all retries.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Tile server answered with a non-200 status.
class ServerError : public Error {
 public:
  ServerError(int status, const std::string& url)
      : Error("server returned HTTP " + std::to_string(status) + " for " + url), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

// Undecodable image data or unexpected raster dimensions.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A required input (file, directory, mask tree) does not exist.
class MissingInputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace footpath
