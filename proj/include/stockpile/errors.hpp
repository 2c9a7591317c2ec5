#pragma once

#include <stdexcept>
#include <string>

namespace stockpile {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fewer than three distinct points, or all points collinear.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class NotConvex : public Error {
 public:
  using Error::Error;
};

class InvalidPolygon : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace stockpile
