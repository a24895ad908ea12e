#pragma once

#include <stdexcept>
#include <string>

namespace coherency {

// Malformed or inconsistent input data (corpus, relation, filter files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration, detected before any backend traffic.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transport failure or malformed response from an inference backend.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nothing left to evaluate or render.
class EmptyResultError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Cancelled : public std::runtime_error {
 public:
  Cancelled() : std::runtime_error("cancelled") {}
};

}  // namespace coherency
