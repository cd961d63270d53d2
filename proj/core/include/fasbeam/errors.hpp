#pragma once

#include <stdexcept>
#include <string>

namespace fasbeam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid scenario or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside an operation's domain (non-positive distance, mismatched
// shapes between channels and beams, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Port index outside [0, L).
class SelectionError : public Error {
 public:
  using Error::Error;
};

// Tensor shapes incompatible with an autodiff operator.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Model file is unreadable, corrupt, or does not match the expected network.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

}  // namespace fasbeam
