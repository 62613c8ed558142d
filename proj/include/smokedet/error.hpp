#pragma once

#include <stdexcept>
#include <string>

namespace smokedet {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (bad magic, dimension change mid-stream).
class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller violated an operation's precondition (shape mismatch, too-small input).
class ContractError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class UnsupportedKernel : public Error {
 public:
  explicit UnsupportedKernel(const std::string& name)
      : Error("unsupported texture kernel: " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace smokedet
